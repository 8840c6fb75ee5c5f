"""Slepian functions on a latitudinal belt of SO(3).

Builds the block-diagonal concentration matrix from belt integrals of
Wigner d-function products, eigendecomposes each (mu, m) block with a
cyclic Jacobi sweep, and packages the results with the concentration
cutoff partition and the forward/inverse coefficient transforms.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .errors import DegenerateBasisError, ParameterError, ShapeError
from .specfun import (
    FOUR_PI_SQ_INV_SQRT,
    belt_quadrature,
    index_table,
    num_wigner,
    wigner_d_column,
)

CACHE_MAGIC = b"RGSF1"


@dataclass(frozen=True)
class BeltRegion:
    """Latitudinal belt [0, 2pi) x [theta1, theta2] x [0, 2pi) in (alpha, beta, gamma)."""

    theta1: float
    theta2: float

    def __post_init__(self):
        if not (0.0 <= self.theta1 < self.theta2 <= pi):
            raise ParameterError(
                f"belt requires 0 <= theta1 < theta2 <= pi, got [{self.theta1}, {self.theta2}]"
            )

    @property
    def is_full(self) -> bool:
        return self.theta1 == 0.0 and self.theta2 == pi


FULL_SPHERE = BeltRegion(0.0, pi)


@dataclass
class ConcentrationBlock:
    mu: int
    m: int
    n_min: int
    matrix: np.ndarray
    eigenvalues: np.ndarray   # descending
    eigenvectors: np.ndarray  # orthonormal columns, matching order

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def jacobi_eigh(a: np.ndarray, tol: float = 1e-13):
    """Eigendecomposition of a dense symmetric matrix by cyclic Jacobi
    rotations, iterated until the off-diagonal Frobenius norm is <= tol.

    Returns (eigenvalues, eigenvectors) in descending eigenvalue order with
    each eigenvector's largest-magnitude entry made positive.  Ties are
    broken by the row of the eigenvector's first nonzero entry so repeated
    eigenvalues still order deterministically.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(100):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2) * 2.0)
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol / (n * n):
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    w = np.diag(a).copy()
    first_nonzero = [
        int(np.argmax(np.abs(v[:, k]) > 1e-12)) for k in range(n)
    ]
    # descending eigenvalues; values equal up to roundoff form one cluster
    # ordered by the row of the first nonzero eigenvector entry, so repeated
    # eigenvalues (e.g. the full-sphere identity block) sort deterministically
    gap_tol = 1e-11 * max(1.0, float(np.max(np.abs(w))))
    order = sorted(range(n), key=lambda k: -w[k])
    clustered = []
    i = 0
    while i < n:
        j = i + 1
        while j < n and w[order[i]] - w[order[j]] <= gap_tol:
            j += 1
        clustered.extend(sorted(order[i:j], key=lambda k: first_nonzero[k]))
        i = j
    order = clustered
    w = w[order]
    v = v[:, order]
    for k in range(n):
        j = int(np.argmax(np.abs(v[:, k])))
        if v[j, k] < 0:
            v[:, k] = -v[:, k]
    return w, v


def build_concentration_block(
    mu: int, m: int, belt: BeltRegion, n_max: int
) -> ConcentrationBlock:
    """Belt concentration matrix for the (mu, m) subspace and its eigenpairs.

    Entry (j, k) is int_{theta1}^{theta2} d_{n(k)} d_{n(j)} sin(beta) dbeta,
    a polynomial of degree <= 2 n_max + 1 in cos(beta), so a mapped
    Gauss-Legendre rule with 2 n_max + 2 nodes is exact.
    """
    n_min = max(abs(m), abs(mu))
    beta_q, w_q = belt_quadrature(belt.theta1, belt.theta2, 2 * n_max + 2)
    d = wigner_d_column(mu, m, beta_q, n_max)  # (dim, nq)
    mat = (d * w_q) @ d.T
    mat = 0.5 * (mat + mat.T)
    vals, vecs = jacobi_eigh(mat)
    return ConcentrationBlock(
        mu=mu, m=m, n_min=n_min, matrix=mat, eigenvalues=vals, eigenvectors=vecs
    )


@dataclass
class RgsfBasis:
    """All concentration blocks plus the global ordering and cutoff partition.

    ``global_order`` lists flat indices (canonical block-contiguous order)
    sorted by descending concentration, ties broken by (mu, m) lexicographic
    block order then within-block rank.  Eigenpairs with concentration
    >= lambda_c form the kept set.
    """

    belt: BeltRegion
    n_max: int
    lambda_c: float
    blocks: dict = field(repr=False)  # (mu, m) -> ConcentrationBlock
    global_order: np.ndarray = field(repr=False)
    kept_mask: np.ndarray = field(repr=False)  # canonical order, True = kept

    @property
    def size(self) -> int:
        return num_wigner(self.n_max)

    @property
    def kept_count(self) -> int:
        return int(self.kept_mask.sum())

    @property
    def eigenvalues_flat(self) -> np.ndarray:
        """Concentrations laid out in canonical flat order."""
        _, _, _, slices = index_table(self.n_max)
        lam = np.empty(self.size)
        for key, sl in slices.items():
            lam[sl] = self.blocks[key].eigenvalues
        return lam

    def with_cutoff(self, lambda_c: float) -> "RgsfBasis":
        """Same blocks, new kept/truncated partition."""
        if not 0.0 < lambda_c < 1.0:
            raise ParameterError(f"lambda_c={lambda_c} outside (0, 1)")
        lam = self.eigenvalues_flat
        return RgsfBasis(
            belt=self.belt,
            n_max=self.n_max,
            lambda_c=lambda_c,
            blocks=self.blocks,
            global_order=self.global_order,
            kept_mask=lam >= lambda_c,
        )


def build_basis(belt: BeltRegion, n_max: int, lambda_c: float) -> RgsfBasis:
    if not 0.0 < lambda_c < 1.0:
        raise ParameterError(f"lambda_c={lambda_c} outside (0, 1)")
    _, _, _, slices = index_table(n_max)
    blocks = {}
    for (mu, m), _sl in slices.items():
        blocks[(mu, m)] = build_concentration_block(mu, m, belt, n_max)
    lam = np.empty(num_wigner(n_max))
    for key, sl in slices.items():
        lam[sl] = blocks[key].eigenvalues
    # stable sort on -lambda keeps canonical (block-lexicographic, then
    # within-block rank) order among ties
    global_order = np.argsort(-lam, kind="stable")
    return RgsfBasis(
        belt=belt,
        n_max=n_max,
        lambda_c=lambda_c,
        blocks=blocks,
        global_order=global_order,
        kept_mask=lam >= lambda_c,
    )


def evaluate_rgsf(
    basis: RgsfBasis, block_id, i: int, alpha, beta, gamma
) -> np.ndarray:
    """Value of the i-th most concentrated Slepian function of a block.

    ``i`` is the 0-based within-block rank; scalars or arrays of equal
    shape are accepted for the angles.
    """
    mu, m = block_id
    blk = basis.blocks[(mu, m)]
    if not 0 <= i < blk.dim:
        raise ParameterError(f"rank {i} outside block of dimension {blk.dim}")
    alpha = np.asarray(alpha, dtype=float)
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    gamma = np.asarray(gamma, dtype=float)
    d = wigner_d_column(mu, m, beta.ravel(), basis.n_max)  # (dim, npts)
    radial = blk.eigenvectors[:, i] @ d
    phase = FOUR_PI_SQ_INV_SQRT * np.exp(-1j * (mu * alpha + m * gamma))
    out = phase * radial.reshape(beta.shape)
    return out if out.shape else complex(out)


def to_rgsf_coeffs(basis: RgsfBasis, a: np.ndarray) -> np.ndarray:
    """a' = sqrt(Lambda) U a, block-contiguous in canonical order."""
    a = np.asarray(a)
    if a.shape != (basis.size,):
        raise ShapeError(f"expected length {basis.size}, got {a.shape}")
    _, _, _, slices = index_table(basis.n_max)
    out = np.empty_like(a, dtype=complex)
    for key, sl in slices.items():
        blk = basis.blocks[key]
        out[sl] = np.sqrt(blk.eigenvalues) * (blk.eigenvectors.T @ a[sl])
    return out


def so3_rgsf_coeffs(basis: RgsfBasis, a: np.ndarray) -> np.ndarray:
    """a~ = U a: RGSF coefficients normalized over all of SO(3)."""
    a = np.asarray(a)
    if a.shape != (basis.size,):
        raise ShapeError(f"expected length {basis.size}, got {a.shape}")
    _, _, _, slices = index_table(basis.n_max)
    out = np.empty_like(a, dtype=complex)
    for key, sl in slices.items():
        blk = basis.blocks[key]
        out[sl] = blk.eigenvectors.T @ a[sl]
    return out


def from_rgsf_coeffs(basis: RgsfBasis, a_prime: np.ndarray) -> np.ndarray:
    """a = U* Lambda^{-1/2} a'; exact inverse of to_rgsf_coeffs."""
    a_prime = np.asarray(a_prime)
    if a_prime.shape != (basis.size,):
        raise ShapeError(f"expected length {basis.size}, got {a_prime.shape}")
    _, _, _, slices = index_table(basis.n_max)
    out = np.empty_like(a_prime, dtype=complex)
    for key, sl in slices.items():
        blk = basis.blocks[key]
        lam = blk.eigenvalues
        live = a_prime[sl] != 0
        if np.any(live & (lam <= 0)):
            raise DegenerateBasisError(
                f"nonpositive concentration in block {key} with nonzero coefficient"
            )
        scaled = np.where(live, a_prime[sl] / np.sqrt(np.where(lam > 0, lam, 1.0)), 0.0)
        out[sl] = blk.eigenvectors @ scaled
    return out


# ---------------------------------------------------------------------------
# Sparsity bounds
# ---------------------------------------------------------------------------

def sparsity_bound_bounded_orders(n_max: int, m_max: int) -> int:
    """Worst-case Slepian-domain sparsity when all nonzero Wigner
    coefficients have |m|, |mu| <= m_max."""
    if not 0 <= m_max <= n_max:
        raise ParameterError(f"m_max={m_max} outside [0, n_max={n_max}]")
    return num_wigner(m_max) + (n_max - m_max) * (2 * m_max + 1) ** 2


def greedy_sparsity_bound(n_max: int, k: int) -> int:
    """Exact worst case: sum of the k largest (mu, m) block dimensions."""
    if not 1 <= k <= (2 * n_max + 1) ** 2:
        raise ParameterError(f"k={k} outside [1, {(2 * n_max + 1) ** 2}]")
    total = 0
    used = 0
    for q in range(n_max + 1):
        count = 1 if q == 0 else 8 * q  # blocks with max(|m|, |mu|) = q
        take = min(count, k - used)
        total += take * (n_max - q + 1)
        used += take
        if used == k:
            break
    return total


def sparsity_bound_k_sparse(n_max: int, k: int) -> int:
    """Slepian-domain sparsity bound for a k-sparse Wigner vector.

    Evaluates the floor-of-sqrt(k) parity formula verbatim and clamps it
    from below by the greedy block-dimension enumeration, which is the
    exact worst case; the raw formula goes negative for small k.
    """
    if not 1 <= k <= (2 * n_max + 1) ** 2 - 1:
        raise ParameterError(f"k={k} outside [1, {(2 * n_max + 1) ** 2 - 1}]")
    r = int(np.floor(np.sqrt(k)))
    m_max = (r - 1) // 2 if r % 2 else r // 2
    n_m = sparsity_bound_bounded_orders(n_max, m_max)
    formula = n_m + (k - n_m) * (n_max - m_max - 1)
    return max(formula, greedy_sparsity_bound(n_max, k))


# ---------------------------------------------------------------------------
# Basis cache file (binary "RGSF1" + JSON sidecar)
# ---------------------------------------------------------------------------

def save_basis(basis: RgsfBasis, path: str) -> None:
    """Write the cache: magic "RGSF1", little-endian u32 n_max and block
    count, f64 theta1/theta2/lambda_c, then per block (i32 mu, i32 m,
    u32 dim, row-major f64 eigenvectors, f64 eigenvalues)."""
    keys = sorted(basis.blocks)
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<II", basis.n_max, len(keys)))
        fh.write(struct.pack("<ddd", basis.belt.theta1, basis.belt.theta2, basis.lambda_c))
        for key in keys:
            blk = basis.blocks[key]
            fh.write(struct.pack("<iiI", blk.mu, blk.m, blk.dim))
            fh.write(np.ascontiguousarray(blk.eigenvectors, dtype="<f8").tobytes())
            fh.write(np.asarray(blk.eigenvalues, dtype="<f8").tobytes())
    sidecar = {
        "format": CACHE_MAGIC.decode(),
        "n_max": basis.n_max,
        "theta1": basis.belt.theta1,
        "theta2": basis.belt.theta2,
        "lambda_c": basis.lambda_c,
        "block_count": len(keys),
        "total_eigenpairs": basis.size,
        "kept_count": basis.kept_count,
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_basis(path: str) -> RgsfBasis:
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != CACHE_MAGIC:
            raise ParameterError(f"bad cache magic {magic!r}")
        n_max, n_blocks = struct.unpack("<II", fh.read(8))
        theta1, theta2, lambda_c = struct.unpack("<ddd", fh.read(24))
        blocks = {}
        for _ in range(n_blocks):
            mu, m, dim = struct.unpack("<iiI", fh.read(12))
            vecs = np.frombuffer(fh.read(8 * dim * dim), dtype="<f8").reshape(dim, dim)
            vals = np.frombuffer(fh.read(8 * dim), dtype="<f8")
            n_min = max(abs(m), abs(mu))
            beta_q_mat = vecs @ np.diag(vals) @ vecs.T
            blocks[(mu, m)] = ConcentrationBlock(
                mu=mu,
                m=m,
                n_min=n_min,
                matrix=beta_q_mat,
                eigenvalues=vals.copy(),
                eigenvectors=vecs.copy(),
            )
    belt = BeltRegion(theta1, theta2)
    _, _, _, slices = index_table(n_max)
    lam = np.empty(num_wigner(n_max))
    for key, sl in slices.items():
        lam[sl] = blocks[key].eigenvalues
    return RgsfBasis(
        belt=belt,
        n_max=n_max,
        lambda_c=lambda_c,
        blocks=blocks,
        global_order=np.argsort(-lam, kind="stable"),
        kept_mask=lam >= lambda_c,
    )
