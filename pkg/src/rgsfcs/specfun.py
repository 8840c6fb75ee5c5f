"""Numeric kernels: Wigner d/D-functions, Legendre polynomials, spherical
Bessel/Hankel functions, and Gauss-Legendre quadrature.

Conventions
-----------
The Wigner d-function carries the normalization sqrt((2n+1)/2), so that

    int_0^pi d_n^{mu m}(b) d_{n'}^{mu m}(b) sin(b) db = delta_{nn'},

and the D-function is

    D_n^{mu m}(alpha, beta, gamma)
        = (4 pi^2)^{-1/2} exp(-i mu alpha) d_n^{mu m}(beta) exp(-i m gamma).

The flat index over all (n, m, mu) with n <= n_max orders blocks
lexicographically by (mu, m), each ascending from -n_max to n_max, with n
ascending inside a block from n_min = max(|m|, |mu|).  Block contiguity is
what makes the belt concentration matrix block diagonal as an index-range
slice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import cos, lgamma, pi, sin, sqrt

import numpy as np

from .errors import DomainError, IndexDomainError, ParameterError

FOUR_PI_SQ_INV_SQRT = 1.0 / (2.0 * pi)  # (4 pi^2)^{-1/2}


def num_wigner(n_max: int) -> int:
    """Number of band-limited Wigner D-functions with degree <= n_max."""
    return (n_max + 1) * (2 * n_max + 1) * (2 * n_max + 3) // 3


@dataclass(frozen=True)
class WignerIndex:
    """One basis function: degree n, orders m and mu, and its flat index."""

    n: int
    m: int
    mu: int
    flat: int


def _check_index(n: int, mu: int, m: int) -> None:
    if n < 0 or abs(m) > n or abs(mu) > n:
        raise IndexDomainError(f"invalid Wigner index n={n}, mu={mu}, m={m}")


@lru_cache(maxsize=8)
def index_table(n_max: int):
    """Arrays (n, m, mu) of length N_D in canonical flat order, plus a dict
    mapping (mu, m) to the block's flat-index slice."""
    ns, ms, mus = [], [], []
    blocks = {}
    pos = 0
    for mu in range(-n_max, n_max + 1):
        for m in range(-n_max, n_max + 1):
            n_min = max(abs(m), abs(mu))
            dim = n_max - n_min + 1
            blocks[(mu, m)] = slice(pos, pos + dim)
            for n in range(n_min, n_max + 1):
                ns.append(n)
                ms.append(m)
                mus.append(mu)
            pos += dim
    assert pos == num_wigner(n_max)
    return np.array(ns), np.array(ms), np.array(mus), blocks


def wigner_index(n: int, m: int, mu: int, n_max: int) -> WignerIndex:
    """Canonical flat index of the (n, m, mu) basis function."""
    _check_index(n, mu, m)
    if n > n_max:
        raise IndexDomainError(f"n={n} exceeds band-limit {n_max}")
    _, _, _, blocks = index_table(n_max)
    blk = blocks[(mu, m)]
    return WignerIndex(n=n, m=m, mu=mu, flat=blk.start + n - max(abs(m), abs(mu)))


def block_dims(n_max: int) -> dict:
    """Dimension n_max - max(|m|,|mu|) + 1 of every (mu, m) block."""
    return {
        (mu, m): n_max - max(abs(m), abs(mu)) + 1
        for mu in range(-n_max, n_max + 1)
        for m in range(-n_max, n_max + 1)
    }


# ---------------------------------------------------------------------------
# Wigner d-functions
# ---------------------------------------------------------------------------

def wigner_d_sum(n: int, mu: int, m: int, beta: float) -> float:
    """Direct factorial-sum evaluation of d_n^{mu m}(beta).

    Factorials are handled in log space so degrees well beyond n = 85 stay
    finite; used as the reference path and to seed the degree recursion.
    """
    _check_index(n, mu, m)
    lead = 0.5 * (
        lgamma(n + m + 1) + lgamma(n - m + 1) + lgamma(n + mu + 1) + lgamma(n - mu + 1)
    )
    c = cos(beta / 2.0)
    s = sin(beta / 2.0)
    total = 0.0
    for sig in range(max(0, m - mu), min(n + m, n - mu) + 1):
        ln_den = (
            lgamma(sig + 1)
            + lgamma(n + m - sig + 1)
            + lgamma(n - mu - sig + 1)
            + lgamma(mu - m + sig + 1)
        )
        pc = 2 * n - 2 * sig + m - mu
        ps = 2 * sig - m + mu
        term = np.exp(lead - ln_den) * c**pc * s**ps
        total += -term if sig % 2 else term
    sign = -1.0 if (mu - m) % 2 else 1.0
    return sign * sqrt((2 * n + 1) / 2.0) * total


def wigner_d_column(mu: int, m: int, beta, n_max: int) -> np.ndarray:
    """d_n^{mu m}(beta) for all n in [max(|m|,|mu|), n_max] at once.

    Shape (n_max - n_min + 1, len(beta)).  Three-term recursion in the
    degree at fixed (mu, m), seeded from the factorial sum at the two
    lowest degrees; the recursion is the production path everywhere whole
    (mu, m) columns are needed (concentration blocks, measurement rows).
    """
    if abs(m) > n_max or abs(mu) > n_max:
        raise IndexDomainError(f"orders mu={mu}, m={m} exceed band-limit {n_max}")
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    n0 = max(abs(m), abs(mu))
    dim = n_max - n0 + 1
    out = np.empty((dim, beta.size))
    x = np.cos(beta)
    # seed with the unnormalized value u_n = d / sqrt((2n+1)/2)
    u_prev = np.zeros_like(x)
    u_cur = np.array([wigner_d_sum(n0, mu, m, b) for b in beta]) / sqrt(
        (2 * n0 + 1) / 2.0
    )
    out[0] = sqrt((2 * n0 + 1) / 2.0) * u_cur
    for i, l in enumerate(range(n0, n_max)):
        if l == 0:
            u_next = x * u_cur
        else:
            c1 = (2 * l + 1) * (l * (l + 1) * x - mu * m)
            c2 = (l + 1) * sqrt((l * l - mu * mu) * (l * l - m * m))
            den = l * sqrt(((l + 1) ** 2 - mu * mu) * ((l + 1) ** 2 - m * m))
            u_next = (c1 * u_cur - c2 * u_prev) / den
        u_prev, u_cur = u_cur, u_next
        out[i + 1] = sqrt((2 * (l + 1) + 1) / 2.0) * u_cur
    return out


def wigner_d(n: int, mu: int, m: int, beta: float) -> float:
    """d_n^{mu m}(beta) via the degree recursion."""
    _check_index(n, mu, m)
    return float(wigner_d_column(mu, m, [beta], n)[-1, 0])


def wigner_D(idx: WignerIndex, alpha: float, beta: float, gamma: float) -> complex:
    """D_n^{mu m}(alpha, beta, gamma) for one index triple."""
    d = wigner_d(idx.n, idx.mu, idx.m, beta)
    return (
        FOUR_PI_SQ_INV_SQRT
        * np.exp(-1j * idx.mu * alpha)
        * d
        * np.exp(-1j * idx.m * gamma)
    )


# ---------------------------------------------------------------------------
# Legendre polynomials and Gauss-Legendre quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    order: int


def _legendre_and_derivative(order: int, x: np.ndarray):
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    for k in range(order):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = order * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule on [-1, 1].

    Nodes are Legendre roots found by Newton iteration from the Tricomi
    asymptotic guesses; weights 2 / ((1 - x^2) P'(x)^2).
    """
    if not 1 <= order <= 256:
        raise ParameterError(f"quadrature order {order} outside [1, 256]")
    if order == 1:
        return QuadratureRule(np.zeros(1), np.full(1, 2.0), 1)
    k = np.arange(1, order + 1)
    x = np.cos(pi * (k - 0.25) / (order + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(order, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    _, dp = _legendre_and_derivative(order, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # ascending nodes; enforce exact symmetry about zero
    x = x[::-1].copy()
    w = w[::-1].copy()
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(x, w, order)


def belt_quadrature(theta1: float, theta2: float, order: int):
    """Nodes beta_q and weights for int_{theta1}^{theta2} f(beta) sin(beta) dbeta
    exact for f polynomial of degree <= 2*order - 1 in cos(beta).

    Substituting t = cos(beta) maps the belt to [cos(theta2), cos(theta1)].
    """
    rule = gauss_legendre(order)
    lo, hi = cos(theta2), cos(theta1)
    t = 0.5 * (hi - lo) * rule.nodes + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * rule.weights
    return np.arccos(t), w


# ---------------------------------------------------------------------------
# Spherical Bessel / Hankel functions
# ---------------------------------------------------------------------------

def spherical_jn_all(n_max: int, x: float) -> np.ndarray:
    """j_0..j_{n_max}(x) by Miller's downward recurrence."""
    if x <= 0:
        raise DomainError(f"argument x={x} must be positive")
    # the downward recurrence only purges the y_n contamination once the
    # order passes the turning point near k = x; the transition zone is
    # O(x^(1/3)) wide, so start that far beyond max(n_max, x) plus margin
    start = max(n_max, int(x)) + int(12.0 * x ** (1.0 / 3.0)) + max(
        20, int(1.3 * n_max)
    )
    jm = np.zeros(start + 2)
    jm[start + 1] = 0.0
    jm[start] = 1e-300
    for k in range(start, 0, -1):
        jm[k - 1] = (2 * k + 1) / x * jm[k] - jm[k + 1]
    # normalize by sum (2k+1) j_k^2 = 1 rather than by j_0 = sin(x)/x,
    # which cancels catastrophically when x is near a multiple of pi;
    # pre-scale so squaring the tiny raw recurrence values cannot underflow
    jm /= np.max(np.abs(jm))
    norm = np.sqrt(np.sum((2 * np.arange(start + 2) + 1) * jm * jm))
    scale = 1.0 / norm
    if jm[0] * sin(x) < 0:
        scale = -scale
    return jm[: n_max + 1] * scale


def spherical_yn_all(n_max: int, x: float) -> np.ndarray:
    """y_0..y_{n_max}(x) by upward recurrence (stable for y)."""
    if x <= 0:
        raise DomainError(f"argument x={x} must be positive")
    y = np.zeros(n_max + 1)
    y[0] = -cos(x) / x
    if n_max >= 1:
        y[1] = -cos(x) / (x * x) - sin(x) / x
    for k in range(1, n_max):
        y[k + 1] = (2 * k + 1) / x * y[k] - y[k - 1]
    return y


def spherical_hankel1_all(n_max: int, x: float) -> np.ndarray:
    """Outgoing h_n^(1)(x) = j_n(x) + i y_n(x) for n = 0..n_max."""
    return spherical_jn_all(n_max, x) + 1j * spherical_yn_all(n_max, x)


def spherical_hankel1(n: int, x: float) -> complex:
    if n < 0:
        raise ParameterError(f"degree n={n} must be nonnegative")
    return complex(spherical_hankel1_all(n, x)[n])
