"""Reconstruction pipelines: belt-restricted Slepian compressed sensing,
three Wigner-basis CS baselines (full-coverage, dropped, zero-padded), and
the classical zero-padded transform on the equiangular grid.

Every CS pipeline preconditions rows by sqrt(sin beta_j), solves QCBP with
sigma = sqrt(M) * epsilon (floored at 1e-10 ||P w||_2 when epsilon = 0),
and back-transforms to Wigner and spherical-wave coefficients.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from math import log, pi, sqrt

import numpy as np

from .errors import ParameterError, ShapeError
from .forward import (
    DEFAULT_R_FAR,
    DEFAULT_R_NEAR,
    DEFAULT_WAVENUMBER,
    DeviceModel,
    GroundTruth,
    evaluate_field,
    synthesize_values,
    wigner_to_sw_coeffs,
)
from .metrics import (
    MetricBundle,
    belt_energy,
    coefficient_errors,
    m_nonzero_energy_fraction,
    relative_magnitude,
    snr,
)
from .sampling import MeasurementSet, equiangular_grid, philox, preconditioner_weights
from .slepian import BeltRegion, RgsfBasis, from_rgsf_coeffs
from .solver import (
    STATUS_CONVERGED,
    STATUS_INFEASIBLE,
    QcbpProblem,
    QcbpSolution,
    solve_qcbp,
)
from .specfun import index_table, num_wigner, wigner_d_column

METHODS = ("rgsf-cs", "wd-cs-full", "wd-cs-dropped", "wd-cs-padded", "padded-fft")

THETA_GRID_POINTS = 512
SIGMA_FLOOR_REL = 1e-10


@dataclass
class MethodConfig:
    method: str
    belt: BeltRegion
    n_max: int
    lambda_c: float = 0.05
    m: int = 300
    seed: int = 0
    epsilon: float = 0.0
    k: float = DEFAULT_WAVENUMBER
    r_near: float = DEFAULT_R_NEAR
    r_far: float = DEFAULT_R_FAR

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(
                f"unknown method {self.method!r}; choose from {METHODS}"
            )
        if self.m < 1:
            raise ParameterError(f"measurement count m={self.m} must be >= 1")
        if self.epsilon < 0:
            raise ParameterError(f"epsilon={self.epsilon} must be >= 0")


@dataclass
class ReconstructionReport:
    method: str
    a_hat: np.ndarray
    sw_hat: np.ndarray
    status: str
    a_prime_hat: np.ndarray | None = None
    metrics: MetricBundle | None = None
    config: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)


def predict_recovery_budget(n_max: int, lambda_c: float, s: int) -> float:
    """Relative measurement-count scale sqrt(N_D) s ln^4(N_D) / lambda_c.

    The universal constant is omitted, so this is a comparison tool across
    (n_max, lambda_c, s) choices, not an absolute count.
    """
    if s < 1:
        raise ParameterError(f"target sparsity s={s} must be >= 1")
    if not 0.0 < lambda_c <= 1.0:
        raise ParameterError(f"lambda_c={lambda_c} outside (0, 1]")
    n_d = num_wigner(n_max)
    return sqrt(n_d) * s * log(n_d) ** 4 / lambda_c


# ---------------------------------------------------------------------------
# Measurement-matrix assembly
# ---------------------------------------------------------------------------

def assemble_wd_matrix(points: np.ndarray, n_max: int) -> np.ndarray:
    """M x N_D matrix of Wigner D-function values in canonical flat order."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 3:
        raise ShapeError(f"points must be (M, 3), got {points.shape}")
    _, _, _, slices = index_table(n_max)
    alpha, beta, gamma = points[:, 0], points[:, 1], points[:, 2]
    mat = np.empty((points.shape[0], num_wigner(n_max)), dtype=complex)
    for (mu, m), sl in slices.items():
        d = wigner_d_column(mu, m, beta, n_max)  # (dim, M)
        phase = np.exp(-1j * (mu * alpha + m * gamma)) / (2.0 * pi)
        mat[:, sl] = (d * phase).T
    return mat


def assemble_rgsf_matrix(
    points: np.ndarray,
    basis: RgsfBasis,
    wigner_matrix: np.ndarray | None = None,
) -> np.ndarray:
    """M x kept_count matrix of lambda^{-1/2}-scaled Slepian values.

    Realized as the Wigner-D block times the block eigenvector map; columns
    follow canonical flat order restricted to the kept set.  Passing a
    precomputed `assemble_wd_matrix(points, basis.n_max)` result skips the
    Wigner evaluation, which dominates when sweeping lambda_c on fixed
    sample points.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 3:
        raise ShapeError(f"points must be (M, 3), got {points.shape}")
    if wigner_matrix is not None and wigner_matrix.shape != (
        points.shape[0], num_wigner(basis.n_max)
    ):
        raise ShapeError(
            f"wigner_matrix shape {wigner_matrix.shape} does not match "
            f"({points.shape[0]}, {num_wigner(basis.n_max)})"
        )
    _, _, _, slices = index_table(basis.n_max)
    alpha, beta, gamma = points[:, 0], points[:, 1], points[:, 2]
    cols = []
    for (mu, m), sl in slices.items():
        keep = basis.kept_mask[sl]
        if not np.any(keep):
            continue
        blk = basis.blocks[(mu, m)]
        if wigner_matrix is not None:
            wd = wigner_matrix[:, sl]                  # (M, dim)
        else:
            d = wigner_d_column(mu, m, beta, basis.n_max)  # (dim, M)
            phase = np.exp(-1j * (mu * alpha + m * gamma)) / (2.0 * pi)
            wd = (d * phase).T                         # (M, dim)
        scaled = blk.eigenvectors[:, keep] / np.sqrt(blk.eigenvalues[keep])
        cols.append(wd @ scaled)
    return np.concatenate(cols, axis=1)


# ---------------------------------------------------------------------------
# Shared CS plumbing
# ---------------------------------------------------------------------------

def _solve_preconditioned(matrix, values, weights, m_rows, epsilon) -> QcbpSolution:
    pw = values * weights
    sigma = sqrt(m_rows) * epsilon
    floor = SIGMA_FLOOR_REL * float(np.linalg.norm(pw))
    sigma = max(sigma, floor)
    problem = QcbpProblem(matrix=matrix * weights[:, None], rhs=pw, sigma=sigma)
    return solve_qcbp(problem)


def _field_metrics(
    config: MethodConfig,
    truth: GroundTruth,
    a_hat: np.ndarray,
    sw_hat: np.ndarray,
    basis: RgsfBasis | None,
) -> MetricBundle:
    n_max = config.n_max
    sw_true = wigner_to_sw_coeffs(truth.a, n_max, config.k, config.r_near)
    dev_true = DeviceModel(n_max, sw_true, config.k, config.r_near, config.r_far)
    dev_hat = DeviceModel(n_max, sw_hat, config.k, config.r_near, config.r_far)
    theta = np.linspace(0.0, pi, THETA_GRID_POINTS)
    f_nf = evaluate_field(dev_true, config.r_near, theta)
    f_ff = evaluate_field(dev_true, config.r_far, theta)
    fh_nf = evaluate_field(dev_hat, config.r_near, theta)
    fh_ff = evaluate_field(dev_hat, config.r_far, theta)
    _, _, phase = coefficient_errors(truth.a, a_hat)
    bundle = MetricBundle(
        theta_grid=theta,
        nf_snr=snr(f_nf, fh_nf),
        ff_snr=snr(f_ff, fh_ff),
        relative_magnitude_nf=relative_magnitude(fh_nf, f_nf),
        relative_magnitude_ff=relative_magnitude(fh_ff, f_ff),
        coeff_l2_error=float(np.linalg.norm(truth.a - a_hat)),
        sw_m_nonzero_energy_fraction=m_nonzero_energy_fraction(sw_hat),
        phase_error=phase,
    )
    if basis is not None:
        bundle.energy_rc = belt_energy(truth.a, basis, "Rc")
        bundle.energy_rc_hat = belt_energy(a_hat, basis, "Rc")
    return bundle


def _finish(config, a_hat, status, truth, basis, a_prime_hat=None, solver_info=None):
    sw_hat = wigner_to_sw_coeffs(a_hat, config.n_max, config.k, config.r_near)
    metrics = None
    if truth is not None and status != STATUS_INFEASIBLE:
        metrics = _field_metrics(config, truth, a_hat, sw_hat, basis)
    return ReconstructionReport(
        method=config.method,
        a_hat=a_hat,
        sw_hat=sw_hat,
        status=status,
        a_prime_hat=a_prime_hat,
        metrics=metrics,
        config={
            "method": config.method,
            "n_max": config.n_max,
            "theta1": config.belt.theta1,
            "theta2": config.belt.theta2,
            "lambda_c": config.lambda_c,
            "m": config.m,
            "seed": config.seed,
            "epsilon": config.epsilon,
        },
        solver=solver_info or {},
    )


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------

def run_rgsf_cs(
    config: MethodConfig,
    basis: RgsfBasis,
    measurements: MeasurementSet,
    truth: GroundTruth | None = None,
    wigner_matrix: np.ndarray | None = None,
) -> ReconstructionReport:
    """Slepian-basis compressed sensing on belt samples.

    Solves the preconditioned QCBP for the kept Slepian coefficients,
    zero-fills the truncated ones, and maps back to Wigner coefficients
    through the scaled eigenvector transform.
    """
    if basis.n_max != config.n_max or basis.belt != config.belt:
        raise ParameterError("basis does not match config (n_max, belt)")
    matrix = assemble_rgsf_matrix(measurements.points, basis, wigner_matrix)
    sol = _solve_preconditioned(
        matrix, measurements.values, measurements.weights, len(measurements),
        measurements.epsilon,
    )
    info = {
        "status": sol.status,
        "iterations": sol.iterations,
        "residual_norm": sol.residual_norm,
        "l1_norm": sol.l1_norm,
        "tau": sol.tau,
        "kept_count": basis.kept_count,
        "pareto_values": sol.pareto_values,
    }
    a_prime = np.zeros(basis.size, dtype=complex)
    a_prime[basis.kept_mask] = sol.z
    if sol.status == STATUS_INFEASIBLE:
        a_hat = np.zeros(basis.size, dtype=complex)
        return _finish(config, a_hat, sol.status, None, basis, a_prime, info)
    a_hat = from_rgsf_coeffs(basis, a_prime)
    return _finish(config, a_hat, sol.status, truth, basis, a_prime, info)


def _pad_count(belt: BeltRegion, m: int) -> int:
    """Complement sample count matching the belt's per-radian density."""
    width = belt.theta2 - belt.theta1
    return int(round(m * (pi - width) / width))


def pad_points(belt: BeltRegion, m: int, seed: int) -> np.ndarray:
    """Complement samples with beta uniform on [0, pi] \\ [theta1, theta2]."""
    m_c = _pad_count(belt, m)
    if m_c == 0:
        return np.zeros((0, 3))
    rng = philox(seed)
    alpha = rng.uniform(0.0, 2.0 * pi, m_c)
    lengths = np.array([belt.theta1, pi - belt.theta2])
    u = rng.uniform(0.0, lengths.sum(), m_c)
    beta = np.where(u < lengths[0], u, belt.theta2 + (u - lengths[0]))
    gamma = rng.uniform(0.0, 2.0 * pi, m_c)
    return np.column_stack([alpha, beta, gamma])


def run_wd_cs(
    config: MethodConfig,
    measurements: MeasurementSet,
    variant: str,
    truth: GroundTruth | None = None,
    basis: RgsfBasis | None = None,
) -> ReconstructionReport:
    """Wigner-basis QCBP baselines.

    full: measurements cover all of SO(3).  dropped: belt samples used
    as-is.  padded: belt samples plus zero-valued samples at complement
    positions drawn with the same density (seed + 1 stream).
    """
    if variant not in ("full", "dropped", "padded"):
        raise ParameterError(f"unknown variant {variant!r}")
    points = measurements.points
    values = measurements.values
    weights = measurements.weights
    if variant == "padded":
        extra = pad_points(measurements.domain, len(measurements), measurements.seed + 1)
        points = np.concatenate([points, extra])
        values = np.concatenate([values, np.zeros(extra.shape[0], dtype=complex)])
        weights = np.concatenate([weights, preconditioner_weights(extra)])
    matrix = assemble_wd_matrix(points, config.n_max)
    sol = _solve_preconditioned(
        matrix, values, weights, points.shape[0], measurements.epsilon
    )
    info = {
        "status": sol.status,
        "iterations": sol.iterations,
        "residual_norm": sol.residual_norm,
        "l1_norm": sol.l1_norm,
        "tau": sol.tau,
        "rows": int(points.shape[0]),
    }
    if sol.status == STATUS_INFEASIBLE:
        a_hat = np.zeros(num_wigner(config.n_max), dtype=complex)
        return _finish(config, a_hat, sol.status, None, basis, None, info)
    return _finish(config, sol.z, sol.status, truth, basis, None, info)


def grid_measurements(
    truth: GroundTruth, n_max: int, belt: BeltRegion, seed: int = 0
) -> MeasurementSet:
    """Noiseless equiangular-grid samples, zeroed outside the belt."""
    points = equiangular_grid(n_max)
    values = synthesize_values(truth.a, points, n_max)
    inside = (points[:, 1] >= belt.theta1) & (points[:, 1] <= belt.theta2)
    values = np.where(inside, values, 0.0)
    return MeasurementSet(
        points=points,
        values=values,
        weights=preconditioner_weights(points),
        epsilon=0.0,
        seed=seed,
        domain=belt,
    )


def run_padded_fft(
    config: MethodConfig,
    grid_ms: MeasurementSet,
    truth: GroundTruth | None = None,
    basis: RgsfBasis | None = None,
) -> ReconstructionReport:
    """Classical zero-padded transform on the deterministic grid.

    A DFT along alpha separates the alpha-coupled orders exactly (the grid
    has 2 n_max + 1 azimuthal nodes); each order's degree profile is then
    recovered by unweighted least squares over the beta nodes, zeros
    included.  Only probe-order-zero coefficients (m = 0 in the Wigner
    triple) can be observed on this gamma = 0 grid; the rest are zero.
    """
    n_max = config.n_max
    n_alpha = 2 * n_max + 1
    n_beta = n_max + 1
    if grid_ms.points.shape[0] != n_alpha * n_beta:
        raise ParameterError(
            f"expected {n_alpha * n_beta} grid points, got {grid_ms.points.shape[0]}"
        )
    w = grid_ms.values.reshape(n_alpha, n_beta)
    betas = grid_ms.points[:, 1].reshape(n_alpha, n_beta)[0]
    alphas = grid_ms.points[:, 0].reshape(n_alpha, n_beta)[:, 0]
    a_hat = np.zeros(num_wigner(n_max), dtype=complex)
    _, _, _, slices = index_table(n_max)
    for mu in range(-n_max, n_max + 1):
        # exact inverse DFT: w has only |mu| <= n_max frequencies in alpha
        c_mu = (np.exp(1j * mu * alphas) @ w) / n_alpha  # (n_beta,)
        d = wigner_d_column(mu, 0, betas, n_max)          # (dim, n_beta)
        coef, _, _, _ = np.linalg.lstsq(d.T / (2.0 * pi), c_mu, rcond=None)
        a_hat[slices[(mu, 0)]] = coef
    return _finish(
        config, a_hat, STATUS_CONVERGED, truth, basis, None,
        {"status": "converged", "rows": int(grid_ms.points.shape[0])},
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def save_report(report: ReconstructionReport, json_path: str, coeff_csv_path: str) -> None:
    doc = {
        "method": report.method,
        "status": report.status,
        "config": report.config,
        "solver": report.solver,
    }
    if report.metrics is not None:
        doc["metrics"] = {
            "coeff_l2_error": report.metrics.coeff_l2_error,
            "sw_m_nonzero_energy_fraction": report.metrics.sw_m_nonzero_energy_fraction,
            "energy_rc": report.metrics.energy_rc,
            "energy_rc_hat": report.metrics.energy_rc_hat,
            "nf_snr_summary": report.metrics.summary(),
        }
    with open(json_path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    n_max = report.config["n_max"]
    ns, ms, mus, _ = index_table(n_max)
    with open(coeff_csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["flat", "n", "m", "mu", "re", "im"])
        for i, v in enumerate(report.a_hat):
            if v != 0:
                writer.writerow(
                    [
                        i,
                        int(ns[i]),
                        int(ms[i]),
                        int(mus[i]),
                        repr(float(v.real)),
                        repr(float(v.imag)),
                    ]
                )
