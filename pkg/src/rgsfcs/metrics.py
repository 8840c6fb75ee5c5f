"""Figures of merit: dB field profiles, coefficient-domain errors, and
belt-restricted energies computed from the concentration eigenvalues.

Infinite dB values (perfect match, or a zero estimate against a nonzero
reference) are serialized as +/-1e9 with a companion flag, so downstream
tables stay numeric.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ShapeError, UndefinedReferenceError
from .slepian import RgsfBasis, so3_rgsf_coeffs

DB_SENTINEL = 1e9
PHASE_FLOOR = 1e-9  # relative magnitude below which phase is meaningless

REGIONS = ("R", "Rc", "SO3")


def _finite_db(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Clip infinities to the sentinel; return (clipped, was_infinite)."""
    inf_mask = ~np.isfinite(values)
    out = np.where(values == np.inf, DB_SENTINEL, values)
    out = np.where(values == -np.inf, -DB_SENTINEL, out)
    out = np.where(np.isnan(values), -DB_SENTINEL, out)
    return out, inf_mask


def relative_magnitude(f_hat: np.ndarray, f: np.ndarray) -> np.ndarray:
    """20 log10(|F_hat| / max |F|) pointwise."""
    f_hat = np.asarray(f_hat)
    f = np.asarray(f)
    if f_hat.shape != f.shape:
        raise ShapeError(f"shape mismatch {f_hat.shape} vs {f.shape}")
    peak = np.max(np.abs(f))
    if peak == 0:
        raise UndefinedReferenceError("reference field is identically zero")
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(np.abs(f_hat) / peak)
    return _finite_db(db)[0]


def snr(f: np.ndarray, f_hat: np.ndarray) -> np.ndarray:
    """20 log10(|F| / |F - F_hat|) pointwise."""
    f = np.asarray(f)
    f_hat = np.asarray(f_hat)
    if f_hat.shape != f.shape:
        raise ShapeError(f"shape mismatch {f.shape} vs {f_hat.shape}")
    err = np.abs(f - f_hat)
    num = np.abs(f)
    with np.errstate(divide="ignore", invalid="ignore"):
        db = 20.0 * np.log10(num / err)
    # 0/0 (both zero): perfect agreement on a null sample
    db = np.where((num == 0) & (err == 0), np.inf, db)
    return _finite_db(db)[0]


def belt_energy(a: np.ndarray, basis: RgsfBasis, region: str) -> float:
    """Energy of the band-limited function on R, R^c, or all of SO(3).

    SO3: ||a||^2 by Parseval.  R: sum lambda_i |a~_i|^2.  Rc: the
    complement weights (1 - lambda_i).
    """
    if region not in REGIONS:
        raise ParameterError(f"region {region!r} not one of {REGIONS}")
    a = np.asarray(a)
    if region == "SO3":
        return float(np.sum(np.abs(a) ** 2))
    a_tilde = so3_rgsf_coeffs(basis, a)
    lam = basis.eigenvalues_flat
    w = lam if region == "R" else 1.0 - lam
    return float(np.sum(w * np.abs(a_tilde) ** 2))


def m_nonzero_energy_fraction(sw_coeffs: np.ndarray) -> float:
    """Fraction of spherical-wave energy carried by azimuthal orders m != 0.

    Expects the (n_max+1, 2 n_max + 1) layout with m = 0 in the center
    column.
    """
    sw_coeffs = np.asarray(sw_coeffs)
    total = float(np.sum(np.abs(sw_coeffs) ** 2))
    if total == 0:
        raise UndefinedReferenceError("zero total spherical-wave energy")
    n_max = sw_coeffs.shape[0] - 1
    m0 = float(np.sum(np.abs(sw_coeffs[:, n_max]) ** 2))
    return (total - m0) / total


def coefficient_errors(a: np.ndarray, a_hat: np.ndarray):
    """(l2 error, per-coefficient SNR dB, per-coefficient phase error).

    Phase error |arg a_hat - arg a| is wrapped to [0, pi] and reported as
    NaN where |a| is below PHASE_FLOOR times the largest coefficient.
    """
    a = np.asarray(a, dtype=complex)
    a_hat = np.asarray(a_hat, dtype=complex)
    if a.shape != a_hat.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {a_hat.shape}")
    l2 = float(np.linalg.norm(a - a_hat))
    per_snr = snr(a, a_hat)
    peak = np.max(np.abs(a)) if a.size else 0.0
    phase = np.abs(np.angle(a_hat) - np.angle(a))
    phase = np.minimum(phase, 2.0 * np.pi - phase)
    meaningful = np.abs(a) > PHASE_FLOOR * peak
    phase = np.where(meaningful, phase, np.nan)
    return l2, per_snr, phase


@dataclass
class MetricBundle:
    theta_grid: np.ndarray
    nf_snr: np.ndarray
    ff_snr: np.ndarray
    relative_magnitude_nf: np.ndarray
    relative_magnitude_ff: np.ndarray
    coeff_l2_error: float
    sw_m_nonzero_energy_fraction: float
    phase_error: np.ndarray = field(default_factory=lambda: np.empty(0))
    energy_rc: float = 0.0
    energy_rc_hat: float = 0.0

    def summary(self, theta_window: tuple[float, float] | None = None) -> dict:
        """Min / median / max of the near-field SNR, optionally windowed."""
        mask = np.ones(self.theta_grid.shape, dtype=bool)
        if theta_window is not None:
            lo, hi = theta_window
            mask = (self.theta_grid >= lo) & (self.theta_grid <= hi)
        vals = self.nf_snr[mask]
        vals = vals[np.abs(vals) < DB_SENTINEL]
        if vals.size == 0:
            return {"min": DB_SENTINEL, "median": DB_SENTINEL, "max": DB_SENTINEL}
        return {
            "min": float(np.min(vals)),
            "median": float(np.median(vals)),
            "max": float(np.max(vals)),
        }

    def to_json(self, path: str) -> None:
        doc = {
            "coeff_l2_error": self.coeff_l2_error,
            "sw_m_nonzero_energy_fraction": self.sw_m_nonzero_energy_fraction,
            "energy_rc": self.energy_rc,
            "energy_rc_hat": self.energy_rc_hat,
            "nf_snr_summary": self.summary(),
            "theta_points": int(self.theta_grid.size),
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_csv(self, path: str) -> None:
        """Tidy per-theta table: one row per sample, sentinel flags included."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["theta", "nf_snr_db", "ff_snr_db", "nf_relmag_db", "ff_relmag_db", "sentinel"]
            )
            for i, th in enumerate(self.theta_grid):
                row = [
                    self.nf_snr[i],
                    self.ff_snr[i],
                    self.relative_magnitude_nf[i],
                    self.relative_magnitude_ff[i],
                ]
                flag = int(any(abs(v) >= DB_SENTINEL for v in row))
                writer.writerow([repr(float(th))] + [repr(float(v)) for v in row] + [flag])


def interior_window(theta1: float, theta2: float, fraction: float = 0.9):
    """Symmetric interior window covering the stated fraction of the belt."""
    if not 0.0 < fraction <= 1.0:
        raise ParameterError(f"fraction={fraction} outside (0, 1]")
    margin = 0.5 * (1.0 - fraction) * (theta2 - theta1)
    return theta1 + margin, theta2 - margin
