"""Measurement point generation and the sqrt(sin beta) preconditioner.

All randomness flows through numpy's Philox counter-based generator keyed
by the run seed, so published seeds reproduce sample sets bit-exactly
across platforms.  Stream layout: the point sampler uses the generator at
key=seed directly and draws alpha, then beta, then gamma as contiguous
uniform blocks; noise streams (see forward.synthesize_measurements) use
key=seed on a separate generator instance.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from math import pi

import numpy as np

from .errors import ParameterError, ShapeError
from .slepian import FULL_SPHERE, BeltRegion


@dataclass
class MeasurementSet:
    points: np.ndarray          # (M, 3) columns alpha, beta, gamma
    values: np.ndarray          # complex, length M
    weights: np.ndarray         # sqrt(sin beta_j)
    epsilon: float
    seed: int
    domain: BeltRegion

    def __post_init__(self):
        m = self.points.shape[0]
        if self.values.shape != (m,) or self.weights.shape != (m,):
            raise ShapeError("points, values, weights must have equal length")

    def __len__(self) -> int:
        return self.points.shape[0]


def philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def sample_belt(belt: BeltRegion, m: int, seed: int) -> np.ndarray:
    """M i.i.d. triples with alpha, gamma ~ U[0, 2pi) and beta ~ U[theta1, theta2]."""
    if m < 1:
        raise ParameterError(f"sample count M={m} must be >= 1")
    rng = philox(seed)
    alpha = rng.uniform(0.0, 2.0 * pi, m)
    beta = rng.uniform(belt.theta1, belt.theta2, m)
    gamma = rng.uniform(0.0, 2.0 * pi, m)
    return np.column_stack([alpha, beta, gamma])


def sample_so3(m: int, seed: int) -> np.ndarray:
    """Uniform-law samples over the full domain (belt [0, pi])."""
    return sample_belt(FULL_SPHERE, m, seed)


def equiangular_grid(n_max: int) -> np.ndarray:
    """Deterministic (2 n_max + 1) x (n_max + 1) grid for the classical
    baseline: alpha at 2 pi k / (2 n_max + 1), beta at j pi / n_max with
    both poles included, gamma fixed at 0 (the axisymmetric ideal probe
    contributes no polarization dependence)."""
    if n_max < 1:
        raise ParameterError(f"n_max={n_max} must be >= 1")
    alphas = 2.0 * pi * np.arange(2 * n_max + 1) / (2 * n_max + 1)
    betas = pi * np.arange(n_max + 1) / n_max
    aa, bb = np.meshgrid(alphas, betas, indexing="ij")
    pts = np.column_stack([aa.ravel(), bb.ravel(), np.zeros(aa.size)])
    return pts


def preconditioner_weights(points: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(np.sin(points[:, 1]), 0.0, None))


def precondition(values_or_rows: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Scale row j by sqrt(sin beta_j)."""
    values_or_rows = np.asarray(values_or_rows)
    if values_or_rows.shape[0] != weights.shape[0]:
        raise ShapeError(
            f"row count {values_or_rows.shape[0]} != weight count {weights.shape[0]}"
        )
    if values_or_rows.ndim == 1:
        return values_or_rows * weights
    return values_or_rows * weights[:, None]


def save_measurements(ms: MeasurementSet, csv_path: str, header_path: str) -> None:
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "beta", "gamma", "re", "im", "weight"])
        for (a, b, g), v, w in zip(ms.points, ms.values, ms.weights):
            writer.writerow(
                [
                    repr(float(x))
                    for x in (a, b, g, v.real, v.imag, w)
                ]
            )
    header = {
        "epsilon": ms.epsilon,
        "seed": ms.seed,
        "domain": {"theta1": ms.domain.theta1, "theta2": ms.domain.theta2},
        "count": len(ms),
    }
    with open(header_path, "w") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_measurements(csv_path: str, header_path: str) -> MeasurementSet:
    with open(header_path) as fh:
        header = json.load(fh)
    rows = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    points = rows[:, 0:3]
    values = rows[:, 3] + 1j * rows[:, 4]
    weights = rows[:, 5]
    return MeasurementSet(
        points=points,
        values=values,
        weights=weights,
        epsilon=float(header["epsilon"]),
        seed=int(header["seed"]),
        domain=BeltRegion(header["domain"]["theta1"], header["domain"]["theta2"]),
    )
