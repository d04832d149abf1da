"""Synthetic dataset generators for the benchmark harness.

All generators are deterministic under their seed.  `gen_with_target_degree`
tunes eps on a fixed uniform cloud so the measured mean neighborhood size
lands near a requested value; `gen_chain` builds a single path-shaped
cluster whose contiguous blocks land on different workers, the adversarial
layout for cross-worker merging.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .neighborhood import Dataset, mean_degree

# Relative slack accepted on the achieved mean degree.
DEGREE_TOLERANCE = 0.2


def gen_blobs(num_points: int, dim: int, num_clusters: int, spread: float, seed: int = 0) -> Dataset:
    """Gaussian blobs around centers placed uniformly at random in a box of
    side 10.  Points are dealt to clusters round-robin so sizes balance."""
    if num_clusters < 1 or num_points < num_clusters:
        raise InputError(
            f"need num_points >= num_clusters >= 1, got {num_points}, {num_clusters}"
        )
    if dim < 1:
        raise InputError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.0, 10.0, size=(num_clusters, dim))
    assignment = np.arange(num_points) % num_clusters
    coords = centers[assignment] + rng.normal(0.0, spread, size=(num_points, dim))
    return Dataset.from_coords(coords)


def calibrate_eps(dataset: Dataset, target_avg_degree: float) -> float:
    """Binary search for an eps whose mean neighborhood size (self excluded)
    is within the tolerance of the target, on this fixed point cloud."""
    if not 1 <= target_avg_degree < dataset.n:
        raise InputError(
            f"target degree must satisfy 1 <= target < num_points, got {target_avg_degree}"
        )
    span = float(np.linalg.norm(dataset.coords.max(axis=0) - dataset.coords.min(axis=0)))
    lo = 0.0
    hi = max(span / dataset.n, 1e-9)
    while mean_degree(dataset, hi) < target_avg_degree:
        hi *= 2.0
        if hi > max(2.0 * span, 1.0):  # every pair already within reach
            raise InputError(f"target degree {target_avg_degree} unreachable on this cloud")
    for _ in range(60):
        mid = (lo + hi) / 2.0
        if mid == lo or mid == hi or mid <= 0:
            break
        got = mean_degree(dataset, mid)
        if abs(got - target_avg_degree) <= 0.5 * DEGREE_TOLERANCE * target_avg_degree:
            return mid
        if got < target_avg_degree:
            lo = mid
        else:
            hi = mid
    achieved = mean_degree(dataset, hi)
    if abs(achieved - target_avg_degree) > DEGREE_TOLERANCE * target_avg_degree:
        raise InputError(f"could not reach degree {target_avg_degree} (best {achieved:.2f})")
    return hi


def gen_with_target_degree(num_points: int, target_avg_degree: float, seed: int = 0) -> tuple[Dataset, float]:
    """Uniform 2-d cloud plus an eps calibrated so the mean neighborhood
    size (self excluded) lands within 20% of the target."""
    rng = np.random.default_rng(seed)
    if not 1 <= target_avg_degree < num_points:
        raise InputError(
            f"target degree must satisfy 1 <= target < num_points, got {target_avg_degree}"
        )
    dataset = Dataset.from_coords(rng.uniform(0.0, 1.0, size=(num_points, 2)))
    return dataset, calibrate_eps(dataset, target_avg_degree)


def gen_chain(num_points: int, num_workers_to_span: int, seed: int = 0) -> tuple[Dataset, float, str]:
    """One path-shaped cluster: unit-spaced points on a line with tiny
    vertical jitter, eps covering exactly the two path neighbors.  Under the
    returned "contiguous" partition hint, consecutive path segments land on
    different workers, so the cluster spans all of them."""
    if num_points < num_workers_to_span:
        raise InputError(
            f"num_points={num_points} must be >= num_workers_to_span={num_workers_to_span}"
        )
    rng = np.random.default_rng(seed)
    xs = np.arange(num_points, dtype=np.float64)
    ys = rng.normal(0.0, 0.01, size=num_points)
    dataset = Dataset.from_coords(np.column_stack([xs, ys]))
    return dataset, 1.25, "contiguous"
