"""Scikit-learn style estimator wrappers around the clustering engines.

These exist so the engines compose with pipelines, grid search, and
anything else expecting the fit/fit_predict contract.  Noise keeps the
conventional label -1.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .neighborhood import Dataset
from .p2p import run_p2p_dbscan
from .ps import run_ps_dbscan
from .sequential import sequential_dbscan
from .neighborhood import build_neighbor_graph


class _DBSCANBase(ClusterMixin, BaseEstimator):
    def __init__(self, eps=0.5, min_pts=5):
        self.eps = eps
        self.min_pts = min_pts

    def _dataset(self, X) -> Dataset:
        return Dataset.from_coords(np.asarray(X, dtype=np.float64))

    def _finish(self, result, metrics=None):
        self.labels_ = result.labels
        self.core_flags_ = result.core_flags
        self.core_sample_indices_ = np.nonzero(result.core_flags)[0]
        self.n_clusters_ = result.num_clusters
        self.metrics_ = metrics
        return self


class SequentialDBSCAN(_DBSCANBase):
    """Single-process reference clustering.

    Parameters
    ----------
    eps : float
        Radius of the closed neighborhood ball.
    min_pts : int
        Minimum neighborhood size (self included) for a core point.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
        Canonical cluster label per sample, -1 for noise.
    core_flags_ : ndarray of bool
    core_sample_indices_ : ndarray of int
    n_clusters_ : int
    """

    def fit(self, X, y=None):
        graph = build_neighbor_graph(self._dataset(X), self.eps)
        return self._finish(sequential_dbscan(graph, self.min_pts))


class ParameterServerDBSCAN(_DBSCANBase):
    """Parallel clustering through server-held max-reduce label merging.

    Produces exactly the labels of :class:`SequentialDBSCAN` for any worker
    count; `metrics_` carries the communication accounting of the run.

    Parameters
    ----------
    eps : float
    min_pts : int
    workers : int
        Number of simulated workers.
    seed : int
        Seed for the random partition.
    mode : {"simulated", "concurrent"}
    partition : {"random", "contiguous"}
    """

    def __init__(self, eps=0.5, min_pts=5, workers=4, seed=0, mode="simulated", partition="random"):
        super().__init__(eps=eps, min_pts=min_pts)
        self.workers = workers
        self.seed = seed
        self.mode = mode
        self.partition = partition

    def fit(self, X, y=None):
        result, metrics = run_ps_dbscan(
            self._dataset(X),
            self.eps,
            min_points=self.min_pts,
            num_workers=self.workers,
            seed=self.seed,
            partition=self.partition,
            mode=self.mode,
        )
        return self._finish(result, metrics)


class PeerToPeerDBSCAN(_DBSCANBase):
    """Peer-to-peer merge baseline; same labels, different communication
    pattern (per-edge merge requests with chain forwarding)."""

    def __init__(self, eps=0.5, min_pts=5, workers=4, seed=0, partition="random"):
        super().__init__(eps=eps, min_pts=min_pts)
        self.workers = workers
        self.seed = seed
        self.partition = partition

    def fit(self, X, y=None):
        result, metrics = run_p2p_dbscan(
            self._dataset(X),
            self.eps,
            min_points=self.min_pts,
            num_workers=self.workers,
            seed=self.seed,
            partition=self.partition,
        )
        return self._finish(result, metrics)
