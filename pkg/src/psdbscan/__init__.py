"""Parallel DBSCAN with parameter-server label merging.

Three interchangeable engines produce identical clusterings: a sequential
reference, a parameter-server engine (synchronous max-reduce plus global
path compression), and a peer-to-peer merge baseline kept around for
communication-cost comparisons.
"""

from .datagen import calibrate_eps, gen_blobs, gen_chain, gen_with_target_degree
from .dsu import DisjointSet
from .errors import DataError, InputError, ProtocolError
from .estimators import ParameterServerDBSCAN, PeerToPeerDBSCAN, SequentialDBSCAN
from .metrics import CommMetrics, RoundStats
from .neighborhood import (
    Dataset,
    GridIndex,
    NeighborGraph,
    build_neighbor_graph,
    ingest_linkage,
    mean_degree,
    query_radius,
)
from .p2p import MergeRequest, run_p2p_dbscan
from .ps import partition_points, run_ps_dbscan
from .sequential import NOISE, ClusteringResult, sequential_dbscan

__version__ = "0.1.0"

__all__ = [
    "CommMetrics",
    "ClusteringResult",
    "DataError",
    "Dataset",
    "DisjointSet",
    "GridIndex",
    "InputError",
    "MergeRequest",
    "NeighborGraph",
    "NOISE",
    "ParameterServerDBSCAN",
    "PeerToPeerDBSCAN",
    "ProtocolError",
    "RoundStats",
    "SequentialDBSCAN",
    "build_neighbor_graph",
    "calibrate_eps",
    "gen_blobs",
    "gen_chain",
    "gen_with_target_degree",
    "ingest_linkage",
    "mean_degree",
    "partition_points",
    "query_radius",
    "run_p2p_dbscan",
    "run_ps_dbscan",
    "sequential_dbscan",
]
