"""Label-propagation graph partitioner on a simulated message-passing runtime.

Library layout:

- ``graph``: whole-graph CSR, vertex distributions, per-task local graphs
- ``bsp``: simulated tasks, collectives, the ghost-update exchange
- ``partition``: the balance/refine partitioner and its driver
- ``gen``: synthetic graph generators (rmat, er, randhd)
- ``metrics``: cut/balance metrics, diameter estimation, method comparison
- ``baselines``: random and block reference partitioners
- ``cli``: the ``lppart`` command
"""

__version__ = "0.1.0"

from .baselines import edge_block_partition, random_partition, vertex_block_partition
from .errors import ConfigError, InputError, LppartError, ProtocolError
from .gen import GenSpec, gen_er, gen_randhd, gen_rmat, generate
from .graph import Distribution, GlobalGraph, LocalGraph, build_csr, distribute, make_distribution
from .metrics import QualityReport, approx_diameter, build_report, edge_cut, imbalance, max_part_cut, performance_ratio
from .partition import Config, PartLedger, PartitionState, SuperstepEvent, compute_mult, xtrapulp

__all__ = [
    "__version__",
    "Config",
    "ConfigError",
    "Distribution",
    "GenSpec",
    "GlobalGraph",
    "InputError",
    "LocalGraph",
    "LppartError",
    "PartLedger",
    "PartitionState",
    "ProtocolError",
    "QualityReport",
    "SuperstepEvent",
    "approx_diameter",
    "build_csr",
    "build_report",
    "compute_mult",
    "distribute",
    "edge_block_partition",
    "edge_cut",
    "gen_er",
    "gen_randhd",
    "gen_rmat",
    "generate",
    "imbalance",
    "make_distribution",
    "max_part_cut",
    "performance_ratio",
    "random_partition",
    "vertex_block_partition",
    "xtrapulp",
]
