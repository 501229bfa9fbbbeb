"""Counting statistics of many-particle quantum walks on beam-splitter arrays."""

from .combinatorics import Species, central_block
from .correlator import general_correlator, mean_occupation, two_mode_correlator
from .counting import (
    CountingDistribution,
    MomentTable,
    conditional_imbalance,
    counting_distribution,
    pair_averaged_statistics,
)
from .lattice import LatticeConfig, build_evolution

__version__ = "0.1.0"
