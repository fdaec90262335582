"""Largest-eigenvalue statistics of sample covariance matrices.

Exact Narayana / Dyck-path combinatorics, Marchenko-Pastur moments,
Tracy-Widom laws through the Hastings-McLeod solution of Painleve II, and a
seeded Monte Carlo harness for non-Gaussian entry distributions.
"""

__version__ = "0.1.0"

from .combinatorics import DyckPath, catalan, narayana  # noqa: E402,F401
from .ensembles import EnsembleConfig, EntryDistribution, sample_matrix  # noqa: E402,F401
from .linalg import Spectrum, eig_sym, sample_covariance, trace_power  # noqa: E402,F401
from .mp_law import MPDistribution  # noqa: E402,F401
from .special_functions import solve_painleve_ii, tw_cdf, tw_quantile  # noqa: E402,F401
