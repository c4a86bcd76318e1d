"""Exact and Monte Carlo analysis of two-spin Gibbs distributions on graphs.

The package computes, at desk scale and with exhaustive cross-checks:

* graph walk structure: self-avoiding walks, radius-k connective constants,
  non-backtracking matrices and their power norms (``graph``, ``spectral``);
* exact Gibbs quantities by enumeration: partition functions, marginals,
  influence matrices, marginal boundedness (``gibbs``);
* the tree of self-avoiding walks and the influence matrix as tree path sums
  (``tsaw``);
* uniqueness thresholds and contraction / potential certificates
  (``regimes``);
* walk extensions of graphs and distributions and the walk-indexed influence
  machinery (``extensions``);
* Glauber dynamics with exact transition-matrix checks, mixing estimates and
  a partition-function estimator (``dynamics``).
"""

__version__ = "0.1.0"

from .gibbs import GibbsSpec, Pinning
from .graph import Graph, SawWalk, load_edge_list

__all__ = ["GibbsSpec", "Graph", "Pinning", "SawWalk", "load_edge_list", "__version__"]
