"""ergmkit: exponential random graph models for undirected brain-scale networks.

Evaluate and incrementally update graph statistics, simulate networks by
Markov-chain tie toggling, estimate parameters (pseudo-likelihood and
Monte-Carlo maximum likelihood), run goodness-of-fit comparisons, execute
model-selection procedures, and compare groups of fitted parameter profiles.
"""

__version__ = "0.1.0"

from .graph import Graph, NodeAttributes, build_graph, toggle_edge
from .kernel import HAVE_COMPILED, KERNEL_NAME
from .terms import ModelSpec, TermSpec, best_assessment, full_candidate, parse_terms

__all__ = [
    "Graph",
    "NodeAttributes",
    "ModelSpec",
    "TermSpec",
    "best_assessment",
    "full_candidate",
    "parse_terms",
    "build_graph",
    "toggle_edge",
    "KERNEL_NAME",
    "HAVE_COMPILED",
    "__version__",
]
