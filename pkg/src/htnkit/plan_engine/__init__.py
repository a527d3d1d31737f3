"""Plan-space refinement: decomposition plus causal links, threats and constraint handling."""
from .constraints import propagate, simplify
from .interactions import detect_interactions, establish, resolve_threat
from .linearise import linearise
from .node import CausalLink, RefinementNode, Threat
from .search import (SolutionNetwork, all_solutions_po, initial_node, plan_po,
                     precondition_constraints, solutions_po)

__all__ = [
    "CausalLink", "RefinementNode", "Threat", "SolutionNetwork", "detect_interactions",
    "resolve_threat", "establish", "propagate", "simplify", "linearise", "plan_po",
    "all_solutions_po", "solutions_po", "precondition_constraints", "initial_node",
]
