"""Finite ultrametric spaces as pruned trees.

Validate distance matrices, coerce them to dyadic values, build the
representing tree (a dendrogram of closed balls), check the tree
distance against the original metric exactly, and decide topological
properties (total boundedness, separability, discreteness, perfectness,
doubling) from tree structure, with brute-force cross-checks on small
instances.
"""
from ._kernels import BACKEND_NAME
from .analysis import (AnalysisReport, BallRequest, analyze, analyze_tree,
                       count_positions, doubling_bruteforce, doubling_necessary,
                       doubling_sufficient, is_discrete, is_perfect,
                       is_totally_bounded, isolated_branches, max_offspring,
                       vitali_select)
from .metric import (Ball, DistanceMatrix, StructuralError, ValidationReport,
                     Witness, ball, diam, from_entries, is_r_separated, validate)
from .represent import (Branch, RepresentedClade, RepresentingTree, build,
                        completion, d_T, export_newick, verify_isometry)
from .sdz import (NotSDZError, NotUltrametricError, RadiusSchedule, check_sdz,
                  closed_equals_open, coerce_sdz, g_round, open_equals_closed,
                  order_type, radius_schedule)
from .trees import (STALK, CapExceededError, CladeSpace, ExplicitTree,
                    GeneratorTree, HorizonError, Node, PrunedTree, Subtree,
                    basis_ball, canopy, children, closure_canopy, d2,
                    is_subcanopy, node, stalk_node, subtree_at)

__version__ = "0.1.0"
