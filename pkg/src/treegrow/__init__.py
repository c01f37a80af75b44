"""treegrow: exact increasing couplings for weighted random trees.

Plane trees weighted by log-concave offspring sequences, random integer
compositions, and inhomogeneous random subtrees of the Ulam-Harris tree,
all grown one step at a time as Markov processes whose transition tables
are computed in exact rational arithmetic and verified against
brute-force enumeration.
"""

__version__ = "0.1.0"

from .errors import (DomainError, HorizonError, NotCoupleable, ParseError, Refused,
                     TreegrowError, ZeroMassError)
from .treespace import (PlaneTree, RootedSubtree, Word, children_count, complete_d_ary,
                        compose_root, decompose_root, format_tree, is_bouquet_addition,
                        is_right_leaning_leaf_addition, parse_tree, to_dot)
from .compositions import (ArithClass, BSequence, Composition, StepLaw, WeightPair,
                           check_admissibility_inequalities, comp_distribution,
                           composition_kernel, covering_successors, first_part_law,
                           monotone_step_kernel, partition_function,
                           sample_composition_chain, satisfies_arith, shift)
from .sgtrees import (GrowthChain, PartitionTables, WeightSequence, check_ratio_chain,
                      check_toeplitz_tp2, check_tp2_array, compute_tables, grow_chain,
                      growth_kernel_row, is_log_concave, sg_distribution, tilt)
from .subtree_model import (SubtreeChain, SummableTheta, apply_shuffle, bij_P, bij_P_inv,
                            check_equivariance, elementary_symmetric, inverse_shuffle,
                            naive_subtree_chain, nested_coupling_law, nested_subset_coupling,
                            push, push_forward, st_distribution, sigma_rule,
                            shuffle_invariance_check, subset_distribution,
                            subtree_grow_chain)
from .oracle import (ExactLaw, GofReport, enumerate_plane_trees, enumerate_subtrees,
                     exact_law, goodness_of_fit, janson_expectations,
                     kernel_interchange_check, tv_distance)
