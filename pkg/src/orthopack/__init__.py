"""Exact solvers for d-dimensional orthogonal packing problems."""

from .bounds import (
    ConservativeScale, KnapsackProblem, bound_family, scale_family, solve_bounded_knapsack,
    transformed_volume, u_k, volume_criterion,
)
from .graphs import (
    Graph, OddCycleCertificate, Orientation, find_induced_c4, greedy_clique_extend,
    max_weight_clique_comparability, recognize_comparability,
)
from .model import (
    Box, BoxType, Instance, InstanceError, Violation, generate_instance, load_instance, parse_instance,
    serialize_instance, validate_packing,
)
from .okp import OkpNode, OkpOptions, OkpResult, branch_node, greedy_pack, node_upper_bound, opp_decide, reduce_node, solve_okp
from .opp import FEASIBLE, INFEASIBLE, TIMEOUT, Limits, Options, OppVerdict, solve_opp
from .orlib import parse_orlib
from .packing_class import Problem, SearchInfo, build_packing, packingclass_test, verify_packing_class
from .spp import HeightLadder, SppResult, normal_heights, solve_spp

__version__ = "0.1.0"
