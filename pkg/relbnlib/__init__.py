from .Constants import *
from .errors import *
from .config import InferenceConfig, DEFAULT_CONFIG
from .model import *
from .Validator import validate_spec, parvariable_graph, ValidationReport, Violation, ViolationKind
from .fragments import classify_fragment
from .Parser import parse_spec, parse_query, parse_formula
from .render import render_spec, render_formula, render_query, render_network, render_assignment
from .ground import ground_formula, ground_spec, relevant_subnetwork, fold_constants
from .infer import (InferenceStats, joint_probability, query_probability, probability_of,
                    check_gamma, decide_threshold, positive_query_product, mpe_bruteforce)
from .edgecover import (BwGraph, ClassBGraph, ClassBCounter, EdgeKind, classify_edge, count_covers,
                        count_covers_bruteforce, count_covers_classB,
                        count_covers_all_black_bipartite, partition_function,
                        partition_function_bruteforce, min_edge_cover_bipartite_complete,
                        glauber_chain, glauber_sample, parse_bwg, render_bwg)
from .cnf import (Cnf, parse_dimacs, render_dimacs, count_models, count_models_bruteforce,
                  count_one_in_three, one_in_three_gadget, matrix_problem_to_formula,
                  matrix_count_bruteforce, linmoncbpc_to_bwgraph, intersection_graph)
from .dllite import (normalize, NormalizedDlliteSpec, RoleReductionInstance, role_factor,
                     infer_positive, mpe, MpeResult)
from .encode import (Cpt, cpt_to_axioms, noisy_or, PlateModel, PlateVariable, plate_to_spec, Prm,
                     Skeleton, PrmEncoding, prm_to_spec, parse_plate, parse_prm, parse_skeleton)
from .engines import EngineFactory, EngineResult, Engine
