"""Random-walk sampling and selection-probability estimation on partially
directed networks: graph generation, exact stationary distributions,
renewal-based estimators, and a replicated evaluation harness."""

from .allocation import AllocationScheme, PropertyTable, allocate
from .errors import (AllocationError, ConvergenceError, CoverageError,
                     EstimationError, GenerationError, InputError,
                     RdsWalkError, StructuralError)
from .estimators import (DegreeMoments, FractionalDegrees, NetworkParams,
                         SelectionProbEstimate, decompose_degrees,
                         estimate_alpha, estimate_lambda,
                         estimate_network_params, estimate_proportion,
                         mean_inv_outdegree, pi_indeg, pi_outdeg,
                         pi_renewal_full, pi_renewal_outdeg, pi_uniform)
from .experiments import (ExperimentResult, ExperimentSpec, ExternalGraphModel,
                          run_dtv_experiment, run_proportion_experiment,
                          summarize, tv_distance, write_dtv_csv,
                          write_prop_csv)
from .generators import ErParams, PowerLawParams, gen_directed_er, gen_power_law
from .graphs import (DegreeTriple, DirectedGraph, build_graph, directedness,
                     is_strongly_connected, largest_scc, load_attributes,
                     load_edge_list, save_attributes, save_edge_list)
from .seeding import derive_seed
from .stationary import StationaryDistribution, power_method, solve_exact
from .walk import WalkSample, inverse_outdegree_sum, load_sample, run_walk, save_sample

__version__ = "0.1.0"
