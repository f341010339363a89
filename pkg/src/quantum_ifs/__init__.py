"""Quantum iterated function systems on density matrices.

Invariant states, Ruelle eigenpairs, stationary entropy and the pressure
inequalities for finite-dimensional systems.
"""

from .errors import (DominanceWarning, InfeasibleError, NoConvergence, QifsError, ValidationError)
from .matrixcore import (DensityMatrix, PureState, bures_distance, hermitize, hs_distance, partial_trace_b,
                         projector, pure_state, trace_distance, validate_density, von_neumann_entropy)
from .measures import (AtomicMeasure, barycenter, duality_check, entropy_of_measure, invariance_residual,
                       markov_push, partial_entropy_measure, partial_entropy_state, transfer_apply,
                       transfer_power)
from .qifs import (Branch, FixedPointResult, QifsSystem, branch_map, branch_prob, fixed_point,
                   homogeneous_system, iterate_cptp, lambda_map, make_system, ruelle_apply)
from .spectral import (EigenPair, StochasticEmbedding, closed_form_2x2, embed_markov_kraus, embed_perron,
                       power_eigenpair)
from .thermo import (CoordinatePressureReport, PressureReport, WeightGrid, basic_inequality,
                     basic_inequality_coords, build_basic_from_classic, capacity_cost, classic_inequality,
                     lagrangian_f, markov_entropy, maximizer_unitary, reduced_basic_inequality,
                     stationary_entropy, stationary_entropy_alt)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
