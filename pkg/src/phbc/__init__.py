"""Port-Hamiltonian boundary control systems on the unit interval.

Systems ``dx/dt = P1 d/dzeta (H x) + P0 H x`` with boundary input
``u = WB [(Hx)(1); (Hx)(0)]`` and output ``y = WC [(Hx)(1); (Hx)(0)]``:
standing-assumption checks, boundary algebra, characteristic
decomposition, transfer functions, a finite-volume simulator, feedback
decomposition of the input map and Gramian-based control synthesis.
"""

from .boundary import (BoundaryPair, LiftOperator, RightInversePair, build_lift,
                       check_contraction, check_impedance_energy_preserving,
                       convert_boundary_matrices, flow_effort_matrix, from_flow_effort,
                       right_inverse_construct, to_flow_effort, to_trace_matrices)
from .control import (DiscreteLTI, FeedbackPlan, Gramian, InputScaling, build_plan,
                      closed_loop_identity, discretize, gramian, output_feedback,
                      reach_error, scale_input_equivalence, synthesize)
from .exceptions import (CFLError, DimensionError, IllPosedError, PHBCError, RankError,
                         SingularGramianError, SpectralPointError, StiffnessError)
from .frequency import (FeedthroughEstimate, TransferSample, admissible, estimate_feedthrough,
                        propagate, trace_subspace, transfer)
from .simulate import (ControlSignal, Scheme, Trajectory, energy, passivity_probe, simulate,
                       step)
from .spectral import (Diagonalization, GenerationReport, check_generation, default_horizon,
                       diagonalize_field, incoming_bases, traversal_times)
from .systems import (Check, MatrixField, PHSystem, StateGrid, ValidationReport, energy_norm,
                      validate_system)

__version__ = '0.1.0'
