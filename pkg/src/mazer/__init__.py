"""Quantum theory of the one-photon mazer in dressed-state coordinates.

Two-level atoms scatter off the dressed-channel potentials +-kappa_n^2 u(z) of
a cavity mode; this package computes the channel amplitudes, converts initial
atom-field states to dressed-state coordinates and evaluates populations,
photon statistics and reflection/transmission probabilities, including the
perfect trapping states |gamma+->.
"""
from ._accel import backend_name
from .dressed import (DressedCoordinates, PureState, TrappingParam, basis_state,
                      from_dressed_coordinates, joint_state, product_state,
                      to_dressed_coordinates, trapping_state, truncation_level)
from .errors import (ExpressionEvalError, ExpressionSyntaxError, MazerError, NumericalFailure,
                     UnknownIdentifierError, ValidationError)
from .expr import parse_profile_expr, to_text
from .observables import (ObservablesReport, WavePacketSpec, delta_n, delta_P, delta_sigma_aa,
                          full_report, kernel_K, reflection_transmission, sigma_aa_initial,
                          trapping_RT, ultracold_RT_plus, wavepacket_average)
from .profiles import ModeProfile, effective_support, eval_mode, make_profile
from .scattering import (Amplitudes, Channel, SolverConfig, amplitude_table, kappa_n_ratio,
                         scatter, scatter_mesa_analytic, scatter_transfer_matrix,
                         unitarity_defect)

__version__ = "0.1.0"
