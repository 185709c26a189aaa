"""Numerical checks of Born's rule: probability matrices between measurement
contexts, unistochasticity, unitary context maps and Gleason frame functions."""

from bornlab.csm import (
    Context,
    ContextMap,
    GroupElement,
    Projector,
    born,
    born_matrix,
    consistency_check,
    map_from_contexts,
    spin_rotation,
    standard_context,
    transform_context,
)
from bornlab.gleason import FrameFunction, eval_frame, fit_density, sample_contexts, verify_frame_hypothesis
from bornlab.numerics import RngStream, frobenius_distance, haar_unitary, hermitian_eig, svd
from bornlab.phase_recovery import RecoverySettings, recover
from bornlab.stochastic import (
    MatrixKind,
    build_sigma,
    chain_link_3x3,
    classify,
    extract_probability,
    is_bistochastic,
    sample_bistochastic,
    singular_value_profile,
    validate_stochastic,
)

__version__ = "0.1.0"
