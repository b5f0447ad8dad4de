"""Generic rational matrix functions and their isoprincipal families."""
from . import errors, family, linalg, problem, ratfun, singularity
from .family import (
    make_family,
    coupling_at,
    family_eval,
    schlesinger_state,
    schlesinger_residual,
    potential_check,
    tau_logderiv_check,
    tau_path_integral,
    isoprincipal_check,
)
from .ratfun import GenericRatFn, PoleZeroLoci, SemiresidualPair, build, monodromy_loop, structural_checks
from .report import Check, VerificationReport
from .singularity import local_data, verify_regular_factor

__version__ = "0.1.0"
