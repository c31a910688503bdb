"""Stable set lattices of polarities, their first-order language, completions
of finite lattices, and finite ultraproduct checks."""

from .completions import (
    Completion,
    canonical_extension,
    completion_to_dot,
    completion_to_json,
    is_compact,
    is_dense,
    lower_can_ext,
    lower_macneille_ext,
    macneille,
    macneille_expansion,
    sigma_expansion,
    upper_can_ext,
    upper_macneille_ext,
)
from .errors import (
    EmptyIndex,
    HypothesisFailed,
    InputError,
    NotALattice,
    NotAPartialOrder,
    NotClosed,
    NotIsotone,
    NotMonotone,
    PreconditionViolated,
    SignatureMismatch,
    SizeCapExceeded,
    WorkbenchError,
)
from .expansions import (
    OmegaLattice,
    OperatorSymbol,
    build_p_plus_omega,
    is_complete_normal_dual_operator,
    is_complete_normal_operator,
    is_omega_homomorphism,
)
from .formula import Signature, parse, to_text
from .kernels import BACKEND
from .order import FinLattice, FinPoset, LatticeMap, find_isomorphism, find_monomorphism, lattice_from_json
from .polarity import Polarity, closure, lam, polarity_from_json, rho, stable_set_lattice
from .semantics import InterpretedStructure, check_sigma_phi, define_set, evaluate
from .ultra import FiniteUltrafilter, UltraproductStructure, enumerate_ultrafilters, los_check, theta

__version__ = "0.1.0"
