"""Matrix majorization between tuples of probability vectors.

Decide whether one statistical experiment can be converted into another by a
single column-stochastic map, exactly (LP feasibility), in large samples
(tensor powers), or catalytically, under varying support restrictions; with
grid certificates built from complete families of monotone functionals, power
universality classifiers, explicit catalysts, and the thermal-majorization
application for energy-diagonal quantum states.
"""

from .catalysis import (
    DEFAULT_N_MAX,
    CatalystSearchResult,
    SearchKind,
    build_catalyst,
    catalyst_blocks,
    find_catalytic_n,
    find_large_sample_n,
    perturb_output,
)
from .certify import (
    CertReport,
    CheckRecord,
    GridSpec,
    Verdict,
    certify_dichotomy_asymptotic,
    certify_dichotomy_exact,
    certify_dominating,
    certify_general_dichotomy_asymptotic,
    certify_minimal,
    certify_minimal_asymptotic,
    dominating_d3_layout,
    simplex_grid,
)
from .errors import (
    DimensionMismatchError,
    InvalidDataError,
    MajorizeError,
    NormMismatchError,
    ParameterError,
    RegimeError,
    ResourceLimitError,
)
from .experiment import (
    DEFAULT_ROW_CAP,
    ZERO_FLOOR,
    Experiment,
    SupportRegime,
    box_plus,
    box_times,
    classify_regime,
    column_norms,
    is_dichotomy,
    is_dominating,
    is_semiring_member,
    restrict,
    support_regime,
    tensor_power,
)
from .feasibility import (
    DEFAULT_TOL,
    FeasibilityResult,
    StochasticMatrix,
    majorizes,
    vector_majorizes,
)
from .functionals import (
    Direction,
    KlimeshMargin,
    MonotoneValue,
    NormMargin,
    ParamPoint,
    Region,
    derivation_kl,
    klimesh_check,
    lalpha_norm_check,
    monotone_values,
    multivar_divergence,
    phi,
    phi_dc,
    phi_dc_log,
    phi_degenerate,
    phi_many,
    phi_tropical,
    renyi,
    renyi_curve,
    tropical_divergence,
)
from .power_universal import (
    PowerUniversalReport,
    SupportWitness,
    classify_dominating,
    classify_minimal,
    homomorphism_criterion,
)
from .thermal import (
    DiagonalState,
    ThermalAnswer,
    ThermalCase,
    ThermalSystem,
    ThermalVerdict,
    free_energy,
    gibbs_vector,
    thermal_check,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_N_MAX",
    "DEFAULT_ROW_CAP",
    "DEFAULT_TOL",
    "ZERO_FLOOR",
    "CatalystSearchResult",
    "CertReport",
    "CheckRecord",
    "DiagonalState",
    "DimensionMismatchError",
    "Direction",
    "Experiment",
    "FeasibilityResult",
    "GridSpec",
    "InvalidDataError",
    "KlimeshMargin",
    "MajorizeError",
    "MonotoneValue",
    "NormMargin",
    "NormMismatchError",
    "ParamPoint",
    "ParameterError",
    "PowerUniversalReport",
    "Region",
    "RegimeError",
    "ResourceLimitError",
    "SearchKind",
    "StochasticMatrix",
    "SupportRegime",
    "SupportWitness",
    "ThermalAnswer",
    "ThermalCase",
    "ThermalSystem",
    "ThermalVerdict",
    "Verdict",
    "box_plus",
    "box_times",
    "build_catalyst",
    "catalyst_blocks",
    "certify_dichotomy_asymptotic",
    "certify_dichotomy_exact",
    "certify_dominating",
    "certify_general_dichotomy_asymptotic",
    "certify_minimal",
    "certify_minimal_asymptotic",
    "classify_dominating",
    "classify_minimal",
    "classify_regime",
    "column_norms",
    "derivation_kl",
    "dominating_d3_layout",
    "find_catalytic_n",
    "find_large_sample_n",
    "free_energy",
    "gibbs_vector",
    "homomorphism_criterion",
    "is_dichotomy",
    "is_dominating",
    "is_semiring_member",
    "klimesh_check",
    "lalpha_norm_check",
    "majorizes",
    "monotone_values",
    "multivar_divergence",
    "perturb_output",
    "phi",
    "phi_dc",
    "phi_dc_log",
    "phi_degenerate",
    "phi_many",
    "phi_tropical",
    "renyi",
    "renyi_curve",
    "restrict",
    "simplex_grid",
    "support_regime",
    "tensor_power",
    "thermal_check",
    "tropical_divergence",
    "vector_majorizes",
]
