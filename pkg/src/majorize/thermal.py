"""Asymptotic catalytic thermal majorization for energy-diagonal states.

A state diagonal in the energy eigenbasis reduces to its eigenvalue vector,
and convertibility by Gibbs-preserving channels becomes pair majorization of
(state, Gibbs) experiments.  The decision dispatches on the ranks of the two
states: full-rank pairs need two-sided divergence margins, a rank-deficient
source needs only one-sided ones, and a full-rank source can never reach a
rank-deficient target at all.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import softmax

from .certify import (
    CertReport,
    CheckRecord,
    GridSpec,
    Verdict,
    certify_dichotomy_asymptotic,
    certify_general_dichotomy_asymptotic,
)
from .errors import (
    DimensionMismatchError,
    InvalidDataError,
    NormMismatchError,
    ParameterError,
)
from .experiment import ZERO_FLOOR, Experiment, SupportRegime
from .functionals import Direction, renyi


class ThermalAnswer(enum.Enum):
    YES = "YES"
    NO = "NO"
    INCONCLUSIVE = "INCONCLUSIVE"


class ThermalCase(enum.Enum):
    BOTH_FULL_RANK = "both_full_rank"
    RHO_NOT_FULL_RANK = "rho_not_full_rank"
    IMPOSSIBLE_SUPPORT = "impossible_support"


class ThermalSystem:
    """An energy spectrum with an inverse temperature.

    Energies must be strictly positive; inputs that are not are shifted by a
    constant (recorded in ``shift``), which leaves the Gibbs weights
    unchanged.  The Gibbs vector is computed once and must not underflow.
    """

    __slots__ = ("_energies", "_beta", "_shift", "_gibbs")

    def __init__(self, energies, beta: float):
        e = np.asarray(energies, dtype=float)
        if e.ndim != 1 or e.size == 0:
            raise InvalidDataError("energies must form a nonempty vector")
        if np.isnan(e).any() or np.isinf(e).any():
            raise InvalidDataError("energies must be finite")
        beta = float(beta)
        if not np.isfinite(beta) or beta <= 0.0:
            raise ParameterError("inverse temperature must be a positive real")
        low = float(e.min())
        shift = 1.0 - low if low <= 0.0 else 0.0
        e = e + shift
        gibbs = softmax(-beta * e)
        if (gibbs < ZERO_FLOOR).any():
            raise InvalidDataError(
                "Gibbs weights underflow at this inverse temperature"
            )
        e.setflags(write=False)
        gibbs.setflags(write=False)
        self._energies = e
        self._beta = beta
        self._shift = shift
        self._gibbs = gibbs

    @property
    def energies(self) -> np.ndarray:
        return self._energies

    @property
    def beta(self) -> float:
        return self._beta

    @property
    def shift(self) -> float:
        return self._shift

    @property
    def gibbs(self) -> np.ndarray:
        return self._gibbs

    @property
    def dim(self) -> int:
        return self._energies.shape[0]


@dataclass(frozen=True)
class DiagonalState:
    """Eigenvalues of a density operator in the fixed energy eigenbasis order."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.eigenvalues, dtype=float).copy()
        if v.ndim != 1 or v.size == 0:
            raise InvalidDataError("eigenvalues must form a nonempty vector")
        if np.isnan(v).any() or np.isinf(v).any() or (v < 0).any():
            raise InvalidDataError("eigenvalues must be finite and nonnegative")
        if abs(float(v.sum()) - 1.0) > 1e-9:
            raise NormMismatchError("eigenvalues must sum to one")
        v.setflags(write=False)
        object.__setattr__(self, "eigenvalues", v)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def is_full_rank(self) -> bool:
        return bool((self.eigenvalues >= ZERO_FLOOR).all())


@dataclass(frozen=True)
class ThermalVerdict:
    answer: ThermalAnswer
    case: ThermalCase
    report: CertReport | None
    shift: float
    note: str = ""


def gibbs_vector(sys: ThermalSystem) -> np.ndarray:
    return sys.gibbs


def free_energy(
    rho: DiagonalState, sys: ThermalSystem, alpha: float, sign: str = "plus"
) -> float:
    """Divergence from (or to) the Gibbs state, defined for orders >= 1/2."""
    if not alpha >= 0.5:
        raise ParameterError("free energies are defined for orders >= 1/2")
    if rho.dim != sys.dim:
        raise DimensionMismatchError("state and system dimensions differ")
    if sign == "plus":
        return renyi(rho.eigenvalues, sys.gibbs, alpha)
    if sign == "minus":
        return renyi(sys.gibbs, rho.eigenvalues, alpha)
    raise ParameterError("sign must be 'plus' or 'minus'")


def _answer(verdict: Verdict) -> ThermalAnswer:
    if verdict is Verdict.SUFFICIENT:
        return ThermalAnswer.YES
    if verdict is Verdict.NECESSARY_FAIL:
        return ThermalAnswer.NO
    return ThermalAnswer.INCONCLUSIVE


def thermal_check(
    rho: DiagonalState,
    sigma: DiagonalState,
    sys: ThermalSystem,
    grid: GridSpec = GridSpec(),
) -> ThermalVerdict:
    """Decide asymptotic catalytic convertibility under Gibbs-preserving maps."""
    if rho.dim != sys.dim or sigma.dim != sys.dim:
        raise DimensionMismatchError("states must match the system dimension")
    lam_b = sys.gibbs
    rho_full = rho.is_full_rank()
    sigma_full = sigma.is_full_rank()

    if np.array_equal(rho.eigenvalues, sigma.eigenvalues):
        case = ThermalCase.BOTH_FULL_RANK if rho_full else ThermalCase.RHO_NOT_FULL_RANK
        return ThermalVerdict(
            ThermalAnswer.YES, case, None, sys.shift,
            note="identical states convert by the identity channel",
        )

    if not rho_full:
        p = Experiment((rho.eigenvalues, lam_b))
        q = Experiment((sigma.eigenvalues, lam_b))
        report = certify_dichotomy_asymptotic(p, q, grid)
        return ThermalVerdict(
            _answer(report.verdict), ThermalCase.RHO_NOT_FULL_RANK, report, sys.shift
        )

    if not sigma_full:
        # the source's alpha -> 0 divergence from Gibbs is 0, the target's is
        # strictly positive, so the necessary margin family already fails
        value_p = renyi(rho.eigenvalues, lam_b, 0.0)
        value_q = renyi(sigma.eigenvalues, lam_b, 0.0)
        check = CheckRecord(
            functional="renyi",
            alpha=0.0,
            charset=None,
            column=0,
            value_p=value_p,
            value_q=value_q,
            margin=value_p - value_q,
            strict=False,
            direction=Direction.LARGER_IS_STRONGER,
        )
        report = CertReport(
            SupportRegime.DICHOTOMY,
            Verdict.NECESSARY_FAIL,
            grid,
            (check,),
            note="full-rank states cannot reach rank-deficient ones",
        )
        return ThermalVerdict(
            ThermalAnswer.NO, ThermalCase.IMPOSSIBLE_SUPPORT, report, sys.shift
        )

    p = Experiment((rho.eigenvalues, lam_b))
    q = Experiment((sigma.eigenvalues, lam_b))
    report = certify_general_dichotomy_asymptotic(p, q, grid)
    return ThermalVerdict(
        _answer(report.verdict), ThermalCase.BOTH_FULL_RANK, report, sys.shift
    )
