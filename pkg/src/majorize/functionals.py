"""Order-monotone functionals of experiments.

Everything here reduces under a column-stochastic map: applying the same
stochastic matrix to every column of an experiment can only move these values
in one fixed direction.  Which direction depends on the functional, recorded
as :class:`Direction`.

All sums of products are evaluated in log space.  The convention 0**0 = 1 is
realized by skipping zero exponents, and entries below
:data:`~majorize.experiment.ZERO_FLOOR` count as exact zeros for supports.
Values are extended reals: +inf and -inf are legitimate outputs, NaN is a
hard error on input.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidDataError, ParameterError, RegimeError
from .experiment import (
    Experiment,
    SupportRegime,
    ZERO_FLOOR,
    classify_regime,
    is_dominating,
)

_SUM_TOL = 1e-9


class Direction(enum.Enum):
    """Which side a monotone favors under stochastic post-processing.

    ``LARGER_IS_STRONGER``: the value can only shrink along a stochastic map,
    so the source of a conversion carries the larger value.
    ``SMALLER_IS_STRONGER``: the value can only grow, so the source carries
    the smaller value.
    """

    LARGER_IS_STRONGER = "larger_is_stronger"
    SMALLER_IS_STRONGER = "smaller_is_stronger"


class Region(enum.Enum):
    """Parameter regions for the divergence families."""

    A_PLUS_INTERIOR = "a_plus_interior"   # sum 1, all weights > 0
    A_PLUS_FACET = "a_plus_facet"         # sum 1, all weights >= 0, some 0
    A_MINUS_RAY = "a_minus_ray"           # sum 1, one weight > 0, rest <= 0
    B_TROPICAL = "b_tropical"             # sum 0, one weight > 0, rest <= 0


@dataclass(frozen=True)
class ParamPoint:
    """A weight vector together with its region tag and optional character set."""

    alpha: tuple[float, ...]
    region: Region
    character: tuple[int, ...] | None = None

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, a in enumerate(self.alpha) if a > 0.0)

    @property
    def is_vertex(self) -> bool:
        return sum(1 for a in self.alpha if a != 0.0) == 1 and max(self.alpha) == 1.0


@dataclass(frozen=True)
class MonotoneValue:
    """One functional evaluated on one experiment, kept in log domain."""

    functional: str
    alpha: tuple[float, ...] | float | None
    charset: tuple[int, ...] | None
    column: int | None
    log_value: float
    direction: Direction


# -- small shared helpers -----------------------------------------------------


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise InvalidDataError(f"{name} must be one-dimensional")
    if np.isnan(v).any():
        raise InvalidDataError(f"{name} contains NaN")
    if (v < 0.0).any():
        raise InvalidDataError(f"{name} has negative entries")
    return v


def _safe_log(v: np.ndarray) -> np.ndarray:
    out = np.full(v.shape, -np.inf)
    pos = v >= ZERO_FLOOR
    out[pos] = np.log(v[pos])
    return out


def _charset(charset: Iterable[int], d: int) -> tuple[int, ...]:
    cs = tuple(sorted(set(int(c) for c in charset)))
    if not cs:
        raise ParameterError("character set must be nonempty")
    if cs[0] < 0 or cs[-1] >= d:
        raise ParameterError(f"character set {cs} out of range for {d} columns")
    return cs


def _simplex_weights(alpha, d: int) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if a.shape != (d,):
        raise ParameterError(f"weight vector must have length {d}")
    if np.isnan(a).any():
        raise ParameterError("weight vector contains NaN")
    if (a < 0.0).any():
        raise ParameterError("weights must be nonnegative here")
    if abs(a.sum() - 1.0) > _SUM_TOL:
        raise ParameterError(f"weights must sum to 1, got {a.sum()!r}")
    return a


# -- Renyi divergences --------------------------------------------------------


def renyi(p, q, alpha: float) -> float:
    """Renyi divergence of order ``alpha`` between two nonnegative vectors.

    Follows the support-sensitive case table: orders below 1 only see the
    common support; orders 1 and above require the support of ``p`` to sit
    inside the support of ``q`` and are +inf otherwise.  Inputs need not be
    normalized.
    """
    return float(renyi_curve(p, q, [alpha])[0])


def renyi_curve(p, q, alphas: Sequence[float]) -> np.ndarray:
    """Vectorized :func:`renyi` over a list of orders (``math.inf`` allowed)."""
    pv = _as_vector(p, "p")
    qv = _as_vector(q, "q")
    if pv.shape != qv.shape:
        raise InvalidDataError("p and q must have the same length")
    a = np.asarray(alphas, dtype=float)
    if np.isnan(a).any() or (a < 0.0).any():
        raise ParameterError("orders must be in [0, inf]")

    sp = pv >= ZERO_FLOOR
    sq = qv >= ZERO_FLOOR
    both = sp & sq
    contained = not np.any(sp & ~sq)
    lp = _safe_log(pv)
    lq = _safe_log(qv)

    out = np.empty(a.shape, dtype=float)
    for idx, alpha in np.ndenumerate(a):
        if alpha == 0.0:
            if both.any():
                out[idx] = -logsumexp(lq[both])
            else:
                out[idx] = math.inf
        elif alpha < 1.0:
            if both.any():
                terms = alpha * lp[both] + (1.0 - alpha) * lq[both]
                out[idx] = logsumexp(terms) / (alpha - 1.0)
            else:
                out[idx] = math.inf
        elif alpha == 1.0:
            if contained:
                i = sp
                out[idx] = float(np.sum(pv[i] * (lp[i] - lq[i]))) if i.any() else 0.0
            else:
                out[idx] = math.inf
        elif math.isinf(alpha):
            if contained:
                out[idx] = float(np.max(lp[sp] - lq[sp])) if sp.any() else -math.inf
            else:
                out[idx] = math.inf
        else:
            if contained:
                i = sp
                if i.any():
                    terms = alpha * lp[i] + (1.0 - alpha) * lq[i]
                    out[idx] = logsumexp(terms) / (alpha - 1.0)
                else:
                    out[idx] = -math.inf
            else:
                out[idx] = math.inf
    return out


def multivar_divergence(exp: Experiment, alpha) -> float:
    """Joint divergence of a d-column experiment at a weight vector.

    The weights must sum to 1 and lie in the closed simplex or on one of the
    single-positive-weight rays (one weight above 1, the rest nonpositive);
    the simplex vertices themselves are excluded.  Normalization is by
    ``max(alpha) - 1``.
    """
    a = np.asarray(alpha, dtype=float)
    d = exp.n_cols
    if a.shape != (d,):
        raise ParameterError(f"weight vector must have length {d}")
    if np.isnan(a).any():
        raise ParameterError("weight vector contains NaN")
    if abs(a.sum() - 1.0) > _SUM_TOL:
        raise ParameterError(f"weights must sum to 1, got {a.sum()!r}")
    amax = float(a.max())
    if amax == 1.0 and np.count_nonzero(a) == 1:
        raise ParameterError("simplex vertices are excluded (degenerate direction)")
    if (a < 0.0).any() and np.count_nonzero(a > 0.0) != 1:
        raise ParameterError("negative weights require a single positive weight")

    m = exp.matrix
    pos_exp = a > 0.0
    neg_exp = a < 0.0
    rows = np.all(m[:, pos_exp] >= ZERO_FLOOR, axis=1) if pos_exp.any() else np.ones(exp.n_rows, bool)
    if not rows.any():
        log_sum = -math.inf
    elif neg_exp.any() and np.any(m[np.ix_(rows, neg_exp)] < ZERO_FLOOR):
        log_sum = math.inf
    else:
        lm = _safe_log(m[rows])
        lm[np.isneginf(lm)] = 0.0  # only multiplied by zero weights below
        active = a != 0.0
        terms = lm[:, active] @ a[active]
        log_sum = float(logsumexp(terms))
    return float(log_sum / (amax - 1.0))


def tropical_divergence(exp: Experiment, beta) -> float:
    """Max-based divergence at a weight vector summing to 0.

    Exactly one weight must be positive.  The maximum ranges over outcomes
    carrying mass in every column with a nonzero weight; normalization is by
    the positive weight.
    """
    b = np.asarray(beta, dtype=float)
    d = exp.n_cols
    if b.shape != (d,):
        raise ParameterError(f"weight vector must have length {d}")
    if np.isnan(b).any():
        raise ParameterError("weight vector contains NaN")
    if abs(b.sum()) > _SUM_TOL:
        raise ParameterError(f"weights must sum to 0, got {b.sum()!r}")
    if np.count_nonzero(b > 0.0) != 1:
        raise ParameterError("exactly one weight must be positive")

    m = exp.matrix
    active = b != 0.0
    rows = np.all(m[:, active] >= ZERO_FLOOR, axis=1)
    if not rows.any():
        return -math.inf
    lm = _safe_log(m[rows])
    lm[np.isneginf(lm)] = 0.0
    vals = lm[:, active] @ b[active]
    return float(np.max(vals) / b.max())


# -- power-sum homomorphisms --------------------------------------------------


def phi(exp: Experiment, alpha, charset: Iterable[int]) -> float:
    """Power sum over the outcomes shared by all columns in ``charset``.

    The weights lie in the closed simplex and their support must sit inside
    ``charset``.  Value can only grow under stochastic post-processing
    (``SMALLER_IS_STRONGER``).
    """
    d = exp.n_cols
    a = _simplex_weights(alpha, d)
    cs = _charset(charset, d)
    supp = tuple(k for k in range(d) if a[k] > 0.0)
    if not set(supp) <= set(cs):
        raise ParameterError(
            f"weight support {supp} must sit inside the character set {cs}"
        )
    vals = phi_many(exp, a[None, :], cs)
    return float(vals[0])


def phi_many(exp: Experiment, alphas: np.ndarray, charset: tuple[int, ...]) -> np.ndarray:
    """Batch :func:`phi` for weight rows that all share one character set.

    Callers must guarantee every row's support sits inside ``charset``.
    """
    m = exp.matrix
    rows = np.all(m[:, list(charset)] >= ZERO_FLOOR, axis=1)
    if not rows.any():
        return np.zeros(alphas.shape[0])
    lm = _safe_log(m[rows])
    lm[np.isneginf(lm)] = 0.0  # safe: such columns get zero weight
    log_terms = alphas @ lm.T  # (n_alpha, n_rows)
    return np.exp(logsumexp(log_terms, axis=1))


def phi_degenerate(exp: Experiment, k: int) -> float:
    """Column-norm homomorphism: the 1-norm of column ``k``."""
    if not 0 <= k < exp.n_cols:
        raise ParameterError(f"column {k} out of range")
    return float(exp.column(k).sum())


def phi_dc(exp: Experiment, alpha: float, c: int) -> float:
    """Pairwise power sum against the dominating (last) column, order > 1.

    Only defined in the dominating-column regime.  Outcomes where column
    ``c`` carries no mass contribute 0.  Value can only shrink under
    stochastic post-processing (``LARGER_IS_STRONGER``).  May overflow to
    +inf for extreme orders; use :func:`phi_dc_log` to stay in log domain.
    """
    return float(math.exp(phi_dc_log(exp, alpha, c)))


def phi_dc_log(exp: Experiment, alpha: float, c: int) -> float:
    if not alpha > 1.0:
        raise ParameterError("order must be > 1")
    _require_dominating(exp)
    if not 0 <= c < exp.n_cols - 1:
        raise ParameterError(f"column {c} must be a non-dominating column")
    pc = exp.column(c)
    pd = exp.column(exp.n_cols - 1)
    rows = pc >= ZERO_FLOOR
    if not rows.any():
        return -math.inf
    terms = alpha * np.log(pc[rows]) + (1.0 - alpha) * np.log(pd[rows])
    return float(logsumexp(terms))


def phi_tropical(exp: Experiment, c: int) -> float:
    """Largest ratio of column ``c`` to the dominating column over all outcomes."""
    _require_dominating(exp)
    if not 0 <= c < exp.n_cols - 1:
        raise ParameterError(f"column {c} must be a non-dominating column")
    pc = exp.column(c)
    pd = exp.column(exp.n_cols - 1)
    rows = pc >= ZERO_FLOOR
    if not rows.any():
        return 0.0
    return float(np.max(pc[rows] / pd[rows]))


def derivation_kl(exp: Experiment, k: int) -> float:
    """Relative entropy of column ``k`` with respect to the dominating column.

    This is the unique derivation direction (up to scale) attached to the
    column-norm homomorphisms in the dominating-column regime; it vanishes at
    the dominating column itself.
    """
    _require_dominating(exp)
    if not 0 <= k < exp.n_cols - 1:
        raise ParameterError(f"column {k} must be a non-dominating column")
    return renyi(exp.column(k), exp.column(exp.n_cols - 1), 1.0)


def _require_dominating(exp: Experiment) -> None:
    if not is_dominating(exp):
        raise RegimeError("experiment is not in the dominating-column regime")
    if classify_regime(exp) is SupportRegime.INVALID:
        raise RegimeError("columns share no outcome")


# -- classical sufficient-condition checks ------------------------------------


class KlimeshMargin(NamedTuple):
    alpha: float
    forward: float   # D_alpha(p || u) - D_alpha(q || u)
    reverse: float   # D_alpha(u || p) - D_alpha(u || q)


class NormMargin(NamedTuple):
    alpha: float
    margin: float    # ||p||_alpha - ||q||_alpha


def klimesh_check(p, q, alphas: Sequence[float]) -> list[KlimeshMargin]:
    """Margins of the two relative-entropy families against the uniform anchor.

    The anchor is uniform on the union of the two supports.  Both margin
    families must be positive (for all orders >= 1/2) for the classical
    catalytic-majorization sufficient condition.
    """
    pv = _as_vector(p, "p")
    qv = _as_vector(q, "q")
    if pv.shape != qv.shape:
        raise InvalidDataError("p and q must have the same length")
    for a in alphas:
        if not a >= 0.5:
            raise ParameterError("orders must be >= 1/2")
    union = (pv >= ZERO_FLOOR) | (qv >= ZERO_FLOOR)
    if not union.any():
        raise InvalidDataError("both vectors are zero")
    u = np.where(union, 1.0 / union.sum(), 0.0)
    fwd = renyi_curve(pv, u, alphas) - renyi_curve(qv, u, alphas)
    rev = renyi_curve(u, pv, alphas) - renyi_curve(u, qv, alphas)
    return [KlimeshMargin(float(a), float(f), float(r)) for a, f, r in zip(alphas, fwd, rev)]


def lalpha_norm_check(p, q, alphas: Sequence[float]) -> list[NormMargin]:
    """Margins ||p||_alpha - ||q||_alpha for orders >= 1."""
    pv = _as_vector(p, "p")
    qv = _as_vector(q, "q")
    out = []
    for a in alphas:
        if not a >= 1.0:
            raise ParameterError("orders must be >= 1")
        if math.isinf(a):
            np_, nq = float(pv.max(initial=0.0)), float(qv.max(initial=0.0))
        else:
            np_ = float(np.sum(pv**a) ** (1.0 / a))
            nq = float(np.sum(qv**a) ** (1.0 / a))
        out.append(NormMargin(float(a), np_ - nq))
    return out


# -- inventory ----------------------------------------------------------------


def monotone_values(
    exp: Experiment,
    points: Sequence[ParamPoint],
    include_dominating: bool = True,
) -> list[MonotoneValue]:
    """Evaluate the homomorphism family at the given simplex points.

    For each point, every admissible character set is used.  When the
    experiment sits in the dominating-column regime and ``include_dominating``
    is set, the pairwise power sums and max-ratios against the dominating
    column are appended (with a default order grid left to the caller via
    :mod:`majorize.certify`; here only order 2 is sampled as a taster).
    """
    d = exp.n_cols
    out: list[MonotoneValue] = []
    for pt in points:
        if len(pt.alpha) != d:
            raise ParameterError("simplex point has the wrong dimension")
        supp = set(pt.support)
        for cs in _all_charsets(d, supp):
            val = phi(exp, pt.alpha, cs)
            out.append(
                MonotoneValue(
                    functional="phi",
                    alpha=pt.alpha,
                    charset=cs,
                    column=None,
                    log_value=math.log(val) if val > 0.0 else -math.inf,
                    direction=Direction.SMALLER_IS_STRONGER,
                )
            )
    if include_dominating and is_dominating(exp) and d >= 2:
        for c in range(d - 1):
            out.append(
                MonotoneValue(
                    functional="phi_dc",
                    alpha=2.0,
                    charset=None,
                    column=c,
                    log_value=phi_dc_log(exp, 2.0, c),
                    direction=Direction.LARGER_IS_STRONGER,
                )
            )
            ratio = phi_tropical(exp, c)
            out.append(
                MonotoneValue(
                    functional="phi_tropical",
                    alpha=None,
                    charset=None,
                    column=c,
                    log_value=math.log(ratio) if ratio > 0.0 else -math.inf,
                    direction=Direction.LARGER_IS_STRONGER,
                )
            )
    return out


def _all_charsets(d: int, supp: set[int]) -> list[tuple[int, ...]]:
    free = [k for k in range(d) if k not in supp]
    base = tuple(sorted(supp))
    out = []
    for bits in range(1 << len(free)):
        extra = [free[i] for i in range(len(free)) if bits >> i & 1]
        cs = tuple(sorted(base + tuple(extra)))
        if cs:
            out.append(cs)
    return sorted(out)
