"""Grid certificates for large-sample and catalytic majorization.

Each certifier evaluates a finite family of monotone functionals on both
experiments and compares them in the direction the underlying theorem
requires.  Margins are oriented so that positive always means "in the correct
direction".  A SUFFICIENT verdict is grid-certified: the inequalities were
checked on a finite parameter grid, not on the full continuum.

Tie handling: exact certifiers need strict inequalities, so a margin within
``tie_tol`` of zero downgrades the verdict to INCONCLUSIVE (the converse
theorems only guarantee non-strict inequalities, so a tie is genuinely
uninformative).  Asymptotic certifiers check non-strict inequalities and a
tie passes.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NormMismatchError, ParameterError, RegimeError
from .experiment import (
    Experiment,
    SupportRegime,
    classify_regime,
    is_dichotomy,
    is_dominating,
    is_semiring_member,
)
from .functionals import (
    Direction,
    ParamPoint,
    Region,
    phi_many,
    renyi_curve,
)

THREADS_ENV_VAR = "MAJORIZE_THREADS"


class Verdict(enum.Enum):
    SUFFICIENT = "SUFFICIENT"
    NECESSARY_FAIL = "NECESSARY_FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class GridSpec:
    """Finite parameter grid shared by all certifiers.

    ``simplex_resolution`` r controls the simplex lattice (weights k/r) and
    the number of orders above 1, which are placed log-uniformly as
    ``alpha_max ** (j/r)``.  Doubling r refines both grids in place, so
    verdicts can only degrade under refinement.
    """

    simplex_resolution: int = 8
    alpha_max: float = 64.0
    include_infinity: bool = True
    tie_tol: float = 1e-9

    def __post_init__(self):
        if self.simplex_resolution < 2:
            raise ParameterError("simplex resolution must be >= 2")
        if not self.alpha_max > 1.0:
            raise ParameterError("alpha_max must be > 1")
        if not 0.0 <= self.tie_tol < 1.0:
            raise ParameterError("tie_tol must be a small nonnegative number")

    def unit_orders(self) -> np.ndarray:
        """Orders k/r for k = 0..r (the closed interval [0, 1])."""
        r = self.simplex_resolution
        return np.arange(r + 1) / r

    def upper_orders(self) -> np.ndarray:
        """Orders above 1, log-uniform: alpha_max ** (j/r) for j = 1..r."""
        r = self.simplex_resolution
        return self.alpha_max ** (np.arange(1, r + 1) / r)

    def half_orders(self) -> np.ndarray:
        """Orders 1/2 + k/(2r) for k = 0..r-1 (the interval [1/2, 1))."""
        r = self.simplex_resolution
        return 0.5 + np.arange(r) / (2 * r)

    def dichotomy_orders(self, closed_at_zero: bool) -> np.ndarray:
        """The full order grid [0, alpha_max] plus infinity.

        With ``closed_at_zero`` false the grid starts at 1/r instead of 0.
        """
        low = self.unit_orders()
        if not closed_at_zero:
            low = low[1:]
        parts = [low, self.upper_orders()]
        if self.include_infinity:
            parts.append(np.array([math.inf]))
        return np.concatenate(parts)

    def two_sided_orders(self) -> np.ndarray:
        """The order grid [1/2, alpha_max] plus infinity."""
        parts = [self.half_orders(), np.array([1.0]), self.upper_orders()]
        if self.include_infinity:
            parts.append(np.array([math.inf]))
        return np.concatenate(parts)


@dataclass(frozen=True)
class CheckRecord:
    """One compared functional.  ``margin`` > 0 means the correct direction."""

    functional: str
    alpha: tuple[float, ...] | float | None
    charset: tuple[int, ...] | None
    column: int | None
    value_p: float
    value_q: float
    margin: float
    strict: bool
    direction: Direction


@dataclass(frozen=True)
class CertReport:
    regime: SupportRegime
    verdict: Verdict
    grid: GridSpec
    checks: tuple[CheckRecord, ...]
    note: str = ""

    def min_margin(self) -> float:
        return min((c.margin for c in self.checks), default=math.inf)


def simplex_grid(d: int, resolution: int) -> list[ParamPoint]:
    """All weight vectors (k_1/r, ..., k_d/r) with k_i >= 0 summing to r.

    Facet points (some weight zero) are tagged; the vertices are included and
    left for the certifiers' degenerate-exclusion rules.
    """
    if d < 1:
        raise ParameterError("dimension must be >= 1")
    if resolution < 1:
        raise ParameterError("resolution must be >= 1")
    points = []
    for cuts in itertools.combinations(range(resolution + d - 1), d - 1):
        prev = -1
        counts = []
        for c in cuts:
            counts.append(c - prev - 1)
            prev = c
        counts.append(resolution + d - 2 - prev)
        alpha = tuple(k / resolution for k in counts)
        region = Region.A_PLUS_INTERIOR if all(k > 0 for k in counts) else Region.A_PLUS_FACET
        points.append(ParamPoint(alpha=alpha, region=region, character=tuple(
            i for i, k in enumerate(counts) if k > 0
        )))
    return points


# -- internal helpers ---------------------------------------------------------


def _max_workers() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _ordered_map(fn: Callable, items: Sequence) -> list:
    workers = _max_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _margin(value_p: float, value_q: float, direction: Direction) -> float:
    if direction is Direction.SMALLER_IS_STRONGER:
        hi, lo = value_q, value_p
    else:
        hi, lo = value_p, value_q
    if math.isinf(hi) and math.isinf(lo) and hi == lo:
        return 0.0
    return hi - lo


def _verdict(checks: Iterable[CheckRecord], tie_tol: float) -> Verdict:
    verdict = Verdict.SUFFICIENT
    for c in checks:
        if c.margin < -tie_tol:
            return Verdict.NECESSARY_FAIL
        if c.strict and not c.margin > tie_tol:
            verdict = Verdict.INCONCLUSIVE
    return verdict


def _sorted_checks(checks: list[CheckRecord]) -> tuple[CheckRecord, ...]:
    def key(c: CheckRecord):
        alpha = c.alpha if isinstance(c.alpha, tuple) else (
            (c.alpha,) if c.alpha is not None else ()
        )
        return (c.functional, c.column if c.column is not None else -1,
                c.charset if c.charset is not None else (), alpha)

    return tuple(sorted(checks, key=key))


def _require_matching_norms(p: Experiment, q: Experiment, tol: float) -> None:
    np_ = p.matrix.sum(axis=0)
    nq = q.matrix.sum(axis=0)
    gap = float(np.max(np.abs(np_ - nq), initial=0.0))
    if gap > tol * max(1.0, float(np_.max(initial=0.0))):
        raise NormMismatchError(f"per-column norms differ by {gap:.3e}")


def _require_unit_columns(*exps: Experiment) -> None:
    for e in exps:
        if not e.has_unit_columns():
            raise NormMismatchError("columns must be probability vectors")


def _require_same_shape(p: Experiment, q: Experiment) -> None:
    if p.n_cols != q.n_cols:
        raise RegimeError(
            f"experiments have {p.n_cols} and {q.n_cols} columns"
        )


def _phi_checks(
    p: Experiment,
    q: Experiment,
    points: Sequence[ParamPoint],
    charsets_for: Callable[[ParamPoint], list[tuple[int, ...]]],
    strict: bool,
) -> list[CheckRecord]:
    """Compare the power-sum family, batched per character set."""
    by_charset: dict[tuple[int, ...], list[ParamPoint]] = {}
    for pt in points:
        for cs in charsets_for(pt):
            by_charset.setdefault(cs, []).append(pt)

    def run(item):
        cs, pts = item
        alphas = np.array([pt.alpha for pt in pts])
        vals_p = phi_many(p, alphas, cs)
        vals_q = phi_many(q, alphas, cs)
        return [
            CheckRecord(
                functional="phi",
                alpha=pt.alpha,
                charset=cs,
                column=None,
                value_p=float(vp),
                value_q=float(vq),
                margin=_margin(float(vp), float(vq), Direction.SMALLER_IS_STRONGER),
                strict=strict,
                direction=Direction.SMALLER_IS_STRONGER,
            )
            for pt, vp, vq in zip(pts, vals_p, vals_q)
        ]

    checks: list[CheckRecord] = []
    for chunk in _ordered_map(run, sorted(by_charset.items())):
        checks.extend(chunk)
    return checks


def _renyi_checks(
    p: Experiment,
    q: Experiment,
    pairs: Sequence[tuple[int, int]],
    orders: np.ndarray,
    strict: bool,
) -> list[CheckRecord]:
    """Compare pairwise divergences; the source must dominate (LARGER)."""

    def run(pair):
        c, ref = pair
        vals_p = renyi_curve(p.column(c), p.column(ref), orders)
        vals_q = renyi_curve(q.column(c), q.column(ref), orders)
        return [
            CheckRecord(
                functional="renyi",
                alpha=float(a),
                charset=None,
                column=c,
                value_p=float(vp),
                value_q=float(vq),
                margin=_margin(float(vp), float(vq), Direction.LARGER_IS_STRONGER),
                strict=strict,
                direction=Direction.LARGER_IS_STRONGER,
            )
            for a, vp, vq in zip(orders, vals_p, vals_q)
        ]

    checks: list[CheckRecord] = []
    for chunk in _ordered_map(run, list(pairs)):
        checks.extend(chunk)
    return checks


def _all_supersets(base: set[int], d: int) -> list[tuple[int, ...]]:
    free = [k for k in range(d) if k not in base]
    out = []
    for bits in range(1 << len(free)):
        extra = {free[i] for i in range(len(free)) if bits >> i & 1}
        out.append(tuple(sorted(base | extra)))
    return out


# -- certifiers: minimal-restrictions regime ----------------------------------


def certify_minimal(p: Experiment, q: Experiment, grid: GridSpec = GridSpec()) -> CertReport:
    """Strict power-sum conditions for large-sample/catalytic majorization.

    Sufficient when every nondegenerate power sum is strictly smaller on the
    source; the excluded degenerate members are the plain column norms
    (vertex weight with a singleton character set).
    """
    _require_same_shape(p, q)
    if not (is_semiring_member(p) and is_semiring_member(q)):
        raise RegimeError("both experiments must have a shared-support outcome")
    _require_matching_norms(p, q, grid.tie_tol)
    d = p.n_cols
    points = simplex_grid(d, grid.simplex_resolution)

    def charsets(pt: ParamPoint) -> list[tuple[int, ...]]:
        supp = set(pt.support)
        out = []
        for cs in _all_supersets(supp, d):
            if pt.is_vertex and len(cs) == 1:
                continue  # the column norm, degenerate
            out.append(cs)
        return out

    checks = _sorted_checks(_phi_checks(p, q, points, charsets, strict=True))
    verdict = _verdict(checks, grid.tie_tol)
    note = "grid-certified" if verdict is Verdict.SUFFICIENT else ""
    return CertReport(classify_regime(p), verdict, grid, checks, note)


def certify_minimal_asymptotic(
    p: Experiment, q: Experiment, grid: GridSpec = GridSpec()
) -> CertReport:
    """Non-strict conditions for asymptotic catalytic conversion.

    Requires the source to be power universal; only the continuous power sums
    (character set equal to the weight support) are compared.
    """
    from .power_universal import classify_minimal

    _require_same_shape(p, q)
    _require_unit_columns(p, q)
    if not classify_minimal(p).is_power_universal:
        raise RegimeError("source must be power universal in the minimal regime")
    d = p.n_cols
    points = simplex_grid(d, grid.simplex_resolution)

    def charsets(pt: ParamPoint) -> list[tuple[int, ...]]:
        if pt.is_vertex:
            return []  # continuous at a vertex means the degenerate column norm
        return [tuple(sorted(pt.support))]

    checks = _sorted_checks(_phi_checks(p, q, points, charsets, strict=False))
    verdict = _verdict(checks, grid.tie_tol)
    note = "grid-certified" if verdict is Verdict.SUFFICIENT else ""
    return CertReport(classify_regime(p), verdict, grid, checks, note)


# -- certifiers: dominating-column regime --------------------------------------


def certify_dominating(p: Experiment, q: Experiment, grid: GridSpec = GridSpec()) -> CertReport:
    """Strict conditions in the dominating-column regime.

    Three families: the power sums (with the extra degenerate exclusions this
    regime inherits), the pairwise divergences of every column against the
    dominating one for orders above 1 (including 1 and infinity), all strict.
    """
    _require_same_shape(p, q)
    for e in (p, q):
        if not is_dominating(e) or not is_semiring_member(e):
            raise RegimeError("both experiments must be in the dominating-column regime")
    _require_matching_norms(p, q, grid.tie_tol)
    d = p.n_cols
    points = simplex_grid(d, grid.simplex_resolution)
    last = d - 1

    def charsets(pt: ParamPoint) -> list[tuple[int, ...]]:
        # the last column's support contains every other, so adding it to a
        # character set never changes the value; enumerate supersets of
        # support + {last} only, and drop the degenerate members
        base = set(pt.support) | {last}
        out = []
        for cs in _all_supersets(base, d):
            if pt.is_vertex:
                k = pt.support[0]
                # with a dominating column both {k} and {k, last} reduce to
                # the column norm of k
                degenerate = cs == ((last,) if k == last else tuple(sorted({k, last})))
                if degenerate:
                    continue
            out.append(cs)
        return out

    checks = _phi_checks(p, q, points, charsets, strict=True)
    orders = np.concatenate([
        np.array([1.0]),
        grid.upper_orders(),
        np.array([math.inf]) if grid.include_infinity else np.zeros(0),
    ])
    pairs = [(c, last) for c in range(d - 1)]
    checks += _renyi_checks(p, q, pairs, orders, strict=True)
    checks = _sorted_checks(checks)
    verdict = _verdict(checks, grid.tie_tol)
    note = "grid-certified" if verdict is Verdict.SUFFICIENT else ""
    return CertReport(classify_regime(p), verdict, grid, checks, note)


def dominating_d3_layout(
    p: Experiment, q: Experiment, grid: GridSpec = GridSpec()
) -> dict[str, list[CheckRecord]]:
    """The three-column certificate grouped into its six named condition families.

    Groups: the interior power sums; the divergences of columns 1 and 2
    against the dominating column over all orders; the same divergences
    restricted to the other column's support (orders below 1); and the
    divergences between columns 1 and 2 in both directions (orders in the
    lower half of the unit interval, where they are not implied by the rest).
    """
    if p.n_cols != 3 or q.n_cols != 3:
        raise RegimeError("this layout is specific to three columns")
    report = certify_dominating(p, q, grid)
    groups: dict[str, list[CheckRecord]] = {
        "interior": [],
        "col0_vs_dominating": [],
        "col0_vs_dominating_restricted": [],
        "col1_vs_dominating": [],
        "col1_vs_dominating_restricted": [],
        "col0_col1_two_sided": [],
    }
    for c in report.checks:
        if c.functional == "renyi":
            groups[f"col{c.column}_vs_dominating"].append(c)
            continue
        a = c.alpha
        assert isinstance(a, tuple)
        pos = [k for k, v in enumerate(a) if v > 0.0]
        if pos == [0] or pos == [0, 2]:
            if c.charset == (0, 1, 2):
                groups["col0_vs_dominating_restricted"].append(c)
            else:
                groups["col0_vs_dominating"].append(c)
        elif pos == [1] or pos == [1, 2]:
            if c.charset == (0, 1, 2):
                groups["col1_vs_dominating_restricted"].append(c)
            else:
                groups["col1_vs_dominating"].append(c)
        elif pos == [0, 1]:
            groups["col0_col1_two_sided"].append(c)
        elif pos == [2]:
            # vertex at the dominating column with a larger character set:
            # order-zero information about the other columns
            other = [k for k in c.charset if k != 2]
            if other == [0]:
                groups["col0_vs_dominating"].append(c)
            elif other == [1]:
                groups["col1_vs_dominating"].append(c)
            else:
                groups["interior"].append(c)
        else:
            groups["interior"].append(c)
    return groups


# -- certifiers: dichotomies ---------------------------------------------------


def certify_dichotomy_exact(
    p: Experiment, q: Experiment, grid: GridSpec = GridSpec()
) -> CertReport:
    """Strict divergence comparison over the full order range [0, alpha_max] + inf."""
    _require_same_shape(p, q)
    for e in (p, q):
        if not is_dichotomy(e):
            raise RegimeError("both experiments must be dichotomies")
    orders = grid.dichotomy_orders(closed_at_zero=True)
    checks = _sorted_checks(_renyi_checks(p, q, [(0, 1)], orders, strict=True))
    verdict = _verdict(checks, grid.tie_tol)
    note = "grid-certified" if verdict is Verdict.SUFFICIENT else ""
    return CertReport(classify_regime(p), verdict, grid, checks, note)


def certify_dichotomy_asymptotic(
    p: Experiment, q: Experiment, grid: GridSpec = GridSpec()
) -> CertReport:
    """Non-strict divergences over (0, alpha_max] + inf; the source must be
    a strict dichotomy (first support properly inside the second)."""
    _require_same_shape(p, q)
    for e in (p, q):
        if not is_dichotomy(e):
            raise RegimeError("both experiments must be dichotomies")
    supp = p.support_masks()
    if not np.any(supp[:, 1] & ~supp[:, 0]):
        raise RegimeError(
            "source support must be properly contained in its second column"
        )
    orders = grid.dichotomy_orders(closed_at_zero=False)
    checks = _sorted_checks(_renyi_checks(p, q, [(0, 1)], orders, strict=False))
    verdict = _verdict(checks, grid.tie_tol)
    note = "grid-certified" if verdict is Verdict.SUFFICIENT else ""
    return CertReport(classify_regime(p), verdict, grid, checks, note)


def certify_general_dichotomy_asymptotic(
    p: Experiment, q: Experiment, grid: GridSpec = GridSpec()
) -> CertReport:
    """Asymptotic conversion between pairs whose second columns have full support.

    Dispatches on the source's support pattern: equal supports lead to the
    two-sided divergence conditions for orders >= 1/2; a strict deficiency in
    the first column reduces to the one-sided conditions.  A source with
    equal supports can never reach a target with strictly deficient first
    column, which is reported as NECESSARY_FAIL with the witnessing mass
    comparison.
    """
    _require_same_shape(p, q)
    if p.n_cols != 2:
        raise RegimeError("this certifier handles pairs of distributions")
    _require_unit_columns(p, q)
    sp = p.support_masks()
    sq = q.support_masks()
    if not sp[:, 1].all() or not sq[:, 1].all():
        raise RegimeError("second columns must have full support")

    p_equal = sp[:, 0].all()
    q_equal = sq[:, 0].all()
    if p_equal and not q_equal:
        mass_p = float(p.column(1)[sp[:, 0]].sum())
        mass_q = float(q.column(1)[sq[:, 0]].sum())
        check = CheckRecord(
            functional="support_mass",
            alpha=None,
            charset=None,
            column=0,
            value_p=mass_p,
            value_q=mass_q,
            margin=_margin(mass_p, mass_q, Direction.SMALLER_IS_STRONGER),
            strict=False,
            direction=Direction.SMALLER_IS_STRONGER,
        )
        return CertReport(
            classify_regime(p),
            Verdict.NECESSARY_FAIL,
            grid,
            (check,),
            note="equal supports cannot reach a support-deficient target",
        )
    if not p_equal:
        inner = certify_dichotomy_asymptotic(p, q, grid)
        note = "dispatched one-sided (strict support deficiency in the source)"
        return CertReport(inner.regime, inner.verdict, grid, inner.checks, note)

    orders = grid.two_sided_orders()
    checks = _renyi_checks(p, q, [(0, 1)], orders, strict=False)
    checks += _renyi_checks(p, q, [(1, 0)], orders, strict=False)
    checks = _sorted_checks(checks)
    verdict = _verdict(checks, grid.tie_tol)
    note = "grid-certified" if verdict is Verdict.SUFFICIENT else ""
    if verdict is Verdict.SUFFICIENT and np.array_equal(p.column(0), p.column(1)):
        # a source with two identical columns is not power universal, so the
        # non-strict margins certify nothing; failures above remain sound
        verdict = Verdict.INCONCLUSIVE
        note = "identical source columns support no amplification"
    return CertReport(classify_regime(p), verdict, grid, checks, note)
