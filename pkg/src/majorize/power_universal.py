"""Power universality: experiments whose tensor powers eventually majorize
everything with compatible support structure.

Both classifiers are pure support combinatorics; the numeric
:func:`homomorphism_criterion` cross-checks them through a small distinguished
sub-family of power sums, which must all stay strictly below 1 on a power
universal experiment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certify import GridSpec
from .errors import NormMismatchError, ParameterError, RegimeError
from .experiment import Experiment, SupportRegime, classify_regime, is_dominating
from .functionals import phi


@dataclass(frozen=True)
class SupportWitness:
    """Evidence for one required support non-inclusion.

    ``row`` indexes an outcome carrying mass in ``column`` but not in
    ``other`` (or, for the proper-inclusion conditions, mass in ``other`` but
    not in ``column``); ``None`` when no such outcome exists, in which case
    ``satisfied`` is False and the experiment is not power universal.
    """

    column: int
    other: int
    row: int | None
    satisfied: bool


@dataclass(frozen=True)
class PowerUniversalReport:
    is_power_universal: bool
    regime: SupportRegime
    witnesses: tuple[SupportWitness, ...]


def _require_unit(exp: Experiment) -> None:
    if not exp.has_unit_columns():
        raise NormMismatchError("power universality is defined for probability columns")


def classify_minimal(exp: Experiment) -> PowerUniversalReport:
    """Power universality in the minimal-restrictions regime.

    Holds exactly when no column's support is contained in another's: for
    every ordered pair (k, k') some outcome carries mass in k but not in k'.
    """
    _require_unit(exp)
    if classify_regime(exp) is SupportRegime.INVALID:
        raise RegimeError("columns share no outcome")
    supp = exp.support_masks()
    d = exp.n_cols
    witnesses = []
    ok = True
    for k in range(d):
        for other in range(d):
            if k == other:
                continue
            rows = np.flatnonzero(supp[:, k] & ~supp[:, other])
            sat = rows.size > 0
            ok = ok and sat
            witnesses.append(SupportWitness(k, other, int(rows[0]) if sat else None, sat))
    return PowerUniversalReport(ok, classify_regime(exp), tuple(witnesses))


def classify_dominating(exp: Experiment) -> PowerUniversalReport:
    """Power universality in the dominating-column regime.

    Every non-dominating column's support must be properly contained in the
    dominating one, and no non-dominating support may contain another.  For a
    single pair this reduces to proper containment alone.
    """
    _require_unit(exp)
    if not is_dominating(exp) or classify_regime(exp) is SupportRegime.INVALID:
        raise RegimeError("experiment is not in the dominating-column regime")
    supp = exp.support_masks()
    d = exp.n_cols
    last = d - 1
    witnesses = []
    ok = True
    for k in range(d - 1):
        # proper containment: mass in the dominating column missing from k
        rows = np.flatnonzero(supp[:, last] & ~supp[:, k])
        sat = rows.size > 0
        ok = ok and sat
        witnesses.append(SupportWitness(last, k, int(rows[0]) if sat else None, sat))
    for k in range(d - 1):
        for other in range(d - 1):
            if k == other:
                continue
            rows = np.flatnonzero(supp[:, k] & ~supp[:, other])
            sat = rows.size > 0
            ok = ok and sat
            witnesses.append(SupportWitness(k, other, int(rows[0]) if sat else None, sat))
    return PowerUniversalReport(ok, classify_regime(exp), tuple(witnesses))


def homomorphism_criterion(
    exp: Experiment,
    regime: SupportRegime | None = None,
    grid: GridSpec = GridSpec(),
) -> bool:
    """Numeric power-universality test through a finite power-sum sub-family.

    In the minimal regime the sums of column k over the support of column k'
    must all stay below 1; in the dominating-column regime the distinguished
    family pairs every column with the dominating one instead.  ``regime``
    pins which family is used (defaults to the experiment's own
    classification, with dichotomies and equal supports handled by the
    dominating-column family when applicable).
    """
    _require_unit(exp)
    if regime is None:
        regime = (
            SupportRegime.DOMINATING_COLUMN
            if is_dominating(exp)
            else SupportRegime.MINIMAL_RESTRICTIONS
        )
    d = exp.n_cols
    last = d - 1
    threshold = 1.0 - grid.tie_tol
    if regime in (SupportRegime.MINIMAL_RESTRICTIONS, SupportRegime.EQUAL_SUPPORTS):
        for k in range(d):
            for other in range(d):
                if k == other:
                    continue
                alpha = tuple(1.0 if c == k else 0.0 for c in range(d))
                if phi(exp, alpha, (k, other)) >= threshold:
                    return False
        return True
    if regime in (SupportRegime.DOMINATING_COLUMN, SupportRegime.DICHOTOMY):
        if not is_dominating(exp):
            raise RegimeError("experiment is not in the dominating-column regime")
        e_last = tuple(1.0 if c == last else 0.0 for c in range(d))
        for k in range(d - 1):
            if phi(exp, e_last, (k, last)) >= threshold:
                return False
        for k in range(d - 1):
            for other in range(d - 1):
                if k == other:
                    continue
                alpha = tuple(1.0 if c == k else 0.0 for c in range(d))
                if phi(exp, alpha, (k, other, last)) >= threshold:
                    return False
        return True
    raise ParameterError(f"unsupported regime {regime}")
