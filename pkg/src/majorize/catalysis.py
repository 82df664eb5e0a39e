"""Catalyst construction, exponent search, and target perturbation.

The catalyst is the binomial direct sum built from the two experiments being
compared; the search routines drive the exact feasibility oracle over tensor
powers (large-sample) or catalyst products (catalytic) until it succeeds or a
resource cap stops them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidDataError,
    NormMismatchError,
    ParameterError,
    ResourceLimitError,
)
from .experiment import (
    DEFAULT_ROW_CAP,
    ZERO_FLOOR,
    Experiment,
    box_times,
    tensor_power,
)
from .feasibility import DEFAULT_TOL, FeasibilityResult, StochasticMatrix, majorizes

DEFAULT_N_MAX = 8


class SearchKind(enum.Enum):
    LARGE_SAMPLE = "large_sample"
    CATALYTIC = "catalytic"


@dataclass(frozen=True)
class CatalystSearchResult:
    """Outcome of a bounded search over exponents.

    ``n_found`` is the smallest exponent at which the feasibility oracle
    succeeded, with the LP witness attached; None means every probed exponent
    was infeasible.  ``capped`` marks searches cut short by a resource limit,
    in which case ``checked_up_to`` is the last exponent actually probed and
    ``note`` carries the limit message.
    """

    kind: SearchKind
    n_found: int | None
    witness: StochasticMatrix | None
    checked_up_to: int
    capped: bool = False
    note: str = ""


def _require_unit(*exps: Experiment) -> None:
    for e in exps:
        if not e.has_unit_columns():
            raise NormMismatchError("columns must be probability vectors")


def _require_same_width(p: Experiment, q: Experiment) -> None:
    if p.n_cols != q.n_cols:
        raise DimensionMismatchError(
            f"experiments have {p.n_cols} and {q.n_cols} columns"
        )


def _column_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = a.shape[1]
    return (a[:, None, :] * b[None, :, :]).reshape(-1, d)


def catalyst_blocks(
    p: Experiment, q: Experiment, n: int, row_cap: int = DEFAULT_ROW_CAP
) -> list[np.ndarray]:
    """The n+1 direct summands of the binomial catalyst, before row sorting.

    Block ``l`` holds, column by column, the Kronecker product of ``l`` copies
    of the target column with ``n - l`` copies of the source column, scaled by
    1/(n+1).  Summing the blocks' columns therefore gives probability vectors.
    """
    _require_same_width(p, q)
    _require_unit(p, q)
    if n < 0:
        raise ParameterError("the exponent must be nonnegative")
    rows_p, rows_q = p.n_rows, q.n_rows
    total = sum(rows_q**l * rows_p ** (n - l) for l in range(n + 1))
    if total > row_cap:
        raise ResourceLimitError(
            f"catalyst would have {total} rows, cap is {row_cap}"
        )
    d = p.n_cols
    p_pow = [np.ones((1, d))]
    for _ in range(n):
        p_pow.append(_column_kron(p_pow[-1], p.matrix))
    q_part = np.ones((1, d))
    blocks = []
    for l in range(n + 1):
        blocks.append(_column_kron(q_part, p_pow[n - l]) / (n + 1))
        if l < n:
            q_part = _column_kron(q_part, q.matrix)
    return blocks


def build_catalyst(
    p: Experiment, q: Experiment, n: int, row_cap: int = DEFAULT_ROW_CAP
) -> Experiment:
    """Stack the binomial blocks into a single experiment.

    At n = 0 the catalyst is the one-outcome experiment, so multiplying by it
    reproduces the exact comparison.
    """
    blocks = catalyst_blocks(p, q, n, row_cap)
    labels = p.labels if p.labels == q.labels else None
    return Experiment.from_matrix(np.vstack(blocks), labels)


def _search(
    kind: SearchKind,
    probe,
    exponents: range,
) -> CatalystSearchResult:
    last_done = exponents.start - 1
    for n in exponents:
        try:
            result: FeasibilityResult = probe(n)
        except ResourceLimitError as exc:
            return CatalystSearchResult(
                kind, None, None, checked_up_to=last_done, capped=True, note=str(exc)
            )
        last_done = n
        if result.feasible:
            return CatalystSearchResult(kind, n, result.witness, checked_up_to=n)
    return CatalystSearchResult(kind, None, None, checked_up_to=last_done)


def find_large_sample_n(
    p: Experiment,
    q: Experiment,
    n_max: int = DEFAULT_N_MAX,
    tol: float = DEFAULT_TOL,
    row_cap: int = DEFAULT_ROW_CAP,
) -> CatalystSearchResult:
    """Smallest n <= n_max with the n-fold tensor powers exactly convertible.

    Feasibility is monotone in n, so the first success is the minimum; the
    probe order is linear because LP cost grows geometrically with n.
    """
    _require_same_width(p, q)
    _require_unit(p, q)
    if n_max < 1:
        raise ParameterError("n_max must be at least 1")

    def probe(n: int) -> FeasibilityResult:
        return majorizes(
            tensor_power(p, n, row_cap), tensor_power(q, n, row_cap), tol
        )

    return _search(SearchKind.LARGE_SAMPLE, probe, range(1, n_max + 1))


def find_catalytic_n(
    p: Experiment,
    q: Experiment,
    n_max: int = DEFAULT_N_MAX,
    tol: float = DEFAULT_TOL,
    row_cap: int = DEFAULT_ROW_CAP,
) -> CatalystSearchResult:
    """Smallest n <= n_max whose binomial catalyst makes the conversion exact.

    Starts at n = 0, where the catalyst is trivial and the probe coincides
    with plain exact majorization.
    """
    _require_same_width(p, q)
    _require_unit(p, q)
    if n_max < 0:
        raise ParameterError("n_max must be nonnegative")

    def probe(n: int) -> FeasibilityResult:
        r = build_catalyst(p, q, n, row_cap)
        return majorizes(
            box_times(r, p, row_cap), box_times(r, q, row_cap), tol
        )

    return _search(SearchKind.CATALYTIC, probe, range(0, n_max + 1))


def perturb_output(
    q: Experiment, epsilon: float, anchor: np.ndarray | None = None
) -> Experiment:
    """Mix every column with a common anchor: (1 - eps/2) q + (eps/2) w.

    The anchor defaults to the uniform distribution on the target's outcomes,
    which makes the result entrywise positive.  A supplied anchor must be a
    probability vector over the same outcomes whose support contains every
    column's support (choosing a column itself keeps that column unchanged;
    the copy is exact, not recomputed).  Each column moves by at most
    ``epsilon`` in 1-norm.
    """
    _require_unit(q)
    if not 0.0 < epsilon <= 2.0:
        raise ParameterError("epsilon must lie in (0, 2]")
    m = q.matrix
    if anchor is None:
        w = np.full(q.n_rows, 1.0 / q.n_rows)
    else:
        w = np.asarray(anchor, dtype=float)
        if w.ndim != 1 or w.shape[0] != q.n_rows:
            raise DimensionMismatchError(
                f"anchor must have one weight per outcome ({q.n_rows})"
            )
        if np.isnan(w).any() or np.isinf(w).any() or (w < 0).any():
            raise InvalidDataError("anchor must be a finite nonnegative vector")
        if abs(w.sum() - 1.0) > 1e-9:
            raise NormMismatchError("anchor must sum to one")
        missing = (m >= ZERO_FLOOR).any(axis=1) & (w < ZERO_FLOOR)
        if missing.any():
            raise InvalidDataError(
                "anchor support must contain every column's support"
            )
    mixed = (1.0 - epsilon / 2.0) * m + (epsilon / 2.0) * w[:, None]
    for k in range(q.n_cols):
        if np.array_equal(w, m[:, k]):
            mixed[:, k] = m[:, k]
    shift = np.abs(mixed - m).sum(axis=0)
    assert float(shift.max(initial=0.0)) <= epsilon + 1e-12
    return Experiment.from_matrix(mixed, q.labels)
