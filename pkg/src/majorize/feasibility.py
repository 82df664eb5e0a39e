"""Exact majorization between experiments, decided by linear programming.

``source`` majorizes ``target`` when one column-stochastic matrix T maps every
column of the source onto the corresponding column of the target.  The
feasibility problem

    T >= 0,  every column of T sums to 1,  T @ source_col_k = target_col_k,

is solved by a dense phase-1 simplex (minimize total artificial infeasibility)
with Bland's pivoting rule, which cannot cycle.  Correctness over speed: the
instances here are desk-sized.

Two presolve steps keep the tableau small without changing the answer:
exactly-duplicate outcome rows are merged on both sides (the witness is
expanded back afterwards), and variables T[i, j] that any zero pattern of the
target forces to vanish are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidDataError,
    NormMismatchError,
    ResourceLimitError,
)
from .experiment import Experiment, ZERO_FLOOR

DEFAULT_TOL = 1e-9
DEFAULT_SIZE_CAP = 40_000  # LP variables after presolve

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
INFEASIBLE_NORM = "infeasible_norm"


@dataclass(frozen=True)
class StochasticMatrix:
    """A column-stochastic matrix; columns sum to 1 and entries are >= 0."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2:
            raise InvalidDataError("a stochastic matrix must be 2-d")
        if (e < 0.0).any():
            raise InvalidDataError("stochastic matrix entries must be nonnegative")
        if e.shape[0] > 0 and e.shape[1] > 0:
            gap = np.max(np.abs(e.sum(axis=0) - 1.0))
            if gap > 1e-6:
                raise InvalidDataError(f"columns must sum to 1 (worst gap {gap:.3e})")
        e = np.ascontiguousarray(e)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    status: str
    witness: StochasticMatrix | None
    max_residual: float


def _phase1(A: np.ndarray, b: np.ndarray, tol: float) -> tuple[float, np.ndarray]:
    """Minimize the sum of artificial variables for A x = b, x >= 0, b >= 0.

    Returns (objective, x).  Feasible iff objective <= tol (the caller
    decides).  Bland's rule: entering variable of smallest index among
    negative reduced costs, leaving row breaking ratio ties by smallest basic
    variable index.
    """
    R, V = A.shape
    if R == 0 or V == 0:
        return (float(np.abs(b).sum()) if R else 0.0), np.zeros(V)
    tab = np.hstack([A, np.eye(R), b.reshape(-1, 1)])
    basis = np.arange(V, V + R)
    cost = np.empty(V + R + 1)
    cost[:V] = -A.sum(axis=0)
    cost[V:] = 0.0
    cost[-1] = -float(b.sum())
    eps = 1e-11

    max_iter = 50_000 + 50 * (R + V)
    for _ in range(max_iter):
        entering = np.flatnonzero(cost[:-1] < -eps)
        if entering.size == 0:
            break
        j = int(entering[0])
        col = tab[:, j]
        pos = col > eps
        if not pos.any():
            break  # cannot happen for a bounded phase-1 objective; stop safely
        ratios = np.full(R, np.inf)
        ratios[pos] = tab[pos, -1] / col[pos]
        rmin = float(ratios.min())
        near = np.flatnonzero(ratios <= rmin + 1e-12 * (1.0 + abs(rmin)))
        i = int(near[np.argmin(basis[near])])
        piv = tab[i, j]
        tab[i] /= piv
        rows = np.arange(R) != i
        tab[rows] -= np.outer(tab[rows, j], tab[i])
        cost -= cost[j] * tab[i]
        basis[i] = j
    else:
        raise ResourceLimitError("simplex pivot limit exceeded")

    x = np.zeros(V)
    in_struct = basis < V
    x[basis[in_struct]] = tab[in_struct, -1]
    np.maximum(x, 0.0, out=x)
    objective = -float(cost[-1])
    return max(objective, 0.0), x


def _merge_duplicate_rows(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sum exactly-equal rows.  Returns (merged, group_of_row, group_sizes)."""
    if m.shape[0] == 0:
        return m, np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    _, inverse, counts = np.unique(
        m, axis=0, return_inverse=True, return_counts=True
    )
    inverse = inverse.reshape(-1)
    merged = np.zeros((counts.size, m.shape[1]))
    np.add.at(merged, inverse, m)
    # np.unique sorts groups; nothing downstream depends on the order
    return merged, inverse, counts


def majorizes(
    source: Experiment,
    target: Experiment,
    tol: float = DEFAULT_TOL,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> FeasibilityResult:
    """Decide whether a column-stochastic matrix maps ``source`` onto ``target``.

    Column norms must agree per column within ``tol`` (a conserved quantity);
    a mismatch is reported as ``infeasible_norm`` without running the LP.  On
    success the witness satisfies both stochasticity and the mapping equations
    within ``tol``.
    """
    if source.n_cols != target.n_cols:
        raise DimensionMismatchError(
            f"source has {source.n_cols} columns, target has {target.n_cols}"
        )
    P = source.matrix
    Q = target.matrix
    norms_p = P.sum(axis=0)
    norms_q = Q.sum(axis=0)
    scale = float(max(norms_p.max(initial=0.0), norms_q.max(initial=0.0)))
    norm_gap = float(np.max(np.abs(norms_p - norms_q), initial=0.0))
    if norm_gap > tol * max(1.0, scale):
        return FeasibilityResult(False, INFEASIBLE_NORM, None, norm_gap)

    if source.n_rows == 0 or target.n_rows == 0:
        # matched norms force both sides to be zero experiments
        both_zero = source.n_rows == 0 and target.n_rows == 0
        status = FEASIBLE if both_zero else INFEASIBLE
        witness = StochasticMatrix(np.zeros((target.n_rows, source.n_rows))) if both_zero else None
        return FeasibilityResult(both_zero, status, witness, 0.0 if both_zero else np.inf)

    if scale <= 0.0:
        scale = 1.0

    Pm, p_group, p_counts = _merge_duplicate_rows(P)
    Qm, q_group, q_counts = _merge_duplicate_rows(Q)
    n = Pm.shape[0]
    m = Qm.shape[0]
    d = Pm.shape[1]

    # T[i, j] must vanish whenever outcome j carries mass in a column where
    # outcome i of the target does not.
    allowed = ~np.any(
        (Qm[:, None, :] < ZERO_FLOOR) & (Pm[None, :, :] >= ZERO_FLOOR), axis=2
    )
    nvars = int(allowed.sum())
    if nvars > size_cap:
        raise ResourceLimitError(
            f"LP would have {nvars} variables after presolve, cap is {size_cap}"
        )
    if not allowed.any(axis=0).all():
        # some input outcome cannot be sent anywhere
        return FeasibilityResult(False, INFEASIBLE, None, np.inf)

    var_id = np.full((m, n), -1, dtype=int)
    var_id[allowed] = np.arange(nvars)

    n_rows_lp = d * m + n
    A = np.zeros((n_rows_lp, nvars))
    b = np.empty(n_rows_lp)
    Ps = Pm / scale
    Qs = Qm / scale
    for k in range(d):
        for i in range(m):
            mask = allowed[i]
            A[k * m + i, var_id[i, mask]] = Ps[mask, k]
            b[k * m + i] = Qs[i, k]
    for j in range(n):
        mask = allowed[:, j]
        A[d * m + j, var_id[mask, j]] = 1.0
        b[d * m + j] = 1.0

    objective, x = _phase1(A, b, tol)
    if objective > tol:
        return FeasibilityResult(False, INFEASIBLE, None, objective)

    Tm = np.zeros((m, n))
    Tm[allowed] = x
    # expand back to the original outcome sets: duplicates of the target
    # split their group's mass evenly, duplicates of the source share columns
    T = Tm[np.ix_(q_group, p_group)] / q_counts[q_group][:, None]
    col_gap = float(np.max(np.abs(T.sum(axis=0) - 1.0), initial=0.0))
    map_gap = float(np.max(np.abs(T @ P - Q), initial=0.0))
    residual = max(col_gap, map_gap)
    if max(col_gap, map_gap / scale) > tol:
        return FeasibilityResult(False, INFEASIBLE, None, residual)
    return FeasibilityResult(True, FEASIBLE, StochasticMatrix(T), residual)


def vector_majorizes(p, q, tol: float = DEFAULT_TOL) -> bool:
    """Classical vector majorization via descending partial sums.

    Vectors may have different lengths (the shorter is padded with zeros) but
    must carry the same total mass within ``tol``.
    """
    pv = np.asarray(p, dtype=float)
    qv = np.asarray(q, dtype=float)
    for name, v in (("p", pv), ("q", qv)):
        if v.ndim != 1:
            raise InvalidDataError(f"{name} must be one-dimensional")
        if np.isnan(v).any():
            raise InvalidDataError(f"{name} contains NaN")
        if (v < 0.0).any():
            raise InvalidDataError(f"{name} has negative entries")
    if abs(pv.sum() - qv.sum()) > tol * max(1.0, pv.sum(), qv.sum()):
        raise NormMismatchError(
            f"total masses differ: {pv.sum()!r} vs {qv.sum()!r}"
        )
    size = max(pv.size, qv.size)
    ps = np.zeros(size)
    qs = np.zeros(size)
    ps[: pv.size] = np.sort(pv)[::-1]
    qs[: qv.size] = np.sort(qv)[::-1]
    return bool(np.all(np.cumsum(ps) >= np.cumsum(qs) - tol))
