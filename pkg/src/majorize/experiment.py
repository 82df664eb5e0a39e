"""Tuples of same-length nonnegative vectors ("experiments") and the two
semiring operations on them: row stacking and column-wise Kronecker product.

An experiment is stored as its canonical n-by-d matrix: rows whose entries are
all exactly 0.0 are dropped, and the remaining rows are sorted
lexicographically in descending order.  Two experiments that differ only by a
row permutation or by padding with zero rows therefore compare equal by a
plain byte comparison.
"""

from __future__ import annotations

import enum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidDataError,
    ResourceLimitError,
)

# Entries strictly below this count as zero when supports are computed.
ZERO_FLOOR = 1e-300

# Guard for tensor powers; box_times refuses to grow past this many rows.
DEFAULT_ROW_CAP = 20_000

_UNIT_NORM_TOL = 1e-9


class SupportRegime(enum.Enum):
    """How the supports of the columns of an experiment relate to each other.

    Tags are ordered from most to least specific; classification always
    returns the most specific one that applies.
    """

    EQUAL_SUPPORTS = "equal_supports"
    DICHOTOMY = "dichotomy"
    DOMINATING_COLUMN = "dominating_column"
    MINIMAL_RESTRICTIONS = "minimal_restrictions"
    INVALID = "invalid"


def _canonical(matrix: np.ndarray) -> np.ndarray:
    keep = ~np.all(matrix == 0.0, axis=1)
    m = matrix[keep]
    if m.shape[0] > 1:
        # lexicographic, descending, first column most significant
        keys = tuple(-m[:, k] for k in reversed(range(m.shape[1])))
        m = m[np.lexsort(keys)]
    out = np.ascontiguousarray(m, dtype=float)
    out.setflags(write=False)
    return out


def _validated(matrix: np.ndarray) -> np.ndarray:
    if matrix.ndim != 2:
        raise InvalidDataError(f"expected a 2-d array, got ndim={matrix.ndim}")
    if matrix.shape[1] < 1:
        raise InvalidDataError("an experiment needs at least one column")
    if np.isnan(matrix).any():
        raise InvalidDataError("NaN entries are not allowed")
    if np.isinf(matrix).any():
        raise InvalidDataError("infinite entries are not allowed")
    if (matrix < 0.0).any():
        raise InvalidDataError("entries must be nonnegative")
    return matrix


class Experiment:
    """An immutable tuple of d nonnegative vectors over a common outcome set.

    Construct from columns (``Experiment([p, q])``) or from an outcome-by-
    distribution matrix (``Experiment.from_matrix(m)``).  The stored matrix is
    always in canonical form; the constructor input may contain zero rows and
    arbitrary row order.
    """

    __slots__ = ("_matrix", "_labels")

    def __init__(self, columns: Sequence[Sequence[float]], labels: Sequence[str] | None = None):
        cols = [np.asarray(c, dtype=float) for c in columns]
        if not cols:
            raise InvalidDataError("an experiment needs at least one column")
        for c in cols:
            if c.ndim != 1:
                raise InvalidDataError("columns must be one-dimensional")
            if c.shape[0] != cols[0].shape[0]:
                raise InvalidDataError("columns must all have the same length")
        if cols[0].shape[0] < 1:
            raise InvalidDataError("columns must have at least one entry")
        matrix = _validated(np.column_stack(cols))
        self._matrix = _canonical(matrix)
        self._labels = self._check_labels(labels, len(cols))

    @staticmethod
    def _check_labels(labels, d) -> tuple[str, ...] | None:
        if labels is None:
            return None
        labels = tuple(str(x) for x in labels)
        if len(labels) != d:
            raise InvalidDataError(f"expected {d} labels, got {len(labels)}")
        return labels

    @classmethod
    def from_matrix(cls, matrix, labels: Sequence[str] | None = None) -> "Experiment":
        m = _validated(np.asarray(matrix, dtype=float))
        obj = object.__new__(cls)
        obj._matrix = _canonical(m)
        obj._labels = cls._check_labels(labels, m.shape[1])
        return obj

    @classmethod
    def zero(cls, d: int, labels: Sequence[str] | None = None) -> "Experiment":
        """The additive identity: d columns with no outcomes."""
        if d < 1:
            raise InvalidDataError("need at least one column")
        return cls.from_matrix(np.zeros((1, d)), labels)

    # -- basic accessors ---------------------------------------------------

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def labels(self) -> tuple[str, ...] | None:
        return self._labels

    @property
    def n_rows(self) -> int:
        return self._matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self._matrix.shape[1]

    def column(self, k: int) -> np.ndarray:
        return self._matrix[:, k]

    def columns(self) -> list[np.ndarray]:
        return [self._matrix[:, k] for k in range(self.n_cols)]

    def support_masks(self) -> np.ndarray:
        """Boolean (n, d) array; entry (i, k) says outcome i carries mass in column k."""
        return self._matrix >= ZERO_FLOOR

    def is_zero(self) -> bool:
        return self.n_rows == 0

    def has_unit_columns(self, tol: float = _UNIT_NORM_TOL) -> bool:
        return bool(np.all(np.abs(self._matrix.sum(axis=0) - 1.0) <= tol))

    def with_labels(self, labels: Sequence[str] | None) -> "Experiment":
        return Experiment.from_matrix(self._matrix, labels)

    # -- equality is canonical-form equality -------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Experiment):
            return NotImplemented
        return (
            self._matrix.shape == other._matrix.shape
            and self._matrix.tobytes() == other._matrix.tobytes()
            and self._labels == other._labels
        )

    def __hash__(self) -> int:
        return hash((self._matrix.shape, self._matrix.tobytes(), self._labels))

    def __repr__(self) -> str:
        return f"Experiment({self.n_rows}x{self.n_cols})"


# -- support-regime classification ------------------------------------------


def support_regime(matrix, unit_tol: float = _UNIT_NORM_TOL) -> SupportRegime:
    """Classify a raw outcome-by-distribution matrix by its column supports.

    Unlike :func:`classify_regime` this accepts arbitrary nonnegative data,
    so it can report ``INVALID`` (no outcome is shared by every column even
    though the matrix is not identically zero).
    """
    m = np.asarray(matrix, dtype=float)
    supp = m >= ZERO_FLOOR
    if not supp.any():
        return SupportRegime.EQUAL_SUPPORTS  # the zero experiment
    if not supp.all(axis=1).any():
        return SupportRegime.INVALID
    first = supp[:, 0]
    if all(np.array_equal(supp[:, k], first) for k in range(1, m.shape[1])):
        return SupportRegime.EQUAL_SUPPORTS
    last = supp[:, -1]
    nested = all(not np.any(supp[:, k] & ~last) for k in range(m.shape[1] - 1))
    if m.shape[1] == 2 and nested:
        norms = m.sum(axis=0)
        if np.all(np.abs(norms - 1.0) <= unit_tol):
            return SupportRegime.DICHOTOMY
    if nested:
        return SupportRegime.DOMINATING_COLUMN
    return SupportRegime.MINIMAL_RESTRICTIONS


def classify_regime(exp: Experiment) -> SupportRegime:
    """Most specific support regime of an experiment."""
    return support_regime(exp.matrix)


def is_semiring_member(exp: Experiment) -> bool:
    """True when some outcome is shared by every column (or the experiment is zero)."""
    return classify_regime(exp) is not SupportRegime.INVALID


def is_dominating(exp: Experiment) -> bool:
    """True when every column's support sits inside the last column's support."""
    supp = exp.support_masks()
    if supp.shape[0] == 0:
        return True
    last = supp[:, -1]
    return all(not np.any(supp[:, k] & ~last) for k in range(exp.n_cols - 1))


def is_dichotomy(exp: Experiment, unit_tol: float = _UNIT_NORM_TOL) -> bool:
    """True for a pair of probability vectors whose first support sits in the second."""
    return (
        exp.n_cols == 2
        and exp.has_unit_columns(unit_tol)
        and is_dominating(exp)
    )


# -- semiring operations -----------------------------------------------------


def box_plus(a: Experiment, b: Experiment) -> Experiment:
    """Row-stacking sum: outcomes of ``a`` and ``b`` side by side."""
    if a.n_cols != b.n_cols:
        raise DimensionMismatchError(
            f"cannot stack experiments with {a.n_cols} and {b.n_cols} columns"
        )
    labels = a.labels if a.labels == b.labels else None
    return Experiment.from_matrix(np.vstack([a.matrix, b.matrix]), labels)


def box_times(a: Experiment, b: Experiment, row_cap: int | None = None) -> Experiment:
    """Column-wise Kronecker product: run ``a`` and ``b`` independently."""
    if a.n_cols != b.n_cols:
        raise DimensionMismatchError(
            f"cannot multiply experiments with {a.n_cols} and {b.n_cols} columns"
        )
    if row_cap is not None and a.n_rows * b.n_rows > row_cap:
        raise ResourceLimitError(
            f"product would have {a.n_rows * b.n_rows} rows, cap is {row_cap}"
        )
    prod = (a.matrix[:, None, :] * b.matrix[None, :, :]).reshape(-1, a.n_cols)
    labels = a.labels if a.labels == b.labels else None
    return Experiment.from_matrix(prod, labels)


def tensor_power(exp: Experiment, m: int, row_cap: int = DEFAULT_ROW_CAP) -> Experiment:
    """m-fold box_times power of an experiment, left to right."""
    if m < 1:
        raise InvalidDataError("tensor power exponent must be >= 1")
    out = exp
    for _ in range(m - 1):
        out = box_times(out, exp, row_cap=row_cap)
    return out


def restrict(vector, index_set: Iterable[int]) -> np.ndarray:
    """Zero out all entries of a vector except those at the given indices."""
    v = np.asarray(vector, dtype=float).copy()
    keep = np.zeros(v.shape[0], dtype=bool)
    idx = np.fromiter(index_set, dtype=int, count=-1)
    if idx.size:
        if idx.min() < 0 or idx.max() >= v.shape[0]:
            raise InvalidDataError("restriction index out of range")
        keep[idx] = True
    v[~keep] = 0.0
    return v


def column_norms(exp: Experiment) -> np.ndarray:
    """1-norm of every column (entries are nonnegative, so a plain sum)."""
    return exp.matrix.sum(axis=0)
