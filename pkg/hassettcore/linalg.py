"""
Exact integer and rational linear algebra.

Dense kernels work on numpy object arrays so entries stay arbitrary-precision
Python integers or Fractions. Large sparse systems (the graded pieces of a Chow
ring) go through SparseEchelon, which keeps integer rows and eliminates
fraction-free by cross-multiplication.
"""

import logging
import math
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from hassettcore.common import DimensionMismatch, HassettError, NonIntegerEntry

logger = logging.getLogger(__name__)

SparseRow = Dict[int, int]


def _as_int(x: Fraction) -> int:
    return x.numerator if isinstance(x, Fraction) else int(x)


class ExactMatrix:
    """
    A rows x cols matrix of exact integers or Fractions.

    Attributes:
        data (np.ndarray): object-dtype array holding the entries
    """

    def __init__(self, rows: Sequence[Sequence], cols: Optional[int] = None):
        rows = [list(row) for row in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(row) != cols for row in rows):
            raise DimensionMismatch("all rows must have the same length")
        self.data = np.empty((len(rows), cols), dtype=object)
        for i, row in enumerate(rows):
            for j, value in enumerate(row):
                self.data[i, j] = value if isinstance(value, Fraction) else Fraction(value)
        self.data.setflags(write=False)

    @classmethod
    def identity(cls, size: int) -> "ExactMatrix":
        return cls([[int(i == j) for j in range(size)] for i in range(size)], cols=size)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "ExactMatrix":
        size = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(size)] for i in range(size)], cols=size)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.data.T.tolist(), cols=self.shape[0])

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.data.flat)

    def integer_rows(self) -> np.ndarray:
        """Rows scaled by their common denominators. Row span over Q is unchanged."""
        out = np.zeros(self.shape, dtype=object)
        for i, row in enumerate(self.data):
            lcm = reduce(math.lcm, (x.denominator for x in row), 1)
            out[i] = [_as_int(x * lcm) for x in row]
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self.shape == other.shape and bool(
            (self.data == other.data).all()
        )

    def __repr__(self) -> str:
        return f"ExactMatrix({self.shape[0]}x{self.shape[1]})"


def _bareiss_rank(a: np.ndarray) -> int:
    a = a.copy()
    n_rows, n_cols = a.shape
    previous = 1
    row = 0
    for col in range(n_cols):
        if row == n_rows:
            break
        nonzero = [i for i in range(row, n_rows) if a[i, col] != 0]
        if not nonzero:
            continue
        pivot_row = nonzero[0]
        if pivot_row != row:
            a[[row, pivot_row]] = a[[pivot_row, row]]
        pivot = a[row, col]
        for i in range(row + 1, n_rows):
            factor = a[i, col]
            a[i, col + 1:] = (pivot * a[i, col + 1:] - factor * a[row, col + 1:]) // previous
            a[i, col] = 0
        previous = pivot
        row += 1
    return row


def rank(m: ExactMatrix) -> int:
    """
    Rank over the rationals by fraction-free (Bareiss) elimination.

    Rational rows are first cleared to integers by their common denominator.
    """
    if m.shape[0] == 0 or m.shape[1] == 0:
        return 0
    return _bareiss_rank(m.integer_rows())


def _bareiss_determinant(a: np.ndarray) -> int:
    a = a.copy()
    size = a.shape[0]
    sign, previous = 1, 1
    for k in range(size):
        nonzero = [i for i in range(k, size) if a[i, k] != 0]
        if not nonzero:
            return 0
        if nonzero[0] != k:
            a[[k, nonzero[0]]] = a[[nonzero[0], k]]
            sign = -sign
        for i in range(k + 1, size):
            a[i, k + 1:] = (a[k, k] * a[i, k + 1:] - a[i, k] * a[k, k + 1:]) // previous
            a[i, k] = 0
        previous = a[k, k]
    return sign * previous


def determinant(m: ExactMatrix) -> Fraction:
    """
    Exact determinant of a square matrix.

    Raises:
        DimensionMismatch: the matrix is not square
    """
    rows, cols = m.shape
    if rows != cols:
        raise DimensionMismatch(f"determinant of a {rows}x{cols} matrix")
    if rows == 0:
        return Fraction(1)
    scale = 1
    for row in m.data:
        scale *= reduce(math.lcm, (x.denominator for x in row), 1)
    return Fraction(_bareiss_determinant(m.integer_rows()), scale)


def solve_nonnegative(basis: ExactMatrix, target: Sequence) -> Optional[List[Fraction]]:
    """
    Solve basis @ x = target exactly and accept only nonnegative solutions.

    Args:
        basis: d x k matrix whose k columns are linearly independent
        target: length-d vector

    Returns:
        Optional[List[Fraction]]: the coefficients, or None when the system is
        inconsistent or some coefficient is negative

    Raises:
        DimensionMismatch: target length differs from the number of basis rows
    """
    n_rows, n_cols = basis.shape
    if len(target) != n_rows:
        raise DimensionMismatch(f"target has length {len(target)}, expected {n_rows}")
    augmented = [list(basis.data[i]) + [Fraction(target[i])] for i in range(n_rows)]

    pivot_cols = []
    row = 0
    for col in range(n_cols):
        pivot_row = next((i for i in range(row, n_rows) if augmented[i][col] != 0), None)
        if pivot_row is None:
            raise HassettError("basis columns are linearly dependent")
        augmented[row], augmented[pivot_row] = augmented[pivot_row], augmented[row]
        pivot = augmented[row][col]
        augmented[row] = [x / pivot for x in augmented[row]]
        for i in range(n_rows):
            if i != row and augmented[i][col] != 0:
                factor = augmented[i][col]
                augmented[i] = [x - factor * y for x, y in zip(augmented[i], augmented[row])]
        pivot_cols.append(col)
        row += 1

    # Remaining rows must be consistent
    if any(augmented[i][n_cols] != 0 for i in range(row, n_rows)):
        return None
    solution = [augmented[i][n_cols] for i in range(n_cols)]
    if any(x < 0 for x in solution):
        return None
    return solution


def _unit_pivot_phase(rows: List[SparseRow]) -> Tuple[int, List[SparseRow]]:
    """
    Peel off unit pivots from a sparse integer matrix.

    A +-1 entry can clear its row and column with unimodular operations, which
    contributes an invariant factor 1 and deletes both.

    Returns:
        Tuple[int, List[SparseRow]]: number of unit factors, remaining rows
    """
    rows = [dict(row) for row in rows if row]
    column_index: Dict[int, set] = {}
    for r, row in enumerate(rows):
        for c in row:
            column_index.setdefault(c, set()).add(r)
    alive = set(range(len(rows)))
    units = 0

    while True:
        candidate = None
        for r in sorted(alive, key=lambda k: len(rows[k])):
            col = next((c for c, v in rows[r].items() if v in (1, -1)), None)
            if col is not None:
                candidate = (r, col)
                break
        if candidate is None:
            break
        r, col = candidate
        pivot_row = rows[r]
        pivot = pivot_row[col]
        for other in list(column_index.get(col, ())):
            if other == r:
                continue
            target = rows[other]
            factor = target[col] * pivot  # pivot is +-1, so this is target[col] / pivot
            for c, v in pivot_row.items():
                new = target.get(c, 0) - factor * v
                if new:
                    if c not in target:
                        column_index.setdefault(c, set()).add(other)
                    target[c] = new
                else:
                    target.pop(c, None)
                    column_index[c].discard(other)
            if not target:
                alive.discard(other)
        for c in pivot_row:
            column_index[c].discard(r)
        alive.discard(r)
        rows[r] = {}
        units += 1

    remaining = [rows[r] for r in sorted(alive) if rows[r]]
    return units, remaining


def _dense_invariant_factors(a: np.ndarray) -> List[int]:
    """Smith normal form by gcd row and column reduction on a dense integer array."""
    factors = []
    a = a.copy()
    while a.size and (a != 0).any():
        nonzero = np.argwhere(a != 0)
        pi, pj = min(nonzero, key=lambda ij: abs(a[ij[0], ij[1]]))
        while True:
            pivot = a[pi, pj]
            changed = False
            for i in range(a.shape[0]):
                if i != pi and a[i, pj] != 0:
                    a[i] = a[i] - (a[i, pj] // pivot) * a[pi]
                    changed = changed or a[i, pj] != 0
            for j in range(a.shape[1]):
                if j != pj and a[pi, j] != 0:
                    a[:, j] = a[:, j] - (a[pi, j] // pivot) * a[:, pj]
                    changed = changed or a[pi, j] != 0
            if changed:
                # Move to the smallest remainder in the pivot row or column
                line = [(i, pj) for i in range(a.shape[0]) if a[i, pj] != 0]
                line += [(pi, j) for j in range(a.shape[1]) if a[pi, j] != 0]
                pi, pj = min(line, key=lambda ij: abs(a[ij[0], ij[1]]))
                continue
            rest = np.delete(np.delete(a, pi, axis=0), pj, axis=1)
            offending = np.argwhere(rest % pivot != 0) if rest.size else []
            if len(offending):
                i, _ = offending[0]
                i = i if i < pi else i + 1
                a[pi] = a[pi] + a[i]
                continue
            factors.append(abs(pivot))
            a = rest
            break
    return factors


def invariant_factors(rows: Iterable[SparseRow]) -> List[int]:
    """Nonzero invariant factors of a sparse integer matrix, in divisibility order."""
    units, remaining = _unit_pivot_phase(list(rows))
    factors = [1] * units
    if remaining:
        columns = sorted({c for row in remaining for c in row})
        position = {c: k for k, c in enumerate(columns)}
        dense = np.zeros((len(remaining), len(columns)), dtype=object)
        for i, row in enumerate(remaining):
            for c, v in row.items():
                dense[i, position[c]] = v
        factors += _dense_invariant_factors(dense)
    return factors


def smith_normal_form(m: ExactMatrix) -> List[int]:
    """
    Invariant factors d_1 | d_2 | ... of an integer matrix, all positive.

    Raises:
        NonIntegerEntry: some entry is not an integer
    """
    if not m.is_integral():
        raise NonIntegerEntry("Smith normal form needs integer entries")
    rows = [
        {j: _as_int(x) for j, x in enumerate(row) if x != 0} for row in m.data
    ]
    return invariant_factors(rows)


def is_unimodular_rows(rows: Sequence[Sequence[int]]) -> bool:
    """
    Whether integer vectors extend to a basis of the ambient lattice.

    Equivalent to the gcd of the maximal minors being 1, i.e. full rank with
    every invariant factor equal to 1.
    """
    rows = [list(row) for row in rows]
    if not rows:
        return True
    factors = smith_normal_form(ExactMatrix(rows))
    return len(factors) == len(rows) and all(f == 1 for f in factors)


def primitive(vector: Sequence[int]) -> Tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = reduce(math.gcd, (abs(int(x)) for x in vector), 0)
    if g <= 1:
        return tuple(int(x) for x in vector)
    return tuple(int(x) // g for x in vector)


def _content(row: SparseRow) -> int:
    return reduce(math.gcd, (abs(v) for v in row.values()), 0)


class SparseEchelon:
    """
    Incremental row echelon form over the integers.

    Each stored row is primitive and owns the pivot at its largest column. The
    columns without a pivot index a basis of the quotient space, namely the
    greedy-least basis in column order.

    Attributes:
        pivots (Dict[int, SparseRow]): pivot column -> row
    """

    def __init__(self):
        self.pivots: Dict[int, SparseRow] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, row: SparseRow) -> bool:
        """
        Reduce a row against the stored pivots and keep it if it survives.

        Returns:
            bool: True if the row was independent of the stored ones
        """
        row = {c: v for c, v in row.items() if v}
        while row:
            col = max(row)
            pivot_row = self.pivots.get(col)
            if pivot_row is None:
                g = _content(row)
                if g > 1:
                    row = {c: v // g for c, v in row.items()}
                if row[col] < 0:
                    row = {c: -v for c, v in row.items()}
                self.pivots[col] = row
                return True
            a, b = row[col], pivot_row[col]
            merged = {c: b * v for c, v in row.items()}
            for c, v in pivot_row.items():
                new = merged.get(c, 0) - a * v
                if new:
                    merged[c] = new
                else:
                    merged.pop(c, None)
            g = _content(merged)
            row = {c: v // g for c, v in merged.items()} if g > 1 else merged
        return False

    def reduce(self, vector: Dict[int, Fraction]) -> Dict[int, Fraction]:
        """
        Normal form of a vector modulo the row span.

        Returns:
            Dict[int, Fraction]: nonzero entries, all on non-pivot columns
        """
        vector = {c: Fraction(v) for c, v in vector.items() if v}
        while True:
            # Pivot rows only reach below their pivot, so eliminate top-down
            remaining = [c for c in vector if c in self.pivots]
            if not remaining:
                return vector
            col = max(remaining)
            pivot_row = self.pivots[col]
            factor = vector[col] / pivot_row[col]
            for c, v in pivot_row.items():
                new = vector.get(c, 0) - factor * v
                if new:
                    vector[c] = new
                else:
                    vector.pop(c, None)

    def free_columns(self, n_cols: int) -> List[int]:
        return [c for c in range(n_cols) if c not in self.pivots]


def sparse_rank(rows: Iterable[SparseRow]) -> int:
    echelon = SparseEchelon()
    for row in rows:
        echelon.add(row)
    return echelon.rank
