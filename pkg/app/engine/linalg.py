"""
Exact dense linear algebra over the rationals

ExactMatrix is immutable; every elimination works on a private integer or
Fraction copy.  Determinants use fraction-free (Bareiss) elimination on
integer-scaled rows; rational Gaussian elimination is kept as an oracle.
"""
from fractions import Fraction
import logging

from app.engine.exact_core import lcm_of_denominators, integer_content
from app.utils.errors import DomainError

logger = logging.getLogger(__name__)


class ExactMatrix:
    """Dense matrix of Fractions"""

    __slots__ = ('rows', 'cols', '_entries')

    def __init__(self, entries, cols=None):
        entries = tuple(tuple(Fraction(x) for x in row) for row in entries)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        for row in entries:
            if len(row) != cols:
                raise DomainError('ragged matrix rows')
        self.rows = len(entries)
        self.cols = cols
        self._entries = entries

    @classmethod
    def zeros(cls, rows, cols):
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, size):
        return cls([[int(i == j) for j in range(size)] for i in range(size)], size)

    @classmethod
    def from_columns(cls, columns, rows=None):
        columns = [list(c) for c in columns]
        if rows is None:
            rows = len(columns[0]) if columns else 0
        return cls([[columns[j][i] for j in range(len(columns))] for i in range(rows)], len(columns))

    def __getitem__(self, key):
        i, j = key
        return self._entries[i][j]

    def row(self, i):
        return list(self._entries[i])

    def column(self, j):
        return [row[j] for row in self._entries]

    def to_lists(self):
        return [list(row) for row in self._entries]

    @property
    def shape(self):
        return self.rows, self.cols

    @property
    def is_square(self):
        return self.rows == self.cols

    def transpose(self):
        return ExactMatrix.from_columns(self._entries, self.cols) if self.rows else ExactMatrix.zeros(self.cols, 0)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    def __add__(self, other):
        self._require_shape(other)
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._entries, other._entries)], self.cols)

    def __sub__(self, other):
        self._require_shape(other)
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._entries, other._entries)], self.cols)

    def scale(self, factor):
        factor = Fraction(factor)
        return ExactMatrix([[factor * a for a in row] for row in self._entries], self.cols)

    def shift(self, value):
        """self + value * identity"""
        if not self.is_square:
            raise DomainError('shift needs a square matrix')
        value = Fraction(value)
        return ExactMatrix(
            [[a + value if i == j else a for j, a in enumerate(row)] for i, row in enumerate(self._entries)],
            self.cols,
        )

    def apply(self, vector):
        """Matrix times column vector"""
        if len(vector) != self.cols:
            raise DomainError(f'vector of length {len(vector)} for a matrix with {self.cols} columns')
        return [sum((a * Fraction(x) for a, x in zip(row, vector) if a and x), Fraction(0)) for row in self._entries]

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise DomainError(f'cannot multiply {self.shape} by {other.shape}')
        columns = [other.column(j) for j in range(other.cols)]
        return ExactMatrix.from_columns([self.apply(c) for c in columns], self.rows)

    def _require_shape(self, other):
        if self.shape != other.shape:
            raise DomainError(f'shape mismatch {self.shape} vs {other.shape}')

    def __repr__(self):
        return f'<ExactMatrix {self.rows}x{self.cols}>'


def _integer_rows(m):
    """Scale each row to integers; returns (rows, product of the scale factors)"""
    rows = []
    scale = 1
    for row in m.to_lists():
        factor = lcm_of_denominators(row)
        rows.append([int(x * factor) for x in row])
        scale *= factor
    return rows, scale


def det(m):
    """
    Determinant by fraction-free elimination.

    Pivot: the entry of largest absolute value in the current column, the
    smallest row index winning ties.
    """
    if not m.is_square:
        raise DomainError(f'determinant of a non-square {m.rows}x{m.cols} matrix')
    size = m.rows
    if size == 0:
        return Fraction(1)
    a, scale = _integer_rows(m)
    sign = 1
    previous = 1
    for k in range(size - 1):
        pivot_row = max(range(k, size), key=lambda r: (abs(a[r][k]), -r))
        if a[pivot_row][k] == 0:
            return Fraction(0)
        if pivot_row != k:
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, size):
            lead = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, size):
                row_i[j] = (pivot * row_i[j] - lead * row_k[j]) // previous
            row_i[k] = 0
        previous = pivot
    return Fraction(sign * a[size - 1][size - 1], scale)


def det_gauss(m):
    """Determinant by rational Gaussian elimination (cross-check oracle)"""
    if not m.is_square:
        raise DomainError(f'determinant of a non-square {m.rows}x{m.cols} matrix')
    a = m.to_lists()
    size = m.rows
    result = Fraction(1)
    for k in range(size):
        pivot_row = next((r for r in range(k, size) if a[r][k]), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != k:
            a[k], a[pivot_row] = a[pivot_row], a[k]
            result = -result
        pivot = a[k][k]
        result *= pivot
        for i in range(k + 1, size):
            if a[i][k]:
                factor = a[i][k] / pivot
                a[i] = [x - factor * y for x, y in zip(a[i], a[k])]
    return result


def rank(m):
    """Rank via integer row reduction with per-row content removal"""
    rows, _ = _integer_rows(m)
    rows = [r for r in rows if any(r)]
    result = 0
    for col in range(m.cols):
        candidates = [r for r in rows if r[col]]
        if not candidates:
            continue
        pivot = min(candidates, key=lambda r: abs(r[col]))
        result += 1
        reduced = []
        for r in rows:
            if r is pivot:
                continue
            if r[col]:
                r = [pivot[col] * x - r[col] * y for x, y in zip(r, pivot)]
                g = integer_content(r)
                if g > 1:
                    r = [x // g for x in r]
            if any(r):
                reduced.append(r)
        rows = reduced
    return result


def solve(m, rhs):
    """
    Solve m x = rhs exactly.

    Returns a particular solution (free variables set to 0) or None when the
    system is inconsistent.
    """
    if len(rhs) != m.rows:
        raise DomainError(f'right-hand side of length {len(rhs)} for {m.rows} rows')
    a = [row + [Fraction(b)] for row, b in zip(m.to_lists(), rhs)]
    pivots = []
    r = 0
    for col in range(m.cols):
        pivot_row = next((i for i in range(r, m.rows) if a[i][col]), None)
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        pivot = a[r][col]
        a[r] = [x / pivot for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][col]:
                factor = a[i][col]
                a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == m.rows:
            break
    for i in range(r, m.rows):
        if a[i][-1]:
            return None
    solution = [Fraction(0)] * m.cols
    for i, col in enumerate(pivots):
        solution[col] = a[i][-1]
    return solution


def is_zero_vector(vector):
    return all(x == 0 for x in vector)


def proportionality(vector, reference):
    """
    Scalar c with vector == c * reference, or None.

    A zero reference is proportional only to the zero vector (c = 0).
    """
    c = None
    for x, y in zip(vector, reference):
        if y == 0:
            if x != 0:
                return None
            continue
        ratio = Fraction(x) / Fraction(y)
        if c is None:
            c = ratio
        elif ratio != c:
            return None
    if c is None:
        return Fraction(0) if is_zero_vector(vector) else None
    return c
