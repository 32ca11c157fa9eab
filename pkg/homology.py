"""
Exact integer linear algebra for abelianizations

Usage:
    python homology.py <matrix.json>

Example matrix file:
    {"rows": 2, "cols": 2, "entries": ["2", "4", "6", "8"]}
"""

import logging
import sys
from typing import Optional, Sequence

from pydantic import BaseModel, model_validator

from presentations import Presentation

logger = logging.getLogger(__name__)


class MatrixRecord(BaseModel):
    rows: int
    cols: int
    entries: list[str]

    @model_validator(mode='after')
    def check_shape(self) -> 'MatrixRecord':
        if self.rows < 0 or self.cols < 0:
            raise ValueError('Matrix dimensions must be non-negative')
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"Expected {self.rows * self.cols} entries, got {len(self.entries)}")
        for entry in self.entries:
            int(entry)
        return self


class IntegerMatrix:
    """A rows x cols matrix of Python integers."""

    def __init__(self, entries: Sequence[Sequence[int]], cols: Optional[int] = None):
        self.entries = [list(map(int, row)) for row in entries]
        self.rows = len(self.entries)
        if cols is None:
            cols = len(self.entries[0]) if self.entries else 0
        if any(len(row) != cols for row in self.entries):
            raise ValueError('Inconsistent row lengths')
        self.cols = cols

    @classmethod
    def identity(cls, n: int) -> 'IntegerMatrix':
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_record(cls, record: MatrixRecord) -> 'IntegerMatrix':
        values = [int(entry) for entry in record.entries]
        return cls([values[i * record.cols:(i + 1) * record.cols] for i in range(record.rows)], record.cols)

    def to_record(self) -> MatrixRecord:
        return MatrixRecord(rows=self.rows, cols=self.cols,
                            entries=[str(value) for row in self.entries for value in row])

    def __matmul__(self, other: 'IntegerMatrix') -> 'IntegerMatrix':
        if self.cols != other.rows:
            raise ValueError('Dimension mismatch')
        product = [[sum(self.entries[i][k] * other.entries[k][j] for k in range(self.cols))
                    for j in range(other.cols)] for i in range(self.rows)]
        return IntegerMatrix(product, other.cols)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, IntegerMatrix):
            return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)
        return NotImplemented

    def __repr__(self) -> str:
        return f"IntegerMatrix({self.entries!r})"


class SmithForm:
    """Diagonal of the Smith normal form, with optional unimodular transforms L, R."""

    def __init__(self, diagonal: list[int], left: Optional[IntegerMatrix] = None,
                 right: Optional[IntegerMatrix] = None):
        self.diagonal = diagonal
        self.left = left
        self.right = right

    def diagonal_matrix(self, rows: int, cols: int) -> IntegerMatrix:
        d = [[0] * cols for _ in range(rows)]
        for i, value in enumerate(self.diagonal):
            d[i][i] = value
        return IntegerMatrix(d, cols)


class _Reducer:
    """Row/column reduction keeping L and R in step with the working matrix."""

    def __init__(self, m: IntegerMatrix, transforms: bool):
        self.a = [row[:] for row in m.entries]
        self.rows, self.cols = m.rows, m.cols
        self.left = IntegerMatrix.identity(self.rows).entries if transforms else None
        self.right = IntegerMatrix.identity(self.cols).entries if transforms else None

    def swap_rows(self, i, j):
        if i != j:
            self.a[i], self.a[j] = self.a[j], self.a[i]
            if self.left is not None:
                self.left[i], self.left[j] = self.left[j], self.left[i]

    def swap_cols(self, i, j):
        if i != j:
            for row in self.a:
                row[i], row[j] = row[j], row[i]
            if self.right is not None:
                for row in self.right:
                    row[i], row[j] = row[j], row[i]

    def add_row(self, target, source, factor):
        """row[target] += factor * row[source]"""
        if factor:
            self.a[target] = [x + factor * y for x, y in zip(self.a[target], self.a[source])]
            if self.left is not None:
                self.left[target] = [x + factor * y for x, y in zip(self.left[target], self.left[source])]

    def add_col(self, target, source, factor):
        """col[target] += factor * col[source]"""
        if factor:
            for row in self.a:
                row[target] += factor * row[source]
            if self.right is not None:
                for row in self.right:
                    row[target] += factor * row[source]

    def negate_row(self, i):
        self.a[i] = [-x for x in self.a[i]]
        if self.left is not None:
            self.left[i] = [-x for x in self.left[i]]

    def smallest(self, t, cells):
        best = None
        for i, j in cells:
            value = self.a[i][j]
            if value and (best is None or abs(value) < abs(self.a[best[0]][best[1]])):
                best = (i, j)
        return best

    def move_to_pivot(self, t, cell):
        i, j = cell
        self.swap_rows(t, i)
        self.swap_cols(t, j)

    def reduce(self) -> list[int]:
        size = min(self.rows, self.cols)
        for t in range(size):
            cell = self.smallest(t, ((i, j) for i in range(t, self.rows) for j in range(t, self.cols)))
            if cell is None:
                break
            self.move_to_pivot(t, cell)
            while True:
                pivot = self.a[t][t]
                for i in range(t + 1, self.rows):
                    self.add_row(i, t, -(self.a[i][t] // pivot))
                for j in range(t + 1, self.cols):
                    self.add_col(j, t, -(self.a[t][j] // pivot))
                cross = [(i, t) for i in range(t + 1, self.rows)] + [(t, j) for j in range(t + 1, self.cols)]
                leftover = self.smallest(t, cross)
                if leftover is not None:
                    # a remainder smaller than the pivot becomes the new pivot
                    self.move_to_pivot(t, leftover)
                    continue
                stray = next(((i, j) for i in range(t + 1, self.rows) for j in range(t + 1, self.cols)
                              if self.a[i][j] % pivot), None)
                if stray is None:
                    break
                self.add_row(t, stray[0], 1)
            if self.a[t][t] < 0:
                self.negate_row(t)
        return [self.a[t][t] for t in range(size)]


def smith_normal_form(m: IntegerMatrix, transforms: bool = False) -> SmithForm:
    """Smith normal form; with transforms, L * m * R equals the diagonal matrix."""
    reducer = _Reducer(m, transforms)
    diagonal = reducer.reduce()
    if not transforms:
        return SmithForm(diagonal)
    return SmithForm(diagonal, IntegerMatrix(reducer.left, m.rows), IntegerMatrix(reducer.right, m.cols))


class InvariantFactors(BaseModel):
    torsion: list[int]
    free_rank: int

    @model_validator(mode='after')
    def check_chain(self) -> 'InvariantFactors':
        if self.free_rank < 0:
            raise ValueError('free_rank must be non-negative')
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"Torsion coefficients must be at least 2, got {d}")
        for d, e in zip(self.torsion, self.torsion[1:]):
            if e % d:
                raise ValueError(f"Divisibility chain broken: {d} does not divide {e}")
        return self

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        if self.is_trivial():
            return 'trivial'
        parts = []
        if self.free_rank:
            parts.append('Z' if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return ' + '.join(parts)


def relation_matrix(p: Presentation) -> IntegerMatrix:
    """Exponent-sum matrix: one row per relator, one column per generator."""
    rows = []
    for relator in p.relators:
        row = [0] * len(p.generators)
        for name, sign in relator:
            row[p.alphabet.index(name)] += sign
        rows.append(row)
    return IntegerMatrix(rows, len(p.generators))


def invariant_factors(m: IntegerMatrix) -> InvariantFactors:
    """Abelian group Z^cols / rowspace(m)."""
    diagonal = smith_normal_form(m).diagonal
    rank = sum(1 for d in diagonal if d)
    return InvariantFactors(torsion=[d for d in diagonal if d > 1], free_rank=m.cols - rank)


def h1(p: Presentation) -> InvariantFactors:
    """Abelianization of the presented group."""
    factors = invariant_factors(relation_matrix(p))
    logger.debug("H1 of %d-generator presentation: %s", len(p.generators), factors)
    return factors


def is_perfect(p: Presentation) -> bool:
    return h1(p).is_trivial()


def main():
    if len(sys.argv) != 2:
        print("Usage: python homology.py <matrix.json>")
        sys.exit(1)
    with open(sys.argv[1], 'r', encoding='utf-8') as file:
        record = MatrixRecord.model_validate_json(file.read())
    print(smith_normal_form(IntegerMatrix.from_record(record)).diagonal)


if __name__ == '__main__':
    main()
