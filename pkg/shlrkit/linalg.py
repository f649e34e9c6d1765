"""Exact linear algebra over the rationals and cohomology of finite complexes.

Row reduction is delegated to sympy's ``DomainMatrix`` over ``QQ``. Matrices
are stored sparsely with ``fractions.Fraction`` entries.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple, Union

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from shlrkit.errors import ArgumentError, InvalidComplexError

logger = logging.getLogger(__name__)

WINDOW_INCOMPLETE = "window-incomplete"

Vector = List[Fraction]


@dataclass
class RationalMatrix:
    """Sparse matrix with exact rational entries.

    Args:
        rows: Number of rows.
        cols: Number of columns.
        entries: Map ``(row, col) -> value``; zeros are dropped.
    """

    rows: int
    cols: int
    entries: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ArgumentError(f"negative matrix shape {self.rows}x{self.cols}")
        cleaned = {}
        for (i, j), value in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ArgumentError(f"entry {(i, j)} outside {self.rows}x{self.cols}")
            value = Fraction(value)
            if value != 0:
                cleaned[(i, j)] = value
        self.entries = cleaned

    @classmethod
    def zero(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence]) -> "RationalMatrix":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        entries = {
            (i, j): Fraction(value)
            for i, row in enumerate(dense)
            for j, value in enumerate(row)
            if value != 0
        }
        return cls(rows, cols, entries)

    def to_dense(self) -> List[List[Fraction]]:
        dense = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), value in self.entries.items():
            dense[i][j] = value
        return dense

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def is_zero(self) -> bool:
        return not self.entries

    def matvec(self, x: Sequence) -> Vector:
        if len(x) != self.cols:
            raise ArgumentError(f"vector of length {len(x)} for {self.rows}x{self.cols} matrix")
        out = [Fraction(0)] * self.rows
        for (i, j), value in self.entries.items():
            out[i] += value * x[j]
        return out

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ArgumentError(f"cannot multiply {self.shape} by {other.shape}")
        by_row: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (k, j), value in other.entries.items():
            by_row.setdefault(k, []).append((j, value))
        out: Dict[Tuple[int, int], Fraction] = {}
        for (i, k), value in self.entries.items():
            for j, other_value in by_row.get(k, ()):
                out[(i, j)] = out.get((i, j), Fraction(0)) + value * other_value
        return RationalMatrix(self.rows, other.cols, out)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()}
        )

    def scaled(self, factor) -> "RationalMatrix":
        factor = Fraction(factor)
        return RationalMatrix(
            self.rows, self.cols, {k: v * factor for k, v in self.entries.items()}
        )

    def to_domain_matrix(self) -> DomainMatrix:
        dense = [[QQ(0)] * self.cols for _ in range(self.rows)]
        for (i, j), value in self.entries.items():
            dense[i][j] = QQ(value.numerator, value.denominator)
        return DomainMatrix(dense, (self.rows, self.cols), QQ)


def block_matrix(blocks: Sequence[Sequence[RationalMatrix]]) -> RationalMatrix:
    """Assemble a matrix from a rectangular grid of blocks."""
    row_sizes = [row[0].rows for row in blocks]
    col_sizes = [block.cols for block in blocks[0]] if blocks else []
    entries = {}
    row_offset = 0
    for r, row in enumerate(blocks):
        col_offset = 0
        for c, block in enumerate(row):
            if block.rows != row_sizes[r] or block.cols != col_sizes[c]:
                raise ArgumentError("inconsistent block sizes")
            for (i, j), value in block.entries.items():
                entries[(row_offset + i, col_offset + j)] = value
            col_offset += col_sizes[c]
        row_offset += row_sizes[r]
    return RationalMatrix(sum(row_sizes), sum(col_sizes), entries)


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def rref(A: RationalMatrix) -> Tuple[List[List[Fraction]], Tuple[int, ...]]:
    """Reduced row echelon form and pivot columns of ``A``."""
    if A.rows == 0 or A.cols == 0 or A.is_zero():
        return [[Fraction(0)] * A.cols for _ in range(A.rows)], ()
    reduced, pivots = A.to_domain_matrix().rref()
    matrix = reduced.to_Matrix()
    dense = [[_to_fraction(matrix[i, j]) for j in range(A.cols)] for i in range(A.rows)]
    return dense, tuple(pivots)


def rank(A: RationalMatrix) -> int:
    if A.rows == 0 or A.cols == 0 or A.is_zero():
        return 0
    return int(A.to_domain_matrix().rank())


def solve(A: RationalMatrix, b: Sequence) -> Optional[Vector]:
    """Find ``x`` with ``A x = b`` exactly.

    The solution is read off the reduced echelon form of ``[A | b]`` with all
    free variables set to zero, so it is deterministic.

    Args:
        A: Coefficient matrix.
        b: Right-hand side of length ``A.rows``.

    Returns:
        A solution vector, or ``None`` if the system is inconsistent.

    Raises:
        ArgumentError: If ``b`` does not have ``A.rows`` entries.
    """
    if len(b) != A.rows:
        raise ArgumentError(f"right-hand side of length {len(b)} for {A.rows} equations")
    augmented = dict(A.entries)
    for i, value in enumerate(b):
        if value != 0:
            augmented[(i, A.cols)] = Fraction(value)
    reduced, pivots = rref(RationalMatrix(A.rows, A.cols + 1, augmented))
    if A.cols in pivots:
        return None
    x = [Fraction(0)] * A.cols
    for row, col in enumerate(pivots):
        x[col] = reduced[row][A.cols]
    return x


def free_kernel_basis(A: RationalMatrix) -> List[Tuple[int, Vector]]:
    """Null space basis of ``A`` as ``(free column, vector)`` pairs.

    Each vector is 1 at its own free column and 0 at every other free column,
    so the coordinates of a kernel element are its entries at the free columns.
    """
    reduced, pivots = rref(A)
    pivot_set = set(pivots)
    basis = []
    for free in range(A.cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * A.cols
        v[free] = Fraction(1)
        for row, col in enumerate(pivots):
            v[col] = -reduced[row][free]
        basis.append((free, v))
    return basis


def kernel_basis(A: RationalMatrix) -> List[Vector]:
    """Basis of the null space of ``A``, one vector per free column."""
    return [v for _, v in free_kernel_basis(A)]


@dataclass(frozen=True)
class DegreeWindow:
    """A closed range of cohomological degrees ``lo..hi``."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ArgumentError(f"empty degree window [{self.lo}, {self.hi}]")

    @classmethod
    def parse(cls, text: str) -> "DegreeWindow":
        lo, sep, hi = text.partition(":")
        try:
            if not sep:
                raise ValueError(text)
            return cls(int(lo), int(hi))
        except ValueError:
            raise ArgumentError(f"degree window must look like LO:HI, got {text!r}") from None

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def interior(self) -> range:
        return range(self.lo + 1, self.hi)

    def __contains__(self, degree: int) -> bool:
        return self.lo <= degree <= self.hi

    def __str__(self) -> str:
        return f"{self.lo}:{self.hi}"


@dataclass
class FiniteComplex:
    """A cochain complex restricted to a degree window.

    Args:
        window: Degrees represented.
        bases: Basis labels per degree; missing degrees are zero.
        differentials: ``n -> matrix of d: C^n -> C^(n+1)``; missing entries
            are zero maps.
        support: Optional full degree range of the untruncated complex, used
            to decide whether boundary degrees can hide cohomology.
        incomplete: Degrees whose cohomology the truncation cannot see.
    """

    window: DegreeWindow
    bases: Dict[int, List[Hashable]] = field(default_factory=dict)
    differentials: Dict[int, RationalMatrix] = field(default_factory=dict)
    support: Optional[Tuple[int, int]] = None
    incomplete: Set[int] = field(default_factory=set)

    def dim(self, degree: int) -> int:
        return len(self.bases.get(degree, ()))

    def d(self, degree: int) -> RationalMatrix:
        matrix = self.differentials.get(degree)
        if matrix is None:
            return RationalMatrix.zero(self.dim(degree + 1), self.dim(degree))
        if matrix.shape != (self.dim(degree + 1), self.dim(degree)):
            raise ArgumentError(
                f"differential in degree {degree} has shape {matrix.shape}, expected "
                f"{(self.dim(degree + 1), self.dim(degree))}"
            )
        return matrix

    def check_square_zero(self) -> None:
        for n in range(self.window.lo, self.window.hi - 1):
            product = self.d(n + 1) @ self.d(n)
            if not product.is_zero():
                raise InvalidComplexError(f"d^2 != 0 from degree {n} to {n + 2}")

    def complete_interior(self) -> bool:
        """True if every chain of the complex lives strictly inside the window."""
        if any(n in self.window for n in self.incomplete):
            return False
        if self.support is None:
            return self.dim(self.window.lo) == 0 and self.dim(self.window.hi) == 0
        lo, hi = self.support
        return lo > self.window.lo and hi < self.window.hi


def cohomology_dims(C: FiniteComplex) -> Dict[int, Union[int, str]]:
    """Cohomology dimensions of ``C`` per degree of its window.

    Interior degrees get numbers; the two boundary degrees and the degrees
    listed in ``C.incomplete`` are reported as ``"window-incomplete"``.

    Raises:
        InvalidComplexError: If ``d^2 != 0`` somewhere inside the window.
    """
    C.check_square_zero()
    dims: Dict[int, Union[int, str]] = {}
    ranks: Dict[int, int] = {}

    def rank_of(n: int) -> int:
        if n not in ranks:
            ranks[n] = rank(C.d(n))
        return ranks[n]

    for n in C.window.degrees():
        if n in (C.window.lo, C.window.hi) or n in C.incomplete:
            dims[n] = WINDOW_INCOMPLETE
            continue
        dims[n] = C.dim(n) - rank_of(n) - rank_of(n - 1)
        logger.debug(f"H^{n}: dim C={C.dim(n)}, result {dims[n]}")
    return dims


def cone(
    source: FiniteComplex,
    target: FiniteComplex,
    chain_map: Dict[int, RationalMatrix],
    window: DegreeWindow,
    escapes: Iterable[int] = (),
) -> FiniteComplex:
    """Mapping cone of ``f: source -> target``.

    ``Cone^n = source^(n+1) ⊕ target^n`` with ``d(p, q) = (-d p, f p + d q)``.
    Both complexes must cover the degrees ``window.lo .. window.hi + 2``.

    Args:
        source: Domain complex.
        target: Codomain complex.
        chain_map: ``n -> matrix of f: source^n -> target^n``.
        window: Degrees of the cone to build.
        escapes: Source degrees where the map leaves the truncated target.
    """

    def f(n: int) -> RationalMatrix:
        matrix = chain_map.get(n)
        if matrix is None:
            return RationalMatrix.zero(target.dim(n), source.dim(n))
        return matrix

    bases = {}
    differentials = {}
    for n in window.degrees():
        bases[n] = [("source", b) for b in source.bases.get(n + 1, ())] + [
            ("target", b) for b in target.bases.get(n, ())
        ]
    for n in window.degrees():
        if n + 1 > window.hi:
            continue
        differentials[n] = block_matrix(
            [
                [source.d(n + 1).scaled(-1), RationalMatrix.zero(source.dim(n + 2), target.dim(n))],
                [f(n + 1), target.d(n)],
            ]
        )
    support = None
    if source.support is not None and target.support is not None:
        support = (
            min(source.support[0] - 1, target.support[0]),
            max(source.support[1] - 1, target.support[1]),
        )
    incomplete = {n - 1 for n in source.incomplete} | set(target.incomplete)
    for n in escapes:
        incomplete.update((n - 1, n))
    return FiniteComplex(window, bases, differentials, support, incomplete)
