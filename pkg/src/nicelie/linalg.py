"""Exact linear algebra over GF(2) and the rationals.

GF(2) matrices are lists of row bitmasks (bit ``t`` is column ``t``).
Rational matrices are lists of lists of ``Fraction``.  Pivoting is always
positional, first nonzero entry in index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd
from typing import Literal, Optional, Sequence

from nicelie.core import BracketIndex, NiceDiagram

Field = Literal["gf2", "q"]
RationalMatrix = list[list[Fraction]]


@dataclass(frozen=True)
class GF2Matrix:
    rows: tuple[int, ...]
    ncols: int

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> GF2Matrix:
        ncols = len(rows[0]) if rows else 0
        masks = []
        for r in rows:
            m = 0
            for t, x in enumerate(r):
                if x % 2:
                    m |= 1 << t
            masks.append(m)
        return cls(tuple(masks), ncols)

    def to_dense(self) -> list[list[int]]:
        return [[(r >> t) & 1 for t in range(self.ncols)] for r in self.rows]


@dataclass(frozen=True)
class RootMatrix:
    """Rows ``α_I = e_k - e_i - e_j`` for ``I = ({i,j},k)`` in canonical order."""

    indices: tuple[BracketIndex, ...]
    n: int

    @cached_property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for b in self.indices:
            row = [0] * self.n
            row[b.k - 1] = 1
            row[b.i - 1] = -1
            row[b.j - 1] = -1
            out.append(tuple(row))
        return tuple(out)

    @cached_property
    def mod2(self) -> GF2Matrix:
        masks = tuple((1 << (b.i - 1)) | (1 << (b.j - 1)) | (1 << (b.k - 1))
                      for b in self.indices)
        return GF2Matrix(masks, self.n)

    def rational(self) -> RationalMatrix:
        return [[Fraction(x) for x in row] for row in self.rows]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.indices), self.n)


def root_matrix(nd: NiceDiagram) -> RootMatrix:
    return RootMatrix(nd.bracket_indices, nd.n)


# --- GF(2) -----------------------------------------------------------------

class _GF2Basis:
    """Incremental echelon basis; remembers which input rows span each vector."""

    def __init__(self) -> None:
        self.pivots: dict[int, tuple[int, int]] = {}  # lowest bit -> (vector, combination)

    def reduce(self, v: int) -> tuple[int, int]:
        comb = 0
        while v:
            low = v & -v
            hit = self.pivots.get(low)
            if hit is None:
                break
            v ^= hit[0]
            comb ^= hit[1]
        return v, comb

    def add(self, v: int, tag: int) -> bool:
        rest, comb = self.reduce(v)
        if not rest:
            return False
        self.pivots[rest & -rest] = (rest, comb ^ tag)
        return True


def gf2_rank(rows: Sequence[int]) -> int:
    basis = _GF2Basis()
    return sum(basis.add(r, 0) for r in rows)


def gf2_dependencies(rows: Sequence[int], chosen: Sequence[int]) -> dict[int, int]:
    """Express every row in terms of the independent ``chosen`` rows.

    Returns ``{row: mask}`` where bit ``p`` of ``mask`` means ``chosen[p]``
    enters the sum.  Rows outside the span are omitted.
    """
    basis = _GF2Basis()
    for p, r in enumerate(chosen):
        if not basis.add(rows[r], 1 << p):
            raise ValueError("chosen rows are dependent over GF(2)")
    out = {}
    for idx, r in enumerate(rows):
        rest, comb = basis.reduce(r)
        if not rest:
            out[idx] = comb
    return out


def solve_gf2(m: GF2Matrix, b: int) -> Optional[int]:
    """A solution ``x`` (column bitmask) of ``M x = b`` or None.

    ``b`` is a bitmask over rows.  Free variables are set to zero.
    """
    # Solve via the transposed system: columns of M as vectors over rows.
    cols = []
    for t in range(m.ncols):
        v = 0
        for r, row in enumerate(m.rows):
            if (row >> t) & 1:
                v |= 1 << r
        cols.append(v)
    basis = _GF2Basis()
    for t, v in enumerate(cols):
        basis.add(v, 1 << t)
    rest, comb = basis.reduce(b)
    if rest:
        return None
    return comb


def image_member_gf2(m: GF2Matrix, b: int) -> bool:
    return solve_gf2(m, b) is not None


def gf2_apply(m: GF2Matrix, x: int) -> int:
    """``M x`` as a bitmask over rows."""
    out = 0
    for r, row in enumerate(m.rows):
        if (row & x).bit_count() % 2:
            out |= 1 << r
    return out


# --- rationals -------------------------------------------------------------

def _as_fraction_rows(m: Sequence[Sequence[object]]) -> RationalMatrix:
    return [[Fraction(x) for x in row] for row in m]  # type: ignore[arg-type]


def rref(m: Sequence[Sequence[object]]) -> tuple[RationalMatrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = _as_fraction_rows(m)
    if not a:
        return a, []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a, pivots


def rank_q(m: Sequence[Sequence[object]]) -> int:
    return len(rref(m)[1])


class _QBasis:
    """Incremental echelon basis over the rationals."""

    def __init__(self, ncols: int) -> None:
        self.ncols = ncols
        self.rows: dict[int, list[Fraction]] = {}

    def add(self, v: Sequence[object]) -> bool:
        w = [Fraction(x) for x in v]  # type: ignore[arg-type]
        for c in range(self.ncols):
            if not w[c]:
                continue
            row = self.rows.get(c)
            if row is None:
                inv = 1 / w[c]
                self.rows[c] = [x * inv for x in w]
                return True
            f = w[c]
            w = [x - f * y for x, y in zip(w, row)]
        return False


def greedy_independent_rows(m: Sequence, field: Field,
                            seed: Sequence[int] = ()) -> list[int]:
    """Indices of rows kept by a scan in row order, keeping independent rows.

    ``seed`` rows are inserted first (they must be independent).  For
    ``field="gf2"`` rows may be given as bitmasks or as integer vectors.
    """
    kept: list[int] = []
    if field == "gf2":
        masks = [r if isinstance(r, int) else GF2Matrix.from_dense([r]).rows[0] for r in m]
        basis = _GF2Basis()
        for s in seed:
            if not basis.add(masks[s], 0):
                raise ValueError("seed rows are dependent")
        kept = list(seed)
        for idx, r in enumerate(masks):
            if idx not in seed and basis.add(r, 0):
                kept.append(idx)
    elif field == "q":
        ncols = len(m[0]) if len(m) else 0
        qb = _QBasis(ncols)
        for s in seed:
            if not qb.add(m[s]):
                raise ValueError("seed rows are dependent")
        kept = list(seed)
        for idx, r in enumerate(m):
            if idx not in seed and qb.add(r):
                kept.append(idx)
    else:
        raise ValueError(f"unknown field {field!r}")
    return sorted(kept)


def kernel_q(m: Sequence[Sequence[object]], ncols: Optional[int] = None) -> list[list[Fraction]]:
    """Basis of the right kernel, one vector per free column."""
    if not m:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    a, pivots = rref(m)
    ncols = len(a[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -a[r][f]
        basis.append(v)
    return basis


def primitive_integer_vector(v: Sequence[Fraction]) -> list[int]:
    """Scale to coprime integers with positive leading nonzero entry."""
    den = reduce(lambda x, y: x * y // gcd(x, y), (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    return [-x for x in ints] if lead < 0 else ints


def left_kernel_integer(m: Sequence[Sequence[object]], nrows: Optional[int] = None
                        ) -> list[list[int]]:
    """Integer basis of ``{v : v M = 0}``."""
    if not m:
        return []
    ncols = len(m[0])
    transposed = [[m[r][c] for r in range(len(m))] for c in range(ncols)]
    if not transposed:
        n = nrows if nrows is not None else len(m)
        return [[int(i == j) for j in range(n)] for i in range(n)]
    return [primitive_integer_vector(v) for v in kernel_q(transposed)]


def gram_matrix(rm: RootMatrix) -> list[list[int]]:
    rows = rm.rows
    return [[sum(x * y for x, y in zip(a, b)) for b in rows] for a in rows]


def cokernel_dimension(rm: RootMatrix) -> int:
    m = len(rm.indices)
    return m - rank_q(rm.rows) if m else 0
