"""Diagrams, labelings, bracket indices and the Jacobi system.

Nodes are the integers ``1..n``.  A nice Lie algebra with structure equations
``de^k = sum c_{ijk} e^{ij}`` corresponds to the set of bracket indices
``({i,j}, k)``; each index stands for the two labeled arrows ``i -j-> k`` and
``j -i-> k``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional

from nicelie.poly import Poly

Arrow = tuple[int, int]
TypeVector = tuple[int, ...]


class StructureError(ValueError):
    """A diagram violates a structural invariant (cycle, bad node, ...)."""


class BracketIndex(NamedTuple):
    """``({i,j}, k)`` with ``i < j``: the term ``e^{ij}`` in ``de^k``."""

    i: int
    j: int
    k: int

    @classmethod
    def make(cls, a: int, b: int, k: int) -> BracketIndex:
        if a == b:
            raise StructureError(f"degenerate pair {{{a},{a}}}")
        if k in (a, b):
            raise StructureError(f"target {k} lies in its own pair {{{a},{b}}}")
        return cls(min(a, b), max(a, b), k)

    def sort_key(self) -> tuple[int, int, int]:
        return (self.k, self.i, self.j)

    def __str__(self) -> str:
        return f"({{{self.i},{self.j}}},{self.k})"


class DoubleArrow(NamedTuple):
    """``k -{i,j}-> h``: ``[[e_i,e_j],e_k]`` is a nonzero multiple of ``e_h``."""

    i: int
    j: int
    k: int
    h: int

    def __str__(self) -> str:
        return f"{self.k}->^{{{self.i},{self.j}}}{self.h}"


@dataclass(frozen=True)
class Diagram:
    """Directed acyclic graph on nodes ``1..n`` without multiple arrows."""

    n: int
    arrows: frozenset[Arrow]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise StructureError("negative node count")
        for s, t in self.arrows:
            if not (1 <= s <= self.n and 1 <= t <= self.n):
                raise StructureError(f"arrow {s}->{t} leaves nodes 1..{self.n}")
            if s == t:
                raise StructureError(f"loop at node {s}")
        _topological_order(self.n, self.arrows)

    @classmethod
    def from_arrows(cls, n: int, arrows: Iterable[Arrow]) -> Diagram:
        arrows = list(arrows)
        if len(set(arrows)) != len(arrows):
            raise StructureError("duplicate arrow")
        return cls(n, frozenset(arrows))

    @cached_property
    def in_degree(self) -> dict[int, int]:
        deg = {v: 0 for v in range(1, self.n + 1)}
        for _, t in self.arrows:
            deg[t] += 1
        return deg

    def sorted_arrows(self) -> list[Arrow]:
        return sorted(self.arrows)


def _topological_order(n: int, arrows: Iterable[Arrow]) -> list[int]:
    indeg = [0] * (n + 1)
    succ: dict[int, list[int]] = defaultdict(list)
    for s, t in arrows:
        indeg[t] += 1
        succ[s].append(t)
    ready = [v for v in range(1, n + 1) if indeg[v] == 0]
    order: list[int] = []
    while ready:
        v = ready.pop()
        order.append(v)
        for t in succ[v]:
            indeg[t] -= 1
            if indeg[t] == 0:
                ready.append(t)
    if len(order) != n:
        raise StructureError("diagram contains a cycle")
    return order


def filtration(d: Diagram) -> list[frozenset[int]]:
    """The sets ``N_0 ⊇ N_1 ⊇ ... ⊇ N_{s-1}`` (all nonempty, for n > 0)."""
    _topological_order(d.n, d.arrows)
    layers: list[frozenset[int]] = []
    current = frozenset(range(1, d.n + 1))
    while current:
        layers.append(current)
        current = frozenset(t for s, t in d.arrows if s in current)
    return layers


def lcs_type(d: Diagram) -> TypeVector:
    """Layer sizes ``(a_1, ..., a_s)`` of the node filtration."""
    sizes = [len(layer) for layer in filtration(d)]
    return tuple(a - b for a, b in zip(sizes, sizes[1:] + [0]))


def node_depths(d: Diagram) -> dict[int, int]:
    """Index of the deepest filtration set containing each node."""
    depth = {}
    for i, layer in enumerate(filtration(d)):
        for v in layer:
            depth[v] = i
    return depth


@dataclass(frozen=True)
class LabeledDiagram:
    diagram: Diagram
    labels: Mapping[Arrow, int]

    def __hash__(self) -> int:
        return hash((self.diagram, frozenset(self.labels.items())))


@dataclass(frozen=True)
class Violation:
    condition: str
    detail: str

    def __str__(self) -> str:
        return f"{self.condition}: {self.detail}"


def validate_labeled(ld: LabeledDiagram) -> Optional[Violation]:
    """First violated condition among N1, N2, N3 and even in-degree, else None."""
    d = ld.diagram
    if set(ld.labels) != set(d.arrows):
        return Violation("labels", "labeling is not a total map on arrows")
    for arrow, lab in ld.labels.items():
        if not 1 <= lab <= d.n:
            return Violation("labels", f"label {lab} of {arrow[0]}->{arrow[1]} is not a node")
    seen_src: dict[tuple[int, int], Arrow] = {}
    seen_dst: dict[tuple[int, int], Arrow] = {}
    for (s, t), lab in sorted(ld.labels.items()):
        if (s, lab) in seen_src:
            return Violation("N1", f"arrows from {s} share label {lab}")
        seen_src[(s, lab)] = (s, t)
    for (s, t), lab in sorted(ld.labels.items()):
        if (t, lab) in seen_dst:
            return Violation("N2", f"arrows into {t} share label {lab}")
        seen_dst[(t, lab)] = (s, t)
    for (s, t), lab in sorted(ld.labels.items()):
        if lab == s:
            return Violation("N3", f"arrow {s}->{t} is labeled by its own source")
        if ld.labels.get((lab, t)) != s:
            return Violation("N3", f"{s}->{t} has label {lab} but {lab}->{t} is not labeled {s}")
    for v, deg in d.in_degree.items():
        if deg % 2:
            return Violation("parity", f"node {v} has {deg} incoming arrows")
    return None


def brackets_of(ld: LabeledDiagram) -> list[BracketIndex]:
    """Bracket indices of a labeled diagram satisfying N3, in canonical order."""
    out = {BracketIndex.make(s, lab, t) for (s, t), lab in ld.labels.items()}
    return sorted(out, key=BracketIndex.sort_key)


@dataclass(frozen=True)
class NiceDiagram:
    """Labeled diagram given by its bracket indices, ordered by ``(k, i, j)``."""

    n: int
    bracket_indices: tuple[BracketIndex, ...]
    _checked: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self._checked:
            return
        seen_pairs: dict[tuple[int, int], int] = {}
        seen_arrows: set[Arrow] = set()
        for b in self.bracket_indices:
            if not (1 <= b.i < b.j <= self.n and 1 <= b.k <= self.n) or b.k in (b.i, b.j):
                raise StructureError(f"bad bracket index {b}")
            if (b.i, b.j) in seen_pairs:
                raise StructureError(
                    f"pair {{{b.i},{b.j}}} maps to two targets {seen_pairs[(b.i, b.j)]} and {b.k}")
            seen_pairs[(b.i, b.j)] = b.k
            for arrow in ((b.i, b.k), (b.j, b.k)):
                if arrow in seen_arrows:
                    raise StructureError(f"arrow {arrow[0]}->{arrow[1]} carries two labels")
                seen_arrows.add(arrow)
        if list(self.bracket_indices) != sorted(self.bracket_indices, key=BracketIndex.sort_key):
            raise StructureError("bracket indices are not in canonical (k, i, j) order")
        _topological_order(self.n, seen_arrows)

    @classmethod
    def from_brackets(cls, n: int, brackets: Iterable[tuple[int, int, int]]) -> NiceDiagram:
        """Build from ``(i, j, k)`` triples; the pair may be given in either order."""
        bs = sorted((BracketIndex.make(*b) for b in brackets), key=BracketIndex.sort_key)
        return cls(n, tuple(bs))

    @classmethod
    def from_labeled(cls, ld: LabeledDiagram) -> NiceDiagram:
        v = validate_labeled(ld)
        if v is not None:
            raise StructureError(str(v))
        return cls(ld.diagram.n, tuple(brackets_of(ld)))

    @cached_property
    def labeled(self) -> LabeledDiagram:
        labels: dict[Arrow, int] = {}
        for b in self.bracket_indices:
            labels[(b.i, b.k)] = b.j
            labels[(b.j, b.k)] = b.i
        return LabeledDiagram(Diagram(self.n, frozenset(labels)), labels)

    @property
    def diagram(self) -> Diagram:
        return self.labeled.diagram

    @cached_property
    def index(self) -> dict[BracketIndex, int]:
        return {b: pos for pos, b in enumerate(self.bracket_indices)}

    @cached_property
    def pair_target(self) -> dict[tuple[int, int], int]:
        return {(b.i, b.j): b.k for b in self.bracket_indices}

    def __len__(self) -> int:
        return len(self.bracket_indices)


def double_arrows(nd: NiceDiagram) -> set[DoubleArrow]:
    """All double arrows ``k -{i,j}-> h`` with ``k`` outside ``{i,j}``."""
    by_target: dict[int, list[BracketIndex]] = defaultdict(list)
    for b in nd.bracket_indices:
        by_target[b.k].append(b)
    out: set[DoubleArrow] = set()
    for outer in nd.bracket_indices:
        for l, k in ((outer.i, outer.j), (outer.j, outer.i)):
            for inner in by_target.get(l, ()):
                if k not in (inner.i, inner.j):
                    out.add(DoubleArrow(inner.i, inner.j, k, outer.k))
    return out


def validate_n4(nd: NiceDiagram) -> Optional[tuple[int, int, int, int]]:
    """Return a violating quadruple ``(i, j, k, v)`` or None when N4 holds.

    The quadruple has ``{i,j,k}`` sorted; exactly one of the three double
    arrows into ``v`` with node set ``{i,j,k}`` is present.
    """
    count: dict[tuple[tuple[int, int, int], int], int] = defaultdict(int)
    for da in double_arrows(nd):
        count[(tuple(sorted((da.i, da.j, da.k))), da.h)] += 1
    for (triple, v), c in sorted(count.items()):
        if c == 1:
            return (*triple, v)
    return None


def is_nice(nd: NiceDiagram) -> bool:
    return validate_n4(nd) is None


def _sorted_with_sign(a: int, b: int, c: int) -> tuple[int, tuple[int, int, int]]:
    """Sign of the permutation sorting ``(a, b, c)``, and the sorted triple."""
    sign = 1
    x = [a, b, c]
    for p in range(2):
        for q in range(2 - p):
            if x[q] > x[q + 1]:
                x[q], x[q + 1] = x[q + 1], x[q]
                sign = -sign
    return sign, (x[0], x[1], x[2])


JacobiKey = tuple[int, int, int, int]


def jacobi_terms(nd: NiceDiagram) -> dict[JacobiKey, dict[tuple[int, int], int]]:
    """Symbolic ``d^2 e^h`` with all ``c_I`` left as unknowns.

    Maps each key ``(i, j, k, h)`` (``i<j<k``) to the coefficient of
    ``e^{ijk} ⊗ e_h`` as ``{(I, J): integer}`` over pairs of positions in
    ``nd.bracket_indices`` with ``I < J``.  Zero coefficients are dropped.
    """
    by_target: dict[int, list[int]] = defaultdict(list)
    for pos, b in enumerate(nd.bracket_indices):
        by_target[b.k].append(pos)
    acc: dict[JacobiKey, dict[tuple[int, int], int]] = defaultdict(lambda: defaultdict(int))
    for jpos, outer in enumerate(nd.bracket_indices):
        # d(e^{lk}) = de^l ^ e^k - e^l ^ de^k
        for l, k, sign in ((outer.i, outer.j, 1), (outer.j, outer.i, -1)):
            for ipos in by_target.get(l, ()):
                inner = nd.bracket_indices[ipos]
                if k in (inner.i, inner.j):
                    continue
                if sign == 1:
                    perm_sign, key3 = _sorted_with_sign(inner.i, inner.j, k)
                else:
                    perm_sign, key3 = _sorted_with_sign(k, inner.i, inner.j)
                pair = (min(ipos, jpos), max(ipos, jpos))
                acc[(*key3, outer.k)][pair] += sign * perm_sign
    out: dict[JacobiKey, dict[tuple[int, int], int]] = {}
    for key in sorted(acc):
        terms = {p: c for p, c in sorted(acc[key].items()) if c}
        if terms:
            out[key] = terms
    return out


@dataclass(frozen=True)
class StructureVector:
    """An element ``c = sum c_I E_I`` of ``V_Δ``."""

    diagram: NiceDiagram
    coefficients: Mapping[BracketIndex, Poly]

    def __post_init__(self) -> None:
        if set(self.coefficients) != set(self.diagram.bracket_indices):
            raise StructureError("coefficients must be given exactly on the bracket indices")

    def __hash__(self) -> int:
        return hash((self.diagram, frozenset(self.coefficients.items())))

    @classmethod
    def symbolic(cls, nd: NiceDiagram, fixed: Mapping[BracketIndex, object] | None = None
                 ) -> StructureVector:
        """Unknowns ``c[i,j,k]`` everywhere except at the given fixed entries."""
        fixed = dict(fixed or {})
        coeffs = {}
        for b in nd.bracket_indices:
            if b in fixed:
                v = fixed[b]
                coeffs[b] = v if isinstance(v, Poly) else Poly.const(v)  # type: ignore[arg-type]
            else:
                coeffs[b] = Poly.var(coefficient_symbol(b))
        return cls(nd, coeffs)

    def as_list(self) -> list[Poly]:
        return [self.coefficients[b] for b in self.diagram.bracket_indices]


def coefficient_symbol(b: BracketIndex) -> str:
    return f"c[{b.i},{b.j},{b.k}]"


@dataclass(frozen=True)
class JacobiSystem:
    """Nonzero coefficients of ``e^{ijk} ⊗ e_h`` in ``d^2``, keyed by ``(i,j,k,h)``."""

    equations: tuple[tuple[JacobiKey, Poly], ...]

    def __bool__(self) -> bool:
        return bool(self.equations)

    def __len__(self) -> int:
        return len(self.equations)

    def as_dict(self) -> dict[JacobiKey, Poly]:
        return dict(self.equations)


def jacobi_system(c: StructureVector) -> JacobiSystem:
    coeffs = c.as_list()
    eqs = []
    for key, terms in jacobi_terms(c.diagram).items():
        total = Poly()
        for (a, b), m in terms.items():
            total = total + coeffs[a] * coeffs[b] * m
        if not total.is_zero():
            eqs.append((key, total))
    return JacobiSystem(tuple(eqs))
