"""Enumeration of nice diagrams with ``n`` nodes up to equivalence.

Diagrams of type ``(a_1, ..., a_s)`` are grown from the arrowless diagram of
type ``(a_s)`` by repeatedly prepending a layer of ``a_i`` source nodes, each
pointing at a subset of the previous nodes.  Nodes are numbered so that the
newest layer gets the smallest indices; arrows then always go from smaller to
larger indices, matching structure equations where ``de^k`` only involves
``e^1 .. e^{k-1}``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from nicelie.core import (BracketIndex, Diagram, LabeledDiagram, NiceDiagram,
                          TypeVector, brackets_of, lcs_type, node_depths, validate_n4)
from nicelie.notation import lcs_string
from nicelie.symmetry import (Perm, automorphisms, canonical_form, diagram_colors,
                              diagram_hash, diagram_tuples, isomorphisms, node_hashes)

__all__ = [
    "compositions", "extend_by_layer", "enumerate_diagrams", "enumerate_labelings",
    "dedupe_labeled", "enumerate_nice_diagrams", "DiagramEntry", "node_hashes",
    "diagram_hash", "are_isomorphic", "canonical_diagram", "stage_counts",
    "literal_rule_reachable", "nice_diagrams_on", "lcs_string",
]


def compositions(n: int) -> list[TypeVector]:
    """Ordered compositions of ``n`` usable as diagram types, ascending."""
    if n <= 0:
        raise ValueError("n must be positive")
    out: list[TypeVector] = []

    def rec(rest: int, prefix: list[int]) -> None:
        if rest == 0:
            out.append(tuple(prefix))
            return
        for a in range(1, rest + 1):
            rec(rest - a, prefix + [a])

    rec(n, [])
    return sorted(t for t in out if len(t) == 1 or t[0] >= 2)


def _in_parity_mask(base: Diagram) -> int:
    mask = 0
    for _, t in base.arrows:
        mask ^= 1 << (t - 1)
    return mask


def _source_mask(d: Diagram) -> int:
    mask = (1 << d.n) - 1
    for _, t in d.arrows:
        mask &= ~(1 << (t - 1))
    return mask


def _subset_tuples(m: int, a1: int, cover: int, parity: Optional[int]
                   ) -> Iterator[tuple[int, ...]]:
    """Nondecreasing tuples of subset masks of ``{1..m}`` whose union contains ``cover``.

    With ``parity`` set, the XOR of the masks must equal it, so that every old
    node ends with an even number of incoming arrows.
    """
    if parity is None:
        for combo in itertools.combinations_with_replacement(range(1 << m), a1):
            u = 0
            for c in combo:
                u |= c
            if u & cover == cover:
                yield combo
        return
    for head in itertools.combinations_with_replacement(range(1 << m), a1 - 1):
        x = parity
        u = 0
        for c in head:
            x ^= c
            u |= c
        if head and x < head[-1]:
            continue
        if (u | x) & cover == cover:
            yield head + (x,)


def _extend(base: Diagram, subsets: Sequence[int]) -> Diagram:
    a1 = len(subsets)
    arrows = {(s + a1, t + a1) for s, t in base.arrows}
    for i, mask in enumerate(subsets, start=1):
        j = 1
        while mask:
            if mask & 1:
                arrows.add((i, j + a1))
            mask >>= 1
            j += 1
    return Diagram(base.n + a1, frozenset(arrows))


def extend_by_layer(base: Diagram, a1: int, parity: bool = False,
                    literal: bool = False) -> list[Diagram]:
    """All diagrams obtained by prepending ``a1`` source nodes to ``base``.

    Subsets are ordered by their binary encoding and taken in nondecreasing
    order.  Their union must contain every source of ``base``, which is
    exactly what keeps the type equal to ``(a1,) + type(base)``; with
    ``literal`` it must be every node of ``base`` instead.  With ``parity``
    only extensions where every node has even in-degree are produced.
    """
    if base.n == 0:
        raise ValueError("base diagram must have at least one node")
    cover = (1 << base.n) - 1 if literal else _source_mask(base)
    target = _in_parity_mask(base) if parity else None
    return [_extend(base, combo) for combo in _subset_tuples(base.n, a1, cover, target)]


def literal_rule_reachable(d: Diagram) -> bool:
    """Whether ``d`` is reachable when every layer must hit all deeper nodes.

    Diagrams failing this are produced by :func:`extend_by_layer` but not by
    the stricter covering rule; see :func:`enumerate_diagrams`.
    """
    depth = node_depths(d)
    s = max(depth.values(), default=0)
    targets: dict[int, set[int]] = {v: set() for v in range(1, d.n + 1)}
    for src, t in d.arrows:
        targets[src].add(t)
    for level in range(s):
        hit: set[int] = set()
        for v, dv in depth.items():
            if dv == level:
                hit |= targets[v]
        if hit != {v for v, dv in depth.items() if dv > level}:
            return False
    return True


def canonical_diagram(d: Diagram) -> Diagram:
    """The least isomorph (by sorted arrow list) with layers in order."""
    key, _ = canonical_form(d.n, diagram_tuples(d), diagram_colors(d))
    return Diagram(d.n, frozenset(key))  # type: ignore[arg-type]


def _diagram_key(d: Diagram) -> tuple:
    return tuple(sorted(d.arrows))


def are_isomorphic(a: Diagram, b: Diagram) -> bool:
    """Hash-bucket test followed by a search over hash-preserving bijections."""
    if a.n != b.n or len(a.arrows) != len(b.arrows):
        return False
    if diagram_hash(a) != diagram_hash(b):
        return False
    return next(isomorphisms(a.n, diagram_tuples(a), diagram_colors(a),
                             diagram_tuples(b), diagram_colors(b)), None) is not None


def dedupe_diagrams(diagrams: Iterable[Diagram]) -> list[Diagram]:
    """Canonical representatives of the isomorphism classes, sorted."""
    seen: dict[tuple, Diagram] = {}
    for d in diagrams:
        c = canonical_diagram(d)
        seen.setdefault(_diagram_key(c), c)
    return [seen[k] for k in sorted(seen)]


def stage_counts(t: TypeVector, literal: bool = False) -> list[tuple[TypeVector, int, int]]:
    """For each construction stage: (type reached, diagrams produced, classes).

    The last stage applies the even in-degree filter; earlier stages do not.
    """
    out = []
    stage = [Diagram(t[-1], frozenset())]
    for pos in reversed(range(len(t) - 1)):
        grown: list[Diagram] = []
        for base in stage:
            grown.extend(extend_by_layer(base, t[pos], parity=pos == 0, literal=literal))
        stage = dedupe_diagrams(grown)
        out.append((tuple(t[pos:]), len(grown), len(stage)))
    return out


def _diagrams_of_type(t: TypeVector) -> list[Diagram]:
    stage = [Diagram(t[-1], frozenset())]
    for pos in reversed(range(len(t) - 1)):
        grown: list[Diagram] = []
        for base in stage:
            grown.extend(extend_by_layer(base, t[pos], parity=pos == 0))
        stage = dedupe_diagrams(grown)
    return stage


def _map(func, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * jobs))))


def enumerate_diagrams(n: int, types: Optional[Sequence[TypeVector]] = None,
                       jobs: int = 1) -> list[Diagram]:
    """Parity-valid diagrams with ``n`` nodes, one per isomorphism class.

    Sorted by type, then by canonical arrow list.
    """
    if n < 1:
        raise ValueError("n must be positive")
    types = compositions(n) if types is None else [tuple(t) for t in types]
    for t in types:
        if sum(t) != n:
            raise ValueError(f"type {t} does not sum to {n}")
    per_type = _map(_diagrams_of_type, list(types), jobs)
    return [d for ds in per_type for d in ds]


# --- labelings ------------------------------------------------------------------

def _labelings(d: Diagram) -> list[frozenset[BracketIndex]]:
    incoming: dict[int, set[int]] = {v: set() for v in range(1, d.n + 1)}
    for s, t in d.arrows:
        incoming[t].add(s)
    out_labels: dict[int, set[int]] = {v: set() for v in range(1, d.n + 1)}
    brackets: list[BracketIndex] = []
    results: list[frozenset[BracketIndex]] = []

    def rec() -> None:
        open_nodes = [(len(vs), j) for j, vs in incoming.items() if vs]
        if not open_nodes:
            results.append(frozenset(brackets))
            return
        _, j = min(open_nodes)
        vj = incoming[j]
        i = min(vj)
        w_set = sorted(v for v in vj
                       if v != i and i not in out_labels[v] and v not in out_labels[i])
        for w in w_set:
            vj.discard(i)
            vj.discard(w)
            out_labels[w].add(i)
            out_labels[i].add(w)
            brackets.append(BracketIndex.make(i, w, j))
            rec()
            brackets.pop()
            out_labels[i].discard(w)
            out_labels[w].discard(i)
            vj.add(i)
            vj.add(w)

    rec()
    return results


def enumerate_labelings(d: Diagram) -> list[LabeledDiagram]:
    """All complete labelings satisfying N1-N3, by pairing incoming arrows."""
    out = []
    for bs in _labelings(d):
        labels = {}
        for b in bs:
            labels[(b.i, b.k)] = b.j
            labels[(b.j, b.k)] = b.i
        out.append(LabeledDiagram(d, labels))
    return out


def _isolated(d: Diagram) -> list[int]:
    touched = {v for a in d.arrows for v in a}
    return [v for v in range(1, d.n + 1) if v not in touched]


def _bracket_key(bs: Iterable[BracketIndex]) -> tuple[tuple[int, int, int], ...]:
    return tuple(sorted((b.k, b.i, b.j) for b in bs))


def _image(perm: Perm, bs: Iterable[BracketIndex]) -> list[BracketIndex]:
    return [BracketIndex.make(perm[b.i], perm[b.j], perm[b.k]) for b in bs]


def diagram_automorphisms(d: Diagram) -> list[Perm]:
    """Automorphisms of the unlabeled diagram; isolated nodes are kept fixed."""
    return automorphisms(d.n, diagram_tuples(d), diagram_colors(d), fixed=_isolated(d))


def dedupe_labeled(labelings: Sequence[LabeledDiagram],
                   group: Optional[Sequence[Perm]] = None) -> list[NiceDiagram]:
    """One nice diagram per equivalence class of labelings of a common diagram.

    Two labelings of the same diagram are equivalent exactly when an
    automorphism of the unlabeled diagram carries one onto the other; each
    class is represented by its least image.  Classes violating N4 are dropped.
    """
    if not labelings:
        return []
    d = labelings[0].diagram
    if any(ld.diagram != d for ld in labelings):
        raise ValueError("labelings must share the same underlying diagram")
    return _dedupe_bracket_sets(d, [brackets_of(ld) for ld in labelings], group)


def _dedupe_bracket_sets(d: Diagram, sets: Sequence[Sequence[BracketIndex]],
                         group: Optional[Sequence[Perm]] = None) -> list[NiceDiagram]:
    if group is None:
        group = diagram_automorphisms(d)
    reps: dict[tuple, NiceDiagram] = {}
    for bs in sets:
        key = min(_bracket_key(_image(g, bs)) for g in group)
        if key in reps:
            continue
        nd = NiceDiagram(d.n, tuple(BracketIndex(i, j, k) for k, i, j in key))
        reps[key] = nd
    return [reps[k] for k in sorted(reps) if validate_n4(reps[k]) is None]


def nice_diagrams_on(d: Diagram) -> list[NiceDiagram]:
    """All inequivalent nice diagrams whose underlying diagram is ``d``."""
    sets = _labelings(d)
    if not sets:
        return []
    return _dedupe_bracket_sets(d, [sorted(s, key=BracketIndex.sort_key) for s in sets])


@dataclass(frozen=True)
class DiagramEntry:
    """A nice diagram with its type and progressive number within the type."""

    type: TypeVector
    number: int
    nice: NiceDiagram

    @property
    def lcs(self) -> str:
        return lcs_string(self.type)


def enumerate_nice_diagrams(n: int, types: Optional[Sequence[TypeVector]] = None,
                            jobs: int = 1) -> list[DiagramEntry]:
    """Every nice diagram with ``n`` nodes up to equivalence, numbered per type."""
    diagrams = enumerate_diagrams(n, types, jobs)
    per_diagram = _map(nice_diagrams_on, diagrams, jobs)
    out: list[DiagramEntry] = []
    counters: dict[TypeVector, int] = {}
    for d, nds in zip(diagrams, per_diagram):
        t = lcs_type(d)
        for nd in nds:
            counters[t] = counters.get(t, 0) + 1
            out.append(DiagramEntry(t, counters[t], nd))
    return out
