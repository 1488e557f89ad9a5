"""Hashing, canonical forms, automorphisms and isomorphisms.

Structures are sets of integer tuples over nodes ``1..n`` (arrows ``(s, t)``
for diagrams, labeled arrows ``(s, label, t)`` for labeled diagrams).  Node
colors start from an isomorphism-invariant hash and are refined until stable;
canonical forms are the least relabeled tuple list over the leaves of an
individualization-refinement search.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterator, Optional, Sequence

from nicelie.core import Diagram, NiceDiagram, node_depths

Tuples = frozenset[tuple[int, ...]]
Perm = tuple[int, ...]  # perm[v] = image of node v; index 0 unused

_MASK64 = (1 << 64) - 1
_HASH_BASE = 0x100000001B3
_HASH_SEED = 0xCBF29CE484222325


def path_counts(d: Diagram) -> tuple[list[list[int]], list[list[int]]]:
    """Counts of concatenated arrows of each length ending / beginning at each node.

    ``ins[v][k-1]`` is the number of paths ``v_1 -> ... -> v_{k+1} = v`` with
    ``k`` arrows; ``outs`` likewise for paths starting at ``v``.  Lists run up
    to length ``n - 1``, the longest possible path.
    """
    n = d.n
    preds: dict[int, list[int]] = defaultdict(list)
    succs: dict[int, list[int]] = defaultdict(list)
    for s, t in d.arrows:
        preds[t].append(s)
        succs[s].append(t)
    ins = [[0] * max(n - 1, 0) for _ in range(n + 1)]
    outs = [[0] * max(n - 1, 0) for _ in range(n + 1)]
    prev_in = [1] * (n + 1)
    prev_out = [1] * (n + 1)
    for k in range(n - 1):
        cur_in = [0] * (n + 1)
        cur_out = [0] * (n + 1)
        for v in range(1, n + 1):
            cur_in[v] = sum(prev_in[u] for u in preds[v])
            cur_out[v] = sum(prev_out[w] for w in succs[v])
            ins[v][k] = cur_in[v]
            outs[v][k] = cur_out[v]
        prev_in, prev_out = cur_in, cur_out
    return ins, outs


def _roll(values: Sequence[int], h: int = _HASH_SEED) -> int:
    for x in values:
        h = ((h ^ (x & _MASK64)) * _HASH_BASE) & _MASK64
    return h


def node_hashes(d: Diagram) -> dict[int, int]:
    """64-bit hash ``#(e)`` of each node from its path counts."""
    ins, outs = path_counts(d)
    return {v: _roll(ins[v] + [0xFFFF] + outs[v]) for v in range(1, d.n + 1)}


def diagram_hash(d: Diagram) -> int:
    """``#(Δ)``: sum of the node hashes modulo 2^64."""
    return sum(node_hashes(d).values()) & _MASK64


# --- refinement --------------------------------------------------------------

def _incidence(n: int, tuples: Tuples) -> list[list[tuple[int, tuple[int, ...]]]]:
    inc: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(n + 1)]
    for tup in tuples:
        for pos, v in enumerate(tup):
            inc[v].append((pos, tup))
    return inc


def _rank(signatures: dict[int, object]) -> dict[int, int]:
    distinct = sorted(set(signatures.values()))  # type: ignore[type-var]
    index = {s: r for r, s in enumerate(distinct)}
    return {v: index[s] for v, s in signatures.items()}


def refine(n: int, tuples: Tuples, colors: dict[int, int],
           inc: Optional[list] = None) -> dict[int, int]:
    """Equitable refinement of ``colors`` (node -> rank) by tuple incidences."""
    if inc is None:
        inc = _incidence(n, tuples)
    colors = _rank(dict(colors))
    ncolors = len(set(colors.values()))
    while True:
        sigs = {}
        for v in range(1, n + 1):
            local = sorted((pos, tuple(colors[u] for u in tup)) for pos, tup in inc[v])
            sigs[v] = (colors[v], tuple(local))
        new = _rank(sigs)
        k = len(set(new.values()))
        if k == ncolors:
            return new
        colors, ncolors = new, k


def diagram_colors(d: Diagram) -> dict[int, int]:
    """Isomorphism-invariant initial colors: (depth, path hash)."""
    depth = node_depths(d)
    hashes = node_hashes(d)
    return _rank({v: (depth[v], hashes[v]) for v in range(1, d.n + 1)})


def diagram_tuples(d: Diagram) -> Tuples:
    return frozenset(d.arrows)


def labeled_tuples(nd: NiceDiagram) -> Tuples:
    out = set()
    for b in nd.bracket_indices:
        out.add((b.i, b.j, b.k))
        out.add((b.j, b.i, b.k))
    return frozenset(out)


def _apply(perm: Perm, tuples: Tuples) -> Tuples:
    return frozenset(tuple(perm[x] for x in tup) for tup in tuples)


def _is_transposition_automorphism(tuples: Tuples, u: int, v: int) -> bool:
    def swap(x: int) -> int:
        return v if x == u else u if x == v else x
    for tup in tuples:
        if u in tup or v in tup:
            if tuple(swap(x) for x in tup) not in tuples:
                return False
    return True


def canonical_form(n: int, tuples: Tuples, colors: dict[int, int]
                   ) -> tuple[tuple[tuple[int, ...], ...], Perm]:
    """Least relabeled sorted tuple list, and a permutation achieving it.

    Node order in the result respects the order of the initial colors.
    """
    inc = _incidence(n, tuples)
    best: list = [None, None]

    def leaf(cols: dict[int, int]) -> None:
        perm = [0] * (n + 1)
        for v, c in cols.items():
            perm[v] = c + 1
        key = tuple(sorted(tuple(perm[x] for x in tup) for tup in tuples))
        if best[0] is None or key < best[0]:
            best[0], best[1] = key, tuple(perm)

    def search(cols: dict[int, int]) -> None:
        cols = refine(n, tuples, cols, inc)
        cells: dict[int, list[int]] = defaultdict(list)
        for v, c in cols.items():
            cells[c].append(v)
        target = next((c for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            leaf(cols)
            return
        tried: list[int] = []
        for v in sorted(cells[target]):
            if any(_is_transposition_automorphism(tuples, u, v) for u in tried):
                continue
            tried.append(v)
            sub = {w: (c, 1 if c == target and w != v else 0) for w, c in cols.items()}
            search(sub)  # type: ignore[arg-type]

    search(dict(colors))
    return best[0], best[1]  # type: ignore[return-value]


# --- automorphisms and isomorphisms -------------------------------------------

def isomorphisms(n: int, tuples_a: Tuples, colors_a: dict[int, int],
                 tuples_b: Tuples, colors_b: dict[int, int],
                 fixed: Sequence[int] = ()) -> Iterator[Perm]:
    """All bijections ``f`` with ``f(tuples_a) = tuples_b`` preserving refined colors.

    Nodes listed in ``fixed`` are mapped to themselves.
    """
    if len(tuples_a) != len(tuples_b):
        return
    ca = refine(n, tuples_a, colors_a)
    cb = refine(n, tuples_b, colors_b)
    if sorted(ca.values()) != sorted(cb.values()):
        return
    inc_a = _incidence(n, tuples_a)
    by_color_b: dict[int, list[int]] = defaultdict(list)
    for v, c in cb.items():
        by_color_b[c].append(v)
    # Visit nodes in small classes first, then by incidence count.
    class_size = defaultdict(int)
    for c in ca.values():
        class_size[c] += 1
    order = sorted(range(1, n + 1), key=lambda v: (class_size[ca[v]], -len(inc_a[v]), v))
    fixed_set = set(fixed)
    perm = [0] * (n + 1)
    used = [False] * (n + 1)
    mapped = [False] * (n + 1)

    def consistent(v: int) -> bool:
        for _, tup in inc_a[v]:
            if all(mapped[x] for x in tup):
                if tuple(perm[x] for x in tup) not in tuples_b:
                    return False
        return True

    def rec(pos: int) -> Iterator[Perm]:
        if pos == n:
            yield tuple(perm)
            return
        v = order[pos]
        candidates = [v] if v in fixed_set else by_color_b[ca[v]]
        for w in candidates:
            if used[w] or cb[w] != ca[v]:
                continue
            perm[v] = w
            used[w] = mapped[v] = True
            if consistent(v):
                yield from rec(pos + 1)
            used[w] = mapped[v] = False
            perm[v] = 0

    yield from rec(0)


def automorphisms(n: int, tuples: Tuples, colors: dict[int, int],
                  fixed: Sequence[int] = ()) -> list[Perm]:
    return list(isomorphisms(n, tuples, colors, tuples, colors, fixed))


def compose(p: Perm, q: Perm) -> Perm:
    """``p ∘ q`` (apply ``q`` first)."""
    return (0,) + tuple(p[q[v]] for v in range(1, len(q)))


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for v in range(1, len(p)):
        out[p[v]] = v
    return tuple(out)


def identity(n: int) -> Perm:
    return tuple(range(n + 1))


def apply_perm(perm: Perm, tuples: Tuples) -> Tuples:
    return _apply(perm, tuples)
