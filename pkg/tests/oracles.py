"""Independent brute-force implementations used as test oracles."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from nicelie.core import Diagram


# --- exterior algebra -------------------------------------------------------------

Form = dict[tuple[int, ...], Fraction]


def _wedge(a: Form, b: Form) -> Form:
    out: Form = {}
    for ia, ca in a.items():
        for ib, cb in b.items():
            if set(ia) & set(ib):
                continue
            seq = list(ia + ib)
            sign = 1
            # bubble sort to count inversions
            for x in range(len(seq)):
                for y in range(len(seq) - 1 - x):
                    if seq[y] > seq[y + 1]:
                        seq[y], seq[y + 1] = seq[y + 1], seq[y]
                        sign = -sign
            key = tuple(seq)
            out[key] = out.get(key, Fraction(0)) + sign * ca * cb
    return {k: v for k, v in out.items() if v}


def d_squared(n: int, de: Sequence[Form]) -> list[Form]:
    """``d(de^h)`` for each h via the graded Leibniz rule on 2-forms."""
    out = []
    for h in range(n):
        total: Form = {}
        for idx, c in de[h].items():
            i, j = idx
            # d(e^i ∧ e^j) = de^i ∧ e^j - e^i ∧ de^j
            for piece, sign in ((_wedge(de[i - 1], {(j,): Fraction(1)}), 1),
                                (_wedge({(i,): Fraction(1)}, de[j - 1]), -1)):
                for k, v in piece.items():
                    total[k] = total.get(k, Fraction(0)) + sign * c * v
        out.append({k: v for k, v in total.items() if v})
    return out


def forms_from_triples(n: int, values: dict[tuple[int, int, int], Fraction]) -> list[Form]:
    de: list[Form] = [{} for _ in range(n)]
    for (i, j, k), v in values.items():
        de[k - 1][(i, j)] = Fraction(v)
    return de


# --- diagrams ---------------------------------------------------------------------

def all_isomorphic(a: Diagram, b: Diagram) -> bool:
    if a.n != b.n or len(a.arrows) != len(b.arrows):
        return False
    for p in itertools.permutations(range(1, a.n + 1)):
        perm = (0,) + p
        if {(perm[s], perm[t]) for s, t in a.arrows} == b.arrows:
            return True
    return False


def brute_classes(diagrams: Iterable[Diagram]) -> list[Diagram]:
    reps: list[Diagram] = []
    for d in diagrams:
        if not any(all_isomorphic(d, r) for r in reps):
            reps.append(d)
    return reps


def brute_labelings(d: Diagram) -> set[frozenset[tuple[int, int, int]]]:
    """All complete labelings satisfying N1-N3, by trying every pairing.

    Incoming arrows at each node are split into pairs ``{i, j}`` (the arrow
    from i is labeled j and vice versa); then N1 (distinct labels per
    source) is checked globally.
    """
    incoming: dict[int, list[int]] = {}
    for s, t in d.arrows:
        incoming.setdefault(t, []).append(s)

    def pairings(items: list[int]) -> Iterable[list[tuple[int, int]]]:
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for idx, other in enumerate(rest):
            for tail in pairings(rest[:idx] + rest[idx + 1:]):
                yield [(first, other)] + tail

    targets = sorted(incoming)
    options = [list(pairings(sorted(incoming[t]))) for t in targets]
    out = set()
    for choice in itertools.product(*options):
        triples = []
        for t, pairs in zip(targets, choice):
            for a, b in pairs:
                triples.append((min(a, b), max(a, b), t))
        labels_out: dict[int, list[int]] = {}
        pair_seen = set()
        ok = True
        for i, j, k in triples:
            if (i, j) in pair_seen:
                ok = False
            pair_seen.add((i, j))
            labels_out.setdefault(i, []).append(j)
            labels_out.setdefault(j, []).append(i)
        if ok and all(len(v) == len(set(v)) for v in labels_out.values()):
            out.add(frozenset(triples))
    return out


def random_diagram(rng, n: int, p: float = 0.4) -> Diagram:
    arrows = {(s, t) for s in range(1, n + 1) for t in range(s + 1, n + 1) if rng.random() < p}
    return Diagram(n, frozenset(arrows))


def permute_diagram(d: Diagram, perm: Sequence[int]) -> Diagram:
    return Diagram(d.n, frozenset((perm[s], perm[t]) for s, t in d.arrows))


# --- linear algebra ---------------------------------------------------------------

def bareiss_rank(m: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination over the integers."""
    a = [list(map(int, row)) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    rank = 0
    prev = 1
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r][c]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        for r in range(rank + 1, rows):
            for cc in range(c + 1, cols):
                a[r][cc] = (a[r][cc] * a[rank][c] - a[rank][cc] * a[r][c]) // prev
            a[r][c] = 0
        prev = a[rank][c]
        rank += 1
    return rank


def naive_gf2_rank(m: Sequence[Sequence[int]]) -> int:
    a = [[x % 2 for x in row] for row in m]
    rank = 0
    cols = len(a[0]) if a else 0
    for c in range(cols):
        pivot = next((r for r in range(rank, len(a)) if a[r][c]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        for r in range(len(a)):
            if r != rank and a[r][c]:
                a[r] = [(x + y) % 2 for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def lp_vertex_feasible(ineqs: Sequence[tuple[Sequence[Fraction], Fraction, bool]],
                       nvars: int, box: int = 10 ** 6) -> bool:
    """Decide strict/non-strict feasibility by enumerating LP vertices.

    Maximizes t subject to ``a·x + b >= t`` (strict rows), ``a·x + b >= 0``
    (non-strict rows), ``t <= 1`` and ``|x_i| <= box``; the system is
    feasible iff the optimum is positive.  Solved exactly by trying every
    basis of ``nvars + 1`` tight constraints.  Only valid when feasible
    systems have solutions inside the box, which holds for the small
    integer systems generated by the tests.
    """
    rows: list[tuple[list[Fraction], Fraction]] = []  # c·(x,t) <= d
    for a, b, strict in ineqs:
        # -a·x + t <= b  (strict) or -a·x <= b
        rows.append(([-Fraction(x) for x in a] + [Fraction(1 if strict else 0)], Fraction(b)))
    rows.append(([Fraction(0)] * nvars + [Fraction(1)], Fraction(1)))
    for i in range(nvars):
        e = [Fraction(0)] * (nvars + 1)
        e[i] = Fraction(1)
        rows.append((e, Fraction(box)))
        rows.append(([-x for x in e], Fraction(box)))
    e = [Fraction(0)] * (nvars + 1)
    e[nvars] = Fraction(-1)
    rows.append((e, Fraction(box)))  # t >= -box
    dim = nvars + 1
    best: Optional[Fraction] = None
    for combo in itertools.combinations(range(len(rows)), dim):
        mat = [list(rows[r][0]) + [rows[r][1]] for r in combo]
        sol = _solve_square(mat, dim)
        if sol is None:
            continue
        if all(sum(c * s for c, s in zip(row, sol)) <= d for row, d in rows):
            if best is None or sol[-1] > best:
                best = sol[-1]
    # the box makes the polytope bounded, so no vertex means it is empty
    return best is not None and best > 0


def _solve_square(aug: list[list[Fraction]], dim: int) -> Optional[list[Fraction]]:
    a = [row[:] for row in aug]
    for c in range(dim):
        pivot = next((r for r in range(c, dim) if a[r][c]), None)
        if pivot is None:
            return None
        a[c], a[pivot] = a[pivot], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(dim):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[r][dim] for r in range(dim)]


def brute_canonical(d: Diagram) -> tuple[tuple[int, int], ...]:
    """Least sorted arrow list over all n! relabelings."""
    best = None
    for p in itertools.permutations(range(1, d.n + 1)):
        perm = (0,) + p
        key = tuple(sorted((perm[s], perm[t]) for s, t in d.arrows))
        if best is None or key < best:
            best = key
    return best if best is not None else ()


def all_dags(n: int) -> Iterable[Diagram]:
    """Every diagram on 1..n whose arrows go from lower to higher index."""
    slots = [(s, t) for s in range(1, n + 1) for t in range(s + 1, n + 1)]
    for mask in range(1 << len(slots)):
        yield Diagram(n, frozenset(a for b, a in enumerate(slots) if mask >> b & 1))


def brute_automorphisms(n: int, tuples: frozenset) -> set[tuple[int, ...]]:
    out = set()
    for p in itertools.permutations(range(1, n + 1)):
        perm = (0,) + p
        if frozenset(tuple(perm[x] for x in t) for t in tuples) == tuples:
            out.add(perm)
    return out


# --- equivalence --------------------------------------------------------------------

def _prime_exponents(q: Fraction) -> dict[int, int]:
    out: dict[int, int] = {}
    for value, sign in ((q.numerator, 1), (q.denominator, -1)):
        value = abs(value)
        p = 2
        while value > 1:
            while value % p == 0:
                out[p] = out.get(p, 0) + sign
                value //= p
            p += 1
    return out


def brute_equivalent(n: int, triples_a: Sequence[tuple[int, int, int]], ca: Sequence[Fraction],
                     triples_b: Sequence[tuple[int, int, int]], cb: Sequence[Fraction]) -> bool:
    """Equivalence by exhaustive search over relabelings and signs.

    Magnitudes: a positive diagonal rescaling exists iff, for every prime,
    the vector of its exponents in the ratios lies in the column space of
    the root matrix (logarithms of primes are rationally independent).
    """
    target = {(i, j, k): c for (i, j, k), c in zip(triples_b, cb)}
    if len(target) != len(triples_a):
        return False
    rows_b = list(target)
    m = [[(1 if t == k else -1 if t in (i, j) else 0) for t in range(1, n + 1)]
         for i, j, k in rows_b]
    base_rank = bareiss_rank(m) if m else 0
    for p in itertools.permutations(range(1, n + 1)):
        perm = (0,) + p
        moved = {}
        for (i, j, k), c in zip(triples_a, ca):
            a, b = perm[i], perm[j]
            moved[(min(a, b), max(a, b), perm[k])] = c if a < b else -c
        if set(moved) != set(target):
            continue
        ratios = [target[t] / moved[t] for t in rows_b]
        signs_ok = False
        for x in itertools.product((0, 1), repeat=n):
            if all((r < 0) == bool((x[i - 1] + x[j - 1] + x[k - 1]) % 2)
                   for r, (i, j, k) in zip(ratios, rows_b)):
                signs_ok = True
                break
        if not signs_ok:
            continue
        exps = [_prime_exponents(abs(r)) for r in ratios]
        primes = sorted({q for e in exps for q in e})
        if all(bareiss_rank([row + [e.get(q, 0)] for row, e in zip(m, exps)]) == base_rank
               for q in primes):
            return True
    return False
