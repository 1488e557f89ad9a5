"""Nice Lie algebras on a fixed nice diagram, up to equivalence.

For a nice diagram the structure constants ``c_I`` live in ``V_Δ``; diagonal
rescalings act on them through the root matrix, and ``Aut(Δ)`` permutes them.
The classification runs in four steps:

A. normalize ``c_I = 1`` on a GF(2)-independent set of rows and ``c_I = ±1``
   on a rational completion of it (the fundamental domain);
B. keep one sign component per ``Aut(Δ)``-orbit;
C. impose the Jacobi identity, solving the equations that become linear and
   deciding the remaining sign conditions by Fourier–Motzkin elimination;
D. merge families that differ only by the signs of their parameters.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Mapping, Optional, Sequence

from nicelie.core import (BracketIndex, NiceDiagram, StructureError, StructureVector,
                          coefficient_symbol, jacobi_system)
from nicelie.fourier_motzkin import Inequality, feasible, sample_point
from nicelie.linalg import (gf2_dependencies, gf2_rank, greedy_independent_rows, kernel_q,
                            left_kernel_integer, rank_q, root_matrix, solve_gf2)
from nicelie.poly import _UNSUBSCRIPTS, Poly, parameter_name
from nicelie.symmetry import (Perm, automorphisms as _automorphisms, compose,
                              diagram_colors, identity, isomorphisms, labeled_tuples)

__all__ = [
    "ClassificationAlarm", "FundamentalDomain", "SignComponent", "LieAlgebraFamily",
    "automorphisms", "fundamental_domain", "act_on_component", "component_orbits",
    "classify_diagram", "act_on_vector", "equivalent_vectors", "diagonal_derivations",
    "has_nonzero_trace_derivation", "match_parameters", "QUADRATIC_ALARM_MAX_DIM",
    "candidate_domains", "greedy_quadratics", "DOMAIN_SEARCH_LIMIT",
]

#: Surviving quadratic equations up to this dimension indicate a bug.
QUADRATIC_ALARM_MAX_DIM = 8


class ClassificationAlarm(RuntimeError):
    """An internal consistency check failed."""


# --- Step A: fundamental domain ---------------------------------------------------

@dataclass(frozen=True)
class FundamentalDomain:
    """Positions (in ``ℐ_Δ`` order) of the normalized coordinates.

    ``j2`` is a maximal GF(2)-independent set of rows, ``j`` a maximal
    rationally independent set containing it, and ``free`` the complement of
    ``j2``.  ``deps[p]`` expresses row ``p`` mod 2 as a sum of ``j2`` rows.
    """

    diagram: NiceDiagram
    j2: tuple[int, ...]
    j: tuple[int, ...]
    free: tuple[int, ...]
    deps: tuple[int, ...]

    @property
    def component_count(self) -> int:
        return 1 << len(self.free)

    def indices(self, positions: Sequence[int]) -> list[BracketIndex]:
        return [self.diagram.bracket_indices[p] for p in positions]

    def components(self) -> Iterator[SignComponent]:
        """All sign components, lexicographically (``+1`` before ``-1``)."""
        for bits in itertools.product((0, 1), repeat=len(self.free)):
            yield SignComponent(self.free, tuple(-1 if b else 1 for b in bits))


def fundamental_domain(nd: NiceDiagram, j2: Optional[Sequence[int]] = None,
                       j: Optional[Sequence[int]] = None) -> FundamentalDomain:
    """Normalized coordinates; by default the greedy choice in ``ℐ_Δ`` order.

    Explicit ``j2`` and ``j`` must be a maximal GF(2)-independent set of rows
    and a maximal rationally independent set containing it.
    """
    rm = root_matrix(nd)
    masks = list(rm.mod2.rows)
    if j2 is None:
        j2 = greedy_independent_rows(masks, "gf2")
    if j is None:
        j = greedy_independent_rows(rm.rows, "q", seed=j2)
    j2, j = tuple(sorted(j2)), tuple(sorted(j))
    if not set(j2) <= set(j):
        raise ClassificationAlarm("GF(2)-independent rows are not rationally independent")
    if len(j) != rank_q(rm.rows) or rank_q([rm.rows[p] for p in j]) != len(j):
        raise ClassificationAlarm("normalized rows are not a rational basis of the row space")
    dep = gf2_dependencies(masks, j2)
    if len(dep) != len(masks):
        raise ClassificationAlarm("GF(2) selection is not maximal")
    free = tuple(p for p in range(len(masks)) if p not in set(j2))
    return FundamentalDomain(nd, j2, j, free, tuple(dep[p] for p in range(len(masks))))


#: Upper bound on alternative fundamental domains tried per diagram.
DOMAIN_SEARCH_LIMIT = 20000


def candidate_domains(nd: NiceDiagram, limit: int = DOMAIN_SEARCH_LIMIT
                      ) -> Iterator[FundamentalDomain]:
    """The greedy domain, then every other valid choice of ``(j2, j)`` lexicographically."""
    greedy = fundamental_domain(nd)
    yield greedy
    rm = root_matrix(nd)
    masks = list(rm.mod2.rows)
    m = len(masks)
    r2, rq = len(greedy.j2), len(greedy.j)
    tried = 1
    for j2 in itertools.combinations(range(m), r2):
        if gf2_rank([masks[p] for p in j2]) < r2:
            continue
        rest = [p for p in range(m) if p not in j2]
        for extra in itertools.combinations(rest, rq - r2):
            j = tuple(sorted(j2 + extra))
            if (j2, j) == (greedy.j2, greedy.j):
                continue
            if rank_q([rm.rows[p] for p in j]) < rq:
                continue
            if tried >= limit:
                return
            tried += 1
            yield fundamental_domain(nd, j2, j)


@dataclass(frozen=True, order=True)
class SignComponent:
    """Signs ``ε_I`` of the coordinates outside ``j2`` (those on ``j2`` are +1)."""

    free: tuple[int, ...]
    signs: tuple[int, ...]

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(0 if s > 0 else 1 for s in self.signs)

    def sign_at(self, position: int) -> int:
        try:
            return self.signs[self.free.index(position)]
        except ValueError:
            return 1

    def representative(self, nd: NiceDiagram) -> list[int]:
        """``w_ε`` as a list of ±1 over all of ``ℐ_Δ``."""
        return [self.sign_at(p) for p in range(len(nd.bracket_indices))]

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs) or "()"


# --- Step B: automorphisms and their action ----------------------------------------

def _isolated(nd: NiceDiagram) -> list[int]:
    touched = {v for b in nd.bracket_indices for v in b}
    return [v for v in range(1, nd.n + 1) if v not in touched]


def automorphisms(nd: NiceDiagram, include_isolated: bool = True) -> list[Perm]:
    """Node permutations preserving arrows and labels.

    With ``include_isolated=False`` nodes outside every bracket stay fixed;
    they act trivially on ``V_Δ``.
    """
    fixed = () if include_isolated else _isolated(nd)
    return _automorphisms(nd.n, labeled_tuples(nd), diagram_colors(nd.diagram), fixed)


def _permuted_index(perm: Perm, b: BracketIndex) -> tuple[BracketIndex, int]:
    a, c = perm[b.i], perm[b.j]
    return BracketIndex.make(a, c, perm[b.k]), (1 if a < c else -1)


def act_on_vector(perm: Perm, nd_from: NiceDiagram, values: Sequence,
                  nd_to: Optional[NiceDiagram] = None) -> list:
    """Structure constants after renaming node ``v`` to ``perm[v]``.

    ``values`` is indexed like ``nd_from.bracket_indices``; the result is
    indexed like ``nd_to.bracket_indices`` (default: the same diagram).
    """
    nd_to = nd_from if nd_to is None else nd_to
    out: list = [None] * len(nd_to.bracket_indices)
    index = nd_to.index
    for b, v in zip(nd_from.bracket_indices, values):
        image, sign = _permuted_index(perm, b)
        pos = index.get(image)
        if pos is None:
            raise StructureError(f"{perm} does not map the diagram onto the target")
        out[pos] = v if sign > 0 else -v
    return out


def act_on_component(perm: Perm, eps: SignComponent, domain: FundamentalDomain
                     ) -> SignComponent:
    """``σ·ε``: permute ``w_ε``, then renormalize the ``j2`` signs with δ ∈ im M₂."""
    nd = domain.diagram
    moved = act_on_vector(perm, nd, eps.representative(nd))
    bits = [0 if s > 0 else 1 for s in moved]
    on_j2 = 0
    for p, pos in enumerate(domain.j2):
        if bits[pos]:
            on_j2 |= 1 << p
    out = []
    for pos in domain.free:
        delta = (on_j2 & domain.deps[pos]).bit_count() & 1
        out.append(-1 if bits[pos] ^ delta else 1)
    return SignComponent(domain.free, tuple(out))


def component_orbits(domain: FundamentalDomain, group: Sequence[Perm]
                     ) -> list[list[SignComponent]]:
    """Orbits of the sign components, each sorted, ordered by least element."""
    seen: set[SignComponent] = set()
    orbits = []
    for eps in domain.components():
        if eps in seen:
            continue
        orbit = sorted({act_on_component(g, eps, domain) for g in group})
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


# --- Step C: Jacobi reduction ------------------------------------------------------

def _linear_parts(eq: Poly, order: Mapping[str, int]) -> tuple[dict[int, Fraction], Fraction]:
    coeffs: dict[int, Fraction] = {}
    const = Fraction(0)
    for mono, c in eq.items():
        if not mono:
            const = c
        else:
            coeffs[order[mono[0][0]]] = c
    return coeffs, const


def _solve_linear(equations: Sequence[Poly], order: Mapping[str, int], names: Sequence[str]
                  ) -> Optional[dict[str, Poly]]:
    """Solve affine equations; pivots are the lowest-indexed unknowns.

    Returns the substitution ``{pivot: expression in later unknowns}`` or
    None if the system is inconsistent.
    """
    ncols = len(names)
    rows: list[list[Fraction]] = []
    for eq in equations:
        coeffs, const = _linear_parts(eq, order)
        row = [Fraction(0)] * (ncols + 1)
        for c, v in coeffs.items():
            row[c] = v
        row[ncols] = const
        rows.append(row)
    # Gauss-Jordan with positional pivots.
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[ncols] for row in rows[r:]):
        return None
    subst: dict[str, Poly] = {}
    for row, c in zip(rows, pivots):
        expr = Poly.const(-row[ncols])
        for c2 in range(c + 1, ncols):
            if row[c2]:
                expr = expr - Poly.var(names[c2]) * row[c2]
        subst[names[c]] = expr
    return subst


@dataclass(frozen=True)
class _Reduction:
    assignment: tuple[Poly, ...]
    residuals: tuple[Poly, ...]


def _reduce_jacobi(nd: NiceDiagram, fixed: Mapping[int, int]) -> Optional[_Reduction]:
    """Substitute ``fixed`` and solve linear Jacobi equations to a fixpoint.

    Returns None when the equations are inconsistent or force some
    ``c_I = 0``.
    """
    names = [coefficient_symbol(b) for b in nd.bracket_indices]
    order = {name: pos for pos, name in enumerate(names)}
    assignment = [Poly.const(fixed[p]) if p in fixed else Poly.var(names[p])
                  for p in range(len(names))]
    sv = StructureVector(nd, dict(zip(nd.bracket_indices, assignment)))
    equations = [eq for _, eq in jacobi_system(sv).equations]
    while True:
        linear = [eq for eq in equations if eq.degree() <= 1]
        if not linear:
            break
        subst = _solve_linear(linear, order, names)
        if subst is None:
            return None
        assignment = [a.subs(subst) for a in assignment]
        equations = [e for e in (eq.subs(subst) for eq in equations) if not e.is_zero()]
    if any(a.is_zero() for a in assignment):
        return None
    return _Reduction(tuple(assignment), tuple(equations))


def _rename_parameters(red: _Reduction) -> tuple[_Reduction, tuple[str, ...]]:
    mapping: dict[str, str] = {}
    for a in list(red.assignment) + list(red.residuals):
        for name in sorted(a.variables(), key=_symbol_position):
            if name not in mapping:
                mapping[name] = parameter_name(len(mapping) + 1)
    renamed = _Reduction(tuple(a.rename(mapping) for a in red.assignment),
                         tuple(r.rename(mapping) for r in red.residuals))
    return renamed, tuple(mapping.values())


def _symbol_position(name: str) -> tuple[int, ...]:
    """Sort key for unknowns ``c[i,j,k]`` (bracket order) and parameters ``λ, λ₂, ...``."""
    if name.startswith("c["):
        inner = name[name.index("[") + 1:name.index("]")]
        i, j, k = (int(x) for x in inner.split(","))
        return (0, k, i, j)
    digits = name[1:].translate(_UNSUBSCRIPTS)
    return (1, int(digits) if digits else 1)


def _sign_constraints(assignment: Sequence[Poly], eps: SignComponent,
                      params: Sequence[str]) -> Optional[list[Inequality]]:
    """``ε_I c_I > 0`` on the free coordinates, as inequalities in the parameters.

    Returns None if a constant coordinate already has the wrong sign.  Only
    affine coordinates are turned into inequalities; others are skipped.
    """
    out = []
    for pos, sign in zip(eps.free, eps.signs):
        expr = assignment[pos] * sign
        if expr.is_constant():
            if expr.constant_value() <= 0:
                return None
            continue
        if expr.degree() > 1:
            continue
        coeffs = [expr.coefficient(((p, 1),)) for p in params]
        out.append(Inequality(tuple(coeffs), expr.coefficient(()), True))
    return out


# --- families ------------------------------------------------------------------------

Region = tuple[Inequality, ...]


@dataclass(frozen=True)
class LieAlgebraFamily:
    """Nice Lie algebras on one diagram with structure constants ``assignment``.

    Parameter values range over the union of the strict polyhedral regions
    in ``parameter_domain`` (intersected with the zero set of
    ``residual_quadratics`` when present).  ``components`` lists every sign
    component merged into the family; the first one names it.
    """

    diagram: NiceDiagram
    component: SignComponent
    assignment: tuple[Poly, ...]
    parameters: tuple[str, ...]
    parameter_domain: tuple[Region, ...]
    residual_quadratics: tuple[Poly, ...] = ()
    components: tuple[SignComponent, ...] = ()
    name: str = ""
    type: tuple[int, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return self.diagram.n

    @cached_property
    def coefficients(self) -> dict[BracketIndex, Poly]:
        return dict(zip(self.diagram.bracket_indices, self.assignment))

    def structure_vector(self) -> StructureVector:
        return StructureVector(self.diagram, self.coefficients)

    def instantiate(self, values: Mapping[str, object]) -> list[Fraction]:
        vals = {k: Fraction(v) for k, v in values.items()}  # type: ignore[arg-type]
        missing = set(self.parameters) - set(vals)
        if missing:
            raise ValueError(f"missing parameter values: {sorted(missing)}")
        return [a.evaluate(vals) for a in self.assignment]

    def in_domain(self, values: Mapping[str, object]) -> bool:
        x = [Fraction(values[p]) for p in self.parameters]  # type: ignore[arg-type]
        if not any(all(i.holds(x) for i in region) for region in self.parameter_domain):
            return False
        vals = dict(zip(self.parameters, x))
        if any(r.evaluate(vals) for r in self.residual_quadratics):
            return False
        return all(a.evaluate(vals) != 0 for a in self.assignment)

    def sample(self, rng: Optional[random.Random] = None) -> Optional[dict[str, Fraction]]:
        """A parameter point in the domain with all coefficients nonzero.

        Returns None only for families with residual equations, where points
        of the polyhedral domain need not satisfy them.
        """
        rng = rng or random.Random(0)
        if not self.parameters:
            return {}
        for _ in range(200):
            region = rng.choice(self.parameter_domain)
            x = sample_point(region, len(self.parameters), rng)
            if x is None:
                continue
            vals = dict(zip(self.parameters, x))
            if self.in_domain(vals):
                return vals
        return None

    @property
    def has_residuals(self) -> bool:
        return bool(self.residual_quadratics)


def _signed(poly: Poly, flips: Mapping[str, int]) -> Poly:
    return poly.subs({p: Poly.var(p) * s for p, s in flips.items() if s < 0})


def _flip_region(region: Region, flips: Sequence[int]) -> Region:
    return tuple(Inequality(tuple(c * s for c, s in zip(i.coeffs, flips)), i.const, i.strict)
                 for i in region)


def _merge_sign_flips(families: list[LieAlgebraFamily]) -> list[LieAlgebraFamily]:
    """Merge families whose assignments agree after ``λ_i -> ±λ_i``."""
    merged: list[LieAlgebraFamily] = []
    for fam in families:
        for idx, target in enumerate(merged):
            if target.parameters != fam.parameters or target.residual_quadratics and \
                    len(target.residual_quadratics) != len(fam.residual_quadratics):
                continue
            hit = None
            for flips in itertools.product((1, -1), repeat=len(fam.parameters)):
                fmap = dict(zip(fam.parameters, flips))
                moved = tuple(_signed(a, fmap) for a in fam.assignment)
                if moved != target.assignment:
                    continue
                if set(_signed(r, fmap) for r in fam.residual_quadratics) != \
                        set(target.residual_quadratics):
                    continue
                hit = flips
                break
            if hit is not None:
                regions = target.parameter_domain + tuple(
                    _flip_region(r, hit) for r in fam.parameter_domain)
                merged[idx] = LieAlgebraFamily(
                    target.diagram, target.component, target.assignment, target.parameters,
                    regions, target.residual_quadratics,
                    target.components + fam.components)
                break
        else:
            merged.append(fam)
    return merged


def _reduce_two_term(red: _Reduction, params: tuple[str, ...]
                     ) -> tuple[_Reduction, tuple[str, ...]]:
    """Solve residuals ``a·m1 + b·λ = 0`` for a parameter that occurs linearly."""
    changed = True
    while changed:
        changed = False
        for r in red.residuals:
            terms = list(r.items())
            if len(terms) != 2:
                continue
            for (mono, c), (other, d) in (terms, terms[::-1]):
                if len(mono) == 1 and mono[0][1] == 1:
                    name = mono[0][0]
                    if any(name == nm for nm, _ in other):
                        continue
                    expr = Poly({other: -d / c})
                    assignment = tuple(a.subs({name: expr}) for a in red.assignment)
                    residuals = tuple(x for x in (q.subs({name: expr}) for q in red.residuals)
                                      if not x.is_zero())
                    red = _Reduction(assignment, residuals)
                    params = tuple(p for p in params if p != name)
                    changed = True
                    break
            if changed:
                break
    return red, params


def _families_on(domain: FundamentalDomain, group: Sequence[Perm]
                 ) -> tuple[list[LieAlgebraFamily], bool]:
    """Families for one fundamental domain, and whether quadratics survived."""
    nd = domain.diagram
    j_extra = [p for p in domain.j if p not in set(domain.j2)]
    families: list[LieAlgebraFamily] = []
    quadratic = False
    for orbit in component_orbits(domain, group):
        eps = orbit[0]
        fixed = {p: 1 for p in domain.j2}
        fixed.update({p: eps.sign_at(p) for p in j_extra})
        red = _reduce_jacobi(nd, fixed)
        if red is None:
            continue
        red, params = _rename_parameters(red)
        if red.residuals:
            red, params = _reduce_two_term(red, params)
            red, params = _rename_parameters(red)
        quadratic = quadratic or bool(red.residuals)
        region = _sign_constraints(red.assignment, eps, params)
        if region is None or not feasible(region, len(params)):
            continue
        fam = LieAlgebraFamily(nd, eps, red.assignment, params,
                               (tuple(sorted(set(region))),), red.residuals, (eps,))
        if not red.residuals and fam.sample() is None:
            continue
        families.append(fam)
    return _merge_sign_flips(families), quadratic


def classify_diagram(nd: NiceDiagram, alarm_dim: int = QUADRATIC_ALARM_MAX_DIM,
                     search_limit: int = DOMAIN_SEARCH_LIMIT) -> list[LieAlgebraFamily]:
    """All inequivalent families of nice Lie algebras with diagram ``nd``.

    The greedy fundamental domain is used unless quadratic Jacobi equations
    survive on it; then other domains are tried (see :func:`candidate_domains`)
    and the first one on which every equation becomes linear is used.  If
    none is found the greedy result is returned with residual equations,
    and :class:`ClassificationAlarm` is raised when ``n <= alarm_dim``.
    """
    group = automorphisms(nd, include_isolated=False)
    first: Optional[list[LieAlgebraFamily]] = None
    for domain in candidate_domains(nd, search_limit):
        families, quadratic = _families_on(domain, group)
        if not quadratic:
            return families
        if first is None:
            first = families
    assert first is not None
    if nd.n <= alarm_dim:
        raise ClassificationAlarm(
            f"quadratic Jacobi equations survive for {nd.bracket_indices}: "
            + "; ".join(str(r) for f in first for r in f.residual_quadratics))
    return first


def greedy_quadratics(nd: NiceDiagram) -> tuple[bool, int]:
    """On the greedy domain only: whether quadratics survive, and the family count.

    Families carrying residual equations are counted when their sign region
    is feasible; the residual system itself is not solved.
    """
    families, quadratic = _families_on(fundamental_domain(nd),
                                       automorphisms(nd, include_isolated=False))
    return quadratic, len(families)


# --- equivalence ---------------------------------------------------------------------

def _power_product(values: Sequence[Fraction], exponents: Sequence[int]) -> Fraction:
    out = Fraction(1)
    for v, e in zip(values, exponents):
        if e:
            out *= v ** e
    return out


def _diagonal_match(nd: NiceDiagram, source: Sequence[Fraction], target: Sequence[Fraction],
                    kernel: Sequence[Sequence[int]]) -> bool:
    """Whether a diagonal rescaling carries ``source`` to ``target`` on ``nd``."""
    ratios = [t / s for s, t in zip(source, target)]
    bits = 0
    for pos, r in enumerate(ratios):
        if r < 0:
            bits |= 1 << pos
    if solve_gf2(root_matrix(nd).mod2, bits) is None:
        return False
    absolute = [abs(r) for r in ratios]
    return all(_power_product(absolute, v) == 1 for v in kernel)


def _left_kernel(nd: NiceDiagram) -> list[list[int]]:
    rows = root_matrix(nd).rows
    return left_kernel_integer(rows, len(rows)) if rows else []


def equivalent_vectors(nd_a: NiceDiagram, ca: Sequence[Fraction],
                       nd_b: NiceDiagram, cb: Sequence[Fraction]) -> bool:
    """Whether two concrete nice Lie algebras are equivalent.

    Searches labeled-diagram isomorphisms ``σ`` and, for each, tests whether
    ``σ·c_a`` and ``c_b`` lie in one orbit of the diagonal group.
    """
    if nd_a.n != nd_b.n or len(nd_a) != len(nd_b):
        return False
    if any(not x for x in ca) or any(not x for x in cb):
        raise ValueError("structure constants on the diagram must be nonzero")
    kernel = _left_kernel(nd_b)
    for perm in isomorphisms(nd_a.n, labeled_tuples(nd_a), diagram_colors(nd_a.diagram),
                             labeled_tuples(nd_b), diagram_colors(nd_b.diagram)):
        moved = act_on_vector(perm, nd_a, list(ca), nd_b)
        if _diagonal_match(nd_b, moved, cb, kernel):
            return True
    return False


def match_parameters(family: LieAlgebraFamily, nd_b: NiceDiagram, cb: Sequence[Fraction]
                     ) -> list[dict[str, Fraction]]:
    """Parameter values of a one-parameter family equivalent to ``c_b``.

    Each torus invariant ``Π r_I^{v_I} = ±1`` becomes a polynomial equation
    in the parameter; rational roots are collected and confirmed with
    :func:`equivalent_vectors`.
    """
    if len(family.parameters) != 1:
        raise ValueError("only one-parameter families are supported")
    import sympy

    (name,) = family.parameters
    lam = sympy.Symbol("x")
    nd_a = family.diagram
    if nd_a.n != nd_b.n or len(nd_a) != len(nd_b):
        return []
    kernel = _left_kernel(nd_b)
    symbolic = [_to_sympy(a, name, lam) for a in family.assignment]
    candidates: set[Fraction] = set()
    for perm in isomorphisms(nd_a.n, labeled_tuples(nd_a), diagram_colors(nd_a.diagram),
                             labeled_tuples(nd_b), diagram_colors(nd_b.diagram)):
        moved = act_on_vector(perm, nd_a, symbolic, nd_b)
        for v in kernel:
            num = sympy.Integer(1)
            den = sympy.Integer(1)
            for m, t, e in zip(moved, cb, v):
                r_num, r_den = (sympy.Rational(t.numerator, t.denominator), m)
                if e > 0:
                    num *= r_num ** e
                    den *= r_den ** e
                elif e < 0:
                    num *= r_den ** -e
                    den *= r_num ** -e
            for sign in (1, -1):
                poly = sympy.Poly(sympy.expand(num - sign * den), lam)
                if poly.is_zero:
                    continue
                for root in sympy.roots(poly, filter="Q"):
                    candidates.add(Fraction(int(sympy.numer(root)), int(sympy.denom(root))))
        if not kernel:
            break
    out = []
    for x in sorted(candidates):
        vals = {name: x}
        if not family.in_domain(vals):
            continue
        if equivalent_vectors(nd_a, family.instantiate(vals), nd_b, cb):
            out.append(vals)
    return out


def _to_sympy(p: Poly, name: str, symbol):
    import sympy

    expr = sympy.Integer(0)
    for mono, c in p.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for nm, e in mono:
            if nm != name:
                raise ValueError(f"unexpected parameter {nm}")
            term *= symbol ** e
        expr += term
    return expr


# --- derivations ---------------------------------------------------------------------

def diagonal_derivations(nd: NiceDiagram) -> list[list[Fraction]]:
    """Basis of ``ker M_Δ``: diagonal derivations shared by every algebra on ``nd``."""
    rows = root_matrix(nd).rows
    return kernel_q(rows, nd.n) if rows else kernel_q([], nd.n)


def has_nonzero_trace_derivation(nd: NiceDiagram) -> bool:
    return any(sum(v) != 0 for v in diagonal_derivations(nd))


def group_closure_ok(group: Sequence[Perm], n: int) -> bool:
    """Sanity check: ``group`` is closed under composition and has the identity."""
    gs = set(group)
    return identity(n) in gs and all(compose(a, b) in gs for a in gs for b in gs)
