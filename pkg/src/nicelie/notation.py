"""Structure equations ``(0,0,e^{12},...)``: parsing, printing and verification.

Entry ``k`` lists ``de^k`` as a sum of terms ``c e^{ij}``.  Coefficients are
rationals, parameters (``λ``, ``λ₂``, ... or ASCII ``lambda``, ``lambda2``)
or parenthesized polynomials in them.  Indices are written juxtaposed
(``e^{12}``) or comma separated (``e^{10,11}``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from nicelie.core import (BracketIndex, NiceDiagram, StructureError, StructureVector,
                          jacobi_system, lcs_type)
from nicelie.linalg import kernel_q
from nicelie.poly import Poly, normalize_parameter_name

__all__ = [
    "ParseError", "NotNiceError", "JacobiError", "StructureEquations", "parse", "format_equations",
    "verify_nice", "VerifiedAlgebra", "ucs_dims", "lcs_name", "Name", "lcs_string",
]

Term = tuple[Poly, tuple[int, int]]


class ParseError(StructureError):
    """Malformed structure-equation text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text[:position]}⟨here⟩{text[position:]}")
        self.position = position


class NotNiceError(StructureError):
    pass


class JacobiError(StructureError):
    pass


@dataclass(frozen=True)
class StructureEquations:
    """``rows[k-1]`` holds the terms of ``de^k``, sorted by index pair."""

    rows: tuple[tuple[Term, ...], ...]

    def __post_init__(self) -> None:
        for k, row in enumerate(self.rows, start=1):
            pairs = [p for _, p in row]
            if len(set(pairs)) != len(pairs):
                raise StructureError(f"repeated pair in de^{k}")
            for c, (i, j) in row:
                if c.is_zero():
                    raise StructureError(f"zero coefficient for e^{{{i}{j}}} in de^{k}")
                if not (1 <= i < j <= self.n):
                    raise StructureError(f"index pair ({i},{j}) out of range in de^{k}")

    @classmethod
    def make(cls, rows: Iterable[Iterable[tuple[object, tuple[int, int]]]]) -> StructureEquations:
        """Build from terms ``(coeff, (i, j))``; reversed pairs flip the sign."""
        out = []
        for row in rows:
            acc: dict[tuple[int, int], Poly] = {}
            for c, (i, j) in row:
                coeff = c if isinstance(c, Poly) else Poly.const(c)  # type: ignore[arg-type]
                if i == j:
                    raise StructureError(f"e^{{{i}{i}}} is zero")
                if i > j:
                    i, j, coeff = j, i, -coeff
                if (i, j) in acc:
                    raise StructureError(f"repeated pair ({i},{j})")
                acc[(i, j)] = coeff
            out.append(tuple(sorted(((c, p) for p, c in acc.items()), key=lambda t: t[1])))
        return cls(tuple(out))

    @classmethod
    def from_vector(cls, nd: NiceDiagram, values: Sequence[object]) -> StructureEquations:
        rows: list[list[tuple[object, tuple[int, int]]]] = [[] for _ in range(nd.n)]
        for b, v in zip(nd.bracket_indices, values):
            rows[b.k - 1].append((v, (b.i, b.j)))
        return cls.make(rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def parameters(self) -> tuple[str, ...]:
        names: list[str] = []
        for row in self.rows:
            for c, _ in row:
                for v in sorted(c.variables()):
                    if v not in names:
                        names.append(v)
        return tuple(names)

    def brackets(self) -> list[tuple[int, int, int]]:
        return [(i, j, k) for k, row in enumerate(self.rows, start=1) for _, (i, j) in row]

    def substitute(self, values: Mapping[str, object]) -> StructureEquations:
        vals = {normalize_parameter_name(k): Fraction(v)  # type: ignore[arg-type]
                for k, v in values.items()}
        return StructureEquations.make(
            [[(c.subs(vals), p) for c, p in row] for row in self.rows])

    def __str__(self) -> str:
        return format_equations(self)


# --- parsing ----------------------------------------------------------------------

_PARAM = re.compile(r"(λ[₀-₉]*[0-9]*|lambda[0-9]*)")
_NUMBER = re.compile(r"[0-9]+(?:/[0-9]+)?")
_INDEX = re.compile(r"[0-9]+")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.text, self.pos)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, s: str) -> bool:
        self.skip()
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str) -> None:
        if not self.eat(s):
            raise self.error(f"expected {s!r}")

    def match(self, pattern: re.Pattern[str]) -> Optional[str]:
        self.skip()
        m = pattern.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return m.group(0)

    # equations := entry (',' entry)*
    def equations(self) -> StructureEquations:
        rows = [self.entry()]
        while self.eat(","):
            rows.append(self.entry())
        self.skip()
        if self.pos != len(self.text):
            raise self.error("unexpected character")
        try:
            return StructureEquations.make(rows)
        except StructureError as exc:
            raise StructureError(f"{exc} (entry-level check)") from None

    def entry(self) -> list[tuple[Poly, tuple[int, int]]]:
        start = self.pos
        self.skip()
        if self.text.startswith("0", self.pos):
            save = self.pos
            self.pos += 1
            if self.peek() in (",", ""):
                return []
            self.pos = save
        terms = []
        sign = 1
        if self.eat("-"):
            sign = -1
        elif self.eat("+"):
            pass
        while True:
            coeff, pair = self.term()
            terms.append((coeff * sign, pair))
            if self.eat("+"):
                sign = 1
            elif self.eat("-"):
                sign = -1
            else:
                break
        seen = set()
        for _, p in terms:
            key = tuple(sorted(p))
            if key in seen:
                self.pos = start
                raise self.error(f"repeated pair e^{{{key[0]}{key[1]}}}")
            seen.add(key)
        return terms

    def term(self) -> tuple[Poly, tuple[int, int]]:
        coeff = Poly.const(1)
        if self.eat("("):
            coeff = self.polynomial()
            self.expect(")")
        else:
            mono = self.monomial(optional=True)
            if mono is not None:
                coeff = mono
        self.eat("*")
        return coeff, self.form()

    def form(self) -> tuple[int, int]:
        if not self.eat("e^{"):
            raise self.error("expected 'e^{'")
        self.skip()
        first = self.match(_INDEX)
        if first is None:
            raise self.error("expected index")
        if self.eat(","):
            second = self.match(_INDEX)
            if second is None:
                raise self.error("expected index after ','")
            i, j = int(first), int(second)
        else:
            if len(first) != 2:
                raise self.error("juxtaposed indices must be two digits; use e^{i,j}")
            i, j = int(first[0]), int(first[1])
        self.expect("}")
        return i, j

    def monomial(self, optional: bool = False) -> Optional[Poly]:
        number = self.match(_NUMBER)
        value = Poly.const(Fraction(number)) if number else Poly.const(1)
        found = number is not None
        while True:
            name = self.match(_PARAM)
            if name is None:
                break
            found = True
            exp = 1
            if self.eat("^"):
                e = self.match(_INDEX)
                if e is None:
                    raise self.error("expected exponent")
                exp = int(e)
            for _ in range(exp):
                value = value * Poly.var(normalize_parameter_name(name))
        if not found:
            if optional:
                return None
            raise self.error("expected number or parameter")
        return value

    def polynomial(self) -> Poly:
        total = Poly()
        sign = -1 if self.eat("-") else 1
        if sign == 1:
            self.eat("+")
        while True:
            total = total + self.monomial() * sign  # type: ignore[operator]
            if self.eat("+"):
                sign = 1
            elif self.eat("-"):
                sign = -1
            else:
                return total


def parse(text: str) -> StructureEquations:
    """Parse ``"0,0,e^{12}"``; surrounding parentheses are optional."""
    stripped = text.strip()
    if stripped.startswith("(") and stripped.endswith(")"):
        inner = stripped[1:-1]
        if _balanced(inner):
            stripped = inner
    if not stripped:
        raise ParseError("empty input", text, 0)
    return _Parser(stripped).equations()


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


# --- printing ---------------------------------------------------------------------

def _form(i: int, j: int, wide: bool) -> str:
    return f"e^{{{i},{j}}}" if wide else f"e^{{{i}{j}}}"


def _coefficient_text(c: Poly) -> tuple[int, str]:
    """Sign and unsigned prefix (including trailing space) for a coefficient."""
    terms = list(c.items())
    if c.is_constant():
        v = c.constant_value()
        mag = abs(v)
        text = "" if mag == 1 else (f"{mag.numerator}/{mag.denominator} " if mag.denominator != 1
                                    else f"{mag.numerator} ")
        return (1 if v > 0 else -1), text
    if len(terms) == 1:
        mono, v = terms[0]
        body = str(Poly({mono: abs(v)}))
        return (1 if v > 0 else -1), body + " "
    return 1, f"({c}) "


def format_equations(se: StructureEquations) -> str:
    wide = se.n >= 10
    entries = []
    for row in se.rows:
        if not row:
            entries.append("0")
            continue
        parts = []
        for idx, (c, (i, j)) in enumerate(row):
            sign, text = _coefficient_text(c)
            form = _form(i, j, wide)
            if idx == 0:
                parts.append(("- " if sign < 0 else "") + text + form)
            else:
                parts.append(("-" if sign < 0 else "+") + text + form)
        entries.append("".join(parts))
    return ",".join(entries)


# --- verification -----------------------------------------------------------------

@dataclass(frozen=True)
class VerifiedAlgebra:
    equations: StructureEquations
    nice: NiceDiagram
    vector: StructureVector
    residuals: tuple[Poly, ...]

    @property
    def values(self) -> list[Poly]:
        return self.vector.as_list()

    def concrete(self) -> list[Fraction]:
        return [p.constant_value() for p in self.values]


def verify_nice(se: StructureEquations, check_jacobi: bool = True) -> VerifiedAlgebra:
    """Check the nice-basis conditions and the Jacobi identity.

    Raises :class:`NotNiceError` naming an offending pair or arrow and
    :class:`JacobiError` naming a triple whose ``d^2`` coefficient is
    nonzero.  For parameterized input the nonzero ``d^2`` coefficients are
    returned as residual constraints instead.
    """
    targets: dict[tuple[int, int], int] = {}
    arrows: set[tuple[int, int]] = set()
    for i, j, k in se.brackets():
        if (i, j) in targets:
            raise NotNiceError(f"not nice: pair {{{i},{j}}} maps to two targets "
                               f"{targets[(i, j)]} and {k}")
        targets[(i, j)] = k
        if k in (i, j):
            raise NotNiceError(f"not nice: e^{{{i}{j}}} appears in de^{k}")
        for src in (i, j):
            if (src, k) in arrows:
                raise NotNiceError(f"not nice: e_{src} ⌟ de^{k} has more than one term")
            arrows.add((src, k))
    try:
        nd = NiceDiagram.from_brackets(se.n, se.brackets())
    except StructureError as exc:
        raise NotNiceError(f"not nice: {exc}") from None
    coeffs = {}
    for k, row in enumerate(se.rows, start=1):
        for c, (i, j) in row:
            coeffs[BracketIndex(i, j, k)] = c
    vector = StructureVector(nd, coeffs)
    residuals: tuple[Poly, ...] = ()
    if check_jacobi:
        eqs = jacobi_system(vector).equations
        if eqs and not se.parameters:
            (i, j, k, h), value = eqs[0]
            raise JacobiError(f"Jacobi identity fails: coefficient of e^{{{i}{j}{k}}} "
                              f"in d(de^{h}) is {value}")
        residuals = tuple(eq for _, eq in eqs)
    return VerifiedAlgebra(se, nd, vector, residuals)


# --- central series ---------------------------------------------------------------

def _bracket_table(se: StructureEquations) -> dict[tuple[int, int], tuple[int, Fraction]]:
    """``[e_i, e_j] = value * e_k`` for ``i < j``; ``de^k = c e^{ij}`` gives ``-c``."""
    out = {}
    for k, row in enumerate(se.rows, start=1):
        for c, (i, j) in row:
            out[(i, j)] = (k, -c.constant_value())
    return out


def _ad_images(se: StructureEquations, vec: Sequence[Fraction], m: int,
               table: Mapping[tuple[int, int], tuple[int, Fraction]]) -> list[Fraction]:
    """Coordinates of ``[x, e_m]`` where ``x`` has coordinates ``vec``."""
    out = [Fraction(0)] * se.n
    for a, xa in enumerate(vec, start=1):
        if not xa or a == m:
            continue
        key, sign = ((a, m), 1) if a < m else ((m, a), -1)
        hit = table.get(key)
        if hit:
            k, v = hit
            out[k - 1] += sign * v * xa
    return out


def ucs_dims(se: StructureEquations) -> list[int]:
    """Dimensions of the upper central series ``z_1 ⊂ z_2 ⊂ ... ⊂ g``.

    Parameterized input must be instantiated first.
    """
    if se.parameters:
        raise ValueError("instantiate parameters before computing the UCS")
    n = se.n
    table = _bracket_table(se)
    basis_std = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
    # ad(e_m) as a matrix: column a holds [e_a, e_m].
    ads = []
    for m in range(1, n + 1):
        cols = [_ad_images(se, basis_std[a], m, table) for a in range(n)]
        ads.append([[cols[a][r] for a in range(n)] for r in range(n)])
    dims: list[int] = []
    current: list[list[Fraction]] = []  # basis of z_i
    while True:
        # annihilator rows of span(current): kernel of the transpose
        if current:
            ann = kernel_q(current)
        else:
            ann = basis_std
        system = []
        for ad in ads:
            for row in ann:
                system.append([sum(row[r] * ad[r][a] for r in range(n)) for a in range(n)])
        system = [r for r in system if any(r)]
        nxt = kernel_q(system) if system else basis_std
        d = len(nxt)
        if dims and d == dims[-1]:
            raise StructureError("upper central series stalls: algebra is not nilpotent")
        dims.append(d)
        if d == n:
            return dims
        current = nxt


def lcs_string(t: Sequence[int]) -> str:
    dims = [sum(t[i:]) for i in range(len(t))]
    if all(x < 10 for x in dims):
        return "".join(str(x) for x in dims)
    return ",".join(str(x) for x in dims)


def lcs_name(se: StructureEquations) -> str:
    nd = NiceDiagram.from_brackets(se.n, se.brackets())
    return lcs_string(lcs_type(nd.diagram))


@dataclass(frozen=True, order=True)
class Name:
    """``<lcs>:<diagram number>[letter]``, e.g. ``631:5b``."""

    lcs: str
    number: int
    letter: str = ""

    _PATTERN = re.compile(r"^([0-9,]+):([0-9]+)([a-z]*)$")

    def __str__(self) -> str:
        return f"{self.lcs}:{self.number}{self.letter}"

    @classmethod
    def parse(cls, text: str) -> Name:
        m = cls._PATTERN.match(text.strip())
        if not m:
            raise ValueError(f"not a family name: {text!r}")
        return cls(m.group(1), int(m.group(2)), m.group(3))


def family_letter(index: int) -> str:
    """0 -> a, 25 -> z, 26 -> aa, ..."""
    out = ""
    index += 1
    while index:
        index, r = divmod(index - 1, 26)
        out = chr(ord("a") + r) + out
    return out


def coerce_equations(x: Union[str, StructureEquations]) -> StructureEquations:
    return parse(x) if isinstance(x, str) else x
