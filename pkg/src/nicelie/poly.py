"""Exact polynomials with rational coefficients in named parameters.

Structure constants of a family are polynomials (in practice affine, at most
quadratic) in parameters named ``λ``, ``λ₂``, ...  Monomials are stored as
sorted tuples of ``(name, exponent)`` pairs, so equal polynomials have equal
internal representations.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Monomial = tuple[tuple[str, int], ...]
Number = Union[int, Fraction]

ONE_MONOMIAL: Monomial = ()

_SUBSCRIPTS = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_UNSUBSCRIPTS = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")


def parameter_name(index: int) -> str:
    """Name of the ``index``-th parameter (1-based): λ, λ₂, λ₃, ..."""
    if index < 1:
        raise ValueError("parameter index starts at 1")
    return "λ" if index == 1 else "λ" + str(index).translate(_SUBSCRIPTS)


def normalize_parameter_name(name: str) -> str:
    """Map ASCII spellings (``lambda2``, ``λ2``) onto the canonical ``λ₂``."""
    if name.startswith("lambda"):
        name = "λ" + name[len("lambda"):]
    digits = name[1:].translate(_UNSUBSCRIPTS)
    if not digits or digits == "1":
        return "λ"
    return parameter_name(int(digits))


def _parameter_sort_key(name: str) -> tuple[int, str]:
    digits = name[1:].translate(_UNSUBSCRIPTS)
    return (int(digits) if digits.isdigit() else 1, name)


def _mul_monomials(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for name, exp in b:
        powers[name] = powers.get(name, 0) + exp
    return tuple(sorted(powers.items(), key=lambda kv: _parameter_sort_key(kv[0])))


class Poly:
    """Immutable polynomial over the rationals."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                c = Fraction(coeff)
                if c:
                    clean[mono] = clean.get(mono, Fraction(0)) + c
                    if not clean[mono]:
                        del clean[mono]
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def const(cls, value: Number) -> Poly:
        return cls({ONE_MONOMIAL: value})

    @classmethod
    def var(cls, name: str) -> Poly:
        return cls({((name, 1),): 1})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterable[tuple[Monomial, Fraction]]:
        return self._terms.items()

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e for _, e in mono) for mono in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not mono for mono in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get(ONE_MONOMIAL, Fraction(0))

    def variables(self) -> set[str]:
        return {name for mono in self._terms for name, _ in mono}

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def _coerce(self, other: object) -> Poly:
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> Poly:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for mono, c in o._terms.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: object) -> Poly:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> Poly:
        return (-self) + other

    def __mul__(self, other: object) -> Poly:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = _mul_monomials(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def subs(self, values: Mapping[str, Union[Number, Poly]]) -> Poly:
        """Substitute numbers or polynomials for parameters."""
        out = Poly()
        for mono, c in self._terms.items():
            term = Poly.const(c)
            rest: list[tuple[str, int]] = []
            for name, exp in mono:
                if name in values:
                    v = values[name]
                    factor = v if isinstance(v, Poly) else Poly.const(v)
                    for _ in range(exp):
                        term = term * factor
                else:
                    rest.append((name, exp))
            if rest:
                term = term * Poly({tuple(rest): 1})
            out = out + term
        return out

    def evaluate(self, values: Mapping[str, Number]) -> Fraction:
        result = self.subs(values)
        return result.constant_value()

    def rename(self, mapping: Mapping[str, str]) -> Poly:
        out: dict[Monomial, Fraction] = {}
        for mono, c in self._terms.items():
            m: Monomial = ()
            for name, exp in mono:
                m = _mul_monomials(m, ((mapping.get(name, name), exp),))
            out[m] = out.get(m, Fraction(0)) + c
        return Poly(out)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms with the constant first, then by degree and parameter order."""
        def key(item: tuple[Monomial, Fraction]):
            mono = item[0]
            return (sum(e for _, e in mono),
                    [(_parameter_sort_key(n), -e) for n, e in mono])
        return sorted(self._terms.items(), key=key)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for mono, c in self.sorted_terms():
            body = "".join(n if e == 1 else f"{n}^{e}" for n, e in mono)
            mag = abs(c)
            if body:
                text = body if mag == 1 else f"{_fmt_fraction(mag)}{body}"
            else:
                text = _fmt_fraction(mag)
            if not pieces:
                pieces.append(("-" if c < 0 else "") + text)
            else:
                pieces.append(("-" if c < 0 else "+") + text)
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r})"


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


CoefficientExpression = Poly
