"""Fourier–Motzkin elimination for systems of linear inequalities.

An inequality ``a·x + b > 0`` (strict) or ``a·x + b >= 0`` is stored as a
tuple of exact coefficients.  Strictness is tracked separately; a system is
infeasible exactly when elimination produces ``0 > c`` with ``c >= 0`` or
``0 >= c`` with ``c > 0`` (written here as ``b <= 0`` resp. ``b < 0``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence


@dataclass(frozen=True, order=True)
class Inequality:
    coeffs: tuple[Fraction, ...]
    const: Fraction
    strict: bool = True

    @classmethod
    def make(cls, coeffs: Sequence[object], const: object, strict: bool = True) -> Inequality:
        return cls(tuple(Fraction(c) for c in coeffs), Fraction(const), strict)  # type: ignore[arg-type]

    def holds(self, x: Sequence[Fraction]) -> bool:
        v = sum((a * xi for a, xi in zip(self.coeffs, x)), self.const)
        return v > 0 if self.strict else v >= 0

    def normalized(self) -> Inequality:
        """Divide by the largest absolute coefficient so duplicates collapse."""
        scale = max((abs(a) for a in self.coeffs), default=Fraction(0))
        if not scale:
            scale = abs(self.const) or Fraction(1)
        return Inequality(tuple(a / scale for a in self.coeffs), self.const / scale, self.strict)

    def __str__(self) -> str:
        terms = [f"{a}*x{i}" for i, a in enumerate(self.coeffs) if a]
        return f"{' + '.join(terms) or '0'} + {self.const} {'>' if self.strict else '>='} 0"


def _eliminate(system: list[Inequality], var: int) -> list[Inequality]:
    lower, upper, rest = [], [], []
    for ineq in system:
        a = ineq.coeffs[var]
        if a > 0:
            lower.append(ineq)
        elif a < 0:
            upper.append(ineq)
        else:
            rest.append(ineq)
    out = set(rest)
    for lo in lower:
        for up in upper:
            fl = 1 / lo.coeffs[var]
            fu = -1 / up.coeffs[var]
            coeffs = tuple(x * fl + y * fu for x, y in zip(lo.coeffs, up.coeffs))
            const = lo.const * fl + up.const * fu
            out.add(Inequality(coeffs, const, lo.strict or up.strict).normalized())
    return sorted(out)


def _trivially_false(ineq: Inequality) -> bool:
    if any(ineq.coeffs):
        return False
    return ineq.const <= 0 if ineq.strict else ineq.const < 0


def eliminate_all(system: Sequence[Inequality], nvars: int) -> Optional[list[list[Inequality]]]:
    """Systems after eliminating ``x_{n-1}, ..., x_0`` in turn; None if infeasible.

    Entry ``k`` of the result involves only ``x_0 .. x_{k-1}`` plus the
    constraints on ``x_k`` needed for back substitution.
    """
    current = sorted({ineq.normalized() for ineq in system})
    stages = [current]
    for var in reversed(range(nvars)):
        if any(_trivially_false(i) for i in current):
            return None
        current = _eliminate(current, var)
        stages.append(current)
    if any(_trivially_false(i) for i in current):
        return None
    stages.reverse()
    # stages[k] involves x_0..x_{k-1}; stages[k+1] constrains x_k given x_0..x_{k-1}
    return stages


def feasible(system: Sequence[Inequality], nvars: int) -> bool:
    return eliminate_all(system, nvars) is not None


def _interval(system: Sequence[Inequality], var: int, x: Sequence[Fraction]
              ) -> tuple[Optional[Fraction], bool, Optional[Fraction], bool]:
    lo: Optional[Fraction] = None
    lo_strict = False
    hi: Optional[Fraction] = None
    hi_strict = False
    for ineq in system:
        a = ineq.coeffs[var]
        if not a:
            continue
        rest = ineq.const + sum(c * xi for c, xi in zip(ineq.coeffs[:var], x))
        bound = -rest / a
        if a > 0:
            if lo is None or bound > lo or (bound == lo and ineq.strict):
                lo, lo_strict = bound, ineq.strict
        else:
            if hi is None or bound < hi or (bound == hi and ineq.strict):
                hi, hi_strict = bound, ineq.strict
    return lo, lo_strict, hi, hi_strict


def _pick(lo: Optional[Fraction], hi: Optional[Fraction], rng: Optional[random.Random]
          ) -> Fraction:
    if lo is None and hi is None:
        return Fraction(rng.randint(-5, 5)) if rng else Fraction(0)
    if lo is None:
        return hi - (rng.randint(1, 5) if rng else 1)  # type: ignore[operator]
    if hi is None:
        return lo + (rng.randint(1, 5) if rng else 1)
    if lo == hi:
        return lo
    t = Fraction(rng.randint(1, 99), 100) if rng else Fraction(1, 2)
    return lo + (hi - lo) * t


def sample_point(system: Sequence[Inequality], nvars: int,
                 rng: Optional[random.Random] = None) -> Optional[list[Fraction]]:
    """A rational point satisfying the system (random if ``rng`` is given)."""
    stages = eliminate_all(system, nvars)
    if stages is None:
        return None
    x: list[Fraction] = []
    for var in range(nvars):
        lo, _, hi, _ = _interval(stages[var + 1], var, x)
        x.append(_pick(lo, hi, rng))
    if not all(i.holds(x) for i in system):
        raise AssertionError("back substitution produced an infeasible point")
    return x
