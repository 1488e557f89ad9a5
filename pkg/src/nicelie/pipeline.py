"""Whole-dimension classification: enumerate, classify and name every family."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from nicelie.classify import LieAlgebraFamily, classify_diagram
from nicelie.core import TypeVector
from nicelie.enumeration import DiagramEntry, _map, enumerate_nice_diagrams
from nicelie.fourier_motzkin import Inequality
from nicelie.notation import Name, StructureEquations, family_letter, ucs_dims
from nicelie.poly import Poly

__all__ = ["ClassifiedFamily", "classify_dimension", "format_region", "format_domain"]


@dataclass(frozen=True)
class ClassifiedFamily:
    name: Name
    entry: DiagramEntry
    family: LieAlgebraFamily

    @property
    def type(self) -> TypeVector:
        return self.entry.type

    @property
    def lcs(self) -> str:
        return self.entry.lcs

    @cached_property
    def equations(self) -> StructureEquations:
        return StructureEquations.from_vector(self.family.diagram, self.family.assignment)

    @cached_property
    def generic_point(self) -> Optional[dict]:
        """Deterministic parameter sample used for UCS and comparisons."""
        return self.family.sample(random.Random(str(self.name)))

    @cached_property
    def ucs(self) -> Optional[list[int]]:
        point = self.generic_point
        if point is None:
            return None
        return ucs_dims(self.equations.substitute(point))


def _classify_entry(entry: DiagramEntry) -> list[LieAlgebraFamily]:
    return classify_diagram(entry.nice)


def classify_dimension(n: int, types: Optional[Sequence[TypeVector]] = None,
                       jobs: int = 1, alarm_dim: Optional[int] = None) -> list[ClassifiedFamily]:
    """Every family of nice Lie algebras of dimension ``n`` in canonical order."""
    entries = enumerate_nice_diagrams(n, types, jobs)
    if alarm_dim is None:
        per_entry = _map(_classify_entry, entries, jobs)
    else:
        per_entry = [classify_diagram(e.nice, alarm_dim) for e in entries]
    out = []
    for entry, families in zip(entries, per_entry):
        for idx, fam in enumerate(families):
            letter = family_letter(idx) if len(families) > 1 else ""
            out.append(ClassifiedFamily(Name(entry.lcs, entry.number, letter), entry, fam))
    return out


def format_region(region: Sequence[Inequality], params: Sequence[str]) -> str:
    parts = []
    for ineq in region:
        nonzero = [(p, a) for p, a in zip(params, ineq.coeffs) if a]
        op = ">" if ineq.strict else ">="
        if len(nonzero) == 1:
            p, a = nonzero[0]
            bound = -ineq.const / a
            rel = op if a > 0 else op.replace(">", "<")
            parts.append(f"{p}{rel}{Poly.const(bound)}")
        else:
            expr = Poly.const(ineq.const)
            for p, a in nonzero:
                expr = expr + Poly.var(p) * a
            parts.append(f"{expr}{op}0")
    return ", ".join(parts) if parts else "any"


def format_domain(fam: LieAlgebraFamily) -> str:
    if not fam.parameters:
        return ""
    regions = sorted({format_region(r, fam.parameters) for r in fam.parameter_domain})
    return " or ".join(regions)
