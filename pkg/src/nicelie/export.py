"""JSON and Graphviz DOT serialization of diagrams and families."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from nicelie.core import DoubleArrow, NiceDiagram, double_arrows

SCHEMA = "nicelie.families/1"
DIAGRAM_SCHEMA = "nicelie.diagrams/1"

__all__ = ["SCHEMA", "DIAGRAM_SCHEMA", "diagram_json", "family_json", "families_document",
           "diagrams_document", "dumps", "diagram_dot", "double_dot", "DotGraph", "read_dot",
           "nice_from_dot", "double_arrows_from_dot"]


def diagram_json(nd: NiceDiagram) -> dict:
    arrows = []
    for b in nd.bracket_indices:
        arrows.append({"src": b.i, "dst": b.k, "label": b.j})
        arrows.append({"src": b.j, "dst": b.k, "label": b.i})
    arrows.sort(key=lambda a: (a["src"], a["dst"]))
    return {"nodes": list(range(1, nd.n + 1)), "arrows": arrows}


def family_json(cf) -> dict:
    """One classified family (see :class:`nicelie.pipeline.ClassifiedFamily`)."""
    from nicelie.pipeline import format_domain

    fam = cf.family
    return {
        "name": str(cf.name),
        "type": list(cf.type),
        "lcs": cf.lcs,
        "ucs": cf.ucs,
        "equations": str(cf.equations),
        "parameters": list(fam.parameters),
        "domain": format_domain(fam),
        "residuals": [str(r) for r in fam.residual_quadratics],
        "diagram": diagram_json(fam.diagram),
    }


def families_document(families: Iterable, dimension: Optional[int] = None) -> dict:
    return {"schema": SCHEMA, "dimension": dimension,
            "families": [family_json(cf) for cf in families]}


def diagrams_document(entries: Iterable, dimension: Optional[int] = None) -> dict:
    out = []
    for e in entries:
        nd = e.nice
        out.append({
            "name": f"{e.lcs}:{e.number}",
            "type": list(e.type),
            "lcs": e.lcs,
            "brackets": [[b.i, b.j, b.k] for b in nd.bracket_indices],
            "double_arrows": [[d.i, d.j, d.k, d.h] for d in sorted(double_arrows(nd))],
            "diagram": diagram_json(nd),
        })
    return {"schema": DIAGRAM_SCHEMA, "dimension": dimension, "diagrams": out}


def dumps(doc: dict) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


# --- DOT -----------------------------------------------------------------------------

def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def diagram_dot(nd: NiceDiagram, name: str = "diagram") -> str:
    """Δ with arrows ``i -> k`` labeled by the partner ``j`` of each bracket."""
    lines = [f"digraph {_quote(name)} {{", '  graph [kind="diagram"];']
    lines += [f"  {v};" for v in range(1, nd.n + 1)]
    for a in diagram_json(nd)["arrows"]:
        lines.append(f'  {a["src"]} -> {a["dst"]} [label="{a["label"]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def double_dot(nd: NiceDiagram, name: str = "diagram") -> str:
    """Δ⊗Δ: an arrow ``k -> h`` labeled ``i,j`` for each double arrow."""
    lines = [f"digraph {_quote(name + ' double')} {{", '  graph [kind="double"];']
    lines += [f"  {v};" for v in range(1, nd.n + 1)]
    for d in sorted(double_arrows(nd), key=lambda d: (d.k, d.h, d.i, d.j)):
        lines.append(f'  {d.k} -> {d.h} [label="{d.i},{d.j}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DotGraph:
    name: str
    kind: str
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int, str], ...]


_HEAD = re.compile(r'^\s*digraph\s+"((?:[^"\\]|\\.)*)"\s*\{\s*$')
_KIND = re.compile(r'^\s*graph\s*\[\s*kind\s*=\s*"([a-z]+)"\s*\]\s*;\s*$')
_NODE = re.compile(r"^\s*([0-9]+)\s*;\s*$")
_EDGE = re.compile(r'^\s*([0-9]+)\s*->\s*([0-9]+)\s*\[\s*label\s*=\s*"([^"]*)"\s*\]\s*;\s*$')


def read_dot(text: str) -> list[DotGraph]:
    """Parse graphs written by :func:`diagram_dot` and :func:`double_dot`."""
    graphs: list[DotGraph] = []
    current: Optional[dict] = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.strip().startswith("//"):
            continue
        if current is None:
            m = _HEAD.match(line)
            if not m:
                raise ValueError(f"line {lineno}: expected 'digraph \"name\" {{'")
            current = {"name": m.group(1).replace('\\"', '"'), "kind": "diagram",
                       "nodes": [], "edges": []}
            continue
        if line.strip() == "}":
            graphs.append(DotGraph(current["name"], current["kind"], tuple(current["nodes"]),
                                   tuple(current["edges"])))
            current = None
            continue
        for pattern, key in ((_KIND, "kind"), (_NODE, "nodes"), (_EDGE, "edges")):
            m = pattern.match(line)
            if m:
                if key == "kind":
                    current["kind"] = m.group(1)
                elif key == "nodes":
                    current["nodes"].append(int(m.group(1)))
                else:
                    current["edges"].append((int(m.group(1)), int(m.group(2)), m.group(3)))
                break
        else:
            raise ValueError(f"line {lineno}: unrecognized statement {line.strip()!r}")
    if current is not None:
        raise ValueError("unterminated graph")
    return graphs


def nice_from_dot(g: DotGraph) -> NiceDiagram:
    if g.kind != "diagram":
        raise ValueError(f"graph {g.name!r} is not a labeled diagram")
    triples = set()
    for src, dst, label in g.edges:
        a, b = sorted((src, int(label)))
        triples.add((a, b, dst))
    return NiceDiagram.from_brackets(max(g.nodes, default=0), triples)


def double_arrows_from_dot(g: DotGraph) -> set[DoubleArrow]:
    if g.kind != "double":
        raise ValueError(f"graph {g.name!r} is not a double-arrow graph")
    out = set()
    for k, h, label in g.edges:
        i, j = (int(x) for x in label.split(","))
        out.add(DoubleArrow(i, j, k, h))
    return out



def dot_document(items: Sequence[tuple[str, NiceDiagram]]) -> str:
    return "".join(diagram_dot(nd, name) + double_dot(nd, name) for name, nd in items)
