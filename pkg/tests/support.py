"""Shared cached data for the test modules."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from nicelie.core import NiceDiagram
from nicelie.enumeration import DiagramEntry, enumerate_nice_diagrams


@lru_cache(maxsize=None)
def nice_entries(n: int) -> tuple[DiagramEntry, ...]:
    return tuple(enumerate_nice_diagrams(n))


def small_nice(max_n: int) -> list[NiceDiagram]:
    return [e.nice for n in range(1, max_n + 1) for e in nice_entries(n)]


def table_rows(n: int) -> list[tuple[str, str, str]]:
    """(name, equations, UCS digits) rows of the transcribed table for dimension n."""
    text = resources.files("nicelie").joinpath(f"data/table{n}.tsv").read_text(encoding="utf-8")
    rows = []
    for line in text.splitlines():
        if line.startswith("#") or not line.strip():
            continue
        name, eq, ucs, _ = line.split("\t")
        rows.append((name, eq, ucs))
    return rows
