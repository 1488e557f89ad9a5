"""Command-line interface: ``nicelie classify|diagrams|check|compare``.

Exit codes: 0 success, 1 comparison mismatch, 2 usage error, 3 internal alarm.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, TextIO

from nicelie.classify import ClassificationAlarm, equivalent_vectors
from nicelie.core import StructureError
from nicelie.enumeration import enumerate_nice_diagrams, literal_rule_reachable
from nicelie.export import (diagram_json, diagrams_document, dot_document, dumps,
                            families_document)
from nicelie.notation import lcs_name, parse, ucs_dims, verify_nice
from nicelie.pipeline import classify_dimension, format_domain
from nicelie.poly import normalize_parameter_name

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_ALARM = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str
    dimension: int = 0
    type_filter: Optional[tuple[int, ...]] = None
    fmt: str = "table"
    jobs: int = 1
    out: Optional[str] = None


def _type_arg(text: str) -> tuple[int, ...]:
    try:
        t = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad type {text!r}; expected e.g. 3,2,1") from None
    if not t or any(a < 1 for a in t):
        raise argparse.ArgumentTypeError("type entries must be positive")
    return t


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nicelie", description="Classify nice nilpotent Lie algebras.")
    sub = p.add_subparsers(dest="mode", required=True, parser_class=_Parser)

    def common(sp: argparse.ArgumentParser, formats: Sequence[str]) -> None:
        sp.add_argument("--format", dest="fmt", choices=formats, default="table")
        sp.add_argument("--out", help="write output to PATH instead of stdout")

    for name, help_text in (("classify", "list nice Lie algebras of a dimension"),
                            ("diagrams", "list nice diagrams of a dimension")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--dim", type=_positive, required=True)
        sp.add_argument("--type", type=_type_arg, dest="type_filter",
                        help="restrict to one type, e.g. 3,2,1")
        sp.add_argument("--jobs", type=_positive, default=1)
        common(sp, ("table", "json", "dot"))

    sp = sub.add_parser("check", help="verify structure equations, one per line")
    sp.add_argument("file", help="input file, or - for stdin")
    sp.add_argument("--diagnostics", action="store_true",
                    help="also report whether the strict covering rule reaches the diagram")
    common(sp, ("table", "json", "dot"))

    sp = sub.add_parser("compare", help="match two lists of structure equations up to equivalence")
    sp.add_argument("file_a")
    sp.add_argument("file_b")
    sp.add_argument("--at", default="", help="parameter values, e.g. 'λ=2,λ₂=3'")
    sp.add_argument("--out")
    return p


# --- input files ---------------------------------------------------------------------

_NAME = re.compile(r"^[0-9,]+:[0-9]+[a-z]*$")


@dataclass(frozen=True)
class InputLine:
    lineno: int
    label: str
    text: str


def read_lines(stream: TextIO) -> list[InputLine]:
    """Equation lines; a leading family name and trailing columns are allowed.

    Columns are separated by tabs or by two or more spaces.
    """
    out = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = [c for c in re.split(r"\t| {2,}", line.strip()) if c]
        if len(cols) >= 2 and _NAME.match(cols[0]):
            out.append(InputLine(lineno, cols[0], cols[1]))
        else:
            head, _, rest = line.strip().partition(" ")
            if rest and _NAME.match(head):
                out.append(InputLine(lineno, head, rest.strip()))
            else:
                out.append(InputLine(lineno, f"line {lineno}", cols[0]))
    return out


def load_lines(path: str) -> list[InputLine]:
    if path == "-":
        return read_lines(sys.stdin)
    try:
        with open(path, encoding="utf-8") as stream:
            return read_lines(stream)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# --- commands ------------------------------------------------------------------------

def _fmt_ucs(ucs: Optional[Sequence[int]]) -> str:
    if ucs is None:
        return "?"
    return "".join(str(x) for x in ucs) if all(x < 10 for x in ucs) else ",".join(map(str, ucs))


def _table(rows: Sequence[Sequence[str]], header: Sequence[str]) -> str:
    widths = [max(len(r[c]) for r in [header, *rows]) for c in range(len(header))]
    lines = ["# " + "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for r in rows:
        lines.append("  " + "  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def cmd_classify(cfg: RunConfig) -> tuple[int, str]:
    types = [cfg.type_filter] if cfg.type_filter else None
    if cfg.type_filter and sum(cfg.type_filter) != cfg.dimension:
        raise UsageError(f"type {cfg.type_filter} does not sum to {cfg.dimension}")
    families = classify_dimension(cfg.dimension, types, cfg.jobs)
    if cfg.fmt == "json":
        return EXIT_OK, dumps(families_document(families, cfg.dimension))
    if cfg.fmt == "dot":
        return EXIT_OK, dot_document([(str(cf.name), cf.family.diagram) for cf in families])
    rows = [[str(cf.name), str(cf.equations), cf.lcs, _fmt_ucs(cf.ucs),
             str(len(cf.family.parameters)), "yes" if cf.family.has_residuals else "no",
             format_domain(cf.family)] for cf in families]
    header = ["name", "equations", "lcs", "ucs", "params", "residuals", "domain"]
    text = _table(rows, header) if rows else "# no families\n"
    return EXIT_OK, text + f"# {len(families)} families\n"


def cmd_diagrams(cfg: RunConfig) -> tuple[int, str]:
    types = [cfg.type_filter] if cfg.type_filter else None
    if cfg.type_filter and sum(cfg.type_filter) != cfg.dimension:
        raise UsageError(f"type {cfg.type_filter} does not sum to {cfg.dimension}")
    entries = enumerate_nice_diagrams(cfg.dimension, types, cfg.jobs)
    if cfg.fmt == "json":
        return EXIT_OK, dumps(diagrams_document(entries, cfg.dimension))
    if cfg.fmt == "dot":
        return EXIT_OK, dot_document([(f"{e.lcs}:{e.number}", e.nice) for e in entries])
    rows = []
    for e in entries:
        brackets = " ".join(f"({b.i}{b.j},{b.k})" if e.nice.n < 10 else f"({b.i},{b.j},{b.k})"
                            for b in e.nice.bracket_indices)
        rows.append([f"{e.lcs}:{e.number}", "".join(map(str, e.type)), brackets or "-"])
    text = _table(rows, ["name", "type", "brackets"]) if rows else "# no diagrams\n"
    return EXIT_OK, text + f"# {len(entries)} nice diagrams\n"


def _check_one(line: InputLine, diagnostics: bool) -> dict:
    report: dict = {"input": line.label, "equations": line.text}
    try:
        se = parse(line.text)
    except StructureError as exc:
        report.update(status="syntax error", message=str(exc))
        return report
    try:
        v = verify_nice(se)
    except StructureError as exc:
        msg = str(exc)
        report.update(status="not nice" if msg.startswith("not nice") else "Jacobi fails",
                      message=msg)
        return report
    report.update(status="ok", lcs=lcs_name(se), nice=v.nice)
    if v.residuals:
        report["residuals"] = [str(r) for r in v.residuals]
    if not se.parameters:
        report["ucs"] = _fmt_ucs(ucs_dims(se))
    if diagnostics:
        report["strict_rule"] = literal_rule_reachable(v.nice.diagram)
    return report


def cmd_check(path: str, fmt: str, diagnostics: bool) -> tuple[int, str]:
    reports = [_check_one(line, diagnostics) for line in load_lines(path)]
    if fmt == "dot":
        return EXIT_OK, dot_document([(r["input"], r["nice"]) for r in reports if "nice" in r])
    if fmt == "json":
        docs = []
        for r in reports:
            d = {k: v for k, v in r.items() if k != "nice"}
            if "nice" in r:
                d["diagram"] = diagram_json(r["nice"])
            docs.append(d)
        return EXIT_OK, dumps({"schema": "nicelie.check/1", "results": docs})
    out = []
    for r in reports:
        if r["status"] != "ok":
            out.append(f"{r['input']}: {r['message']}")
            continue
        parts = ["nice"]
        if "residuals" in r:
            parts.append("Jacobi holds when " + " = 0, ".join(r["residuals"]) + " = 0")
        else:
            parts.append("Jacobi OK")
        parts.append(f"LCS {r['lcs']}")
        if "ucs" in r:
            parts.append(f"UCS {r['ucs']}")
        if diagnostics:
            parts.append("strict covering rule: " + ("reached" if r["strict_rule"] else
                                                     "NOT reached"))
        out.append(f"{r['input']}: " + ", ".join(parts))
    return EXIT_OK, "\n".join(out) + ("\n" if out else "")


def _parse_at(text: str) -> dict[str, Fraction]:
    values = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"bad --at item {item!r}; expected name=value")
        try:
            values[normalize_parameter_name(key.strip())] = Fraction(val.strip())
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad value in --at item {item!r}") from None
    return values


def _concrete(line: InputLine, at: dict[str, Fraction]):
    se = parse(line.text)
    missing = [p for p in se.parameters if p not in at]
    if missing:
        raise UsageError(f"{line.label}: give values for {', '.join(missing)} with --at")
    if se.parameters:
        se = se.substitute({p: at[p] for p in se.parameters})
    v = verify_nice(se)
    return v.nice, v.concrete()


def cmd_compare(path_a: str, path_b: str, at_text: str) -> tuple[int, str]:
    at = _parse_at(at_text)
    sides = []
    for path in (path_a, path_b):
        items = []
        for line in load_lines(path):
            try:
                items.append((line, *_concrete(line, at)))
            except StructureError as exc:
                raise UsageError(f"{path}: {line.label}: {exc}") from None
        sides.append(items)
    a_items, b_items = sides
    used = [False] * len(b_items)
    matches, missing_b = [], []
    for line, nd, c in a_items:
        for idx, (line_b, nd_b, c_b) in enumerate(b_items):
            if not used[idx] and equivalent_vectors(nd, c, nd_b, c_b):
                used[idx] = True
                matches.append((line.label, line_b.label))
                break
        else:
            missing_b.append(line.label)
    missing_a = [b_items[i][0].label for i, u in enumerate(used) if not u]
    out = [f"{a} ~ {b}" for a, b in matches]
    out += [f"only in {path_a}: {a}" for a in missing_b]
    out += [f"only in {path_b}: {b}" for b in missing_a]
    ok = not missing_a and not missing_b
    out.append(f"# {len(matches)} matched, {len(missing_b)} unmatched in A, "
               f"{len(missing_a)} unmatched in B: {'perfect matching' if ok else 'MISMATCH'}")
    return (EXIT_OK if ok else EXIT_MISMATCH), "\n".join(out) + "\n"


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str, Optional[str]]:
    """Execute a command; returns exit code, output text and output path."""
    args = build_parser().parse_args(argv)
    if args.mode in ("classify", "diagrams"):
        cfg = RunConfig(args.mode, args.dim, args.type_filter, args.fmt, args.jobs, args.out)
        code, text = cmd_classify(cfg) if args.mode == "classify" else cmd_diagrams(cfg)
    elif args.mode == "check":
        code, text = cmd_check(args.file, args.fmt, args.diagnostics)
    else:
        code, text = cmd_compare(args.file_a, args.file_b, args.at)
    return code, text, args.out


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        code, text, out_path = run(argv)
    except UsageError as exc:
        print(f"nicelie: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ClassificationAlarm as exc:
        print(f"nicelie: internal consistency alarm: {exc}", file=sys.stderr)
        return EXIT_ALARM
    if out_path:
        try:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"nicelie: error: cannot write {out_path}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
