"""Command-line entry point: ``confext {axioms,lie,ext,sweep,reproduce}``.

Exit codes are 0 for success, 1 for I/O or internal failures (and failed
verifications), 2 for usage errors and unsupported input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import annihilation, classifier
from .ext import DEFAULT_DEGREE_CAP, UnsupportedExtension, problem_from_literals, solve_ext
from .lca import LcaError, LcaParseError, check_jacobi, check_skew_symmetry, resolve_algebra
from .scalar import Field, FieldMismatchError, render_scalar

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
OUTPUTS = ("text", "json", "csv", "markdown")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    field: Field | None  # None means every point, whatever its field
    degree_cap: int = DEFAULT_DEGREE_CAP
    output: str = "text"
    jobs: object = "auto"

    @property
    def field_label(self):
        return "auto" if self.field is None else str(self.field)


def _config(ns) -> CliConfig:
    field_text = getattr(ns, "field", None) or "auto"
    try:
        field = None if field_text == "auto" else Field.parse(field_text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cap = getattr(ns, "degree_cap", None)
    if cap is None:
        cap = os.environ.get("CONFEXT_DEGREE_CAP", DEFAULT_DEGREE_CAP)
    try:
        cap = int(cap)
    except ValueError:
        raise UsageError(f"degree cap must be an integer, got {cap!r}") from None
    if cap < 0:
        raise UsageError("degree cap must be nonnegative")
    jobs = getattr(ns, "jobs", None) or "auto"
    try:
        classifier.resolve_jobs(jobs)
    except ValueError:
        raise UsageError(f"--jobs takes 'auto' or a positive integer, got {jobs!r}") from None
    return CliConfig(field, cap, getattr(ns, "output", None) or "text", jobs)


def _global_options(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("global options")
    g.add_argument("--field", default=default, help="q, q-sqrt:<d> or auto (default: auto, every point)")
    g.add_argument("--degree-cap", type=int, default=default,
                   help=f"degree cap for unknown polynomials (default: $CONFEXT_DEGREE_CAP or {DEFAULT_DEGREE_CAP})")
    g.add_argument("--output", choices=OUTPUTS, default=default, help="report format (default: text)")
    g.add_argument("--jobs", default=default, help="worker processes for sweeps: auto or n (default: auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="confext", description="Extensions of conformal modules over Lie conformal algebras.")
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("axioms", parents=[common], help="check skew-symmetry and Jacobi for an algebra")
    p.add_argument("algebra", help="vir, hv, sv, esv or a path to a spec file")

    p = sub.add_parser("lie", parents=[common], help="annihilation algebra relations and Lie axioms")
    p.add_argument("algebra")
    p.add_argument("--max-index", type=int, default=6)

    p = sub.add_parser("ext", parents=[common], help="solve one extension problem")
    p.add_argument("algebra")
    p.add_argument("--sub", required=True, help="submodule literal, e.g. rank1:alpha=0,delta=-4")
    p.add_argument("--quot", required=True, help="quotient literal, e.g. trivial:gamma=0")

    p = sub.add_parser("sweep", parents=[common], help="solve every point of a parameter grid")
    p.add_argument("algebra")
    p.add_argument("--type", type=int, required=True, choices=(1, 2, 3), dest="ext_type")
    p.add_argument("--grid", required=True, help="e.g. 'delta=-6..6:1/2 gamma=-alpha'")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("reproduce", parents=[common], help="diff solver output against golden tables")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--theorem")
    which.add_argument("--all", action="store_true")
    return parser


# ----------------------------------------------------------------------
# emitters

def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _md_table(header, rows):
    def cell(x):
        return str(x).replace("|", "\\|")
    out = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    out += ["| " + " | ".join(cell(x) for x in row) + " |" for row in rows]
    return "\n".join(out) + "\n"


def _render_rep(rep: dict) -> str:
    return "; ".join(f"{k}={v}" for k, v in rep.items())


def _load_algebra(ref):
    try:
        return resolve_algebra(ref)
    except LcaParseError as exc:
        raise UsageError(f"parse error: {exc}") from None
    except LcaError as exc:
        raise UsageError(str(exc)) from None
    except FileNotFoundError:
        raise UsageError(f"unknown algebra {ref!r}: not a builtin name or an existing spec file") from None


# ----------------------------------------------------------------------
# commands

def cmd_axioms(ns, cfg: CliConfig, out) -> int:
    A = _load_algebra(ns.algebra)
    reports = [check_skew_symmetry(A), check_jacobi(A)]
    ok = all(r.ok for r in reports)
    if cfg.output == "json":
        data = {"algebra": A.name, "ok": ok, "axioms": [
            {"axiom": r.axiom, "violations": [{"at": list(g), "residual": str(res)} for g, res in r.violations]}
            for r in reports]}
        out.write(json.dumps(data, ensure_ascii=False) + "\n")
    elif cfg.output in ("csv", "markdown"):
        rows = [[r.axiom, "ok", ""] for r in reports if r.ok]
        rows += [[r.axiom, ",".join(g), str(res)] for r in reports for g, res in r.violations]
        emit = _csv_text if cfg.output == "csv" else _md_table
        out.write(emit(["axiom", "at", "residual"], rows))
    else:
        out.write(f"algebra {A.name}: generators {', '.join(A.generators)}\n")
        for r in reports:
            out.writelines(line + "\n" for line in r.lines())
    return EXIT_OK if ok else EXIT_FAIL


def cmd_lie(ns, cfg: CliConfig, out) -> int:
    if ns.max_index < 2:
        raise UsageError("--max-index must be at least 2")
    A = _load_algebra(ns.algebra)
    relations = annihilation.symbolic_relations(A)
    brackets = [r for r in relations if not r.startswith("[∂")]
    derivation = [r for r in relations if r.startswith("[∂")]
    report = annihilation.verify_annih_lie(A, ns.max_index)
    if cfg.output == "json":
        data = {"algebra": A.name, "max_index": ns.max_index, "relations": brackets,
                "derivation": derivation, "ok": report.ok, "checked_elements": report.checked_elements,
                "antisymmetry_violations": [list(p) for p in report.antisymmetry],
                "jacobi_violations": [list(t) for t in report.jacobi],
                "center_violations": report.center}
        out.write(json.dumps(data, ensure_ascii=False) + "\n")
    elif cfg.output in ("csv", "markdown"):
        rows = [["relation", r] for r in brackets] + [["derivation", r] for r in derivation]
        rows.append(["verification", "ok" if report.ok else "failed"])
        emit = _csv_text if cfg.output == "csv" else _md_table
        out.write(emit(["kind", "text"], rows))
    else:
        out.write(f"nonvanishing relations of Lie({A.name})+:\n")
        out.writelines(f"  {r}\n" for r in brackets)
        out.write("derivation:\n")
        out.writelines(f"  {r}\n" for r in derivation)
        out.write(f"verification up to index {ns.max_index}:\n")
        out.writelines(f"  {line}\n" for line in report.lines())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_ext(ns, cfg: CliConfig, out) -> int:
    A = _load_algebra(ns.algebra)
    try:
        P = problem_from_literals(A, ns.sub, ns.quot, cfg.degree_cap)
    except UnsupportedExtension as exc:
        raise UsageError(f"unsupported extension: {exc}") from None
    except (ValueError, ArithmeticError) as exc:
        raise UsageError(str(exc)) from None
    if cfg.field is not None:
        values = [v for V in (P.sub, P.quot) for _, v in V.params]
        if not all(cfg.field.contains(v) for v in values):
            raise UsageError(f"module parameters lie outside the field {cfg.field}")
    result = solve_ext(P)
    data = result.to_dict()
    if cfg.output == "json":
        out.write(json.dumps(data, ensure_ascii=False) + "\n")
        return EXIT_OK
    reps = data["representatives"]
    if cfg.output in ("csv", "markdown"):
        names = result.layout.names
        rows = [[i + 1] + [rep[n] for n in names] for i, rep in enumerate(reps)]
        emit = _csv_text if cfg.output == "csv" else _md_table
        if cfg.output == "markdown":
            out.write(f"ext_dim = {result.ext_dim} for {P.sub} by {P.quot} over {A.name}\n\n")
        out.write(emit(["rep"] + list(names), rows))
        return EXIT_OK
    out.write(f"algebra {A.name}, sub {P.sub}, quot {P.quot}, degree cap {result.degree_cap}\n")
    out.write(f"cocycles {result.cocycle_dim}, coboundaries {result.coboundary_dim}\n")
    out.write(f"ext_dim = {result.ext_dim}\n")
    for i, rep in enumerate(reps, 1):
        out.write(f"  rep {i}: {_render_rep({k: v for k, v in rep.items() if v != '0'})}\n")
    return EXIT_OK


def parse_sweep_grid(text: str) -> classifier.SweepGrid:
    """Grid items are ``name=values`` or ``name=<linear expression>`` (derived)."""
    grid = classifier.SweepGrid()
    block = {}
    for item in filter(None, text.replace(";", " ").split()):
        name, sep, body = item.partition("=")
        if not sep or not name:
            raise ValueError(f"grid item must look like name=values, got {item!r}")
        try:
            values = classifier.parse_values(body)
        except (ValueError, ZeroDivisionError):
            grid.lets.append((name, classifier.parse_linear(body)))
            continue
        block[name] = values
    if not block or any(not v for v in block.values()):
        raise ValueError("sweep grid is empty")
    grid.add_block(block)
    return grid


def sweep_records(annotated) -> list:
    """Flat per-point records shared by every output format."""
    records = []
    for entry, label, sporadic in annotated:
        rec = {k: render_scalar(v) for k, v in entry.point.items()}
        rec["ext_dim"] = entry.ext_dim
        rec["case"] = label
        rec["sporadic"] = sporadic
        reps = entry.result.to_dict()["representatives"] if entry.result else []
        rec["representatives"] = " | ".join(
            _render_rep({k: v for k, v in r.items() if v != "0"}) for r in reps)
        rec["error"] = entry.error or ""
        records.append(rec)
    return records


def _columns(records):
    cols = []
    for r in records:
        cols.extend(k for k in r if k not in cols)
    tail = ["ext_dim", "case", "sporadic", "representatives", "error"]
    return [c for c in cols if c not in tail] + tail


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else str(v)


def render_sweep(records, fmt) -> str:
    cols = _columns(records)
    rows = [[_cell(r.get(c)) for c in cols] for r in records]
    if fmt == "json":
        return json.dumps(records, ensure_ascii=False, indent=1) + "\n"
    if fmt == "csv":
        return _csv_text(cols, rows)
    if fmt == "markdown":
        return _md_table(cols, rows)
    lines = []
    params = [c for c in cols if c not in ("ext_dim", "case", "sporadic", "representatives", "error")]
    for r in records:
        head = ", ".join(f"{c}={r[c]}" for c in params if c in r)
        dim = "error" if r["ext_dim"] is None else r["ext_dim"]
        note = f"  [{r['case']}{', sporadic' if r['sporadic'] else ''}]" if r["case"] else ""
        text = f"{head}: ext_dim={dim}{note}"
        if r["representatives"]:
            text += f"  {r['representatives']}"
        if r["error"]:
            text += f"  {r['error']}"
        lines.append(text)
    return "\n".join(lines) + "\n"


def cmd_sweep(ns, cfg: CliConfig, out) -> int:
    A = _load_algebra(ns.algebra)
    try:
        grid = parse_sweep_grid(ns.grid)
        points = grid.points(A, ns.ext_type, cfg.field)
    except (ValueError, KeyError, ArithmeticError) as exc:
        raise UsageError(f"bad grid: {exc}") from None
    if not points:
        raise UsageError("sweep grid is empty after filtering by field and irreducibility")
    if ns.out:
        parent = Path(ns.out).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            print(f"confext: cannot write to {ns.out}", file=sys.stderr)
            return EXIT_FAIL
    results = classifier.run_sweep(A, ns.ext_type, points, cfg.degree_cap, jobs=cfg.jobs)
    text = render_sweep(sweep_records(classifier.annotate(A, ns.ext_type, results)), cfg.output)
    if ns.out:
        try:
            Path(ns.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"confext: cannot write to {ns.out}: {exc}", file=sys.stderr)
            return EXIT_FAIL
    else:
        out.write(text)
    return EXIT_FAIL if any(e.error for e in results) else EXIT_OK


def _theorem_markdown(table, report) -> str:
    lines = [f"### {table.theorem_id} ({table.algebra}, type {table.ext_type})", ""]
    if table.title:
        lines += [table.title, ""]
    rows = []
    for row in table.rows:
        cond = ", ".join(a.text for a in row.atoms)
        reps = " ; ".join(_render_rep(r) for r in row.reps)
        rows.append([row.label, cond, row.dim, reps])
    lines.append(_md_table(["case", "conditions", "dim", "polynomials"], rows))
    lines.append(f"status: {'reproduced' if report.ok else 'differs'} over {report.points} points")
    lines += [f"- {d}" for d in report.discrepancies]
    return "\n".join(lines) + "\n"


def cmd_reproduce(ns, cfg: CliConfig, out) -> int:
    reg = classifier.registry()
    if ns.all:
        ids = list(reg)
    elif ns.theorem in reg:
        ids = [ns.theorem]
    else:
        raise UsageError(f"unknown theorem id {ns.theorem!r}; registered: {', '.join(reg)}")
    reports = []
    for tid in ids:
        report = classifier.reproduce_theorem(tid, cfg.degree_cap, cfg.field, cfg.jobs)
        reports.append(report)
        if cfg.output == "text":
            out.writelines(line + "\n" for line in report.lines())
            out.flush()
    if cfg.output == "json":
        data = [{"theorem": r.theorem_id, "ok": r.ok, "points": r.points, "skipped": r.skipped,
                 "field": r.field_label, "discrepancies": [str(d) for d in r.discrepancies]} for r in reports]
        out.write(json.dumps(data, ensure_ascii=False) + "\n")
    elif cfg.output == "csv":
        rows = [[r.theorem_id, r.points, r.skipped, len(r.discrepancies), "ok" if r.ok else "differs"]
                for r in reports]
        out.write(_csv_text(["theorem", "points", "skipped", "discrepancies", "status"], rows))
    elif cfg.output == "markdown":
        out.write("\n".join(_theorem_markdown(reg[r.theorem_id], r) for r in reports))
    elif len(reports) > 1:
        bad = [r.theorem_id for r in reports if not r.ok]
        out.write(f"{len(reports) - len(bad)}/{len(reports)} tables reproduced"
                  + (f"; differing: {', '.join(bad)}" if bad else "") + "\n")
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


COMMANDS = {"axioms": cmd_axioms, "lie": cmd_lie, "ext": cmd_ext, "sweep": cmd_sweep, "reproduce": cmd_reproduce}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(ns)
        return COMMANDS[ns.command](ns, cfg, out)
    except UsageError as exc:
        print(f"confext: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FieldMismatchError as exc:
        print(f"confext: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"confext: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except Exception as exc:  # internal failure, keep the exit code contract
        print(f"confext: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
