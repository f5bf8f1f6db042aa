"""Parameter sweeps and comparison against golden classification tables.

A golden table is a text file::

    theorem thm-2.8
    algebra vir
    type 1
    grid alpha=0,7/3 shift=0,5 delta=-6..6:1/2
    let gamma = shift - alpha
    when alpha+gamma=0, delta=1 expect dim=1 case (i) reps f=l^2

``grid`` lines are cross products, ``point`` lines single points; ``let``
fills a parameter from a linear expression when it is not already set.
Rows not matching a point expect dimension 0.  In representatives, ``d``
stands for ∂ + α and uppercase names (DBAR, BETA, ...) are the point's
parameter values.
"""
from __future__ import annotations

import itertools
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import linalg
from .ext import DEFAULT_DEGREE_CAP, ExtProblem, ExtResult, solve_ext
from .lca import LcaSpec, builtin_algebra, resolve_algebra
from .modules import rank1, rank1_irreducible, trivial
from .poly import D, MPoly, parse_poly
from .scalar import Field, discriminant, parse_scalar, render_scalar

PARAMS = ("alpha", "delta", "beta", "gamma", "abar", "dbar", "bbar")
EXT_TYPES = {1: "trivial sub, rank-one quot", 2: "rank-one sub, trivial quot", 3: "rank-one sub and quot"}


class GoldenError(ValueError):
    pass


# ----------------------------------------------------------------------
# values, linear expressions and predicates

_NAME = r"[a-z][a-z0-9_]*"
_TERM_RE = re.compile(rf"^(?:(\d+(?:/\d+)?)\s*\*?\s*)?({_NAME})?$")


def parse_values(text: str) -> list:
    """``-6..6:1/2``, ``0,5`` or mixtures; a range includes both endpoints."""
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        if ".." in item:
            body, _, step = item.partition(":")
            lo, _, hi = body.partition("..")
            lo, hi = parse_scalar(lo), parse_scalar(hi)
            step = parse_scalar(step) if step else Fraction(1)
            if step <= 0:
                raise ValueError(f"range step must be positive in {item!r}")
            x = lo
            while x <= hi:
                out.append(x)
                x = x + step
        else:
            out.append(parse_scalar(item))
    return out


def parse_linear(text: str) -> dict:
    """``delta - 1/2*bbar + 3`` -> {'delta': 1, 'bbar': -1/2, '': 3}."""
    text = text.replace(" ", "")
    if not text:
        raise ValueError("empty expression")
    if text[0] not in "+-":
        text = "+" + text
    out = {}
    for sign, body in re.findall(r"([+-])([^+-]+)", text):
        m = _TERM_RE.match(body)
        if not m or not (m.group(1) or m.group(2)) or body.endswith("*"):
            raise ValueError(f"cannot parse term {body!r} in linear expression")
        try:
            coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        except ZeroDivisionError:
            raise ValueError(f"zero denominator in {body!r}") from None
        if sign == "-":
            coeff = -coeff
        name = m.group(2) or ""
        out[name] = out.get(name, 0) + coeff
    if "".join(sign + body for sign, body in re.findall(r"([+-])([^+-]+)", text)) != text:
        raise ValueError(f"cannot parse linear expression {text!r}")
    return out


def eval_linear(expr: dict, point: dict):
    total = Fraction(0)
    for name, c in expr.items():
        total = total + (c if name == "" else c * point[name])
    return total


@dataclass(frozen=True)
class Atom:
    expr: tuple  # sorted (name, coeff) items
    op: str  # "=" or "!="
    value: object
    text: str

    def holds(self, point) -> bool:
        expr = dict(self.expr)
        if any(n and n not in point for n in expr):
            return False
        equal = eval_linear(expr, point) == self.value
        return equal if self.op == "=" else not equal

    @property
    def pins_single_parameter(self):
        names = [n for n, _ in self.expr if n]
        return self.op == "=" and len(names) == 1 and names[0] in ("delta", "dbar")


def parse_predicate(text: str) -> tuple:
    atoms = []
    for part in filter(None, (s.strip() for s in text.split(","))):
        m = re.fullmatch(r"(.+?)\s*(!=|=)\s*(.+)", part)
        if not m:
            raise ValueError(f"predicate atom must look like 'expr=value', got {part!r}")
        lhs, op, rhs = m.groups()
        atoms.append(Atom(tuple(sorted(parse_linear(lhs).items())), op, parse_scalar(rhs), part))
    return tuple(atoms)


# ----------------------------------------------------------------------
# grids

@dataclass
class SweepGrid:
    """Cross-product blocks and single points, plus derived parameters."""

    blocks: list = field(default_factory=list)  # list of dict name -> list of values
    lets: list = field(default_factory=list)  # (name, linear expr dict)

    def add_block(self, values: dict):
        self.blocks.append(dict(values))

    def points(self, A: LcaSpec | None = None, ext_type: int | None = None, field: Field | None = None):
        """Deterministic list of parameter points.

        Points outside ``field`` and points where a rank-one module is
        reducible are dropped.
        """
        seen = set()
        out = []
        for block in self.blocks:
            names = list(block)
            for combo in itertools.product(*(block[n] for n in names)):
                point = dict(zip(names, combo))
                for name, expr in self.lets:
                    if name not in point and all(n == "" or n in point for n in expr):
                        point[name] = eval_linear(expr, point)
                if field is not None and not all(field.contains(v) for v in point.values()):
                    continue
                if A is not None and ext_type is not None and not point_admissible(A, ext_type, point):
                    continue
                key = tuple(sorted((k, render_scalar(v)) for k, v in point.items()))
                if key in seen:
                    continue
                seen.add(key)
                out.append(point)
        return out

    @property
    def quadratic_discriminants(self):
        ds = set()
        for block in self.blocks:
            for vals in block.values():
                ds.update(discriminant(v) for v in vals if discriminant(v))
        return ds


def parse_grid_spec(text: str) -> dict:
    """``delta=-6..6:1/2 dbar=1,2`` (whitespace or ';' separated) -> values per name."""
    out = {}
    for item in filter(None, re.split(r"[\s;]+", text.strip())):
        name, sep, vals = item.partition("=")
        if not sep or not re.fullmatch(_NAME, name):
            raise ValueError(f"grid item must look like name=values, got {item!r}")
        values = parse_values(vals)
        if not values:
            raise ValueError(f"grid item {item!r} has no values")
        out[name] = values
    return out


def _modules_for(A: LcaSpec, ext_type: int, point: dict):
    g = point.get
    has_n = "N" in A.generators
    beta = g("beta", 0) if has_n else 0
    bbar = g("bbar", 0) if has_n else 0
    if ext_type == 1:
        return trivial(A, g("gamma", 0)), rank1(A, g("alpha", 0), g("delta", 0), beta)
    if ext_type == 2:
        return rank1(A, g("alpha", 0), g("delta", 0), beta), trivial(A, g("gamma", 0))
    if ext_type == 3:
        return rank1(A, g("abar", 0), g("dbar", 0), bbar), rank1(A, g("alpha", 0), g("delta", 0), beta)
    raise ValueError(f"extension type must be 1, 2 or 3, got {ext_type}")


def point_admissible(A: LcaSpec, ext_type: int, point: dict) -> bool:
    sub, quot = _modules_for(A, ext_type, point)
    return all(rank1_irreducible(A, V).irreducible for V in (sub, quot) if V.kind == "rank1")


def problem_for_point(A: LcaSpec, ext_type: int, point: dict, degree_cap: int) -> ExtProblem:
    sub, quot = _modules_for(A, ext_type, point)
    return ExtProblem(A, sub, quot, degree_cap)


def render_point(point: dict) -> str:
    return ", ".join(f"{k}={render_scalar(v)}" for k, v in point.items())


# ----------------------------------------------------------------------
# sweeps

@dataclass
class SweepEntry:
    point: dict
    result: ExtResult | None
    error: str | None = None

    @property
    def ext_dim(self):
        return None if self.result is None else self.result.ext_dim


def _solve_point(args):
    A, ext_type, point, cap = args
    try:
        return SweepEntry(point, solve_ext(problem_for_point(A, ext_type, point, cap)))
    except (ValueError, ArithmeticError) as exc:
        return SweepEntry(point, None, f"{type(exc).__name__}: {exc}")


def resolve_jobs(jobs) -> int:
    if jobs in (None, "auto"):
        return os.cpu_count() or 1
    jobs = int(jobs)
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    return jobs


def run_sweep(A: LcaSpec, ext_type: int, grid, degree_cap: int = DEFAULT_DEGREE_CAP,
              jobs=1, field: Field | None = None) -> list:
    """One solve per grid point, in grid order; per-point failures are recorded."""
    points = grid.points(A, ext_type, field) if isinstance(grid, SweepGrid) else list(grid)
    if not points:
        raise ValueError("sweep grid is empty")
    tasks = [(A, ext_type, p, degree_cap) for p in points]
    n = resolve_jobs(jobs)
    if n == 1 or len(tasks) < 8:
        return [_solve_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_solve_point, tasks, chunksize=max(1, len(tasks) // (4 * n))))


# ----------------------------------------------------------------------
# golden tables

@dataclass
class GoldenRow:
    atoms: tuple
    dim: int
    label: str
    reps: list  # list of dict unknown -> polynomial text
    text: str
    lineno: int

    def matches(self, point) -> bool:
        return all(a.holds(point) for a in self.atoms)

    @property
    def sporadic(self) -> bool:
        return any(a.pins_single_parameter for a in self.atoms)


@dataclass
class GoldenTable:
    theorem_id: str
    algebra: str
    ext_type: int
    grid: SweepGrid
    rows: list
    source: str = ""
    title: str = ""
    default_expected: int = 0

    def expected(self, point):
        hits = [r for r in self.rows if r.matches(point)]
        if len(hits) > 1:
            raise GoldenError(
                f"{self.theorem_id}: rows at lines {[r.lineno for r in hits]} overlap at {render_point(point)}")
        return hits[0] if hits else None


_WHEN_RE = re.compile(
    r"^when\s+(?P<pred>.*?)\s+expect\s+dim=(?P<dim>\d+)"
    r"(?:\s+case\s+(?P<label>\S+))?(?:\s+reps\s+(?P<reps>.+))?$")


def _parse_reps(text: str) -> list:
    reps = []
    for chunk in text.split("|"):
        rep = {}
        for part in filter(None, (s.strip() for s in chunk.split(";"))):
            name, sep, poly = part.partition("=")
            if not sep:
                raise ValueError(f"representative component must look like name=poly, got {part!r}")
            rep[name.strip()] = poly.strip()
        if rep:
            reps.append(rep)
    return reps


def parse_golden(text: str, source: str = "<string>") -> GoldenTable:
    header = {}
    grid = SweepGrid()
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        try:
            key, _, rest = line.partition(" ")
            rest = rest.strip()
            if key in ("theorem", "algebra", "type", "title"):
                header[key] = rest
            elif key in ("grid", "point"):
                block = parse_grid_spec(rest)
                if key == "point" and any(len(v) != 1 for v in block.values()):
                    raise ValueError("point lines take single values")
                grid.add_block(block)
            elif key == "let":
                name, sep, expr = rest.partition("=")
                if not sep:
                    raise ValueError("let lines look like 'let name = expr'")
                grid.lets.append((name.strip(), parse_linear(expr)))
            elif key == "when":
                m = _WHEN_RE.match(line)
                if not m:
                    raise ValueError("when lines look like 'when <predicate> expect dim=N [case X] [reps ...]'")
                rows.append(GoldenRow(parse_predicate(m["pred"]), int(m["dim"]), m["label"] or "",
                                      _parse_reps(m["reps"]) if m["reps"] else [], line, lineno))
            else:
                raise ValueError(f"unknown directive {key!r}")
        except ValueError as exc:
            raise GoldenError(f"{where}: {exc}") from None
    for key in ("theorem", "algebra", "type"):
        if key not in header:
            raise GoldenError(f"{source}: missing '{key}' line")
    if not grid.blocks:
        raise GoldenError(f"{source}: no grid")
    return GoldenTable(header["theorem"], header["algebra"], int(header["type"]), grid, rows,
                       source, header.get("title", ""))


def _golden_dir():
    return resources.files("confext").joinpath("data", "golden")


def registry() -> dict:
    """theorem id -> GoldenTable, in file-name order."""
    out = {}
    for entry in sorted(_golden_dir().iterdir(), key=lambda p: _id_sort_key(p.name)):
        if entry.name.endswith(".golden"):
            table = parse_golden(entry.read_text(encoding="utf-8"), source=entry.name)
            out[table.theorem_id] = table
    return out


def _id_sort_key(name):
    kind, _, num = name.removesuffix(".golden").partition("-")
    return (kind != "thm", [int(x) for x in num.split(".") if x.isdigit()])


def load_golden(ref) -> GoldenTable:
    reg = registry()
    if ref in reg:
        return reg[ref]
    path = Path(ref)
    if path.exists():
        return parse_golden(path.read_text(encoding="utf-8"), source=str(path))
    raise KeyError(f"unknown theorem id {ref!r}; registered: {', '.join(reg)}")


# ----------------------------------------------------------------------
# comparison

@dataclass
class Discrepancy:
    point: dict
    expected: int
    got: int | None
    message: str

    def __str__(self):
        got = "error" if self.got is None else self.got
        return f"[{render_point(self.point)}] expected dim {self.expected}, got {got}: {self.message}"


@dataclass
class DiffReport:
    theorem_id: str
    points: int
    discrepancies: list
    skipped: int = 0
    field_label: str = ""
    nonzero: list = field(default_factory=list)  # (point, dim, case label, sporadic)

    @property
    def ok(self):
        return not self.discrepancies

    def __bool__(self):
        return self.ok

    def lines(self):
        status = "reproduced" if self.ok else f"{len(self.discrepancies)} discrepancies"
        extra = f", {self.skipped} points outside field {self.field_label}" if self.skipped else ""
        yield f"{self.theorem_id}: {status} ({self.points} points{extra})"
        for d in self.discrepancies:
            yield f"  {d}"


def _rep_assignment(rep: dict, point: dict, result: ExtResult) -> dict:
    params = {k.upper(): v for k, v in point.items()}
    alpha = point.get("alpha", 0)
    out = {}
    for name, text in rep.items():
        if name not in result.layout.names:
            raise GoldenError(f"unknown unknown {name!r}; layout has {result.layout.names}")
        poly = parse_poly(text, params)
        out[name] = poly.substitute("d", D + alpha) if alpha else poly
    return out


def _check_reps(row: GoldenRow, point, result: ExtResult):
    """None when every expected representative is a nontrivial cocycle and they are independent."""
    vecs = []
    for rep in row.reps:
        assignment = _rep_assignment(rep, point, result)
        vec = result.layout.from_assignment(assignment, strict=False)
        if vec is None:
            return f"representative {rep} exceeds the degree cap"
        if not linalg.in_span(vec, result.cocycle_basis):
            return f"representative {rep} is not a cocycle"
        vecs.append(vec)
    if vecs:
        base = linalg.rank(result.coboundary_basis)
        if linalg.rank(result.coboundary_basis + vecs) - base != len(vecs):
            return "representatives are not independent modulo coboundaries"
    return None


def check_against_golden(results: list, table: GoldenTable) -> DiffReport:
    discrepancies = []
    nonzero = []
    for entry in results:
        row = table.expected(entry.point)
        want = row.dim if row else table.default_expected
        if entry.result is None:
            discrepancies.append(Discrepancy(entry.point, want, None, entry.error or "solve failed"))
            continue
        got = entry.result.ext_dim
        if got != want:
            discrepancies.append(Discrepancy(entry.point, want, got, f"case {row.label}" if row else "no listed case"))
            continue
        if row and row.reps:
            problem = _check_reps(row, entry.point, entry.result)
            if problem:
                discrepancies.append(Discrepancy(entry.point, want, got, problem))
        if got:
            nonzero.append((entry.point, got, row.label if row else "", bool(row and row.sporadic)))
    return DiffReport(table.theorem_id, len(results), discrepancies, nonzero=nonzero)


def reproduce_theorem(theorem_id: str, degree_cap: int = DEFAULT_DEGREE_CAP,
                      field: Field | None = None, jobs=1) -> DiffReport:
    """Sweep the theorem's canonical grid and diff against its table.

    With ``field=None`` every grid point is used, including quadratic ones.
    """
    table = load_golden(theorem_id)
    A = builtin_algebra(table.algebra) if table.algebra in ("vir", "hv", "sv", "esv") else resolve_algebra(table.algebra)
    all_points = table.grid.points(A, table.ext_type, None)
    points = table.grid.points(A, table.ext_type, field)
    results = run_sweep(A, table.ext_type, points, degree_cap, jobs=jobs)
    report = check_against_golden(results, table)
    report.skipped = len(all_points) - len(points)
    report.field_label = str(field) if field is not None else "auto"
    return report


def annotate(A: LcaSpec, ext_type: int, results: list) -> list:
    """(entry, case label, sporadic flag) using any registered table of the same algebra and type."""
    tables = [t for t in registry().values() if t.algebra == A.name and t.ext_type == ext_type]
    out = []
    for entry in results:
        label, sporadic = "", False
        for t in tables:
            try:
                row = t.expected(entry.point)
            except GoldenError:
                row = None
            if row is not None:
                label, sporadic = f"{t.theorem_id} {row.label}".strip(), row.sporadic
                break
        out.append((entry, label, sporadic))
    return out
