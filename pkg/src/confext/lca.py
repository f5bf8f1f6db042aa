"""Lie conformal algebras given by a λ-bracket table on free generators.

A table entry ``(X, Y) -> [(c, W), ...]`` means ``[X_λ Y] = Σ c(∂, λ) W``.
Only one orientation of a pair needs to be stored; the other one is
derived from skew-symmetry ``[X_λ Y] = -[Y_{-λ-∂} X]``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .poly import D, L, M, MPoly, PolyParseError, _tokenize, parse_poly, render_poly

BUILTIN_NAMES = ("vir", "hv", "sv", "esv")


class LcaError(ValueError):
    pass


class LcaParseError(LcaError):
    def __init__(self, msg, source="<string>", lineno=None):
        where = f"{source}:{lineno}" if lineno is not None else source
        super().__init__(f"{where}: {msg}")
        self.source = source
        self.lineno = lineno


class ConfElement:
    """A ℂ[∂]-linear combination ``Σ p_W W`` (coefficients may also carry λ, μ)."""

    __slots__ = ("components",)

    def __init__(self, components=None):
        comps = {}
        for g, p in (components or {}).items():
            p = MPoly.coerce(p)
            if p:
                comps[g] = p
        self.components = comps

    @classmethod
    def gen(cls, name, coeff=1):
        return cls({name: MPoly.coerce(coeff)})

    def __add__(self, other):
        out = dict(self.components)
        for g, p in other.components.items():
            out[g] = out[g] + p if g in out else p
        return ConfElement(out)

    def __neg__(self):
        return ConfElement({g: -p for g, p in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, p) -> ConfElement:
        p = MPoly.coerce(p)
        return ConfElement({g: q * p for g, q in self.components.items()})

    def map(self, fn) -> ConfElement:
        return ConfElement({g: fn(p) for g, p in self.components.items()})

    def is_zero(self):
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        if not isinstance(other, ConfElement):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(frozenset(self.components.items()))

    def __repr__(self):
        return f"ConfElement({str(self)!r})"

    def __str__(self):
        if not self.components:
            return "0"
        return " + ".join(f"({render_poly(p)}) {g}" for g, p in self.components.items())


@dataclass(frozen=True)
class LcaSpec:
    name: str
    generators: tuple
    bracket: dict = field(hash=False, compare=True)

    def __post_init__(self):
        gens = set(self.generators)
        if len(gens) != len(self.generators):
            raise LcaError(f"duplicate generator in {self.generators}")
        for (x, y), entries in self.bracket.items():
            for g in (x, y):
                if g not in gens:
                    raise LcaError(f"bracket ({x},{y}) references undeclared generator {g!r}")
            for coeff, target in entries:
                if target not in gens:
                    raise LcaError(f"bracket ({x},{y}) targets undeclared generator {target!r}")
                bad = coeff.variables() - {"d", "l"}
                if bad:
                    raise LcaError(f"bracket ({x},{y}) coefficient uses {sorted(bad)}; only d, l allowed")

    def has(self, name) -> bool:
        return name in self.generators

    def _require(self, *names):
        for g in names:
            if g not in self.generators:
                raise LcaError(f"generator {g!r} is not declared in algebra {self.name!r}")

    def stored(self, x, y):
        return (x, y) in self.bracket

    def bracket_of(self, x, y) -> ConfElement:
        """``[x_λ y]`` for generators, as a ConfElement over {∂, λ}."""
        self._require(x, y)
        if (x, y) in self.bracket:
            return _entries_to_element(self.bracket[(x, y)])
        if (y, x) in self.bracket:
            # [x_λ y] = -[y_{-λ-∂} x]
            flipped = _entries_to_element(self.bracket[(y, x)])
            return -flipped.map(lambda p: p.substitute("l", -L - D))
        return ConfElement()


def _entries_to_element(entries) -> ConfElement:
    out = ConfElement()
    for coeff, target in entries:
        out = out + ConfElement.gen(target, coeff)
    return out


def bracket_eval(A: LcaSpec, x: ConfElement, y: ConfElement, var=None) -> ConfElement:
    """``[x_var y]`` extended from the table by conformal sesquilinearity.

    A ∂-coefficient ``p(∂)`` of ``x`` becomes ``p(-var)`` and one of ``y``
    becomes ``p(∂+var)``.  ``var`` defaults to λ and may be any polynomial
    (for instance ``λ+μ``); other variables in the coefficients ride along.
    """
    var = L if var is None else MPoly.coerce(var)
    out = ConfElement()
    for a, p in x.components.items():
        p_left = p.substitute("d", -var)
        for b, q in y.components.items():
            q_right = q.substitute("d", D + var)
            pre = p_left * q_right
            for w, c in A.bracket_of(a, b).components.items():
                out = out + ConfElement.gen(w, pre * c.substitute("l", var))
    return out


@dataclass
class AxiomReport:
    axiom: str
    violations: list  # (generator tuple, residual ConfElement)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def lines(self):
        if self.ok:
            yield f"{self.axiom}: ok"
        for gens, residual in self.violations:
            yield f"{self.axiom} violated at ({', '.join(gens)}): residual {residual}"


def check_skew_symmetry(A: LcaSpec) -> AxiomReport:
    """Residuals ``[a_λ b] + [b_{-λ-∂} a]`` over all ordered generator pairs.

    Stored entries are used as written, so a table that stores both
    orientations inconsistently is caught.
    """
    violations = []
    for a, b in itertools.product(A.generators, repeat=2):
        ab = _stored_or_derived(A, a, b)
        ba = _stored_or_derived(A, b, a).map(lambda p: p.substitute("l", -L - D))
        residual = ab + ba
        if residual:
            violations.append(((a, b), residual))
    return AxiomReport("skew-symmetry", violations)


def _stored_or_derived(A, a, b):
    return A.bracket_of(a, b)


def jacobi_residual(A: LcaSpec, a, b, c) -> ConfElement:
    """``[a_λ[b_μ c]] - [[a_λ b]_{λ+μ} c] - [b_μ[a_λ c]]`` over {∂, λ, μ}."""
    ea, eb, ec = (ConfElement.gen(g) for g in (a, b, c))
    first = bracket_eval(A, ea, bracket_eval(A, eb, ec, M), L)
    second = bracket_eval(A, bracket_eval(A, ea, eb, L), ec, L + M)
    third = bracket_eval(A, eb, bracket_eval(A, ea, ec, L), M)
    return first - second - third


def check_jacobi(A: LcaSpec) -> AxiomReport:
    violations = []
    for a, b, c in itertools.product(A.generators, repeat=3):
        residual = jacobi_residual(A, a, b, c)
        if residual:
            violations.append(((a, b, c), residual))
    return AxiomReport("jacobi", violations)


# ----------------------------------------------------------------------
# spec files

_HEADER_RE = re.compile(r"^algebra\s+([A-Za-z_][A-Za-z0-9_\-]*)$")
_GENS_RE = re.compile(r"^generators\s*:\s*(.*)$")
_BRACKET_RE = re.compile(r"^bracket\s+([A-Z][A-Za-z0-9_]*)\s+([A-Z][A-Za-z0-9_]*)\s*=\s*(.+)$")


def _parse_combination(text, gens, source, lineno):
    """Parse ``(d + 2l) L + 3 M`` into [(coeff, generator), ...]."""
    if text.strip() == "0":
        return []
    try:
        toks = _tokenize(text)
    except PolyParseError as exc:
        raise LcaParseError(str(exc), source, lineno) from None
    chunks = []
    depth = 0
    start = 0
    for i, (kind, val, pos) in enumerate(toks):
        if kind == "op" and val == "(":
            depth += 1
        elif kind == "op" and val == ")":
            depth -= 1
        elif kind == "op" and val in "+-" and depth == 0 and i > start:
            chunks.append((start, i))
            start = i
        elif kind == "end":
            chunks.append((start, i))
    entries = []
    for lo, hi in chunks:
        part = toks[lo:hi]
        negate = False
        if part and part[0][0] == "op" and part[0][1] in "+-":
            negate = part[0][1] == "-"
            part = part[1:]
        if not part or part[-1][0] != "ident":
            raise LcaParseError(f"each summand must end with a generator name: {text!r}", source, lineno)
        gen = part[-1][1]
        if gen not in gens:
            raise LcaParseError(f"undeclared generator {gen!r}", source, lineno)
        coeff_toks = part[:-1]
        if coeff_toks and coeff_toks[-1] == ("op", "*", coeff_toks[-1][2]):
            coeff_toks = coeff_toks[:-1]
        if coeff_toks:
            ctext = text[coeff_toks[0][2]:part[-1][2]].rstrip().rstrip("*")
            try:
                coeff = parse_poly(ctext)
            except PolyParseError as exc:
                raise LcaParseError(str(exc), source, lineno) from None
        else:
            coeff = MPoly.const(1)
        if negate:
            coeff = -coeff
        bad = coeff.variables() - {"d", "l"}
        if bad:
            raise LcaParseError(f"coefficient may only use d and l, found {sorted(bad)}", source, lineno)
        entries.append((coeff, gen))
    return entries


def parse_lca(text: str, source: str = "<string>") -> LcaSpec:
    name = None
    gens = None
    table = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if name is None:
            m = _HEADER_RE.match(line)
            if not m:
                raise LcaParseError("expected 'algebra <name>' header", source, lineno)
            name = m.group(1)
            continue
        m = _GENS_RE.match(line)
        if m:
            if gens is not None:
                raise LcaParseError("duplicate generators line", source, lineno)
            gens = tuple(m.group(1).split())
            if not gens:
                raise LcaParseError("empty generator list", source, lineno)
            continue
        m = _BRACKET_RE.match(line)
        if m:
            if gens is None:
                raise LcaParseError("bracket before generators line", source, lineno)
            x, y, rhs = m.groups()
            for g in (x, y):
                if g not in gens:
                    raise LcaParseError(f"undeclared generator {g!r}", source, lineno)
            if (x, y) in table:
                raise LcaParseError(f"duplicate bracket {x} {y}", source, lineno)
            table[(x, y)] = _parse_combination(rhs, gens, source, lineno)
            continue
        raise LcaParseError(f"cannot parse line {line!r}", source, lineno)
    if name is None:
        raise LcaParseError("empty algebra file", source)
    if gens is None:
        raise LcaParseError("missing generators line", source)
    return LcaSpec(name, gens, table)


def render_lca(A: LcaSpec) -> str:
    lines = [f"algebra {A.name}", f"generators: {' '.join(A.generators)}"]
    for (x, y), entries in A.bracket.items():
        if not entries:
            rhs = "0"
        else:
            parts = []
            for coeff, target in entries:
                if coeff.total_degree() == 0 and len(coeff.terms) == 1:
                    c = render_poly(coeff)
                    parts.append(target if c == "1" else f"{c} {target}")
                else:
                    parts.append(f"({render_poly(coeff)}) {target}")
            rhs = " + ".join(parts)
        lines.append(f"bracket {x} {y} = {rhs}")
    return "\n".join(lines) + "\n"


def load_lca(path) -> LcaSpec:
    path = Path(path)
    return parse_lca(path.read_text(encoding="utf-8"), source=str(path))


def builtin_spec_text(name: str) -> str:
    if name not in BUILTIN_NAMES:
        raise LcaError(f"unknown built-in algebra {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    return resources.files("confext").joinpath("data", "algebras", f"{name}.lca").read_text(encoding="utf-8")


def _table(*rows):
    return {(x, y): [(parse_poly(c), w) for c, w in entries] for x, y, entries in rows}


def builtin_algebra(name: str) -> LcaSpec:
    """Virasoro, Heisenberg-Virasoro, Schrödinger-Virasoro and its extension."""
    vir = [("L", "L", [("d + 2l", "L")])]
    sv = vir + [
        ("L", "Y", [("d + 3/2l", "Y")]),
        ("L", "M", [("d + l", "M")]),
        ("Y", "Y", [("d + 2l", "M")]),
    ]
    if name == "vir":
        return LcaSpec("vir", ("L",), _table(*vir))
    if name == "sv":
        return LcaSpec("sv", ("L", "M", "Y"), _table(*sv))
    if name == "esv":
        esv = sv + [
            ("L", "N", [("d + l", "N")]),
            ("N", "M", [("2", "M")]),
            ("N", "Y", [("1", "Y")]),
        ]
        return LcaSpec("esv", ("L", "M", "Y", "N"), _table(*esv))
    if name == "hv":
        hv = vir + [
            ("L", "N", [("d + l", "N")]),
            ("N", "L", [("l", "N")]),
            ("N", "N", []),
        ]
        return LcaSpec("hv", ("L", "N"), _table(*hv))
    raise LcaError(f"unknown built-in algebra {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


def resolve_algebra(ref: str) -> LcaSpec:
    """A built-in name or a path to a spec file."""
    if ref in BUILTIN_NAMES:
        return builtin_algebra(ref)
    return load_lca(ref)
