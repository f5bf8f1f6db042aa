"""Extensions of rank-one and trivial conformal modules as exact linear problems.

An extension ``0 -> V -> E -> W -> 0`` is encoded by one unknown polynomial
per generator X, written ``φ_X``, giving the V-component of ``X_λ w``, plus
``a(∂)`` when W is trivial (the V-component of ``∂c``).  Requiring that E
be a module yields linear equations on the coefficients of those unknowns.
Cocycles are their solutions, coboundaries come from changing the splitting,
and Ext is the quotient.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import linalg
from .lca import LcaSpec
from .modules import RANK1, TRIVIAL, ModuleSpec, rank1, shifted, trivial
from .poly import D, L, M, MPoly, glex_key, render_poly

DEFAULT_DEGREE_CAP = 9
UNKNOWN_NAMES = {"L": "f", "M": "g", "Y": "h", "N": "k"}
_NAME_ORDER = "fghk"


class UnsupportedExtension(ValueError):
    pass


@dataclass(frozen=True)
class ExtProblem:
    algebra: LcaSpec
    sub: ModuleSpec
    quot: ModuleSpec
    degree_cap: int = DEFAULT_DEGREE_CAP

    def __post_init__(self):
        if not isinstance(self.degree_cap, int) or self.degree_cap < 0:
            raise ValueError(f"degree cap must be a nonnegative integer, got {self.degree_cap!r}")
        if self.sub.kind == TRIVIAL and self.quot.kind == TRIVIAL:
            raise UnsupportedExtension("extensions of a trivial module by a trivial module are not supported")

    @property
    def ext_type(self) -> int:
        """1: trivial sub, rank-one quot; 2: rank-one sub, trivial quot; 3: both rank one."""
        if self.sub.kind == TRIVIAL:
            return 1
        return 2 if self.quot.kind == TRIVIAL else 3

    def with_cap(self, cap: int) -> ExtProblem:
        return ExtProblem(self.algebra, self.sub, self.quot, cap)

    def describe(self) -> dict:
        return {"algebra": self.algebra.name, "sub": self.sub.literal(), "quot": self.quot.literal()}


def unknown_name(gen: str) -> str:
    return UNKNOWN_NAMES.get(gen, f"phi_{gen}")


class UnknownLayout:
    """Flat coordinates: one per monomial coefficient of each unknown.

    Unknowns are ordered f, g, h, k (then any others), then a; inside an
    unknown monomials run in descending graded-lex order.
    """

    def __init__(self, P: ExtProblem):
        cap = P.degree_cap
        gens = list(P.algebra.generators)
        gens.sort(key=lambda g: (_NAME_ORDER.index(unknown_name(g)) if unknown_name(g) in _NAME_ORDER else 4,
                                 P.algebra.generators.index(g)))
        self.generators = gens
        if P.sub.kind == TRIVIAL:
            monos = [(0, j, 0, 0) for j in range(cap, -1, -1)]
        else:
            monos = sorted(((i, t - i, 0, 0) for t in range(cap + 1) for i in range(t + 1)),
                           key=glex_key, reverse=True)
        self.unknowns = [(unknown_name(g), g) for g in gens]
        self.coords = [(unknown_name(g), e) for g in gens for e in monos]
        if P.quot.kind == TRIVIAL:
            self.unknowns.append(("a", None))
            self.coords += [("a", (i, 0, 0, 0)) for i in range(cap, -1, -1)]
        self.index = {c: i for i, c in enumerate(self.coords)}
        self.names = [n for n, _ in self.unknowns]

    def __len__(self):
        return len(self.coords)

    def to_assignment(self, vec) -> dict:
        out = {n: {} for n in self.names}
        for (name, e), x in zip(self.coords, vec):
            if x:
                out[name][e] = x
        return {n: MPoly(t) for n, t in out.items()}

    def from_assignment(self, assignment: dict, strict=True):
        """Dense coordinates of an assignment; None when it leaves the layout (strict=False)."""
        vec = [Fraction(0)] * len(self.coords)
        for name, p in assignment.items():
            for e, c in MPoly.coerce(p).terms.items():
                i = self.index.get((name, e))
                if i is None:
                    if strict:
                        raise ValueError(f"monomial {e} of {name} lies outside the layout")
                    return None
                vec[i] = c
        return vec


@dataclass
class LinearSystem:
    layout: UnknownLayout
    rows: list  # tuples of (coordinate, coefficient), sorted
    labels: list  # (constraint label, monomial exponents) per row

    def residuals(self, vec):
        return [sum((c * vec[i] for i, c in row), Fraction(0)) for row in self.rows]

    def satisfied_by(self, vec) -> bool:
        if all(isinstance(x, (int, Fraction)) for x in vec):
            den = 1
            for x in vec:
                if x:
                    den = math.lcm(den, Fraction(x).denominator)
            vec = [x.numerator * (den // x.denominator) if type(x) is Fraction else x * den for x in vec]
        acc = {}
        for i, x in enumerate(vec):
            if x:
                for r, c in self._columns().get(i, ()):
                    acc[r] = acc.get(r, 0) + c * x
        return not any(acc.values())

    def _columns(self):
        cols = self.__dict__.get("_cols")
        if cols is None:
            cols = {}
            for r, row in enumerate(self.rows):
                for i, c in row:
                    cols.setdefault(i, []).append((r, c))
            self.__dict__["_cols"] = cols
        return cols


@lru_cache(maxsize=None)
def _mono_images(e):
    """``m(∂+λ, μ)``, ``m(∂+μ, λ)``, ``m(∂, μ)``, ``m(∂, λ+μ)`` for m = ∂^i λ^j."""
    m = MPoly.monomial(e)
    return (
        m.subs({"d": D + L, "l": M}),
        m.subs({"d": D + M}),
        m.substitute("l", M),
        m.substitute("l", L + M),
    )


def _build_table(P: ExtProblem, layout: UnknownLayout) -> dict:
    """``(constraint id, monomial) -> {coordinate: coefficient}`` by direct expansion."""
    A = P.algebra
    sub_triv = P.sub.kind == TRIVIAL
    quot_triv = P.quot.kind == TRIVIAL
    gens = A.generators
    zero = MPoly()
    # known actions: A_X on the quotient generator, B_X on the submodule generator
    act_q = {g: (zero if quot_triv else P.quot.act(g)) for g in gens}
    act_s = {g: (zero if sub_triv else P.sub.act(g)) for g in gens}
    aq_shift_l = {g: p.subs({"d": D + L, "l": M}) for g, p in act_q.items()}  # A_Z(∂+λ, μ)
    aq_shift_m = {g: p.substitute("d", D + M) for g, p in act_q.items()}  # A_X(∂+μ, λ)
    bs_mu = {g: p.substitute("l", M) for g, p in act_s.items()}  # B_Z(∂, μ)
    # structure constants evaluated at ∂ -> -λ-μ, grouped by target generator
    into = {g: [] for g in gens}
    for x, z in itertools.product(gens, repeat=2):
        for w, c in A.bracket_of(x, z).components.items():
            into[w].append(((x, z), c.substitute("d", -L - M)))
    pair_id = {pz: n for n, pz in enumerate(itertools.product(gens, repeat=2))}
    compat_id = {g: len(pair_id) + n for n, g in enumerate(gens)}
    gamma_s = MPoly.const(P.sub.p["gamma"]) if sub_triv else None
    gamma_q = P.quot.p["gamma"] if quot_triv else None

    table = {}

    def scatter(cid, poly, coord):
        if sub_triv:
            poly = poly.substitute("d", gamma_s)
        for e, c in poly.terms.items():
            bucket = table.setdefault((cid, e), {})
            v = bucket.get(coord, 0) + c
            if v:
                bucket[coord] = v
            else:
                bucket.pop(coord, None)

    for (name, e), coord in layout.index.items():
        if name == "a":
            shifted_a = (D + L) ** e[0]
            for x in gens:
                if act_s[x]:
                    scatter(compat_id[x], -(act_s[x] * shifted_a), coord)
            continue
        g = next(gen for n, gen in layout.unknowns if n == name)
        m = MPoly.monomial(e)
        m_dl_mu, m_dmu_l, m_mu, m_lmu = _mono_images(e)
        for z in gens:
            # pair (g, z): A_Z(∂+λ,μ) φ_g(∂,λ) - B_Z(∂,μ) φ_g(∂+μ,λ)
            poly = aq_shift_l[z] * m - bs_mu[z] * m_dmu_l
            if poly:
                scatter(pair_id[(g, z)], poly, coord)
        for x in gens:
            # pair (x, g): B_X(∂,λ) φ_g(∂+λ,μ) - A_X(∂+μ,λ) φ_g(∂,μ)
            poly = act_s[x] * m_dl_mu - aq_shift_m[x] * m_mu
            if poly:
                scatter(pair_id[(x, g)], poly, coord)
        for pz, c in into[g]:
            scatter(pair_id[pz], -(c * m_lmu), coord)
        if quot_triv:
            # (∂ + λ - γ) φ_g(∂, λ)
            scatter(compat_id[g], (D + L - gamma_q) * m, coord)
    return table


def _constraint_label(A: LcaSpec, cid: int) -> str:
    return _label_for(tuple(A.generators), cid)


@lru_cache(maxsize=None)
def _label_for(gens, cid):
    pairs = list(itertools.product(gens, repeat=2))
    if cid < len(pairs):
        return f"pair({pairs[cid][0]},{pairs[cid][1]})"
    return f"compat({gens[cid - len(pairs)]})"


def _system_from_table(P, layout, table) -> LinearSystem:
    rows, labels = [], []
    for cid, e in sorted(table, key=lambda k: (k[0], glex_key(k[1]))):
        bucket = table[(cid, e)]
        if bucket:
            rows.append(tuple(sorted(bucket.items())))
            labels.append((_constraint_label(P.algebra, cid), e))
    return LinearSystem(layout, rows, labels)


def build_constraints_direct(P: ExtProblem) -> LinearSystem:
    """Expand every residual polynomial for this exact parameter point."""
    layout = UnknownLayout(P)
    return _system_from_table(P, layout, _build_table(P, layout))


def _param_names(V: ModuleSpec):
    return [k for k, _ in V.params]


def _standard_family(A: LcaSpec, V: ModuleSpec) -> bool:
    ref = _with_params(A, V, dict(V.params))
    return V == ref and V.action == ref.action


def _with_params(A, V, values):
    if V.kind == TRIVIAL:
        return trivial(A, values["gamma"])
    return rank1(A, values["alpha"], values["delta"], values.get("beta", 0))


@lru_cache(maxsize=64)
def _template(fingerprint, A: LcaSpec, sub_kind, sub_names, quot_kind, quot_names, cap):
    """Constraint rows as affine functions of the module parameters.

    Every coefficient is affine in (α, Δ, β, γ) of either module, so the rows
    at zero parameters plus one unit-parameter probe per parameter determine
    them everywhere.
    """
    def probe(sub_vals, quot_vals):
        sub = _with_params(A, ModuleSpec(sub_kind, (), ()), sub_vals)
        quot = _with_params(A, ModuleSpec(quot_kind, (), ()), quot_vals)
        P = ExtProblem(A, sub, quot, cap)
        return _build_table(P, UnknownLayout(P))

    zero_sub = dict.fromkeys(sub_names, 0)
    zero_quot = dict.fromkeys(quot_names, 0)
    base = probe(zero_sub, zero_quot)
    probes = []
    for name in sub_names:
        probes.append(probe({**zero_sub, name: 1}, zero_quot))
    for name in quot_names:
        probes.append(probe(zero_sub, {**zero_quot, name: 1}))
    keys = set(base)
    for t in probes:
        keys.update(t)
    rows = []
    for key in sorted(keys, key=lambda k: (k[0], glex_key(k[1]))):
        b = base.get(key, {})
        entries = {}
        coords = set(b)
        for t in probes:
            coords.update(t.get(key, {}))
        for coord in sorted(coords):
            c0 = b.get(coord, 0)
            slopes = tuple((i, t.get(key, {}).get(coord, 0) - c0) for i, t in enumerate(probes))
            entries[coord] = (c0, tuple((i, s) for i, s in slopes if s))
        rows.append((key, _integer_row(entries)))
    return rows


def _integer_row(entries: dict):
    """Scale one template row so every base value and slope is an integer.

    Rows are homogeneous, so a common positive factor does not change them.
    Returns None when some coefficient is irrational.
    """
    den = 1
    for c0, slopes in entries.values():
        for x in (c0, *(s for _, s in slopes)):
            if not isinstance(x, (int, Fraction)):
                return tuple((coord, c0, sl) for coord, (c0, sl) in entries.items()), None
            den = math.lcm(den, Fraction(x).denominator)
    ints = tuple((coord, int(c0 * den), tuple((i, int(s * den)) for i, s in sl))
                 for coord, (c0, sl) in entries.items())
    return tuple((coord, c0, sl) for coord, (c0, sl) in entries.items()), ints


def build_constraints(P: ExtProblem) -> LinearSystem:
    """All cocycle equations, one row per monomial coefficient of each residual."""
    A = P.algebra
    if not (_standard_family(A, P.sub) and _standard_family(A, P.quot)):
        return build_constraints_direct(P)
    sub_names, quot_names = _param_names(P.sub), _param_names(P.quot)
    values = [v for _, v in P.sub.params] + [v for _, v in P.quot.params]
    template = _template(_fingerprint(A), A, P.sub.kind, tuple(sub_names),
                         P.quot.kind, tuple(quot_names), P.degree_cap)
    layout = UnknownLayout(P)
    rows, labels = [], []
    scale = 1
    rational = all(isinstance(v, Fraction) for v in values)
    if rational:
        for v in values:
            scale = math.lcm(scale, v.denominator)
        ivalues = [int(v * scale) for v in values]
    for (cid, e), (entries, ints) in template:
        row = []
        if ints is not None and rational:
            # integer path: the row is scaled by ``scale`` times the template factor
            for coord, c, slopes in ints:
                c = c * scale
                for i, s in slopes:
                    c += s * ivalues[i]
                if c:
                    row.append((coord, c))
        else:
            for coord, c, slopes in entries:
                for i, s in slopes:
                    v = values[i]
                    if v:
                        c = c + s * v
                if c:
                    row.append((coord, c))
        if row:
            rows.append(tuple(row))
            labels.append((cid, e))
    labels = [(_constraint_label(A, cid), e) for cid, e in labels]
    return LinearSystem(layout, rows, labels)


def _fingerprint(A: LcaSpec) -> str:
    from .lca import render_lca
    return render_lca(A)


def solve_nullspace(S: LinearSystem) -> list:
    """Reduced row echelon basis of the solution space, as dense vectors."""
    basis = linalg.nullspace([dict(r) for r in S.rows], len(S.layout))
    return linalg.row_space_basis(basis, len(S.layout))


def _coboundary_images(P: ExtProblem) -> list:
    """Unknown assignments swept out by changing the splitting."""
    A = P.algebra
    gens = A.generators
    if P.sub.kind == TRIVIAL:
        gamma = MPoly.const(P.sub.p["gamma"])
        img = {unknown_name(g): P.quot.act(g).substitute("d", gamma) for g in gens}
        return [img]
    images = []
    for p in range(P.degree_cap + 2):
        phi = D ** p
        phi_shift = (D + L) ** p
        img = {}
        for g in gens:
            val = P.sub.act(g) * phi_shift
            if P.quot.kind == RANK1:
                val = val - P.quot.act(g) * phi
            img[unknown_name(g)] = val
        if P.quot.kind == TRIVIAL:
            img["a"] = (D - P.quot.p["gamma"]) * phi
        images.append(img)
    return images


def coboundary_space(P: ExtProblem, system: LinearSystem | None = None) -> list:
    """Basis (RREF) of coboundaries whose unknowns all have degree at most the cap."""
    layout = system.layout if system is not None else UnknownLayout(P)
    cap = P.degree_cap
    images = _coboundary_images(P)
    # split each image into in-layout coordinates and over-cap monomials
    high_index = {}
    low_vecs, high_rows = [], []
    for img in images:
        low = [Fraction(0)] * len(layout)
        high = {}
        for name, poly in img.items():
            for e, c in poly.terms.items():
                i = layout.index.get((name, e))
                if i is not None:
                    low[i] = c
                else:
                    if sum(e) <= cap:
                        raise AssertionError(f"coboundary monomial {e} of {name} missing from layout")
                    key = high_index.setdefault((name, e), len(high_index))
                    high[key] = c
        low_vecs.append(low)
        high_rows.append(high)
    # combinations of images whose over-cap parts cancel
    ncomb = len(images)
    columns = {}
    for j, high in enumerate(high_rows):
        for key, c in high.items():
            columns.setdefault(key, {})[j] = c
    combos = linalg.nullspace(list(columns.values()), ncomb)
    vecs = []
    for combo in combos:
        v = [Fraction(0)] * len(layout)
        for j, w in enumerate(combo):
            if w:
                for i, x in enumerate(low_vecs[j]):
                    if x:
                        v[i] += w * x
        vecs.append(v)
    basis = linalg.row_space_basis(vecs, len(layout))
    if system is None:
        system = build_constraints(P)
    for v in basis:
        if not system.satisfied_by(v):
            raise AssertionError(f"coboundary fails the cocycle equations for {P.describe()}")
    return basis


@dataclass
class ExtResult:
    problem: ExtProblem
    degree_cap: int
    layout: UnknownLayout = field(repr=False)
    cocycle_basis: list = field(repr=False)
    coboundary_basis: list = field(repr=False)
    nontrivial_vectors: list = field(repr=False)

    @property
    def ext_dim(self) -> int:
        return len(self.cocycle_basis) - len(self.coboundary_basis)

    @property
    def cocycle_dim(self):
        return len(self.cocycle_basis)

    @property
    def coboundary_dim(self):
        return len(self.coboundary_basis)

    @property
    def nontrivial_reps(self) -> list:
        return [self.layout.to_assignment(v) for v in self.nontrivial_vectors]

    def cocycle_assignments(self):
        return [self.layout.to_assignment(v) for v in self.cocycle_basis]

    def coboundary_assignments(self):
        return [self.layout.to_assignment(v) for v in self.coboundary_basis]

    def to_dict(self) -> dict:
        return {
            "problem": self.problem.describe(),
            "degree_cap": self.degree_cap,
            "cocycle_dim": self.cocycle_dim,
            "coboundary_dim": self.coboundary_dim,
            "ext_dim": self.ext_dim,
            "representatives": [
                {name: render_poly(p) for name, p in rep.items()} for rep in self.nontrivial_reps
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    def contains_modulo_coboundaries(self, assignment: dict) -> bool:
        """Whether ``assignment`` is a cocycle (up to the cap) of this problem."""
        vec = self.layout.from_assignment(assignment, strict=False)
        if vec is None:
            return False
        return linalg.in_span(vec, self.cocycle_basis)

    def is_nontrivial(self, assignment: dict) -> bool:
        """A cocycle that is not a coboundary."""
        vec = self.layout.from_assignment(assignment, strict=False)
        if vec is None or not linalg.in_span(vec, self.cocycle_basis):
            return False
        return not linalg.in_span(vec, self.coboundary_basis)


def solve_ext(P: ExtProblem) -> ExtResult:
    system = build_constraints(P)
    cocycles = solve_nullspace(system)
    coboundaries = coboundary_space(P, system)
    reps = linalg.reduce_modulo(cocycles, coboundaries, len(system.layout))
    result = ExtResult(P, P.degree_cap, system.layout, cocycles, coboundaries, reps)
    if len(reps) != result.ext_dim:
        raise AssertionError("coboundaries are not contained in the cocycle space")
    return result


def alpha_shift_check(P: ExtProblem, offset) -> bool:
    """ext_dim is unchanged when ∂ is traded for ∂ + offset on both sides."""
    A = P.algebra
    Q = ExtProblem(A, shifted(A, P.sub, offset), shifted(A, P.quot, offset), P.degree_cap)
    return solve_ext(P).ext_dim == solve_ext(Q).ext_dim


def problem_from_literals(A: LcaSpec, sub: str, quot: str, degree_cap=DEFAULT_DEGREE_CAP) -> ExtProblem:
    from .modules import parse_module_literal
    return ExtProblem(A, parse_module_literal(sub, A), parse_module_literal(quot, A), degree_cap)
