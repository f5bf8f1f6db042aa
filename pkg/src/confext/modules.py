"""Rank-one free and one-dimensional trivial conformal modules.

A rank-one module ``ℂ[∂]v`` is described by action polynomials
``X_λ v = A_X(∂, λ) v``.  The family used throughout has
``L_λ v = (∂ + α + Δλ) v``, ``N_λ v = β v`` and every other generator
acting by zero.  The trivial module ``ℂc`` has ``∂c = γc`` and zero action.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .lca import ConfElement, LcaSpec
from .poly import D, L, M, MPoly
from .scalar import render_scalar, to_field

RANK1 = "rank1"
TRIVIAL = "trivial1d"


@dataclass(frozen=True)
class ModuleSpec:
    kind: str
    params: tuple  # sorted (name, value) pairs
    action: tuple = field(compare=False)  # (generator, MPoly) pairs

    @property
    def p(self) -> dict:
        return dict(self.params)

    def act(self, gen) -> MPoly:
        return dict(self.action).get(gen, MPoly())

    @property
    def is_trivial(self):
        return self.kind == TRIVIAL

    def literal(self) -> str:
        if self.kind == TRIVIAL:
            return f"trivial:gamma={render_scalar(self.p['gamma'])}"
        body = ",".join(f"{k}={render_scalar(v)}" for k, v in self.params)
        return f"rank1:{body}"

    def __str__(self):
        return self.literal()


def rank1(A: LcaSpec, alpha=0, delta=0, beta=0) -> ModuleSpec:
    alpha, delta, beta = to_field(alpha), to_field(delta), to_field(beta)
    action = []
    for g in A.generators:
        if g == "L":
            action.append((g, D + alpha + delta * L))
        elif g == "N":
            action.append((g, MPoly.const(beta)))
        else:
            action.append((g, MPoly()))
    params = [("alpha", alpha), ("delta", delta)]
    if "N" in A.generators:
        params.append(("beta", beta))
    elif beta != 0:
        raise ValueError(f"algebra {A.name} has no N generator, so beta must be 0")
    return ModuleSpec(RANK1, tuple(sorted(params)), tuple(action))


def trivial(A: LcaSpec, gamma=0) -> ModuleSpec:
    gamma = to_field(gamma)
    return ModuleSpec(TRIVIAL, (("gamma", gamma),), tuple((g, MPoly()) for g in A.generators))


def shifted(A: LcaSpec, V: ModuleSpec, offset) -> ModuleSpec:
    """Shift α by ``offset`` (γ by ``-offset``), the substitution ∂ -> ∂ - offset."""
    p = V.p
    if V.kind == TRIVIAL:
        return trivial(A, p["gamma"] - offset)
    return rank1(A, p["alpha"] + offset, p["delta"], p.get("beta", 0))


@dataclass
class ModuleReport:
    violations: list  # (label, residual MPoly)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def lines(self):
        if self.ok:
            yield "module axioms: ok"
        from .poly import render_poly
        for label, res in self.violations:
            yield f"module axiom violated at {label}: residual {render_poly(res)}"


def pair_residual(A: LcaSpec, V: ModuleSpec, x, z) -> MPoly:
    """``X_λ(Z_μ v) - Z_μ(X_λ v) - [X_λ Z]_{λ+μ} v`` for a rank-one module."""
    ax, az = V.act(x), V.act(z)
    res = az.subs({"d": D + L, "l": M}) * ax - ax.subs({"d": D + M}) * az.substitute("l", M)
    for w, c in A.bracket_of(x, z).components.items():
        res = res - c.substitute("d", -L - M) * V.act(w).substitute("l", L + M)
    return res


def check_module(A: LcaSpec, V: ModuleSpec) -> ModuleReport:
    violations = []
    if V.kind == TRIVIAL:
        gamma = V.p["gamma"]
        for g in A.generators:
            # X_λ ∂c = (∂+λ) X_λ c forces λ·A_X(γ, λ) = 0
            res = L * V.act(g).substitute("d", MPoly.const(gamma))
            if res:
                violations.append((g, res))
        return ModuleReport(violations)
    for x, z in itertools.product(A.generators, repeat=2):
        res = pair_residual(A, V, x, z)
        if res:
            violations.append((f"({x}, {z})", res))
    return ModuleReport(violations)


@dataclass
class Irreducibility:
    irreducible: bool
    witness: MPoly | None  # generator of a proper submodule when reducible

    def __bool__(self):
        return self.irreducible


def submodule_closed(V: ModuleSpec, gen_poly: MPoly, A: LcaSpec) -> bool:
    """Whether ``gen_poly(∂)·ℂ[∂]v`` is stable when ``gen_poly = ∂ + c``.

    ``X_λ((∂+c)p v) = (∂+λ+c) p(∂+λ) A_X(∂,λ) v`` lies in ``(∂+c)ℂ[∂]v``
    for every p exactly when ``λ·A_X(-c, λ)`` vanishes.
    """
    if gen_poly.total_degree() != 1 or gen_poly.coeff((1, 0, 0, 0)) != 1:
        raise ValueError("expected a monic linear polynomial in d")
    c = gen_poly.constant_term()
    return all(not (L * V.act(g).substitute("d", MPoly.const(-c))) for g in A.generators)


def rank1_irreducible(A: LcaSpec, V: ModuleSpec) -> Irreducibility:
    """Δ ≠ 0 (or (Δ, β) ≠ (0, 0) when N is present); otherwise ``(∂+α)v`` spans a submodule."""
    if V.kind != RANK1:
        raise ValueError("irreducibility criterion applies to rank-one modules")
    p = V.p
    nonzero = p["delta"] != 0 or p.get("beta", 0) != 0
    if nonzero:
        return Irreducibility(True, None)
    witness = D + p["alpha"]
    if not submodule_closed(V, witness, A):
        raise AssertionError("reducibility witness failed to span a submodule")
    return Irreducibility(False, witness)


_LITERAL_RE = re.compile(r"^\s*(rank1|trivial)\s*:\s*(.*?)\s*$")


def parse_module_literal(text: str, A: LcaSpec) -> ModuleSpec:
    """``rank1:alpha=0,beta=0,delta=3`` or ``trivial:gamma=-1``."""
    m = _LITERAL_RE.match(text)
    if not m:
        raise ValueError(f"module literal must look like 'rank1:alpha=..,delta=..' or 'trivial:gamma=..', got {text!r}")
    kind, body = m.groups()
    values = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        if "=" not in item:
            raise ValueError(f"expected name=value in module literal, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        if k in values:
            raise ValueError(f"duplicate parameter {k!r}")
        values[k] = to_field(v)
    if kind == "trivial":
        extra = set(values) - {"gamma"}
        if extra:
            raise ValueError(f"trivial module takes only gamma, got {sorted(extra)}")
        return trivial(A, values.get("gamma", 0))
    extra = set(values) - {"alpha", "beta", "delta"}
    if extra:
        raise ValueError(f"rank1 module takes alpha, beta, delta; got {sorted(extra)}")
    return rank1(A, values.get("alpha", 0), values.get("delta", 0), values.get("beta", 0))
