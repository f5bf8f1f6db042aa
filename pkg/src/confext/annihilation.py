"""j-products and the annihilation Lie algebra of a Lie conformal algebra.

Modes are written in the shifted convention: a generator of conformal
weight w has ``X_m = X_(m + w - 1)``, so ``L_m = L_(m+1)`` and
``Y_p = Y_(p+1/2)`` while ``M_n = M_(n)`` and ``N_n = N_(n)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .lca import ConfElement, LcaSpec
from .poly import MPoly, render_poly

DERIV = "∂"


def jproducts(A: LcaSpec) -> dict:
    """``(X, Y) -> {j: ConfElement}`` with ``[X_λ Y] = Σ_j (X_(j) Y) λ^j / j!``."""
    out = {}
    for x, y in itertools.product(A.generators, repeat=2):
        table = {}
        for w, c in A.bracket_of(x, y).components.items():
            for j, part in c.coeff_extract("l").items():
                j = j[0]
                prod = part.scale(math.factorial(j))
                table.setdefault(j, ConfElement())
                table[j] = table[j] + ConfElement.gen(w, prod)
        out[(x, y)] = {j: e for j, e in sorted(table.items()) if e}
    return out


def mode_shifts(A: LcaSpec) -> dict:
    """``w - 1`` per generator, read off ``[L_λ X] = (∂ + wλ) X``; 0 when unknown."""
    shifts = {g: Fraction(0) for g in A.generators}
    if "L" not in A.generators:
        return shifts
    from .poly import D, L
    if A.bracket_of("L", "L") != ConfElement.gen("L", D + 2 * L):
        return shifts
    for g in A.generators:
        comps = A.bracket_of("L", g).components
        if set(comps) != {g}:
            continue
        c = comps[g]
        if c.coeff((1, 0, 0, 0)) == 1 and set(c.terms) <= {(1, 0, 0, 0), (0, 1, 0, 0)}:
            shifts[g] = Fraction(c.coeff((0, 1, 0, 0))) - 1
    return shifts


def _falling(x, k):
    out = 1
    for i in range(k):
        out *= x - i
    return out


def _binom(x, j):
    return Fraction(_falling(x, j), math.factorial(j))


class AnnihElement:
    """Finite combination of modes ``(generator, m)`` and optionally ∂."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def mode(cls, gen, m, c=1):
        return cls({(gen, Fraction(m)): c})

    @classmethod
    def deriv(cls, c=1):
        return cls({DERIV: c})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return AnnihElement(out)

    def __neg__(self):
        return AnnihElement({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return AnnihElement({k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, AnnihElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in self.terms.items():
            name = DERIV if k == DERIV else f"{k[0]}_{{{k[1]}}}"
            parts.append(f"{v}*{name}")
        return " + ".join(parts)


class AnnihilationAlgebra:
    """Brackets of ``Lie(R)`` (mode=\"full\") or ``Lie(R)+`` (mode=\"plus\").

    ``extended`` adds ∂ acting by ``[∂, a_(n)] = -n a_(n-1)``.
    """

    def __init__(self, A: LcaSpec, mode="plus", extended=True):
        if mode not in ("plus", "full"):
            raise ValueError(f"mode must be 'plus' or 'full', got {mode!r}")
        self.A = A
        self.mode = mode
        self.extended = extended
        self.jp = jproducts(A)
        self.shift = mode_shifts(A)
        self._cache = {}

    def floor(self, gen):
        return -self.shift[gen]

    def _check(self, key):
        if key == DERIV:
            if not self.extended:
                raise ValueError("∂ is only available in the extended annihilation algebra")
            return
        gen, m = key
        if gen not in self.shift:
            raise ValueError(f"unknown generator {gen!r}")
        n = m + self.shift[gen]
        if n.denominator != 1:
            raise ValueError(f"mode {m} of {gen} is off the index lattice")
        if self.mode == "plus" and n < 0:
            raise ValueError(f"mode {gen}_{m} lies below the Lie(R)+ floor {self.floor(gen)}")

    def _modes_of(self, elem: ConfElement, n: int) -> AnnihElement:
        """``(p(∂) W)_(n)`` using ``(∂a)_(n) = -n a_(n-1)``."""
        out = {}
        for w, p in elem.components.items():
            for (k, *_), c in p.terms.items():
                coeff = c * (-1) ** k * _falling(n, k)
                if coeff != 0:
                    key = (w, Fraction(n - k) - self.shift[w])
                    out[key] = out.get(key, 0) + coeff
        return AnnihElement(out)

    def basis_bracket(self, k1, k2) -> AnnihElement:
        key = (k1, k2)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self._check(k1)
        self._check(k2)
        if k1 == DERIV and k2 == DERIV:
            res = AnnihElement()
        elif k1 == DERIV:
            gen, m = k2
            n = m + self.shift[gen]
            res = AnnihElement({(gen, m - 1): -n})
        elif k2 == DERIV:
            res = -self.basis_bracket(k2, k1)
        else:
            (x, m1), (y, m2) = k1, k2
            a = int(m1 + self.shift[x])
            b = int(m2 + self.shift[y])
            res = AnnihElement()
            for j, prod in self.jp[(x, y)].items():
                c = _binom(a, j)
                if c:
                    res = res + self._modes_of(prod, a + b - j).scale(c)
        self._cache[key] = res
        return res

    def bracket(self, x: AnnihElement, y: AnnihElement) -> AnnihElement:
        out = AnnihElement()
        for k1, c1 in x.terms.items():
            for k2, c2 in y.terms.items():
                out = out + self.basis_bracket(k1, k2).scale(c1 * c2)
        return out

    def basis(self, max_index):
        out = []
        for g in self.A.generators:
            m = self.floor(g) if self.mode == "plus" else self.floor(g) - max_index - 1
            while m <= max_index:
                out.append(AnnihElement.mode(g, m))
                m += 1
        if self.extended:
            out.append(AnnihElement.deriv())
        return out


def annih_bracket(A: LcaSpec, x: AnnihElement, y: AnnihElement, mode="plus") -> AnnihElement:
    return AnnihilationAlgebra(A, mode=mode).bracket(x, y)


@dataclass
class LieReport:
    checked_elements: int
    antisymmetry: list
    jacobi: list
    center: list | None  # None when the algebra has no Virasoro element

    @property
    def ok(self):
        return not self.antisymmetry and not self.jacobi and not self.center

    def lines(self):
        yield f"basis elements checked: {self.checked_elements}"
        yield "antisymmetry: " + ("ok" if not self.antisymmetry else f"{len(self.antisymmetry)} violations")
        for pair in self.antisymmetry[:10]:
            yield f"  antisymmetry fails for {pair}"
        yield "jacobi: " + ("ok" if not self.jacobi else f"{len(self.jacobi)} violations")
        for triple in self.jacobi[:10]:
            yield f"  jacobi fails for {triple}"
        if self.center is None:
            yield "center L_{-1} - ∂: not applicable"
        else:
            yield "center L_{-1} - ∂: " + ("ok" if not self.center else f"fails against {self.center[:10]}")


def _label(e: AnnihElement):
    (k,) = e.terms
    return DERIV if k == DERIV else f"{k[0]}_{k[1]}"


def verify_annih_lie(A: LcaSpec, max_index: int = 6, mode="plus") -> LieReport:
    alg = AnnihilationAlgebra(A, mode=mode, extended=True)
    basis = alg.basis(max_index)
    anti = []
    for x, y in itertools.combinations_with_replacement(basis, 2):
        if alg.bracket(x, y) + alg.bracket(y, x):
            anti.append((_label(x), _label(y)))
    jac = []
    for x, y, z in itertools.combinations_with_replacement(basis, 3):
        s = (alg.bracket(x, alg.bracket(y, z)) + alg.bracket(y, alg.bracket(z, x))
             + alg.bracket(z, alg.bracket(x, y)))
        if s:
            jac.append((_label(x), _label(y), _label(z)))
    center = None
    if "L" in A.generators and alg.shift["L"] == 1:
        c = AnnihElement.mode("L", -1) - AnnihElement.deriv()
        center = [_label(x) for x in basis if alg.bracket(c, x)]
    return LieReport(len(basis), anti, jac, center)


# ----------------------------------------------------------------------
# symbolic relations for display

def _index_letters(shift_x, shift_y):
    half_x = Fraction(shift_x).denominator == 2
    half_y = Fraction(shift_y).denominator == 2
    first = "p" if half_x else "m"
    if half_y:
        second = "q" if half_x else "p"
    else:
        second = "n"
    return first, second


def _poly_falling(p: MPoly, k):
    out = MPoly.const(1)
    for i in range(k):
        out = out * (p - i)
    return out


def _render_relation_coeff(c: MPoly, letters):
    text = render_poly(c).translate(str.maketrans({"m": letters[0], "n": letters[1]}))
    if len(c.terms) == 1:
        if text == "1":
            return ""
        if text == "-1":
            return "-"
        return text + " "
    return f"({text}) "


def _render_index(letters, offset):
    base = "+".join(l for l in letters if l)
    if offset > 0:
        return f"{base}+{offset}"
    if offset < 0:
        return f"{base}-{-offset}"
    return base


def symbolic_relations(A: LcaSpec):
    """Mode-bracket relations like ``[L_m, L_n] = (m - n) L_{m+n}``, one per nonzero pair."""
    jp = jproducts(A)
    shift = mode_shifts(A)
    from .poly import M as MV, N as NV
    gens = A.generators
    pairs = []
    for i, x in enumerate(gens):
        for y in gens[i:]:
            if A.stored(y, x) and not A.stored(x, y):
                pairs.append((y, x))
            else:
                pairs.append((x, y))
    lines = []
    for x, y in pairs:
        a = MV + shift[x]
        b = NV + shift[y]
        groups = {}
        for j, prod in jp[(x, y)].items():
            binom = _poly_falling(a, j) / math.factorial(j)
            for w, p in prod.components.items():
                for (k, *_), c in p.terms.items():
                    coeff = binom * _poly_falling(a + b - j, k) * (c * (-1) ** k)
                    offset = shift[x] + shift[y] - j - k - shift[w]
                    key = (w, offset)
                    groups[key] = groups.get(key, MPoly()) + coeff
        letters = _index_letters(shift[x], shift[y])
        rhs = []
        for (w, offset), coeff in groups.items():
            if coeff:
                rhs.append(f"{_render_relation_coeff(coeff, letters)}{w}_{{{_render_index(letters, offset)}}}")
        if rhs:
            lines.append(f"[{x}_{letters[0]}, {y}_{letters[1]}] = {' + '.join(rhs)}")
    for x in gens:
        letters = _index_letters(shift[x], 0)
        coeff = -(MV + shift[x])
        lines.append(f"[∂, {x}_{letters[0]}] = {_render_relation_coeff(coeff, letters)}{x}_{{{_render_index((letters[0],), -1)}}}")
    return lines
