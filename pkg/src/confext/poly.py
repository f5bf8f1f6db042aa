"""Multivariate polynomials over exact scalars in the variables ∂, λ, μ, ν.

Exponents are dense 4-tuples ``(∂, λ, μ, ν)``.  Text form uses the ASCII
letters ``d l m n``; the unicode names are accepted on input as well.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .scalar import Scalar, components, make, render_scalar, to_field

VARS = ("d", "l", "m", "n")
NVARS = 4
_VAR_INDEX = {"d": 0, "l": 1, "m": 2, "n": 3, "∂": 0, "λ": 1, "μ": 2, "ν": 3}
ZERO_EXP = (0, 0, 0, 0)


def var_index(v) -> int:
    if isinstance(v, int):
        if 0 <= v < NVARS:
            return v
    elif v in _VAR_INDEX:
        return _VAR_INDEX[v]
    raise KeyError(f"unknown variable {v!r}; expected one of d, l, m, n")


def _unit(i: int, k: int = 1) -> tuple:
    e = [0, 0, 0, 0]
    e[i] = k
    return tuple(e)


def glex_key(e):
    """Sort key; ``sorted(..., key=glex_key, reverse=True)`` is graded-lex with ∂>λ>μ>ν."""
    return (e[0] + e[1] + e[2] + e[3], e)


class MPoly:
    """Immutable sparse polynomial ``{exponent tuple: nonzero coefficient}``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            terms = dict(terms)
        self.terms = {e: c for e, c in terms.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> MPoly:
        # caller guarantees there are no zero coefficients
        p = object.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, c) -> MPoly:
        c = to_field(c)
        return cls._raw({ZERO_EXP: c} if c != 0 else {})

    @classmethod
    def var(cls, v, power: int = 1) -> MPoly:
        return cls._raw({_unit(var_index(v), power): Fraction(1)})

    @classmethod
    def monomial(cls, exps, c=1) -> MPoly:
        exps = tuple(exps) + (0,) * (NVARS - len(exps))
        return cls({exps: to_field(c)})

    @classmethod
    def coerce(cls, x) -> MPoly:
        if isinstance(x, MPoly):
            return x
        if isinstance(x, str):
            return parse_poly(x)
        return cls.const(x)

    # basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, v) -> int:
        i = var_index(v)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def variables(self) -> set:
        used = set()
        for e in self.terms:
            for i in range(NVARS):
                if e[i]:
                    used.add(VARS[i])
        return used

    def sorted_terms(self):
        """Terms in graded-lex order, largest first."""
        return sorted(self.terms.items(), key=lambda t: glex_key(t[0]), reverse=True)

    def leading_term(self):
        if not self.terms:
            return None
        return max(self.terms.items(), key=lambda t: glex_key(t[0]))

    def coeff(self, exps):
        exps = tuple(exps) + (0,) * (NVARS - len(exps))
        return self.terms.get(exps, Fraction(0))

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def constant_term(self):
        return self.terms.get(ZERO_EXP, Fraction(0))

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, MPoly):
            try:
                other = MPoly.const(other)
            except TypeError:
                return NotImplemented
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for e, c in small.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s == 0:
                    del out[e]
                else:
                    out[e] = s
        return MPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MPoly):
            try:
                other = MPoly.const(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> MPoly:
        if c == 0:
            return MPoly._raw({})
        if c == 1:
            return self
        return MPoly._raw({e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            if isinstance(other, (int, Fraction, Scalar)):
                return self.scale(other)
            return NotImplemented
        a, b = self.terms, other.terms
        if not a or not b:
            return MPoly._raw({})
        out = {}
        get = out.get
        for e, c in a.items():
            e0, e1, e2, e3 = e
            for f, k in b.items():
                g = (e0 + f[0], e1 + f[1], e2 + f[2], e3 + f[3])
                s = get(g)
                out[g] = c * k if s is None else s + c * k
        return MPoly({g: c for g, c in out.items() if c != 0})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = MPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, c):
        if isinstance(c, MPoly):
            if c.total_degree() != 0:
                return NotImplemented
            c = c.constant_term()
        if c == 0:
            raise ZeroDivisionError("polynomial division by zero scalar")
        return self.scale(1 / to_field(c))

    # substitution -----------------------------------------------------
    def substitute(self, v, expr) -> MPoly:
        """Replace variable ``v`` by the polynomial ``expr``."""
        return self.subs({v: expr})

    def subs(self, mapping: dict) -> MPoly:
        """Simultaneous substitution ``{variable: polynomial}``."""
        if not mapping:
            return self
        idx = {}
        for v, ex in mapping.items():
            idx[var_index(v)] = MPoly.coerce(ex)
        powers = {i: [MPoly.const(1)] for i in idx}

        def power(i, k):
            cache = powers[i]
            while len(cache) <= k:
                cache.append(cache[-1] * idx[i])
            return cache[k]

        out = MPoly._raw({})
        grouped = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in sorted(idx))
            rest = tuple(0 if i in idx else e[i] for i in range(NVARS))
            grouped.setdefault(key, {})[rest] = c
        order = sorted(idx)
        for key, rest_terms in grouped.items():
            factor = MPoly._raw(rest_terms)
            for i, k in zip(order, key):
                if k:
                    factor = factor * power(i, k)
            out = out + factor
        return out

    def evaluate(self, v, value) -> MPoly:
        return self.subs({v: MPoly.const(value)})

    def shift(self, v, offset) -> MPoly:
        """``p(v + offset)`` for a polynomial or scalar offset."""
        return self.subs({v: MPoly.var(v) + MPoly.coerce(offset)})

    def map_coefficients(self, fn) -> MPoly:
        return MPoly({e: fn(c) for e, c in self.terms.items()})

    # coefficient extraction -------------------------------------------
    def coeff_extract(self, vs) -> dict:
        """Group by the exponents of ``vs``.

        Returns ``{exponents over vs (in the given order): MPoly in the
        remaining variables}``.
        """
        ids = [var_index(v) for v in vs]
        out: dict = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in ids)
            rest = list(e)
            for i in ids:
                rest[i] = 0
            out.setdefault(key, {})[tuple(rest)] = c
        return {k: MPoly._raw(t) for k, t in out.items()}

    @staticmethod
    def flatten(extracted: dict, vs) -> MPoly:
        """Inverse of :meth:`coeff_extract`."""
        ids = [var_index(v) for v in vs]
        out = MPoly._raw({})
        for key, p in extracted.items():
            e = [0, 0, 0, 0]
            for i, k in zip(ids, key):
                e[i] = k
            out = out + p * MPoly._raw({tuple(e): Fraction(1)})
        return out

    # comparison / hashing ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, Scalar)):
            return self.terms == MPoly.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"MPoly({render_poly(self)!r})"

    def __str__(self):
        return render_poly(self)


# ----------------------------------------------------------------------
# text rendering and parsing

def _render_monomial(e) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(VARS[i])
        elif k > 1:
            parts.append(f"{VARS[i]}^{k}")
    return "*".join(parts)


def display_sign(c) -> int:
    """Sign of the first nonzero component (rational part first)."""
    a, b, _ = components(c)
    return 1 if (a > 0 or (a == 0 and b > 0)) else -1


def render_poly(p: MPoly) -> str:
    """Canonical text in graded-lex order, e.g. ``2*d*l^2 + l^3``."""
    if not p.terms:
        return "0"
    out = []
    for n, (e, c) in enumerate(p.sorted_terms()):
        s = display_sign(c)
        mag = c if s > 0 else -c
        mono = _render_monomial(e)
        if not mono:
            body = render_scalar(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{render_scalar(mag)}*{mono}"
        if n == 0:
            out.append(body if s > 0 else f"-{body}")
        else:
            out.append(f"{'+' if s > 0 else '-'} {body}")
    return " ".join(out)


class PolyParseError(ValueError):
    def __init__(self, msg, text, pos):
        super().__init__(f"{msg} at column {pos + 1} in {text!r}")
        self.text = text
        self.pos = pos


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<quad>\d+(?:/\d+)?[+-]\d+(?:/\d+)?(?:√|r)\d+)
  | (?P<sqrt>(?:√|r)\d+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<var>[dlmn∂λμν])
  | (?P<ident>[A-Z][A-Za-z0-9_]*)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise PolyParseError("unexpected character", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), pos))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, params):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.params = params or {}

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg):
        raise PolyParseError(msg, self.text, self.peek()[2])

    def expr(self):
        kind, val, _ = self.peek()
        neg = False
        if kind == "op" and val in "+-":
            self.take()
            neg = val == "-"
        acc = self.term()
        if neg:
            acc = -acc
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def _starts_factor(self):
        kind, val, _ = self.peek()
        return kind in ("quad", "sqrt", "num", "var", "ident") or (kind == "op" and val == "(")

    def term(self):
        acc = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.factor()
            elif self._starts_factor():
                acc = acc * self.factor()
            else:
                return acc

    def factor(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, _ = self.peek()
            if kind != "num" or "/" in val:
                self.fail("expected a nonnegative integer exponent")
            self.take()
            base = base ** int(val)
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "quad":
            self.take()
            from .scalar import parse_scalar
            return MPoly.const(parse_scalar(val))
        if kind == "sqrt":
            self.take()
            return MPoly.const(make(0, 1, int(val.lstrip("√r"))))
        if kind == "num":
            self.take()
            return MPoly.const(Fraction(val))
        if kind == "var":
            self.take()
            return MPoly.var(val)
        if kind == "ident":
            self.take()
            if val not in self.params:
                raise PolyParseError(f"unknown parameter {val!r}", self.text, pos)
            return MPoly.coerce(self.params[val])
        if kind == "op" and val == "(":
            self.take()
            inner = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return inner
        self.fail("expected a number, variable or '('")


def parse_poly(text: str, params: dict | None = None) -> MPoly:
    """Parse a polynomial expression.

    Accepts the canonical rendered form plus parentheses, implicit
    multiplication (``2l``, ``(d+l)d``) and named parameters such as
    ``DBAR`` supplied through ``params``.
    """
    p = _Parser(text, params)
    result = p.expr()
    if p.peek()[0] != "end":
        p.fail("unexpected trailing input")
    return result


# convenient constants
D = MPoly.var("d")
L = MPoly.var("l")
M = MPoly.var("m")
N = MPoly.var("n")
ONE = MPoly.const(1)
ZERO = MPoly()


def poly_arith(p: MPoly, q: MPoly, op: str) -> MPoly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation {op!r}")
