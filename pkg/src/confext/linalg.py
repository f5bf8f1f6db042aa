"""Exact sparse nullspace computation over ℚ or ℚ(√d).

Rows are dicts ``column -> nonzero scalar``.  Elimination is incremental:
each incoming row is reduced against the pivots found so far and, if
anything survives, becomes a new pivot normalized to leading coefficient 1.
Column order is the caller's coordinate order, so results are deterministic.
"""
from __future__ import annotations

import math
from fractions import Fraction


def _normalize(row: dict, col):
    if row[col] == 1:
        return row
    lead = row[col]
    inv = Fraction(1, lead) if type(lead) is int else 1 / lead
    return {c: v * inv for c, v in row.items()}


class Echelon:
    """Incremental row echelon form; ``pivots[col]`` is a row with leading 1 at col."""

    def __init__(self):
        self.pivots = {}

    def reduce(self, row: dict) -> dict:
        """Reduce ``row`` against current pivots; returns the residue (may be empty)."""
        row = dict(row)
        pivots = self.pivots
        while row:
            hits = [c for c in row if c in pivots]
            if not hits:
                return row
            c = min(hits)
            factor = row[c]
            for k, v in pivots[c].items():
                nv = row.get(k, 0) - factor * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return row

    def add(self, row: dict) -> bool:
        """Insert a row; True if it increased the rank."""
        res = self.reduce(row)
        if not res:
            return False
        col = min(res)
        self.pivots[col] = _normalize(res, col)
        return True

    @property
    def rank(self):
        return len(self.pivots)

    def rref(self) -> dict:
        """Fully reduced rows keyed by pivot column."""
        cols = sorted(self.pivots)
        out = {}
        for c in reversed(cols):
            row = dict(self.pivots[c])
            for k in sorted(k for k in row if k != c and k in out):
                f = row.get(k)
                if not f:
                    continue
                for kk, vv in out[k].items():
                    nv = row.get(kk, 0) - f * vv
                    if nv:
                        row[kk] = nv
                    else:
                        row.pop(kk, None)
            out[c] = row
        self.pivots = out
        return out


class IntEchelon:
    """Fraction-free echelon form for rational rows.

    Rows are scaled to primitive integer vectors and eliminated with integer
    cross-multiplication, dividing out the content after each step.  ``rref``
    returns the same normalized Fraction rows as :class:`Echelon`.
    """

    def __init__(self):
        self.pivots = {}

    @staticmethod
    def _primitive(row: dict) -> dict:
        den = 1
        for v in row.values():
            if type(v) is not int and v.denominator != 1:
                den = math.lcm(den, v.denominator)
        ints = {c: int(v * den) for c, v in row.items()} if den != 1 else {c: int(v) for c, v in row.items()}
        g = math.gcd(*ints.values())
        if ints[min(ints)] < 0:
            g = -g
        return {c: v // g for c, v in ints.items()}

    @staticmethod
    def _eliminate(row: dict, piv: dict, col) -> dict:
        a, b = piv[col], row[col]
        g = math.gcd(a, b)
        a, b = a // g, b // g
        out = {c: a * v for c, v in row.items()}
        for c, v in piv.items():
            nv = out.get(c, 0) - b * v
            if nv:
                out[c] = nv
            else:
                out.pop(c, None)
        if out:
            g = math.gcd(*out.values())
            if g > 1:
                out = {c: v // g for c, v in out.items()}
        return out

    def reduce(self, row: dict) -> dict:
        row = self._primitive(row) if row else {}
        pivots = self.pivots
        while row:
            hits = [c for c in row if c in pivots]
            if not hits:
                return row
            c = min(hits)
            row = self._eliminate(row, pivots[c], c)
        return row

    def add(self, row: dict) -> bool:
        res = self.reduce(row)
        if not res:
            return False
        col = min(res)
        if res[col] < 0:
            res = {c: -v for c, v in res.items()}
        self.pivots[col] = res
        return True

    @property
    def rank(self):
        return len(self.pivots)

    def rref(self) -> dict:
        done = {}
        for c in sorted(self.pivots, reverse=True):
            row = self.pivots[c]
            for k in sorted(k for k in row if k != c and k in done):
                if k in row:
                    row = self._eliminate(row, done[k], k)
            done[c] = row
        out = {}
        for c in sorted(done):
            row = done[c]
            lead = row[c]
            out[c] = {k: Fraction(v, lead) for k, v in row.items()}
        self.pivots = out
        return out


def nullspace(rows, ncols: int) -> list:
    """Basis of ``{x : row·x = 0 for all rows}`` as dense lists.

    One vector per free column f (in increasing order), with ``x_f = 1`` and
    the pivot coordinates read off the reduced row echelon form.
    """
    rows, zero = _presolve(rows)
    if all(isinstance(v, (int, Fraction)) for r in rows for v in r.values()):
        ech = IntEchelon()
        for c in zero:
            ech.pivots[c] = {c: 1}
        for row in sorted(rows, key=len):
            ech.add(row)
    else:
        ech = Echelon()
        for c in zero:
            ech.pivots[c] = {c: Fraction(1)}
        seen = set()
        for row in sorted(rows, key=len):
            key = _row_key(row)
            if key in seen:
                continue
            seen.add(key)
            ech.add(row)
    if ech.rank == ncols:
        return []
    R = ech.rref()
    free = [c for c in range(ncols) if c not in R]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for p, row in R.items():
            val = row.get(f)
            if val:
                v[p] = -val
        basis.append(v)
    return basis


def _presolve(rows):
    """Peel off single-entry rows: their column is forced to zero.

    Dropping that column from the remaining rows can create new singletons,
    so this repeats until none are left.  Returns (remaining rows, zero cols).
    """
    rows = [dict(r) for r in rows if r]
    zero = set()
    while True:
        new = {next(iter(r)) for r in rows if len(r) == 1}
        if not new:
            return rows, zero
        zero |= new
        rest = []
        for r in rows:
            if len(r) == 1:
                continue
            if any(c in new for c in r):
                r = {c: v for c, v in r.items() if c not in new}
                if not r:
                    continue
            rest.append(r)
        rows = rest


def _row_key(row: dict):
    col = min(row)
    lead = row[col]
    return tuple(sorted((c, v / lead) for c, v in row.items()))


def row_space_basis(vectors, ncols: int) -> list:
    """Reduced row echelon basis (dense) of the span of ``vectors``."""
    ech = Echelon()
    for v in vectors:
        row = {i: x for i, x in enumerate(v) if x}
        if row:
            ech.add(row)
    R = ech.rref()
    out = []
    for c in sorted(R):
        v = [Fraction(0)] * ncols
        for k, x in R[c].items():
            v[k] = x
        out.append(v)
    return out


def reduce_modulo(vectors, modulus, ncols: int) -> list:
    """RREF basis of the image of ``vectors`` in the quotient by span(``modulus``).

    Each returned vector is zero on the pivot columns of the modulus RREF, so
    the result is a canonical complement of the modulus inside the span.
    """
    base = Echelon()
    for v in modulus:
        row = {i: x for i, x in enumerate(v) if x}
        if row:
            base.add(row)
    base.rref()
    residues = []
    for v in vectors:
        row = {i: x for i, x in enumerate(v) if x}
        res = _full_reduce(base.pivots, row)
        if res:
            residues.append(res)
    ech = Echelon()
    for r in residues:
        ech.add(r)
    R = ech.rref()
    out = []
    for c in sorted(R):
        v = [Fraction(0)] * ncols
        for k, x in R[c].items():
            v[k] = x
        out.append(v)
    return out


def _full_reduce(pivots: dict, row: dict) -> dict:
    row = dict(row)
    for c in sorted(pivots):
        f = row.get(c)
        if not f:
            continue
        for k, v in pivots[c].items():
            nv = row.get(k, 0) - f * v
            if nv:
                row[k] = nv
            else:
                row.pop(k, None)
    return row


def rank(vectors) -> int:
    ech = Echelon()
    for v in vectors:
        row = {i: x for i, x in enumerate(v) if x}
        if row:
            ech.add(row)
    return ech.rank


def in_span(vector, vectors) -> bool:
    ech = Echelon()
    for v in vectors:
        row = {i: x for i, x in enumerate(v) if x}
        if row:
            ech.add(row)
    return not ech.reduce({i: x for i, x in enumerate(vector) if x})
