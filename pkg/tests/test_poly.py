from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from confext.poly import D, L, M, N, MPoly, PolyParseError, parse_poly, poly_arith, render_poly
from confext.scalar import make

coeffs = st.one_of(st.integers(-5, 5).map(Fraction), st.builds(Fraction, st.integers(-62, 62), st.integers(1, 7)),
                   st.builds(lambda a, b: make(a, b, 19), st.integers(-3, 3), st.integers(-2, 2)))
exps = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2), st.integers(0, 1))
polys = st.dictionaries(exps, coeffs, max_size=6).map(MPoly)
polys_no_mu = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.just(0), st.just(0)),
                              coeffs, max_size=6).map(MPoly)


def test_identity_product():
    assert poly_arith(D + 2 * L, MPoly.const(1), "mul") == D + 2 * L


def test_difference_of_squares():
    assert (D + L) * (D - L) == D ** 2 - L ** 2


def test_theorem_shape_product():
    assert L ** 2 * (2 * D + L) == parse_poly("2*d*l^2 + l^3")


def test_skew_substitution():
    assert (D + 2 * L).substitute("l", -L - D) == -D - 2 * L


def test_binomial_substitution():
    assert (L ** 2).substitute("l", L + M) == L ** 2 + 2 * L * M + M ** 2


def test_unknown_variable():
    with pytest.raises((KeyError, ValueError)):
        D.substitute("x", L)


def test_coeff_extract_examples():
    p = D ** 2 * L + 3 * L
    assert p.coeff_extract("l") == {(1,): D ** 2 + 3}
    assert MPoly().coeff_extract("l") == {}
    q = (L - M) * (D + 2 * L)
    got = q.coeff_extract(("l", "m"))
    assert got == {(1, 0): D, (2, 0): MPoly.const(2), (0, 1): -D, (1, 1): MPoly.const(-2)}
    assert q == 2 * L ** 2 + D * L - D * M - 2 * L * M


def test_zero_degree_sentinel():
    assert MPoly().total_degree() == -1
    assert (D * L ** 2).total_degree() == 3


def test_render_order_and_parse():
    p = 2 * D * L ** 2 + L ** 3 - Fraction(1, 2) * D + 7
    assert render_poly(p) == "2*d*l^2 + l^3 - 1/2*d + 7"
    assert parse_poly("2l(d + l)") == 2 * D * L + 2 * L ** 2
    assert parse_poly("d^2 - (2DBAR+3)*l", {"DBAR": 1}) == D ** 2 - 5 * L
    with pytest.raises(PolyParseError):
        parse_poly("d + * l")


def test_quadratic_coefficients_render():
    p = make(Fraction(7, 2), Fraction(1, 2), 19) * L + D
    assert parse_poly(render_poly(p)) == p


@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p * (q + r) == p * q + p * r
    assert p * q == q * p
    assert p - p == MPoly()


@given(polys_no_mu)
def test_shift_then_zero(p):
    assert p.substitute("l", L + M).substitute("m", MPoly()) == p


@given(polys)
def test_substitute_identity(p):
    for v, e in (("d", D), ("l", L), ("m", M), ("n", N)):
        assert p.substitute(v, e) == p


@given(polys)
def test_coeff_extract_reassembles(p):
    parts = p.coeff_extract(("l", "m"))
    total = MPoly()
    for (i, j), c in parts.items():
        total = total + c * L ** i * M ** j
    assert total == p


@settings(max_examples=200)
@given(polys)
def test_render_parse_roundtrip(p):
    assert parse_poly(render_poly(p)) == p
