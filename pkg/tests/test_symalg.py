from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nambuvp.symalg import (
    JetOrderError,
    LaurentSeries,
    MultiPoly,
    Variable,
    VariableTable,
    VariableTableError,
    WindowError,
    det,
    parse_poly,
    random_poly,
)

XYZ = VariableTable.of("x y z")


def polys(table=XYZ, max_degree=3):
    terms = st.dictionaries(
        st.tuples(*[st.integers(0, max_degree)] * len(table)),
        st.fractions(min_value=-5, max_value=5, max_denominator=4),
        max_size=5,
    )
    return terms.map(lambda t: MultiPoly(table, t))


def jet_table(J=3):
    return VariableTable.with_jets(["u", "v"], J, before=[Variable("x")])


# --- parsing and arithmetic -------------------------------------------

def test_parse_roundtrip_through_str():
    p = XYZ.poly("3/2*x^2*y - z + 7")
    assert XYZ.poly(str(p)) == p


def test_parse_decimal_is_exact():
    assert XYZ.poly("0.1*x").terms[(1, 0, 0)] == Fraction(1, 10)


def test_parse_rejects_unknown_variable():
    with pytest.raises(VariableTableError):
        XYZ.poly("w + 1")


def test_parse_rejects_non_polynomial_syntax():
    with pytest.raises((ValueError, SyntaxError)):
        parse_poly("sin(x)", XYZ)


def test_zero_is_structurally_empty():
    x, y, _ = XYZ.vars("x y z")
    assert (x * y - y * x).terms == {}
    assert x - x == 0


def test_division_by_monomial_needs_invertible_variable():
    x = XYZ.var("x")
    with pytest.raises(Exception):
        XYZ.one() / x
    T = VariableTable.of("a b", invertible=["a"])
    a, b = T.vars("a b")
    assert (b / a) * a == b


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == XYZ.zero()


@given(polys(), polys())
def test_partial_leibniz(p, q):
    for v in XYZ.names:
        assert (p * q).partial(v) == p.partial(v) * q + p * q.partial(v)


@given(polys())
def test_json_roundtrip(p):
    assert MultiPoly.from_json(p.to_json()) == p


@given(polys(), st.fractions(-3, 3, max_denominator=3), st.fractions(-3, 3, max_denominator=3),
       st.fractions(-3, 3, max_denominator=3))
def test_evaluate_is_a_ring_homomorphism(p, a, b, c):
    vals = {"x": a, "y": b, "z": c}
    q = p * p + p
    assert q.evaluate(vals) == p.evaluate(vals) ** 2 + p.evaluate(vals)


def test_substitute_composes():
    x, y, z = XYZ.vars("x y z")
    p = x * x + y
    assert p.substitute({"x": y + z}) == (y + z) ** 2 + y


def test_det_matches_expansion():
    x, y, z = XYZ.vars("x y z")
    m = [[x, y, 0], [0, z, 1], [1, 0, x]]
    assert det(m) == x * z * x + y


# --- jets ------------------------------------------------------------------

def test_total_derivative_on_jets():
    T = jet_table()
    u, u1, u2, x = T.vars("u u_1 u_2 x")
    assert (u * u).total_x_derivative() == 2 * u * u1
    assert (x * u1).total_x_derivative() == u1 + x * u2


def test_total_derivative_past_max_order_raises():
    T = jet_table(2)
    with pytest.raises(JetOrderError):
        T.var("u_2").total_x_derivative()


def test_total_derivative_leibniz_random(rng):
    T = jet_table(4)
    names = ["x", "u", "u_1", "v", "v_1"]
    for _ in range(30):
        p = random_poly(T, rng, 2, names)
        q = random_poly(T, rng, 2, names)
        assert (p * q).total_x_derivative() == p.total_x_derivative() * q + p * q.total_x_derivative()


def test_table_json_roundtrip():
    T = jet_table()
    assert VariableTable.from_json(T.to_json()) == T


# --- Laurent series -------------------------------------------------------

def lax(K):
    T = VariableTable.with_jets([f"u{m}" for m in range(2, K + 2)], 1)
    terms = {1: T.one()}
    for n in range(1, K + 1):
        terms[-n] = T.var(f"u{n + 1}")
    return T, LaurentSeries(T, terms, lo=-K, hi=1)


def test_square_of_lax_series():
    T, L = lax(3)
    u2, u3, u4 = T.vars("u2 u3 u4")
    S = L * L
    # exact on lam^2 .. lam^-2
    assert S.window == (-2, 2)
    assert S[2] == 1 and S[1] == 0
    assert S[0] == 2 * u2
    assert S[-1] == 2 * u3
    assert S[-2] == u2 * u2 + 2 * u4
    with pytest.raises(WindowError):
        S[-3]


def test_reciprocal_matches_series_oracle():
    # 1/L = lam^-1 - u2 lam^-3 - u3 lam^-4 + (u2^2 - u4) lam^-5 + ..., from a
    # symbolic series expansion of 1/L about lam = infinity
    T, L = lax(4)
    u2, u3, u4 = T.vars("u2 u3 u4")
    R = L.reciprocal(-5)
    assert R[-1] == 1 and R[-2] == 0
    assert R[-3] == -u2
    assert R[-4] == -u3
    assert R[-5] == u2 * u2 - u4


def test_product_with_reciprocal_is_one_on_window():
    T, L = lax(4)
    P = L * L.reciprocal(-5)
    for e in range(P.lo, P.hi + 1):
        assert P[e] == (1 if e == 0 else 0)


def test_exact_monomial_reciprocal_is_exact():
    T = VariableTable.of("a")
    lam = LaurentSeries(T, {1: 2})
    R = lam.reciprocal(-3)
    assert R.exact and R[-1] == Fraction(1, 2)


def test_project_nonneg_of_exact_window():
    T, L = lax(3)
    B = (L ** 2).project_nonneg()
    assert B.exact
    assert B == LaurentSeries(T, {2: 1, 0: 2 * T.var("u2")})


def test_project_nonneg_keeps_window_when_undetermined():
    T, L = lax(1)
    P = L ** 3  # exact only down to lam^1 when u3 is truncated away
    assert P.lo > 0
    assert not P.project_nonneg().exact


def test_d_lambda_shifts_window():
    T, L = lax(2)
    D = L.d_lambda()
    assert D.window == (-3, 0)
    assert D[0] == 1 and D[-2] == -T.var("u2")


def test_laurent_json_roundtrip():
    T, L = lax(3)
    S = L * L
    assert LaurentSeries.from_json(S.to_json()) == S


def test_laurent_to_poly_requires_exact():
    T, L = lax(2)
    ext = T.extend(Variable("lam", invertible=True))
    with pytest.raises(WindowError):
        L.to_poly(ext, "lam")
    exact = LaurentSeries(T, {1: 1, -1: T.var("u2")})
    assert exact.to_poly(ext, "lam") == ext.poly("lam + u2/lam")
