from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from sym2gw.exact_arith import (
    I, GaussRational, LaurentPoly, PoleError, Poly, RatFunc, SingularMatrixError, bernoulli,
    eval_at, format_gauss, format_rational, invert_matrix, parse_gauss, parse_rational,
    poly_gcd, polylog_negative, solve_linear, to_gauss, zeta_nonpositive,
)

fractions = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 10**6)
gauss = st.builds(GaussRational, fractions, fractions)


@given(gauss, gauss, gauss)
def test_field_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    if y:
        assert (x / y) * y == x


@given(gauss)
def test_format_parse_round_trip(z):
    text = format_gauss(z)
    assert "." not in text
    assert parse_gauss(text) == z


def test_format_examples():
    assert format_gauss(Fraction(-1, 2)) == "-1/2"
    assert format_gauss(GaussRational(0, -4)) == "0-4*i"
    assert format_rational(Fraction(6, 3)) == "2"


@pytest.mark.parametrize("bad", ["0.5", "1e3", "", "1/0x"])
def test_parse_rejects_inexact(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_rational(bad)


def test_real_gauss_hashes_like_fraction():
    assert hash(to_gauss(Fraction(3, 4))) == hash(Fraction(3, 4))
    assert to_gauss(Fraction(3, 4)) == Fraction(3, 4)
    assert I * I == -1


def test_gauss_is_immutable():
    z = GaussRational(1, 2)
    with pytest.raises(AttributeError):
        z.foo = 3


def test_bernoulli_values():
    assert bernoulli(0) == 1
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(12) == Fraction(-691, 2730)
    assert all(bernoulli(n) == 0 for n in range(3, 41, 2))


def test_bernoulli_recurrence():
    for n in range(1, 41):
        assert sum(comb(n + 1, k) * bernoulli(k) for k in range(n + 1)) == 0


def test_bernoulli_matches_series_division():
    # z/(e^z - 1) = 1 / (sum z^k/(k+1)!); invert the power series directly
    N = 20
    e = [Fraction(1, _fact(k + 1)) for k in range(N)]
    inv = [Fraction(1)]
    for n in range(1, N):
        inv.append(-sum(e[k] * inv[n - k] for k in range(1, n + 1)))
    assert [inv[n] * _fact(n) for n in range(N)] == [bernoulli(n) for n in range(N)]


def _fact(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        bernoulli(-1)
    with pytest.raises(ValueError):
        polylog_negative(-1)


def test_zeta_values():
    assert zeta_nonpositive(0) == Fraction(-1, 2)
    assert zeta_nonpositive(1) == Fraction(-1, 12)
    assert zeta_nonpositive(3) == Fraction(1, 120)
    assert all(zeta_nonpositive(m) == 0 for m in range(2, 30, 2))


def test_polylog_small_cases():
    q = RatFunc.q()
    assert polylog_negative(0) == q / (1 - q)
    assert polylog_negative(1) == q / (1 - q) / (1 - q)


@pytest.mark.parametrize("m", range(9))
def test_polylog_series_matches_brute_force(m):
    coeffs = polylog_negative(m).series(50)
    assert coeffs == [to_gauss(a**m if a else 0) for a in range(51)]


def test_polylog_agrees_with_iterated_derivative():
    f = RatFunc(Poly.q(), Poly([1, -1]))
    for m in range(13):
        assert polylog_negative(m) == f
        f = f.q_derivative()


def test_polylog_continuation_is_zeta():
    # Li_{-m}(-1) = -eta(-m) = (2^(m+1) - 1) zeta(-m)
    for m in range(1, 13):
        assert eval_at(polylog_negative(m), -1) == (2 ** (m + 1) - 1) * zeta_nonpositive(m)


def test_pole_raises():
    with pytest.raises(PoleError):
        eval_at(polylog_negative(2), 1)
    with pytest.raises(PoleError):
        LaurentPoly({-1: 1})(0)


def test_laurent_arithmetic():
    p = LaurentPoly({-1: 2, 1: 3})
    assert (p * p).terms() == {-2: 4, 0: 12, 2: 9}
    assert p(-1) == -5
    assert (p - p).terms() == {}
    assert LaurentPoly({0: I})(2) == I


def test_poly_division_and_gcd():
    a = Poly([-1, 0, 1])  # q^2 - 1
    b = Poly([1, 1])
    quo, rem = a.divmod(b)
    assert quo == Poly([-1, 1]) and rem.is_zero()
    assert poly_gcd(a * Poly([2, 1]), b * Poly([2, 1])).monic() == Poly([2, 3, 1])


def test_ratfunc_reduces():
    r = RatFunc(Poly([-1, 0, 1]), Poly([-1, 1]))
    assert r.den == Poly([1])
    assert r == Poly([1, 1])


def test_linear_algebra():
    m = [[2, 1], [1, 1]]
    inv = invert_matrix(m)
    assert inv == [[1, -1], [-1, 2]]
    assert solve_linear(m, [3, 2]) == [1, 1]
    with pytest.raises(SingularMatrixError):
        invert_matrix([[1, 2], [2, 4]])


@settings(max_examples=50)
@given(st.lists(gauss, min_size=4, max_size=4))
def test_inverse_times_matrix(entries):
    m = [entries[:2], entries[2:]]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if not det:
        return
    inv = invert_matrix(m)
    for i in range(2):
        for j in range(2):
            assert sum((m[i][k] * inv[k][j] for k in range(2)), to_gauss(0)) == (1 if i == j else 0)
