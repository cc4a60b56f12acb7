from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import pytest

from sym2gw.chow_rings import ALPHA2, ALPHA4, BETA, GAMMA0, GAMMA1, GAMMA2, OrbClass
from sym2gw.exact_arith import bernoulli
from sym2gw.gw_core import (
    NOT_A_BASE_CASE, InvariantKey, UnstableInvariant, base_value, convert_notation,
    degree_zero_twisted, dimension_admissible, expand_insertions, fp_hodge_integral, hodge_data,
    strip_axioms, vanishing_reason,
)

A, A2, B, A3, A4, G0, G1, G2 = 1, 2, 3, 4, 5, 6, 7, 8


def K(d: int, *ins: int) -> InvariantKey:
    return InvariantKey(d, ins)


def test_keys_are_canonical():
    assert K(1, 8, 6, 8, 6) == K(1, 6, 6, 8, 8)
    assert K(1, 5, 2).serialize() == "1|2,5"
    assert InvariantKey.parse("1|6,6,8,8") == K(1, 6, 6, 8, 8)
    assert K(2, 6, 8).genus == 0
    assert K(1, 2, 5).genus == -1


@pytest.mark.parametrize("text", ["1|5,2", "1|2,,5", "x|2", "1,2,5", "1|9"])
def test_key_parse_rejects_noncanonical(text):
    with pytest.raises(ValueError):
        InvariantKey.parse(text)


def test_dimension_admissible_examples():
    assert dimension_admissible(K(1, A4, A2))
    assert not dimension_admissible(K(1, A4, G1))
    assert not dimension_admissible(K(0, A3, A3))


def test_vanishing_reasons():
    assert vanishing_reason(K(5, 0, A, A2)) == "unit axiom"
    assert vanishing_reason(K(1, A4, G1)) == "parity"
    assert vanishing_reason(K(0, A3, A3)) == "dimension"
    assert vanishing_reason(K(1, A4, A2)) is None
    assert vanishing_reason(K(0, 0, A2, A2)) is None  # a genuine integral


def test_base_value_examples():
    assert base_value(K(1, A4, A2)) == 6
    assert base_value(K(1, G2, G2)) == 1
    assert base_value(K(1, A3, A3)) == 9
    assert base_value(K(1, A4, B)) == 0
    assert base_value(K(0, G1, G0, G0, G0)) == Fraction(-3, 4)
    assert base_value(K(0, G1, G0, G0, G0, G0, G0)) == Fraction(-3, 8)
    assert base_value(K(0, A2, G0, G0, G0, G0)) == 0
    assert base_value(K(1, G2, G2, G0, G0)) is NOT_A_BASE_CASE


def test_divisor_axiom_in_base_values():
    assert base_value(K(1, A, A4, A2)) == 6
    assert base_value(K(2, A, A, A4, A4, A2)) is NOT_A_BASE_CASE
    assert strip_axioms(K(2, A, A, A4, A4, A2)) == (4, K(2, A4, A4, A2))
    assert base_value(K(2, A, A, A4, A2)) == 0  # inadmissible
    factor, reduced = strip_axioms(K(3, A, A, G2, G2))
    assert factor == 9 and reduced == K(3, G2, G2)


def test_three_point_integrals():
    assert base_value(K(0, 0, 0, A4)) == 3
    assert base_value(K(0, G0, G0, A2)) == 3 - 1  # (a^2 - b) . a^2 integrated
    assert base_value(K(0, A, A, A2)) == 3


def test_unstable_keys_are_errors_not_zeros():
    with pytest.raises(UnstableInvariant):
        base_value(K(0, A, A2))


def test_odd_twisted_degree_zero_vanishes():
    for ins in [(G0, G0, G1), (G1, G1, G2), (A2, G0, G0, G0, G0)]:
        key = InvariantKey(0, ins)
        if dimension_admissible(key) or key.twisted_count % 2:
            assert base_value(key) == 0


def test_hodge_integral_values():
    assert fp_hodge_integral(1) == Fraction(1, 4)
    assert fp_hodge_integral(2) == Fraction(1, 8)
    assert hodge_data(2).value == Fraction(1, 8)
    with pytest.raises(ValueError):
        fp_hodge_integral(0)


def test_degree_zero_closed_form_is_minus_three_hodge():
    for g in range(1, 9):
        assert degree_zero_twisted(g) == -3 * fp_hodge_integral(g)
        assert degree_zero_twisted(g) == (-1) ** g * (4**g - 1) * 3 * bernoulli(2 * g) / (2 * g)


def test_convert_notation():
    q = convert_notation(1, 1, [GAMMA2, GAMMA2])
    assert q.insertions == (GAMMA2, GAMMA2, GAMMA0, GAMMA0)
    q = convert_notation(1, 0, [GAMMA2, GAMMA2])
    assert q.insertions == (GAMMA2, GAMMA2)
    q = convert_notation(1, -1, [GAMMA2, GAMMA2])
    assert q.vanishing and q.expand() == {}
    q = convert_notation(1, 2, [ALPHA4, ALPHA2])
    assert len(q.insertions) == 2 + 6
    assert convert_notation(1, 0, [GAMMA2, ALPHA4, GAMMA1, GAMMA0]).vanishing == "parity"


def test_convert_notation_rejects_mixed_sectors():
    with pytest.raises(ValueError):
        convert_notation(1, 0, [ALPHA2 + GAMMA1, GAMMA1])


def test_expansion_is_multilinear_and_order_free():
    inc = ALPHA2 - 2 * BETA
    exp = expand_insertions(1, [inc, GAMMA2, GAMMA2])
    assert exp == {K(1, A2, G2, G2): 1, K(1, B, G2, G2): -2}
    for perm in permutations([inc, GAMMA2, GAMMA2]):
        assert expand_insertions(1, perm) == exp
    assert expand_insertions(1, [OrbClass.zero(), GAMMA2]) == {}
