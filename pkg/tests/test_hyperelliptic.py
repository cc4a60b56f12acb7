from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction
from math import factorial

import pytest

from sym2gw.chow_rings import orb_integrate
from sym2gw.gw_core import dimension_admissible, expand_insertions
from sym2gw.hyperelliptic import (
    OddPartitionType, TypeMismatch, conversion_matrix, conversion_matrix_by_enumeration,
    count_hyperelliptic, e_from_j, hyperelliptic_insertions, incidence_class,
    incidence_pullback, j_from_e, odd_partition_types, odd_set_partitions, partition_type_count,
)


def _odd_partition_numbers(n_max: int) -> list[int]:
    """Coefficients of exp(sinh x) times n!, by the recurrence for exp of a series."""
    s = [Fraction(1, factorial(k)) if k % 2 else Fraction(0) for k in range(n_max + 1)]
    e = [Fraction(1)] + [Fraction(0)] * n_max
    for n in range(1, n_max + 1):
        e[n] = sum(k * s[k] * e[n - k] for k in range(1, n + 1)) / n
    return [int(e[n] * factorial(n)) for n in range(n_max + 1)]


def test_documented_counts():
    assert partition_type_count(4, OddPartitionType((4,))) == 1
    assert partition_type_count(4, OddPartitionType((1, 1))) == 4
    assert partition_type_count(6, OddPartitionType((0, 2))) == 10


def test_type_mismatch():
    with pytest.raises(TypeMismatch):
        partition_type_count(6, OddPartitionType((1, 1)))


def test_types_trim_trailing_zeros():
    assert OddPartitionType((2, 0, 0)) == OddPartitionType((2,))
    assert OddPartitionType.from_blocks([3, 1, 1, 1]).counts == (3, 1)
    with pytest.raises(ValueError):
        OddPartitionType.from_blocks([2])


def test_total_counts_match_generating_function():
    totals = _odd_partition_numbers(12)
    for n in range(2, 13, 2):
        assert sum(partition_type_count(n, t) for t in odd_partition_types(n)) == totals[n]


@pytest.mark.parametrize("n", range(2, 13, 2))
def test_counts_match_enumeration(n):
    tally = Counter(OddPartitionType.from_blocks([len(b) for b in p]) for p in odd_set_partitions(n))
    assert set(tally) == set(odd_partition_types(n))
    for t, c in tally.items():
        assert partition_type_count(n, t) == c


def test_enumerated_partitions_are_partitions():
    for p in odd_set_partitions(6):
        flat = sorted(x for block in p for x in block)
        assert flat == list(range(6))
        assert all(len(b) % 2 for b in p)


def test_conversion_matrix_rows():
    m = conversion_matrix(3)
    assert m[0] == [2, 0, 0, 0]
    assert m[1] == [-2, 24, 0, 0]
    assert m[2] == [2, -120, 720, 0]
    assert m[3] == [-2, 504, -10080, 40320]


def test_conversion_matrix_structure():
    m = conversion_matrix(6)
    for g in range(7):
        assert m[g][g] == factorial(2 * g + 2)
        for gp in range(7):
            if gp > g:
                assert m[g][gp] == 0
            den = m[g][gp].denominator
            assert den & (den - 1) == 0 and (den.bit_length() - 1) % 2 == 0  # a power of 4


def test_two_constructions_agree():
    assert conversion_matrix(5) == conversion_matrix_by_enumeration(5)


def test_j_e_examples():
    assert j_from_e(1, [Fraction(5)]) == [10]
    assert j_from_e(2, [Fraction(1), Fraction(1)]) == [2, 22]
    with pytest.raises(ValueError):
        j_from_e(0, [Fraction(1)])


def test_round_trip_random():
    rng = random.Random(7)
    for G in range(7):
        for _ in range(5):
            e = [Fraction(rng.randint(-999, 999), rng.randint(1, 99)) for _ in range(G + 1)]
            assert e_from_j(3, j_from_e(3, e)) == e


def test_incidence_class():
    inc = incidence_class()
    assert incidence_pullback() == {(2, 0): 1, (0, 2): 1}
    assert inc.degree() == 2
    assert orb_integrate(inc * inc) == 1


@pytest.mark.parametrize("d, g", [(1, 0), (1, 3), (2, 1), (3, 4)])
def test_hyperelliptic_keys_are_admissible(d, g):
    keys = expand_insertions(d, hyperelliptic_insertions(d, g))
    assert keys and all(dimension_admissible(k) for k in keys)
    assert all(k.n == 3 * d + 1 + 2 * g + 2 for k in keys)


def test_no_lines_through_four_points(engine):
    table = count_hyperelliptic(1, 2, engine)
    assert table.E == [0, 0, 0]
    assert table.J == [0, 0, 0]
    assert table.flags == {}


def test_count_table_serializes(engine):
    data = count_hyperelliptic(1, 0, engine).as_dict()
    assert data == {"degree": 1, "rows": [{"genus": 0, "J": "0", "E": "0", "flags": []}]}


@pytest.mark.slow
def test_no_conics_through_seven_points(engine):
    assert count_hyperelliptic(2, 1, engine).E == [0, 0]


def test_count_rejects_bad_arguments():
    with pytest.raises(ValueError):
        count_hyperelliptic(0, 1)
