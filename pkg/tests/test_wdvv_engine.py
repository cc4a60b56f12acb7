from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import pytest

from sym2gw.chow_rings import ALPHA2, ALPHA4, BETA, GAMMA0, GAMMA2, orb_pairing
from sym2gw.gw_core import InvariantKey, dimension_admissible
from sym2gw.wdvv_engine import (
    FINGERPRINT, InconsistentSystem, InvariantStore, SchedulingError, Underdetermined,
    WdvvEngine, compute_invariant, dual_basis, wdvv_relation,
)

A, A2, B, A3, A4, G0, G1, G2 = 1, 2, 3, 4, 5, 6, 7, 8


def K(d: int, *ins: int) -> InvariantKey:
    return InvariantKey(d, ins)


def test_dual_basis():
    pair = dual_basis()
    assert pair.duals[0] == ALPHA4 / 3
    assert pair.duals[G0] == 2 * GAMMA2
    # the pairing block on (a^2, b) is [[3, 1], [1, 1/2]], whose inverse gives a^2 - 2b
    assert pair.duals[A2] == ALPHA2 - 2 * BETA
    for i in range(9):
        for j in range(9):
            assert orb_pairing(pair.basis[i], pair.duals[j]) == (1 if i == j else 0)
            # Casimir symmetry: the inverse pairing matrix is symmetric
            assert pair.duals[i][j] == pair.duals[j][i]


def test_documented_values(engine):
    assert engine.value(K(1, A4, A2)) == 6
    assert engine.value(K(1, G0, G0, G2, G2)) == Fraction(-1, 2)
    assert engine.value(K(1, G0, G0, G0, G0, G2, G2)) == Fraction(1, 2)
    assert engine.value(K(1, A, A4, A2)) == 6
    assert compute_invariant(K(1, A4, A2), engine) == 6


def test_compute_invariant_requires_admissible(engine):
    with pytest.raises(ValueError):
        engine.compute_invariant(K(1, A4, A4))


@pytest.mark.parametrize("h", [1, 2, 3])
def test_degree_one_genus_shift(engine, h):
    gammas = (G0,) * (2 * h + 2)
    for pair in [(A4, A2), (A3, A3), (A4, B)]:
        assert engine.value(K(1, *pair, *gammas)) == (-1) ** h * engine.value(K(1, *pair, G0, G0))
    assert engine.value(K(1, G2, G2, *gammas[:-2])) == Fraction((-1) ** h, 2) * engine.value(K(1, G2, G2))


def test_divisor_axiom_through_engine(engine):
    for key in [K(1, G2, G2, G0, G0), K(2, G2, G2, G2, G2, G0, G0), K(2, A4, A4, A3)]:
        if dimension_admissible(key):
            assert engine.value(K(key.d, A, *key.insertions)) == key.d * engine.value(key)


def test_multilinear_evaluation(engine):
    inc = ALPHA2 - 2 * BETA
    direct = engine.value(K(1, A2, G2, G2, G0, G0)) - 2 * engine.value(K(1, B, G2, G2, G0, G0))
    assert engine.evaluate(1, [inc, GAMMA2, GAMMA2, GAMMA0, GAMMA0]) == direct
    for perm in permutations([inc, GAMMA2, GAMMA0, GAMMA2, GAMMA0]):
        assert engine.evaluate(1, perm) == direct


def test_relation_with_b_equal_c_is_trivial(engine):
    rel = wdvv_relation(G0, A2, A2, G0, (), 1, engine)
    assert rel.is_trivial()


def test_documented_relation_shape(engine):
    rel = wdvv_relation(G0, G0, A2, A2, (), 1, engine)
    assert rel.level == (1, 3)
    assert all(k.level == (1, 3) and dimension_admissible(k) for k in rel.unknowns)
    assert rel.residual(engine.value) == 0


def test_swapping_roles_negates(engine):
    for quad, s in [((G0, G0, A2, A2), ()), ((A, G0, B, G2), (G0,)), ((G0, A2, G1, A3), (G1, G0))]:
        a, b, c, e = quad
        r1 = wdvv_relation(a, b, c, e, s, 1, engine)
        r2 = wdvv_relation(a, c, b, e, s, 1, engine)
        assert r1.constant == -r2.constant
        assert r1.unknowns == {k: -v for k, v in r2.unknowns.items()}


@pytest.mark.parametrize("level", [(0, 4), (0, 5), (0, 6), (1, 3), (1, 4), (1, 5), (1, 6)])
def test_residuals_vanish(engine, level):
    assert engine.level_residuals(*level) == []


def test_stores_are_deterministic(tmp_path):
    texts = []
    for name in ("one", "two"):
        store = InvariantStore(tmp_path / name)
        eng = WdvvEngine(store)
        eng.value(K(1, G0, G0, G0, G0, G2, G2))
        store.save()
        texts.append((tmp_path / name).read_bytes())
    assert texts[0] == texts[1]


def test_store_round_trip(tmp_path):
    path = tmp_path / "cache.txt"
    store = InvariantStore(path)
    assert store.status.state == "absent"
    WdvvEngine(store).value(K(1, G0, G0, G2, G2))
    store.save()
    text = path.read_text()
    assert text.startswith("# sym2gw invariant cache\n")
    assert f"# fingerprint: {FINGERPRINT}" in text
    assert "1|6,6,8,8 = -1/2" in text
    again = InvariantStore(path)
    assert again.status.state == "loaded"
    assert again.get((1, (6, 6, 8, 8))) == Fraction(-1, 2)
    assert again.dumps() == store.dumps()
    # a warm engine answers from the cache without solving anything
    warm = WdvvEngine(again)
    assert warm.value(K(1, G0, G0, G2, G2)) == Fraction(-1, 2)
    assert warm.solved_here == []


@pytest.mark.parametrize(
    "mutate",
    [
        lambda t: t.replace("# fingerprint: ", "# fingerprint: 0"),
        lambda t: t + "garbage\n",
        lambda t: t.replace("= -1/2", "= -0.5"),
        lambda t: t.replace("1|6,6,8,8", "1|8,8,6,6"),
        lambda t: t[: len(t) // 2],
        lambda t: "",
    ],
)
def test_corrupted_caches_are_rejected(tmp_path, mutate):
    path = tmp_path / "cache.txt"
    store = InvariantStore(path)
    WdvvEngine(store).value(K(1, G0, G0, G2, G2))
    store.save()
    path.write_text(mutate(path.read_text()))
    bad = InvariantStore(path)
    assert bad.status.state == "rejected"
    assert len(bad) == 0
    assert WdvvEngine(bad).value(K(1, G0, G0, G2, G2)) == Fraction(-1, 2)


def test_stored_values_are_final():
    store = InvariantStore()
    store.put((1, (6, 6, 8, 8)), Fraction(-1, 2))
    store.put((1, (6, 6, 8, 8)), Fraction(-1, 2))
    with pytest.raises(InconsistentSystem):
        store.put((1, (6, 6, 8, 8)), Fraction(1, 2))


def test_save_is_atomic_and_leaves_no_temp_files(tmp_path):
    path = tmp_path / "sub" / "cache.txt"
    store = InvariantStore(path)
    WdvvEngine(store).value(K(1, G0, G0, G2, G2))
    store.save()
    assert sorted(p.name for p in path.parent.iterdir()) == ["cache.txt"]


class _NoRelations(WdvvEngine):
    def _level_inputs(self, d, n):
        return iter(())


def test_underdetermined_reports_free_unknowns():
    eng = _NoRelations()
    with pytest.raises(Underdetermined) as info:
        eng.value(K(1, G0, G0, G2, G2))
    assert K(1, G0, G0, G2, G2) in info.value.free


def test_reentrant_level_is_a_scheduling_error():
    eng = WdvvEngine()
    eng._active.append((1, 4))
    with pytest.raises(SchedulingError):
        eng.solve_level(1, 4)


def test_stats_record_elimination(engine):
    engine.value(K(1, G0, G0, G2, G2))
    stats = engine.stats[(1, 4)]
    assert stats["rank"] == stats["unknowns"] > 0
