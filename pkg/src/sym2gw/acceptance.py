"""Release acceptance checks, shared by ``sym2gw selftest`` and the test suite.

Each criterion is a function returning a :class:`CriterionResult`. The
numbering is stable and is what the selftest report and the test file
refer to.
"""

from __future__ import annotations

import json
import logging
import random
import tempfile
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .chow_rings import (
    ORB_DEGREES, ORB_NAMES, PAIRING, T1, T2, graded_dimensions, hilb_integrate,
    hilb_normal_form, orb_integrate, ring_axiom_violations, verify_ring_relations,
    HILB_MONOMIALS,
)
from .crc_bridge import (
    PUBLISHED_TWO_POINT, TWO_POINT_SHAPES, bridge_map, crc_degree_zero, crc_two_point,
    quantum_relation_check,
)
from .exact_arith import LaurentPoly, eval_at, polylog_negative
from .gw_core import NOT_A_BASE_CASE, InvariantKey, base_value, degree_zero_twisted
from .hyperelliptic import (
    OddPartitionType, conversion_matrix, conversion_matrix_by_enumeration, count_hyperelliptic,
    e_from_j, incidence_class, j_from_e, odd_partition_types, odd_set_partitions,
    partition_type_count,
)
from .wdvv_engine import InvariantStore, WdvvEngine

log = logging.getLogger(__name__)

__all__ = [
    "CriterionResult",
    "SelftestReport",
    "selftest",
    "PUBLISHED_PAIRING",
    "run_criterion",
    "run_acceptance",
    "run_extras",
    "CRITERIA",
]

A2, B, A3, A4, G0, G1, G2 = 2, 3, 4, 5, 6, 7, 8

PUBLISHED_PAIRING: dict[tuple[int, int], Fraction] = {
    (0, A4): Fraction(3),
    (1, A3): Fraction(3),
    (A2, A2): Fraction(3),
    (A2, B): Fraction(1),
    (B, B): Fraction(3),
    (G0, G2): Fraction(1, 2),
    (G1, G1): Fraction(1, 2),
}
"""The Poincare pairing matrix as published (upper triangle; all other entries 0)."""


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: list[str] = field(default_factory=list)
    seconds: float = 0.0
    limit: float | None = None

    def as_dict(self, timing: bool = False) -> dict:
        d = {
            "number": self.number,
            "title": self.title,
            "status": "pass" if self.passed else "fail",
            "details": list(self.details),
        }
        if timing:
            d["seconds"] = round(self.seconds, 3)
        return d

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        head = f"[{status}] criterion {self.number:2d}: {self.title}"
        if not self.passed and self.details:
            head += " -- " + "; ".join(self.details[:3])
        return head


class _Collector:
    def __init__(self):
        self.failures: list[str] = []
        self.notes: list[str] = []

    def check(self, ok: bool, message: str) -> None:
        if not ok:
            self.failures.append(message)

    def note(self, message: str) -> None:
        self.notes.append(message)


# -- the criteria -------------------------------------------------------------------------


def _c1(c: _Collector, engine: WdvvEngine) -> None:
    for v in ring_axiom_violations():
        c.check(False, v)
    report = verify_ring_relations()
    for name in report.failures:
        c.check(False, f"relation {name} does not vanish")


def _c2(c: _Collector, engine: WdvvEngine) -> None:
    for i in range(9):
        for j in range(9):
            want = PUBLISHED_PAIRING.get((min(i, j), max(i, j)), Fraction(0))
            got = PAIRING[i][j]
            if i <= j:
                c.check(got == want, f"({ORB_NAMES[i]}, {ORB_NAMES[j]}) = {got}, table says {want}")


def _c3(c: _Collector, engine: WdvvEngine) -> None:
    c.check(hilb_normal_form((0, 3)) == 3 * T1 * T2**2 + 3 * T1**2 * T2, "T2^3 normal form")
    c.check(hilb_normal_form((3, 0)).is_zero(), "T1^3 normal form")
    c.check(hilb_normal_form((0, 4)) == 12 * T1**2 * T2**2, "T2^4 normal form")
    c.check(hilb_integrate(hilb_normal_form((0, 4))) == 3, "integral of T2^4")
    hilb_dims = graded_dimensions([a + b for a, b in HILB_MONOMIALS])
    c.check(hilb_dims == graded_dimensions(ORB_DEGREES) == (1, 2, 3, 2, 1),
            f"graded dimensions {hilb_dims} vs {graded_dimensions(ORB_DEGREES)}")


def _c4(c: _Collector, engine: WdvvEngine) -> None:
    for g in range(1, 9):
        closed = degree_zero_twisted(g)
        series = (-1) ** (g + 1) * 6 * polylog_negative(2 * g - 1)
        cont = eval_at(series, -1) / 2
        c.check(closed == cont, f"g={g}: closed form {closed}, continuation {cont}")
        even = eval_at((-1) ** (g + 1) * 9 * polylog_negative(2 * g), -1)
        c.check(even == 0, f"g={g}: even continuation {even}")


def _c5(c: _Collector, engine: WdvvEngine) -> None:
    for ins, want in (((A4, A2), 6), ((A3, A3), 9), ((G2, G2), 1), ((A4, B), 0)):
        key = InvariantKey(1, ins)
        got = engine.value(key)
        c.check(got == want, f"{key.pretty()} = {got}, expected {want}")


def _c6(c: _Collector, engine: WdvvEngine) -> None:
    for ins, want in (((G2, G2, G0, G0), Fraction(-1, 2)), ((G2, G2, G0, G0, G0, G0), Fraction(1, 2))):
        key = InvariantKey(1, ins)
        c.check(base_value(key) is NOT_A_BASE_CASE, f"{key.pretty()} unexpectedly a base case")
        got = engine.value(key)
        c.check(got == want, f"{key.pretty()} = {got}, expected {want}")
        c.check(key.level in engine.stats, f"level {key.level} was not solved by elimination")


def _c7(c: _Collector, engine: WdvvEngine) -> None:
    for d in (0, 1):
        for n in range(3, 7):
            count = 0
            bad = 0
            engine.solve_level(d, n)
            for rel in engine.iter_relations(d, n, strict=True):
                count += 1
                if rel.residual(engine.value) != 0:
                    bad += 1
            c.check(bad == 0, f"level ({d}, {n}): {bad} of {count} relations nonzero")
            if d == 1:
                c.check(count > 0, f"level ({d}, {n}) generated no relations")
            c.note(f"level ({d}, {n}): {count} relations")


def _c8(c: _Collector, engine: WdvvEngine) -> None:
    for name, (x, y) in TWO_POINT_SHAPES.items():
        terms, value = PUBLISHED_TWO_POINT[name]
        got = crc_two_point(x, y).series
        c.check(got == LaurentPoly(terms), f"<{name}>: series {got}")
        at = got(-1)
        orb = engine.evaluate(1, [x, y])
        c.check(at == orb == value, f"<{name}>: q=-1 gives {at}, orbifold {orb}, expected {value}")


def _c9(c: _Collector, engine: WdvvEngine) -> None:
    for r in quantum_relation_check():
        c.check(r.ok, f"{r.identity}: expected {r.expected}, got {r.got}")
    L = bridge_map()
    c.check(L.is_invertible(), "L is singular")
    c.check(L.is_degree_preserving(), "L does not preserve degree")
    c.check(hilb_integrate((T2**4).normal_form()) == 3, "integral of T2^4")


def _c10(c: _Collector, engine: WdvvEngine) -> None:
    for n in range(2, 13, 2):
        tally: Counter = Counter()
        for blocks in odd_set_partitions(n):
            tally[OddPartitionType.from_blocks([len(b) for b in blocks])] += 1
        types = list(odd_partition_types(n))
        c.check(set(types) == set(tally), f"n={n}: type lists differ")
        for t in types:
            c.check(partition_type_count(n, t) == tally[t],
                    f"n={n} type {t}: formula {partition_type_count(n, t)}, enumeration {tally[t]}")
    c.check(conversion_matrix(5) == conversion_matrix_by_enumeration(5), "conversion matrix rows g <= 5")
    rng = random.Random(20240607)
    for G in range(7):
        e = [Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4)) for _ in range(G + 1)]
        d = rng.randint(1, 6)
        c.check(e_from_j(d, j_from_e(d, e)) == e, f"G={G}: round trip failed")


def _c11(c: _Collector, engine: WdvvEngine) -> None:
    table = count_hyperelliptic(1, 0, engine)
    c.check(table.E == [0], f"E(1,0) = {table.E[0]}")
    inc = incidence_class()
    c.check(orb_integrate(inc * inc) == 1, f"incidence self-intersection {orb_integrate(inc * inc)}")


CRITERIA: dict[int, tuple[str, Callable[[_Collector, WdvvEngine], None], float | None]] = {
    1: ("ring axioms, Frobenius, R1 = R2 = 0, g^4 = a^4/2", _c1, 1.0),
    2: ("pairing matrix entry-for-entry against the published table", _c2, None),
    3: ("Hilbert scheme normal forms, integral, graded dimensions", _c3, None),
    4: ("degree-0 closed form equals the continued polylogarithm, g = 1..8", _c4, 1.0),
    5: ("engine base values <a^4,a^2>=6, <a^3,a^3>=9, <g2,g2>=1, <a^4,b>=0", _c5, None),
    6: ("reconstructed <g2,g2,g,g>_1 = -1/2 and <g2,g2,g^4>_1 = 1/2", _c6, 60.0),
    7: ("every relation at levels d <= 1, n <= 6 vanishes after solving", _c7, None),
    8: ("six two-point series and their values at q = -1", _c8, None),
    9: ("quantum relations, bridge map, integrals", _c9, None),
    10: ("partition counts, conversion matrix, J/E round trip", _c10, 30.0),
    11: ("E(1,0) = 0 and incidence self-intersection 1", _c11, None),
}


def run_criterion(number: int, engine: WdvvEngine | None = None) -> CriterionResult:
    title, fn, limit = CRITERIA[number]
    engine = engine if engine is not None else WdvvEngine()
    c = _Collector()
    start = time.perf_counter()
    try:
        fn(c, engine)
    except Exception as exc:  # a crash is a failure, reported like one
        c.check(False, f"{type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed > limit:
        c.check(False, f"exceeded the {limit} s limit")
    return CriterionResult(number, title, not c.failures, c.failures, elapsed, limit)


@dataclass
class SelftestReport:
    criteria: list[CriterionResult]
    extras: list[dict]
    skipped: int
    cache_status: str = "none"
    cache_detail: str = ""

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.criteria) and all(e["status"] == "pass" for e in self.extras)

    def as_dict(self, timing: bool = False) -> dict:
        return {
            "passed": self.passed,
            "criteria": [r.as_dict(timing) for r in self.criteria],
            "extras": self.extras,
            "skipped": self.skipped,
        }


def _merge_into_cache(cache: Path, fresh: InvariantStore) -> tuple[str, str]:
    """Fold freshly computed values into the cache file at ``cache``.

    A cache that fails to load, or that disagrees with the recomputed
    values, is replaced outright.
    """
    target = InvariantStore(cache)
    state, detail = target.status.state, target.status.detail
    clashes = [
        k for k, v in fresh.items()
        if target.get((k.d, k.insertions)) not in (None, v)
    ]
    if clashes:
        log.warning("cache %s disagrees with recomputation at %d keys; replacing it", cache, len(clashes))
        detail = f"replaced: {len(clashes)} cached values disagreed with recomputation"
        target = InvariantStore(cache, load=False)
    for k, v in fresh.items():
        target.put((k.d, k.insertions), v)
    for level in fresh.levels():
        target.mark_level(level)
    target.save()
    return state, detail


def selftest(cache: Path | None = None, quick: bool = False, determinism: bool = True) -> SelftestReport:
    """Recompute every criterion on a fresh engine, then update ``cache`` if given.

    Cached values are never trusted here: the engine starts empty so that
    reconstructed values really come from elimination.
    """
    engine = WdvvEngine(InvariantStore())
    criteria = [run_criterion(n, engine) for n in sorted(CRITERIA)]
    if determinism:
        criteria.append(criterion_12())
    extras, skipped = run_extras(engine, quick=quick)
    report = SelftestReport(criteria, extras, skipped)
    if cache is not None:
        report.cache_status, report.cache_detail = _merge_into_cache(Path(cache), engine.store)
    return report


def criterion_12() -> CriterionResult:
    """Run the selftest twice against fresh caches and once more against a warm one."""
    title = "two consecutive runs give byte-identical caches and JSON"
    start = time.perf_counter()
    failures = []
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for name in ("first", "second", "first"):
            path = Path(tmp) / f"{name}.cache"
            rep = selftest(path, quick=True, determinism=False)
            outputs.append((path.read_bytes(), json.dumps(rep.as_dict(), sort_keys=True)))
    if len({o[0] for o in outputs}) != 1:
        failures.append("cache files differ")
    if len({o[1] for o in outputs}) != 1:
        failures.append("JSON reports differ")
    return CriterionResult(12, title, not failures, failures, time.perf_counter() - start)


def run_acceptance(engine: WdvvEngine | None = None, include_determinism: bool = True) -> list[CriterionResult]:
    engine = engine if engine is not None else WdvvEngine()
    results = [run_criterion(n, engine) for n in sorted(CRITERIA)]
    if include_determinism:
        results.append(criterion_12())
    return results


# -- supplementary checks ------------------------------------------------------------------


def _extra_degree_zero_derivation(engine: WdvvEngine) -> list[str]:
    bad = []
    for g in range(1, 9):
        series = (-1) ** (g + 1) * 6 * polylog_negative(2 * g - 1)
        if crc_degree_zero(g, "ag").series != series:
            bad.append(f"g={g}: derived odd series differs from the closed form")
        if crc_degree_zero(g, "g2").at(-1) != 0:
            bad.append(f"g={g}: derived even series does not vanish at q = -1")
    return bad


def _extra_conics(engine: WdvvEngine) -> list[str]:
    table = count_hyperelliptic(2, 1, engine)
    return [] if table.J == [0, 0] else [f"J(2, g) = {[str(j) for j in table.J]}, expected zeros"]


def _extra_residuals_d2(engine: WdvvEngine) -> list[str]:
    bad = []
    for n in range(3, 6):
        engine.solve_level(2, n)
        nonzero = sum(1 for r in engine.iter_relations(2, n, strict=True) if r.residual(engine.value))
        if nonzero:
            bad.append(f"level (2, {n}): {nonzero} relations nonzero")
    return bad


def _extra_divisor_d2(engine: WdvvEngine) -> list[str]:
    key = InvariantKey(2, (G2, G2, G2, G2, G0, G0))
    with_alpha = engine.value(InvariantKey(2, key.insertions + (1,)))
    return [] if with_alpha == 2 * engine.value(key) else ["divisor axiom fails at degree 2"]


EXTRAS: dict[str, tuple[Callable[[WdvvEngine], list[str]], bool]] = {
    "degree-0 series derived from the Hilbert side match the closed form, g = 1..8":
        (_extra_degree_zero_derivation, False),
    "no hyperelliptic conics through 7 points: J(2,0) = J(2,1) = 0": (_extra_conics, True),
    "relations at levels (2, n <= 5) vanish": (_extra_residuals_d2, True),
    "divisor axiom at degree 2": (_extra_divisor_d2, True),
}
"""title -> (check, needs degree 2). Degree-2 checks are skipped by quick mode."""


def run_extras(engine: WdvvEngine, quick: bool = False) -> tuple[list[dict], int]:
    """Supplementary checks; returns (reports, number skipped)."""
    out = []
    skipped = 0
    for title, (fn, heavy) in EXTRAS.items():
        if quick and heavy:
            skipped += 1
            continue
        try:
            problems = fn(engine)
        except Exception as exc:
            problems = [f"{type(exc).__name__}: {exc}"]
        out.append({"title": title, "status": "fail" if problems else "pass", "details": problems})
    return out, skipped
