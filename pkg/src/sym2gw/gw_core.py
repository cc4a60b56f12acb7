"""Invariant keys, axioms and the initial data of the reconstruction.

A genus-zero invariant <e_{i1}, ..., e_{in}>_d is identified by its degree
and the sorted multiset of basis indices. Keys that are forced to vanish
(dimension, parity, unit axiom) or are fixed by closed forms are handled
here; everything else is left to the WDVV engine.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Iterable, Sequence

from .chow_rings import (
    ORB_DEGREES, ORB_NAMES, TWISTED, GAMMA0, OrbClass, PRODUCT,
)
from .exact_arith import GaussRational, bernoulli, to_gauss

__all__ = [
    "InvariantKey",
    "InvariantQuery",
    "HodgeData",
    "NotABaseCase",
    "NOT_A_BASE_CASE",
    "UnstableInvariant",
    "convert_notation",
    "dimension_admissible",
    "vanishing_reason",
    "strip_axioms",
    "base_value",
    "degree_zero_twisted",
    "fp_hodge_integral",
    "hodge_data",
    "expand_insertions",
    "DEGREE_ONE_TWO_POINT",
    "UNIT",
    "DIVISOR",
]

UNIT = 0
DIVISOR = 1
_ALPHA2, _BETA, _ALPHA3, _ALPHA4, _G0, _G1, _G2 = 2, 3, 4, 5, 6, 7, 8

DEGREE_ONE_TWO_POINT: dict[tuple[int, int], Fraction] = {
    (_ALPHA2, _ALPHA4): Fraction(6),
    (_BETA, _ALPHA4): Fraction(0),
    (_ALPHA3, _ALPHA3): Fraction(9),
    (_G2, _G2): Fraction(1),
}
"""Degree-one two-point invariants, keyed by sorted index pairs."""


@dataclass(frozen=True, order=True)
class InvariantKey:
    """Degree plus sorted insertion indices. Ordering is lexicographic."""

    d: int
    insertions: tuple[int, ...]

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("degree must be nonnegative")
        ins = tuple(sorted(int(k) for k in self.insertions))
        if any(k < 0 or k > 8 for k in ins):
            raise ValueError(f"basis index out of range in {ins}")
        object.__setattr__(self, "insertions", ins)

    @classmethod
    def of(cls, d: int, *insertions: int) -> InvariantKey:
        return cls(d, tuple(insertions))

    @property
    def n(self) -> int:
        return len(self.insertions)

    @property
    def level(self) -> tuple[int, int]:
        return (self.d, self.n)

    @property
    def twisted_count(self) -> int:
        return sum(1 for k in self.insertions if k in TWISTED)

    @property
    def genus(self) -> Fraction:
        """The g with 2g + 2 twisted insertions (may be -1 or a half-integer)."""
        return Fraction(self.twisted_count - 2, 2)

    @property
    def degree_sum(self) -> int:
        return sum(ORB_DEGREES[k] for k in self.insertions)

    def without(self, index: int) -> InvariantKey:
        ins = list(self.insertions)
        ins.remove(index)
        return InvariantKey(self.d, tuple(ins))

    def serialize(self) -> str:
        return f"{self.d}|" + ",".join(str(k) for k in self.insertions)

    @classmethod
    def parse(cls, text: str) -> InvariantKey:
        d, _, rest = text.strip().partition("|")
        if not _:
            raise ValueError(f"malformed key {text!r}")
        ins = tuple(int(k) for k in rest.split(",")) if rest else ()
        key = cls(int(d), ins)
        if key.serialize() != text.strip():
            raise ValueError(f"non-canonical key {text!r}")
        return key

    def pretty(self) -> str:
        return f"<{', '.join(ORB_NAMES[k] for k in self.insertions)}>_{self.d}"

    def __str__(self) -> str:
        return self.serialize()


@dataclass(frozen=True)
class InvariantQuery:
    """A bracket <x1, ..., xn>_d with arbitrary classes; multilinear in each slot."""

    d: int
    insertions: tuple[OrbClass, ...]
    vanishing: str | None = None

    def expand(self) -> dict[InvariantKey, GaussRational]:
        if self.vanishing:
            return {}
        return expand_insertions(self.d, self.insertions)


@dataclass(frozen=True)
class HodgeData:
    g: int
    value: Fraction


class NotABaseCase:
    """Sentinel returned by :func:`base_value` when the engine must take over."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOT_A_BASE_CASE"


NOT_A_BASE_CASE = NotABaseCase()


class UnstableInvariant(ValueError):
    """Degree zero with fewer than three markings: not defined, not zero."""


def is_stable(key: InvariantKey) -> bool:
    return key.d > 0 or key.n >= 3


def dimension_admissible(key: InvariantKey) -> bool:
    """Orbifold degrees sum to 3d + 1 + n and the twisted count is even."""
    return key.degree_sum == 3 * key.d + 1 + key.n and key.twisted_count % 2 == 0


def vanishing_reason(key: InvariantKey) -> str | None:
    """Why an invariant is identically zero before any computation, if it is.

    Returned reasons, in priority order: ``"unit axiom"``, ``"parity"``,
    ``"dimension"``. ``None`` means the value has to be looked up.
    """
    if UNIT in key.insertions and not (key.d == 0 and key.n == 3):
        return "unit axiom"
    if key.twisted_count % 2:
        return "parity"
    if key.degree_sum != 3 * key.d + 1 + key.n:
        return "dimension"
    return None


def convert_notation(d: int, h: int, insertions: Sequence[OrbClass]) -> InvariantQuery:
    """Turn a (d, h)-bracket into a d-bracket by appending 2(h - g) copies of gamma.

    Each insertion must lie in a single sector; g is read off from the
    number 2g + 2 of twisted insertions.
    """
    twisted = 0
    for x in insertions:
        sectors = x.sectors()
        if len(sectors) > 1:
            raise ValueError(f"insertion {x} mixes sectors")
        twisted += "twisted" in sectors
    if twisted % 2:
        return InvariantQuery(d, tuple(insertions), vanishing="parity")
    g = (twisted - 2) // 2
    if h < g:
        return InvariantQuery(d, tuple(insertions), vanishing="genus below twisted count")
    return InvariantQuery(d, tuple(insertions) + (GAMMA0,) * (2 * (h - g)))


def fp_hodge_integral(g: int) -> Fraction:
    """Closed form (-1)^(g-1) (2^(2g) - 1) B_(2g) / (2g) for g >= 1."""
    if g < 1:
        raise ValueError("genus must be at least 1")
    return (-1) ** (g - 1) * (2 ** (2 * g) - 1) * bernoulli(2 * g) / (2 * g)


def hodge_data(g: int) -> HodgeData:
    return HodgeData(g, fp_hodge_integral(g))


def degree_zero_twisted(g: int) -> Fraction:
    """<g1, g0^(2g+1)>_0 = (-1)^g (2^(2g) - 1) 3 B_(2g) / (2g)."""
    return (-1) ** g * (2 ** (2 * g) - 1) * 3 * bernoulli(2 * g) / (2 * g)


def _triple_integral(i: int, j: int, k: int) -> Fraction:
    return 3 * sum(PRODUCT[i][j][m] * PRODUCT[m][k][5] for m in range(9))


def strip_axioms(key: InvariantKey) -> tuple[Fraction, InvariantKey]:
    """Remove unit and divisor insertions.

    Returns ``(factor, reduced)`` with value(key) = factor * value(reduced).
    Degree-zero three-point keys are returned unchanged since they are
    integrals. A zero factor means the key vanishes.
    """
    factor = Fraction(1)
    while True:
        if key.d == 0 and key.n == 3:
            return factor, key
        if UNIT in key.insertions:
            return Fraction(0), key
        if DIVISOR in key.insertions:
            if key.d == 0:
                return Fraction(0), key
            factor *= key.d
            key = key.without(DIVISOR)
            continue
        return factor, key


def base_value(key: InvariantKey) -> Fraction | NotABaseCase:
    """Value fixed by axioms and closed forms, or ``NOT_A_BASE_CASE``."""
    if not is_stable(key):
        raise UnstableInvariant(f"{key.pretty()} is unstable")
    if not dimension_admissible(key):
        return Fraction(0)
    factor, reduced = strip_axioms(key)
    if factor == 0:
        return Fraction(0)
    if not is_stable(reduced):
        raise UnstableInvariant(f"{reduced.pretty()} is unstable")
    ins = reduced.insertions
    if reduced.d == 0:
        if reduced.n == 3:
            return factor * _triple_integral(*ins)
        if any(k not in TWISTED for k in ins):
            return Fraction(0)
        counts = Counter(ins)
        if counts[_G1] == 1 and counts[_G0] == reduced.n - 1:
            return factor * degree_zero_twisted((reduced.n - 2) // 2)
        return Fraction(0)
    if reduced.d == 1 and reduced.n == 2:
        return factor * DEGREE_ONE_TWO_POINT.get(ins, Fraction(0))
    return NOT_A_BASE_CASE


def expand_insertions(d: int, insertions: Iterable[OrbClass]) -> dict[InvariantKey, GaussRational]:
    """Multilinear expansion of <x1, ..., xn>_d over basis keys."""
    slots = [x.terms() for x in insertions]
    out: dict[InvariantKey, GaussRational] = {}
    for combo in product(*slots):
        key = InvariantKey(d, tuple(k for k, _ in combo))
        c = reduce(lambda acc, t: acc * t[1], combo, to_gauss(1))
        out[key] = out.get(key, to_gauss(0)) + c
    return {k: v for k, v in sorted(out.items()) if v}
