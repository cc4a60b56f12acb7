"""From Gromov-Witten numbers to counts of hyperelliptic plane curves.

J(d, g) is the invariant with 3d + 1 point-incidence insertions and
2g + 2 copies of gamma. It is a weighted sum of the counts E(d, g') for
g' <= g. A genus-g' curve contributes once for every way of grouping the
2g + 2 twisted markings into 2g' + 2 blocks of odd size, weighted by
(-1/4)^(g - g'), and the (2g' + 2)! orderings of its Weierstrass points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Iterator, Sequence

from .chow_rings import ALPHA2, BETA, GAMMA0, OrbClass, pullback
from .exact_arith import GaussRational

__all__ = [
    "OddPartitionType",
    "TypeMismatch",
    "partition_type_count",
    "odd_partition_types",
    "odd_set_partitions",
    "conversion_matrix",
    "conversion_matrix_by_enumeration",
    "j_from_e",
    "e_from_j",
    "incidence_class",
    "hyperelliptic_insertions",
    "CountTable",
    "count_hyperelliptic",
]

WEIGHT = Fraction(-1, 4)
"""Contribution of each contracted pair of Weierstrass points."""


class TypeMismatch(ValueError):
    """The partition type does not fit the size of the set."""


@dataclass(frozen=True)
class OddPartitionType:
    """counts[i] = number of blocks of size 2i + 1."""

    counts: tuple[int, ...]

    def __post_init__(self):
        cs = list(self.counts)
        while cs and cs[-1] == 0:
            cs.pop()
        if any(c < 0 for c in cs):
            raise ValueError("block counts must be nonnegative")
        object.__setattr__(self, "counts", tuple(cs))

    @classmethod
    def from_blocks(cls, sizes: Sequence[int]) -> OddPartitionType:
        if any(s % 2 == 0 or s < 1 for s in sizes):
            raise ValueError("block sizes must be odd and positive")
        top = max(sizes, default=1) // 2
        return cls(tuple(sum(1 for s in sizes if s == 2 * i + 1) for i in range(top + 1)))

    @property
    def size(self) -> int:
        return sum((2 * i + 1) * b for i, b in enumerate(self.counts))

    @property
    def blocks(self) -> int:
        return sum(self.counts)

    @property
    def genus_drop(self) -> int:
        """sum of i * b_i, which equals g - g' for a contributing type."""
        return sum(i * b for i, b in enumerate(self.counts))

    def __str__(self) -> str:
        parts = [f"{2 * i + 1}^{b}" for i, b in enumerate(self.counts) if b]
        return "(" + " ".join(parts) + ")"


def partition_type_count(n: int, ptype: OddPartitionType) -> int:
    """Number of set partitions of an n-set with the given block type."""
    if ptype.size != n:
        raise TypeMismatch(f"type {ptype} has size {ptype.size}, expected {n}")
    denom = prod(factorial(2 * i + 1) ** b * factorial(b) for i, b in enumerate(ptype.counts))
    return factorial(n) // denom


def odd_partition_types(n: int, blocks: int | None = None) -> Iterator[OddPartitionType]:
    """All block types of partitions of an n-set into odd blocks."""

    def rec(remaining: int, largest: int, acc: list[int]) -> Iterator[list[int]]:
        if remaining == 0:
            yield acc
            return
        for s in range(min(largest, remaining), 0, -1):
            if s % 2:
                yield from rec(remaining - s, s, acc + [s])

    for sizes in rec(n, n if n % 2 else n - 1, []):
        if blocks is None or len(sizes) == blocks:
            yield OddPartitionType.from_blocks(sizes)


def odd_set_partitions(n: int) -> Iterator[list[list[int]]]:
    """Brute-force enumeration of set partitions of range(n) into odd blocks."""

    def rec(items: list[int]) -> Iterator[list[list[int]]]:
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        # choose the block containing `first`: first plus an even subset of rest
        for mask in range(1 << len(rest)):
            if bin(mask).count("1") % 2:
                continue
            block = [first] + [x for k, x in enumerate(rest) if mask >> k & 1]
            others = [x for k, x in enumerate(rest) if not mask >> k & 1]
            for tail in rec(others):
                yield [block] + tail

    yield from rec(list(range(n)))


def conversion_matrix(G: int) -> list[list[Fraction]]:
    """Lower-triangular M with J(d, g) = sum_g' M[g][g'] E(d, g')."""
    if G < 0:
        raise ValueError("G must be nonnegative")
    m = [[Fraction(0)] * (G + 1) for _ in range(G + 1)]
    for g in range(G + 1):
        n = 2 * g + 2
        for gp in range(g + 1):
            total = 0
            for t in odd_partition_types(n, blocks=2 * gp + 2):
                assert t.genus_drop == g - gp
                total += partition_type_count(n, t)
            m[g][gp] = WEIGHT ** (g - gp) * factorial(2 * gp + 2) * total
    return m


def conversion_matrix_by_enumeration(G: int) -> list[list[Fraction]]:
    """The same matrix, summing over explicitly enumerated set partitions."""
    m = [[Fraction(0)] * (G + 1) for _ in range(G + 1)]
    for g in range(G + 1):
        tally = [0] * (g + 1)
        for blocks in odd_set_partitions(2 * g + 2):
            tally[(len(blocks) - 2) // 2] += 1
        for gp, count in enumerate(tally):
            m[g][gp] = WEIGHT ** (g - gp) * factorial(2 * gp + 2) * count
    return m


def _check_degree(d: int) -> None:
    if d < 1:
        raise ValueError("degree must be positive")


def j_from_e(d: int, e_values: Sequence[Fraction],
             matrix: Sequence[Sequence[Fraction]] | None = None) -> list[Fraction]:
    """J(d, g) for g <= len(e_values) - 1. The weights do not depend on d."""
    _check_degree(d)
    G = len(e_values) - 1
    m = matrix or conversion_matrix(G)
    return [sum((m[g][k] * Fraction(e_values[k]) for k in range(g + 1)), Fraction(0)) for g in range(G + 1)]


def e_from_j(d: int, j_values: Sequence[Fraction],
             matrix: Sequence[Sequence[Fraction]] | None = None) -> list[Fraction]:
    """Forward substitution through the lower-triangular conversion matrix."""
    _check_degree(d)
    G = len(j_values) - 1
    m = matrix or conversion_matrix(G)
    out: list[Fraction] = []
    for g in range(G + 1):
        acc = Fraction(j_values[g]) - sum((m[g][k] * out[k] for k in range(g)), Fraction(0))
        out.append(acc / m[g][g])
    return out


def incidence_class() -> OrbClass:
    """Class of the pairs meeting a fixed point: pulls back to h1^2 + h2^2."""
    return ALPHA2 - 2 * BETA


def incidence_pullback() -> dict[tuple[int, int], GaussRational]:
    return pullback(incidence_class())


def hyperelliptic_insertions(d: int, g: int) -> list[OrbClass]:
    return [incidence_class()] * (3 * d + 1) + [GAMMA0] * (2 * g + 2)


@dataclass
class CountTable:
    d: int
    J: list[Fraction]
    E: list[Fraction]
    flags: dict[int, list[str]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "degree": self.d,
            "rows": [
                {"genus": g, "J": str(j), "E": str(e), "flags": self.flags.get(g, [])}
                for g, (j, e) in enumerate(zip(self.J, self.E))
            ],
        }


def count_hyperelliptic(d: int, G: int, engine=None) -> CountTable:
    """J(d, g) for g <= G through the engine, then E(d, g) by inversion."""
    if d < 1 or G < 0:
        raise ValueError("need d >= 1 and G >= 0")
    if engine is None:
        from .wdvv_engine import default_engine

        engine = default_engine()
    j_values: list[Fraction] = []
    for g in range(G + 1):
        v = engine.evaluate(d, hyperelliptic_insertions(d, g))
        if not v.is_real():
            raise ArithmeticError("hyperelliptic invariant came out non-real")
        j_values.append(v.re)
    e_values = e_from_j(d, j_values)
    flags: dict[int, list[str]] = {}
    for g, e in enumerate(e_values):
        notes = []
        if e.denominator != 1:
            notes.append("non-integral")
        if e < 0:
            notes.append("negative")
        if notes:
            flags[g] = notes
    return CountTable(d, j_values, e_values, flags)
