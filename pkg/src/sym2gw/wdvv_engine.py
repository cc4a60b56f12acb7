"""WDVV reconstruction of all genus-zero invariants.

Invariants are organised in levels (d, n): degree d with n insertions.
At a level, every admissible key whose insertions avoid 1 and alpha and
which is not fixed by initial data is an unknown. For every 4-multiset
{a, b, c, e} of basis classes and every multiset S of n - 3 classes, the
associativity identity F(ab|ce) = F(ac|be) = F(ae|bc), where

    F(x, y | z, w) = sum over S1 + S2 = S, d1 + d2 = d, i of
        <x, y, S1, e_i>_{d1} * <dual(e_i), z, w, S2>_{d2},

is linear in the unknowns: only the splittings with (d1, S1) = (d, S) or
(0, empty) touch level (d, n), and the other factor is then a degree-zero
three-point integral. All other factors live at strictly lower levels and
are computed first, recursively and on demand.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import comb
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .chow_rings import (
    ORB_DEGREES, PAIRING, PRODUCT, TWISTED, OrbClass, orb_pairing,
)
from .exact_arith import GaussRational, format_rational, invert_matrix, parse_rational, to_gauss
from .gw_core import (
    DEGREE_ONE_TWO_POINT, NOT_A_BASE_CASE, InvariantKey, InvariantQuery, base_value,
    degree_zero_twisted, dimension_admissible, expand_insertions, vanishing_reason,
)

__all__ = [
    "DualBasisPair",
    "dual_basis",
    "WdvvRelation",
    "WdvvEngine",
    "InvariantStore",
    "Underdetermined",
    "InconsistentSystem",
    "UnknownLowerInvariant",
    "SchedulingError",
    "CacheStatus",
    "FINGERPRINT",
    "FREE_CLASSES",
    "wdvv_relation",
    "compute_invariant",
    "default_engine",
]

log = logging.getLogger(__name__)

RawKey = tuple  # (d, sorted tuple of basis indices)

FREE_CLASSES: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8)
"""Basis classes that can appear in an unknown: everything except 1 and alpha."""

_DEG = ORB_DEGREES
_TW = tuple(1 if k in TWISTED else 0 for k in range(9))
_BY_DEGREE: dict[int, tuple[int, ...]] = {
    d: tuple(k for k in range(9) if _DEG[k] == d) for d in range(5)
}


class Underdetermined(ArithmeticError):
    """The relations at a level leave the requested invariant free."""

    def __init__(self, key: InvariantKey, free: Sequence[InvariantKey], residual: int):
        self.key = key
        self.free = list(free)
        self.residual_rank = residual
        super().__init__(
            f"{key.pretty()} is not determined by the WDVV system "
            f"({len(self.free)} free unknowns at level {key.level})"
        )


class InconsistentSystem(ArithmeticError):
    """A relation reduced to 0 = c with c nonzero."""


class UnknownLowerInvariant(LookupError):
    """A lower-level factor was needed but has not been computed."""


class SchedulingError(RuntimeError):
    """A level was requested while it was already being solved."""


# -- dual basis -----------------------------------------------------------------


@dataclass(frozen=True)
class DualBasisPair:
    basis: tuple[OrbClass, ...]
    duals: tuple[OrbClass, ...]
    terms: tuple[tuple[tuple[int, Fraction], ...], ...]
    """terms[i]: sparse coordinates of dual(e_i) as (basis index, coefficient)."""


def _build_dual_basis() -> DualBasisPair:
    inv = invert_matrix(PAIRING)
    terms = tuple(
        tuple((j, inv[i][j].re) for j in range(9) if inv[i][j]) for i in range(9)
    )
    basis = tuple(OrbClass.basis(k) for k in range(9))
    duals = tuple(OrbClass(inv[i]) for i in range(9))
    for i in range(9):
        for j in range(9):
            if orb_pairing(basis[i], duals[j]) != (1 if i == j else 0):
                raise AssertionError("dual basis construction failed")
    return DualBasisPair(basis, duals, terms)


_DUAL = _build_dual_basis()
_DUAL_TERMS = _DUAL.terms


def dual_basis() -> DualBasisPair:
    return _DUAL


# -- fingerprint ----------------------------------------------------------------


def _fingerprint() -> str:
    data = {
        "format": 1,
        "degrees": list(ORB_DEGREES),
        "product": [[[str(c) for c in cell] for cell in row] for row in PRODUCT],
        "two_point": {f"{a},{b}": str(v) for (a, b), v in sorted(DEGREE_ONE_TWO_POINT.items())},
        "degree_zero": [str(degree_zero_twisted(g)) for g in range(1, 6)],
    }
    blob = json.dumps(data, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


FINGERPRINT = _fingerprint()


# -- persistent store -------------------------------------------------------------


@dataclass(frozen=True)
class CacheStatus:
    state: str  # "absent", "loaded", "rejected", "memory"
    detail: str = ""


class InvariantStore:
    """Solved invariants plus the set of fully solved levels.

    Values are final: putting a different value for a known key is an
    error. Snapshots on disk are written to a temporary file and renamed
    into place, so readers never see a partial file.
    """

    HEADER = "# sym2gw invariant cache"

    def __init__(self, path: str | os.PathLike | None = None, fingerprint: str = FINGERPRINT,
                 load: bool = True):
        self.path = Path(path) if path is not None else None
        self.fingerprint = fingerprint
        self._values: dict[RawKey, Fraction] = {}
        self._levels: set[tuple[int, int]] = set()
        self._loaded: set[RawKey] = set()
        self._lock = threading.RLock()
        self._dirty = False
        self.status = CacheStatus("memory")
        if self.path is not None and load:
            self.status = self.load()

    # mapping-ish interface on raw keys
    def get(self, key: RawKey) -> Fraction | None:
        return self._values.get(key)

    def __contains__(self, key: RawKey) -> bool:
        return key in self._values

    def __len__(self) -> int:
        return len(self._values)

    def put(self, key: RawKey, value: Fraction) -> None:
        with self._lock:
            old = self._values.get(key)
            if old is not None:
                if old != value:
                    raise InconsistentSystem(
                        f"stored value {old} for {key} disagrees with new value {value}"
                    )
                return
            self._values[key] = Fraction(value)
            self._dirty = True

    def mark_level(self, level: tuple[int, int]) -> None:
        with self._lock:
            if level not in self._levels:
                self._levels.add(level)
                self._dirty = True

    def has_level(self, level: tuple[int, int]) -> bool:
        return level in self._levels

    def levels(self) -> list[tuple[int, int]]:
        return sorted(self._levels)

    def was_loaded(self, key: RawKey) -> bool:
        return key in self._loaded

    def items(self) -> list[tuple[InvariantKey, Fraction]]:
        return [(InvariantKey(d, ins), v) for (d, ins), v in sorted(self._values.items())]

    @property
    def dirty(self) -> bool:
        return self._dirty

    # persistence
    def dumps(self) -> str:
        lines = [
            self.HEADER,
            "# format: 1",
            f"# fingerprint: {self.fingerprint}",
            "# levels: " + " ".join(f"{d}:{n}" for d, n in sorted(self._levels)),
        ]
        for (d, ins), v in sorted(self._values.items()):
            lines.append(f"{InvariantKey(d, ins).serialize()} = {format_rational(v)}")
        return "\n".join(lines) + "\n"

    def _parse(self, text: str) -> tuple[dict[RawKey, Fraction], set[tuple[int, int]]]:
        lines = text.splitlines()
        if len(lines) < 4 or lines[0] != self.HEADER or lines[1] != "# format: 1":
            raise ValueError("unrecognised header")
        if lines[2] != f"# fingerprint: {self.fingerprint}":
            raise ValueError("fingerprint mismatch")
        if not lines[3].startswith("# levels:"):
            raise ValueError("missing level record")
        levels = set()
        for tok in lines[3][len("# levels:"):].split():
            d, n = tok.split(":")
            levels.add((int(d), int(n)))
        values: dict[RawKey, Fraction] = {}
        prev = None
        for lineno, line in enumerate(lines[4:], start=5):
            key_text, sep, val_text = line.partition(" = ")
            if not sep:
                raise ValueError(f"line {lineno}: malformed record")
            key = InvariantKey.parse(key_text)
            raw = (key.d, key.insertions)
            if prev is not None and raw <= prev:
                raise ValueError(f"line {lineno}: records out of order")
            prev = raw
            if not dimension_admissible(key):
                raise ValueError(f"line {lineno}: inadmissible key")
            values[raw] = parse_rational(val_text)
        return values, levels

    def load(self) -> CacheStatus:
        assert self.path is not None
        if not self.path.exists():
            return CacheStatus("absent")
        try:
            values, levels = self._parse(self.path.read_text())
        except (ValueError, UnicodeDecodeError, ZeroDivisionError) as exc:
            log.warning("ignoring cache %s: %s", self.path, exc)
            return CacheStatus("rejected", str(exc))
        with self._lock:
            self._values.update(values)
            self._levels |= levels
            self._loaded = set(values)
        return CacheStatus("loaded", f"{len(values)} invariants")

    def save(self) -> None:
        if self.path is None:
            return
        with self._lock:
            text = self.dumps()
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=self.path.name + ".", suffix=".tmp")
            try:
                with os.fdopen(fd, "w") as fh:
                    fh.write(text)
                    fh.flush()
                    os.fsync(fh.fileno())
                os.chmod(tmp, 0o644)
                os.replace(tmp, self.path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
            self._dirty = False


# -- relations --------------------------------------------------------------------


@dataclass
class WdvvRelation:
    """sum(coeff * value(key)) + constant = 0 over unknowns at one level."""

    level: tuple[int, int]
    unknowns: dict[InvariantKey, Fraction] = field(default_factory=dict)
    constant: Fraction = Fraction(0)
    label: str = ""

    def is_trivial(self) -> bool:
        return not self.unknowns and self.constant == 0

    def residual(self, values: Callable[[InvariantKey], Fraction]) -> Fraction:
        return self.constant + sum((c * values(k) for k, c in self.unknowns.items()), Fraction(0))


class _Sparse:
    """Incremental reduced row echelon form over Q with sparse rows.

    Rows are dicts column -> coefficient together with a constant term
    (row . x + const = 0). The pivot of a row is its smallest column,
    which follows the sorted key order of the unknowns.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, tuple[dict[int, Fraction], Fraction]] = {}
        self.rows_seen = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def full(self) -> bool:
        return len(self.pivots) == self.ncols

    def add(self, row: dict[int, Fraction], const: Fraction) -> bool:
        self.rows_seen += 1
        row = {c: v for c, v in row.items() if v}
        for col in [c for c in row if c in self.pivots]:
            f = row.get(col)
            if not f:
                continue
            prow, pconst = self.pivots[col]
            for c, v in prow.items():
                nv = row.get(c, 0) - f * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            const -= f * pconst
        if not row:
            if const:
                raise InconsistentSystem(f"relation reduces to 0 = {const}")
            return False
        p = min(row)
        inv = 1 / row[p]
        row = {c: v * inv for c, v in row.items()}
        const *= inv
        for col, (prow, pconst) in list(self.pivots.items()):
            f = prow.get(p)
            if f:
                for c, v in row.items():
                    nv = prow.get(c, 0) - f * v
                    if nv:
                        prow[c] = nv
                    else:
                        prow.pop(c, None)
                self.pivots[col] = (prow, pconst - f * const)
        self.pivots[p] = (row, const)
        return True

    def solution(self) -> dict[int, Fraction]:
        """Columns whose value is pinned down."""
        return {p: -const for p, (row, const) in self.pivots.items() if len(row) == 1}


def _sub_multisets(counts: Sequence[tuple[int, int]]) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], int]]:
    """Yield (S1, S2, multiplicity) for all labelled splittings of a multiset."""
    ranges = [range(m + 1) for _, m in counts]
    for pick in product(*ranges):
        s1: list[int] = []
        s2: list[int] = []
        mult = 1
        for (k, m), t in zip(counts, pick):
            s1.extend([k] * t)
            s2.extend([k] * (m - t))
            mult *= comb(m, t)
        yield tuple(s1), tuple(s2), mult


def _level_unknowns(d: int, n: int) -> list[RawKey]:
    """Keys at level (d, n) left to elimination; degree zero is all closed form."""
    if d == 0:
        return []
    target = 3 * d + 1 + n
    out = []
    for ins in combinations_with_replacement(FREE_CLASSES, n):
        if sum(_DEG[k] for k in ins) == target and sum(_TW[k] for k in ins) % 2 == 0:
            out.append((d, ins))
    return out


def _unknown_index(level: tuple[int, int]) -> dict[RawKey, int]:
    return {k: i for i, k in enumerate(_level_unknowns(*level))}


def _quads() -> list[tuple[int, int, int, int]]:
    """4-multisets over the non-unit classes, those containing alpha first."""
    qs = list(combinations_with_replacement(range(1, 9), 4))
    qs.sort(key=lambda q: (1 not in q, q))
    return qs


_QUADS = _quads()


class WdvvEngine:
    """Lazily reconstructs invariants level by level.

    Thread-safe: values are read from append-only dicts and all solving
    happens under a single re-entrant lock.
    """

    def __init__(self, store: InvariantStore | None = None):
        self.store = store if store is not None else InvariantStore()
        self._memo: dict[RawKey, Fraction] = {}
        self._free: dict[tuple[int, int], set[RawKey]] = {}
        self._active: list[tuple[int, int]] = []
        self._lock = threading.RLock()
        self.solved_here: list[tuple[int, int]] = []
        self.stats: dict[tuple[int, int], dict[str, int]] = {}

    # -- values --------------------------------------------------------------

    def value(self, key: InvariantKey) -> Fraction:
        """Value of any stable basis key (zero if inadmissible)."""
        return self._value(key.d, key.insertions)

    def _value(self, d: int, ins: tuple[int, ...]) -> Fraction:
        raw = (d, ins)
        v = self._memo.get(raw)
        if v is not None:
            return v
        with self._lock:
            v = self._resolve(d, ins)
            self._memo[raw] = v
            return v

    def _reduce(self, d: int, ins: tuple[int, ...]) -> tuple[Fraction, tuple[int, ...]] | None:
        """Strip unit/divisor insertions; None if the key vanishes."""
        if d == 0 and len(ins) == 3:
            return Fraction(1), ins
        if ins and ins[0] == 0:
            return None
        k = 0
        while k < len(ins) and ins[k] == 1:
            k += 1
        if k and d == 0:
            return None
        return Fraction(d) ** k, ins[k:]

    def _resolve(self, d: int, ins: tuple[int, ...]) -> Fraction:
        key = InvariantKey(d, ins)
        b = base_value(key)
        if b is not NOT_A_BASE_CASE:
            return b
        red = self._reduce(d, ins)
        assert red is not None  # base_value handles vanishing keys
        factor, rins = red
        raw = (d, rins)
        v = self.store.get(raw)
        if v is None:
            self.solve_level(d, len(rins))
            v = self.store.get(raw)
        if v is None:
            free = sorted(self._free.get((d, len(rins)), ()))
            raise Underdetermined(
                InvariantKey(d, rins), [InvariantKey(*f) for f in free], len(free)
            )
        return factor * v

    def compute_invariant(self, key: InvariantKey) -> Fraction:
        if not dimension_admissible(key):
            raise ValueError(f"{key.pretty()} is not dimension admissible")
        return self.value(key)

    def evaluate(self, d: int, insertions: Sequence[OrbClass]) -> GaussRational:
        """Multilinear evaluation of <x1, ..., xn>_d for arbitrary classes."""
        total = to_gauss(0)
        for key, c in expand_insertions(d, insertions).items():
            if vanishing_reason(key) is None:
                total = total + c * self.value(key)
        return total

    def query(self, q: InvariantQuery) -> GaussRational:
        if q.vanishing:
            return to_gauss(0)
        return self.evaluate(q.d, q.insertions)

    # -- relation assembly ------------------------------------------------------

    def _factor(self, d: int, ins: tuple[int, ...], level: tuple[int, int],
                index: dict[RawKey, int], lookup: Callable[[int, tuple[int, ...]], Fraction]):
        """Return ('v', value) for a known factor or ('u', raw key) for an unknown."""
        if (d, len(ins)) == level:
            red = self._reduce(d, ins)
            if red is None:
                return "v", Fraction(0)
            factor, rins = red
            if len(rins) == len(ins):
                if (d, rins) in index:
                    return "u", (d, rins)
        return "v", lookup(d, ins)

    def _pairing_sum(self, x: int, y: int, z: int, w: int, s_counts, d: int,
                     level: tuple[int, int], index: dict[RawKey, int], lookup) -> tuple[dict[RawKey, Fraction], Fraction]:
        """F(x, y | z, w) split into unknown coefficients and a constant."""
        unknowns: dict[RawKey, Fraction] = {}
        const = Fraction(0)
        dxy = _DEG[x] + _DEG[y]
        txy = _TW[x] + _TW[y]
        for s1, s2, mult in _sub_multisets(s_counts):
            ds1 = sum(_DEG[k] for k in s1)
            ts1 = sum(_TW[k] for k in s1)
            for d1 in range(d + 1):
                d2 = d - d1
                need = 3 * d1 + 1 + len(s1) + 3 - dxy - ds1
                for i in _BY_DEGREE.get(need, ()):
                    if (txy + ts1 + _TW[i]) % 2:
                        continue
                    left = tuple(sorted((x, y, i) + s1))
                    kind1, v1 = self._factor(d1, left, level, index, lookup)
                    if kind1 == "v" and not v1:
                        continue
                    for j, gij in _DUAL_TERMS[i]:
                        right = tuple(sorted((j, z, w) + s2))
                        kind2, v2 = self._factor(d2, right, level, index, lookup)
                        if kind2 == "v" and not v2:
                            continue
                        if kind1 == "u" and kind2 == "u":
                            raise AssertionError("relation is not linear")
                        if kind1 == "u":
                            unknowns[v1] = unknowns.get(v1, 0) + mult * gij * v2
                        elif kind2 == "u":
                            unknowns[v2] = unknowns.get(v2, 0) + mult * gij * v1
                        else:
                            const += mult * gij * v1 * v2
        return unknowns, const

    def _relations_for(self, quad, s: tuple[int, ...], d: int, level, index, lookup):
        a, b, c, e = quad
        counts = sorted(Counter(s).items())
        f_ab = self._pairing_sum(a, b, c, e, counts, d, level, index, lookup)
        f_ac = self._pairing_sum(a, c, b, e, counts, d, level, index, lookup)
        f_ae = self._pairing_sum(a, e, b, c, counts, d, level, index, lookup)
        for label, (u1, c1), (u2, c2) in (
            (f"{quad}|{s}:ab-ac", f_ab, f_ac),
            (f"{quad}|{s}:ab-ae", f_ab, f_ae),
        ):
            row = dict(u1)
            for k, v in u2.items():
                row[k] = row.get(k, 0) - v
            yield label, {k: v for k, v in row.items() if v}, c1 - c2

    def _level_inputs(self, d: int, n: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        """All (quad, S) pairs whose grading fits level (d, n)."""
        size = n - 3
        target = 3 * d + 4 + size
        s_list = list(combinations_with_replacement(FREE_CLASSES, size))
        for quad in _QUADS:
            dq = sum(_DEG[k] for k in quad)
            tq = sum(_TW[k] for k in quad)
            for s in s_list:
                if dq + sum(_DEG[k] for k in s) == target and (tq + sum(_TW[k] for k in s)) % 2 == 0:
                    yield quad, s

    def iter_relations(self, d: int, n: int, strict: bool = False) -> Iterator[WdvvRelation]:
        """All relations generated at level (d, n), in the fixed solving order.

        With ``strict`` set, every lower factor must already be known;
        otherwise lower levels are solved on demand.
        """
        level = (d, n)
        with self._lock:
            if not strict:
                self._solve_lower(level)
            index = _unknown_index(level)
            lookup = self._strict_lookup if strict else self._value
            for quad, s in self._level_inputs(d, n):
                for label, row, const in self._relations_for(quad, s, d, level, index, lookup):
                    yield WdvvRelation(
                        level,
                        {InvariantKey(*k): v for k, v in sorted(row.items())},
                        const,
                        label,
                    )

    def _strict_lookup(self, d: int, ins: tuple[int, ...]) -> Fraction:
        raw = (d, ins)
        v = self._memo.get(raw)
        if v is not None:
            return v
        key = InvariantKey(d, ins)
        b = base_value(key)
        if b is not NOT_A_BASE_CASE:
            return b
        red = self._reduce(d, ins)
        assert red is not None
        v = self.store.get((d, red[1]))
        if v is None:
            raise UnknownLowerInvariant(key.pretty())
        return red[0] * v

    def _solve_lower(self, level: tuple[int, int]) -> None:
        """Solve every level that can feed relations at ``level``, in (d, n) order."""
        d, n = level
        for d_low in range(1, d + 1):
            top = n if d_low < d else n - 1
            for n_low in range(3, top + 1):
                self.solve_level(d_low, n_low)

    # -- solving ----------------------------------------------------------------------

    def solve_level(self, d: int, n: int) -> None:
        """Determine every unknown at level (d, n), solving lower levels as needed."""
        level = (d, n)
        with self._lock:
            if self.store.has_level(level) or level in self._free:
                return
            if level in self._active:
                raise SchedulingError(f"level {level} requested while being solved")
            if d == 0 or n < 3:
                self.store.mark_level(level)
                return
            self._active.append(level)
            try:
                self._solve(level)
            finally:
                self._active.pop()

    def _solve(self, level: tuple[int, int]) -> None:
        d, n = level
        unknowns = _level_unknowns(d, n)
        if not unknowns:
            self.store.mark_level(level)
            return
        self._solve_lower(level)
        index = _unknown_index(level)
        elim = _Sparse(len(unknowns))
        rows = 0
        for quad, s in self._level_inputs(d, n):
            for _, row, const in self._relations_for(quad, s, d, level, index, self._value):
                rows += 1
                if row or const:
                    elim.add({index[k]: v for k, v in row.items()}, const)
                if elim.full():
                    break
            if elim.full():
                break
        solution = elim.solution()
        for col, v in sorted(solution.items()):
            self.store.put(unknowns[col], v)
        self.stats[level] = {"unknowns": len(unknowns), "relations": rows, "rank": elim.rank}
        if len(solution) == len(unknowns):
            self.store.mark_level(level)
        else:
            self._free[level] = {unknowns[c] for c in range(len(unknowns)) if c not in solution}
            log.warning("level %s: %d unknowns left free", level, len(self._free[level]))
        self.solved_here.append(level)

    def level_residuals(self, d: int, n: int) -> list[WdvvRelation]:
        """Relations at a solved level that fail to vanish (should be empty)."""
        self.solve_level(d, n)
        bad = []
        for rel in self.iter_relations(d, n, strict=True):
            if rel.residual(self.value) != 0:
                bad.append(rel)
        return bad


def wdvv_relation(a: int, b: int, c: int, e: int, s: Iterable[int], d: int,
                  engine: WdvvEngine | None = None) -> WdvvRelation:
    """The relation F(a, b | c, e) - F(a, c | b, e) = 0 at level (d, |S| + 3)."""
    engine = engine or default_engine()
    s = tuple(sorted(s))
    level = (d, len(s) + 3)
    counts = sorted(Counter(s).items())
    with engine._lock:
        engine._solve_lower(level)
        index = _unknown_index(level)
        u1, c1 = engine._pairing_sum(a, b, c, e, counts, d, level, index, engine._value)
        u2, c2 = engine._pairing_sum(a, c, b, e, counts, d, level, index, engine._value)
    row = dict(u1)
    for k, v in u2.items():
        row[k] = row.get(k, 0) - v
    return WdvvRelation(
        level,
        {InvariantKey(*k): v for k, v in sorted(row.items()) if v},
        c1 - c2,
        f"({a},{b}|{c},{e})-({a},{c}|{b},{e}) S={s}",
    )


_DEFAULT: WdvvEngine | None = None
_DEFAULT_LOCK = threading.Lock()


def default_engine() -> WdvvEngine:
    """Process-wide in-memory engine."""
    global _DEFAULT
    with _DEFAULT_LOCK:
        if _DEFAULT is None:
            _DEFAULT = WdvvEngine()
        return _DEFAULT


def compute_invariant(key: InvariantKey, engine: WdvvEngine | None = None) -> Fraction:
    return (engine or default_engine()).compute_invariant(key)
