"""Crepant resolution check against the Hilbert scheme of two points.

The Hilbert side enters only through a finite table of its invariants
(two-point invariants in classes a*B1 + B2, one-point invariants in the
classes a*B1) and through two quantum relations. The bridge map sends
alpha to T2 and gamma to i(T2 - T1), extended linearly through the
monomials alpha^a gamma^b. Series in q are assembled from the table,
continued to q = -1 exactly, and compared with the orbifold invariants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chow_rings import (
    ALPHA, GAMMA, ORB_DEGREES, CurveClass, HilbClass, OrbClass, TPoly, T1, T2,
    graded_dimensions, hilb_integrate, orb_integrate, HILB_MONOMIALS,
)
from .exact_arith import (
    I, GaussRational, LaurentPoly, PoleError, Poly, RatFunc, Scalar, format_gauss,
    invert_matrix, polylog_negative, to_gauss, zeta_nonpositive,
)
from .gw_core import degree_zero_twisted

__all__ = [
    "OutOfTable",
    "HILB_TWO_POINT_TABLE",
    "HILB_ONE_POINT_TABLE",
    "hilbert_lookup",
    "graber_value",
    "BridgeMap",
    "bridge_map",
    "QInvariant",
    "TWO_POINT_SHAPES",
    "crc_two_point",
    "crc_degree_zero",
    "f_series",
    "f_relations",
    "S1",
    "S2",
    "quantum_relation_check",
    "CheckResult",
    "crc_verify",
]

_ZERO = to_gauss(0)


class OutOfTable(LookupError):
    """The requested Hilbert scheme invariant is not among the tabulated ones."""


@dataclass(frozen=True)
class _TwoPointRow:
    name: str
    first: HilbClass
    second: HilbClass
    values: tuple[Fraction, Fraction, Fraction]  # classes B2, B1+B2, 2B1+B2


def _row(name: str, x: TPoly, y: TPoly, values: Sequence[int | Fraction]) -> _TwoPointRow:
    return _TwoPointRow(name, x.normal_form(), y.normal_form(), tuple(Fraction(v) for v in values))


_D = T2 - T1
HILB_TWO_POINT_TABLE: tuple[_TwoPointRow, ...] = (
    _row("<T2^2, T2^4>", T2**2, T2**4, (3, 12, 3)),
    _row("<T2^3, T2^3>", T2**3, T2**3, (9, 27, 9)),
    _row("<(T2-T1)^2, T2^4>", _D**2, T2**4, (3, -9, -6)),
    _row("<T2^2(T2-T1), T2^2(T2-T1)>", T2**2 * _D, T2**2 * _D, (4, -8, 4)),
    _row("<T2^4, T2(T2-T1)>", T2**4, T2 * _D, (3, 0, -3)),
    _row("<T2^3, T2^2(T2-T1)>", T2**3, T2**2 * _D, (Fraction(1, 2), 0, Fraction(-1, 2))),
)
"""Two-point invariants in the classes a*B1 + B2 for a = 0, 1, 2.

Every row has total degree 6, as the dimension axiom requires.
"""

FIRST_CHERN = (3 * T2).normal_form()
"""c1 of the Hilbert scheme: it is crepant over Sym2 P2, so c1 . B1 = 0."""

HILB_ONE_POINT_TABLE: tuple[tuple[str, HilbClass, Fraction], ...] = (
    ("<T2^2 - T1*T2>", (T2**2 - T1 * T2).normal_form(), Fraction(-6)),
    ("<(T2-T1)^2>", (_D**2).normal_form(), Fraction(-9)),
)
"""One-point invariants in the class a*B1 (a >= 1): numerator over a^2."""


def _ratio(x: HilbClass, y: HilbClass) -> GaussRational | None:
    """The scalar c with x = c*y, if any (y nonzero)."""
    c = None
    for u, v in zip(x.coeffs, y.coeffs):
        if v:
            r = u / v
            if c is None:
                c = r
            elif r != c:
                return None
        elif u:
            return None
    return c


def _as_hilb(x) -> HilbClass:
    if isinstance(x, TPoly):
        return x.normal_form()
    if isinstance(x, HilbClass):
        return x
    raise TypeError(f"expected a Hilbert scheme class, got {x!r}")


def _two_point(x: HilbClass, y: HilbClass, a: int) -> tuple[GaussRational, str]:
    for row in HILB_TWO_POINT_TABLE:
        for p, q in ((x, y), (y, x)):
            c1, c2 = _ratio(p, row.first), _ratio(q, row.second)
            if c1 is not None and c2 is not None:
                return c1 * c2 * row.values[a], row.name
    raise OutOfTable(f"no tabulated two-point invariant for <{x}, {y}>")


def _one_point(x: HilbClass, a: int) -> tuple[GaussRational, str]:
    for name, cls, numerator in HILB_ONE_POINT_TABLE:
        c = _ratio(x, cls)
        if c is not None:
            return c * numerator / (a * a), name
    raise OutOfTable(f"no tabulated one-point invariant for <{x}>")


def hilbert_lookup(insertions: Sequence[HilbClass | TPoly], a: int, b: int) -> tuple[GaussRational, list[str]]:
    """Like :func:`graber_value`, also returning which table entries were used."""
    beta = CurveClass(a, b)
    ins = [_as_hilb(x) for x in insertions]
    if any(x.is_zero() for x in ins):
        return _ZERO, ["zero insertion"]
    if any(x.degree() is None for x in ins):
        raise OutOfTable("insertions must be homogeneous")
    if (a, b) == (0, 0):
        raise OutOfTable("degree-zero Hilbert scheme invariants are not tabulated")
    if a < 0 or b < 0:
        # T1 and T2 are nef, so these classes carry no curves
        return _ZERO, ["non-effective class"]
    if sum(x.degree() for x in ins) != 1 + beta.pair(FIRST_CHERN) + len(ins):
        return _ZERO, ["dimension axiom"]
    if any(x.degree() == 0 for x in ins):
        return _ZERO, ["unit axiom"]
    factor = to_gauss(1)
    rest = []
    for x in ins:
        if x.degree() == 1:
            factor = factor * beta.pair(x)
        else:
            rest.append(x)
    used = [f"divisor axiom x{len(ins) - len(rest)}"] if len(rest) < len(ins) else []
    if not factor:
        return _ZERO, used
    if b == 1 and len(rest) == 2:
        if a > 2:
            return _ZERO, used + ["two-point vanishing for a > 2"]
        v, name = _two_point(rest[0], rest[1], a)
        return factor * v, used + [f"{name} at {beta}"]
    if b == 0 and len(rest) == 1:
        v, name = _one_point(rest[0], a)
        return factor * v, used + [f"{name} at {beta}"]
    raise OutOfTable(f"no tabulated invariant with {len(rest)} non-divisor insertions in class {beta}")


def graber_value(insertions: Sequence[HilbClass | TPoly], a: int, b: int) -> GaussRational:
    """Tabulated invariant <insertions> in the class a*B1 + b*B2."""
    return hilbert_lookup(insertions, a, b)[0]


# -- the bridge map ------------------------------------------------------------------

MONOMIALS: tuple[tuple[int, int], ...] = (
    (0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (4, 0),
)
"""Exponents (a, b) of alpha^a gamma^b spanning the orbifold ring."""

_L_ALPHA = T2
_L_GAMMA = I * (T2 - T1)


class BridgeMap:
    """Linear map from the orbifold ring to the Hilbert scheme ring.

    ``matrix[r][c]`` is the HilbClass coordinate r of the image of the
    orbifold basis element c.
    """

    def __init__(self):
        orb_cols = [(ALPHA**a * GAMMA**b).coeffs for a, b in MONOMIALS]
        hilb_cols = [self.formal((a, b)).normal_form().coeffs for a, b in MONOMIALS]
        # rows of `orb` are monomials; inverting expresses basis elements in monomials
        inv = invert_matrix(orb_cols)
        self.matrix = [
            [sum((inv[k][m] * hilb_cols[m][r] for m in range(9)), _ZERO) for k in range(9)]
            for r in range(9)
        ]

    @staticmethod
    def formal(exponents: tuple[int, int]) -> TPoly:
        """T2^a (i(T2 - T1))^b in the free polynomial ring."""
        a, b = exponents
        return _L_ALPHA**a * _L_GAMMA**b

    def formal_poly(self, poly: dict[tuple[int, int], Scalar]) -> TPoly:
        """Image of a polynomial in alpha, gamma, before reduction."""
        out = TPoly()
        for exps, c in poly.items():
            out = out + to_gauss(c) * self.formal(exps)
        return out

    def __call__(self, x: OrbClass) -> HilbClass:
        return HilbClass(
            sum((self.matrix[r][k] * c for k, c in x.terms()), _ZERO) for r in range(9)
        )

    def is_invertible(self) -> bool:
        try:
            invert_matrix(self.matrix)
        except ArithmeticError:
            return False
        return True

    def is_degree_preserving(self) -> bool:
        for k in range(9):
            image = self(OrbClass.basis(k))
            if image.is_zero() or image.degree() != ORB_DEGREES[k]:
                return False
        return True

    def graded_dimensions_match(self) -> bool:
        hilb = graded_dimensions([a + b for a, b in HILB_MONOMIALS])
        return hilb == graded_dimensions(ORB_DEGREES) == (1, 2, 3, 2, 1)


_BRIDGE: BridgeMap | None = None


def bridge_map() -> BridgeMap:
    global _BRIDGE
    if _BRIDGE is None:
        _BRIDGE = BridgeMap()
    return _BRIDGE


# -- q-series -----------------------------------------------------------------------------


@dataclass(frozen=True)
class QInvariant:
    series: LaurentPoly | RatFunc
    provenance: tuple[str, ...] = ()

    def at(self, q0: Scalar) -> GaussRational:
        return self.series(q0)


_A2G = ALPHA**2 * GAMMA
TWO_POINT_SHAPES: dict[str, tuple[OrbClass, OrbClass]] = {
    "a^4, a^2": (ALPHA**4, ALPHA**2),
    "a^4, g^2": (ALPHA**4, GAMMA * GAMMA),
    "a^3, a^3": (ALPHA**3, ALPHA**3),
    "a^2*g, a^2*g": (_A2G, _A2G),
    "a^4, a*g": (ALPHA**4, ALPHA * GAMMA),
    "a^3, a^2*g": (ALPHA**3, _A2G),
}


def crc_two_point(x: OrbClass, y: OrbClass, span: int = 3) -> QInvariant:
    """sum_a <L(x), L(y)>_{(a+1)B1 + B2} q^a.

    The table supplies a + 1 in 0..2; the classes just outside are
    scanned as well (``span``) to confirm they contribute nothing.
    """
    L = bridge_map()
    lx, ly = L(x), L(y)
    terms: dict[int, GaussRational] = {}
    used: list[str] = []
    for a in range(-1 - span, 2 + span):
        v, why = hilbert_lookup([lx, ly], a + 1, 1)
        if v:
            terms[a] = v
            used.extend(w for w in why if w not in used)
    return QInvariant(LaurentPoly(terms), tuple(used))


def crc_degree_zero(g: int, which: str, checks: int = 12) -> QInvariant:
    """Degree-zero continuation for <a*g, g^(2g+1)> or <g^2, g^(2g+2)>.

    ``which`` is ``"ag"`` or ``"g2"``. Each gamma insertion maps to the
    divisor i(T2 - T1), which pairs with a*B1 to -a*i, so the a-th
    coefficient is (i-powers) * (-a)^k * (one-point value in class a*B1).
    The resulting c * a^m pattern is verified for a = 1..checks before the
    series is written as c * Li_{-m}(q) and compared with its closed form.
    """
    if g < 1:
        raise ValueError("g must be at least 1")
    L = bridge_map()
    if which == "ag":
        head, divisors = L(ALPHA * GAMMA), 2 * g + 1
        closed = (-1) ** (g + 1) * 6 * polylog_negative(2 * g - 1)
    elif which == "g2":
        head, divisors = L(GAMMA * GAMMA), 2 * g + 2
        closed = (-1) ** (g + 1) * 9 * polylog_negative(2 * g)
    else:
        raise ValueError("which must be 'ag' or 'g2'")
    div = L(GAMMA)
    # structural derivation: divisor pairings are linear in a, the
    # one-point invariant is proportional to 1/a^2
    pair_per_a = CurveClass(1, 0).pair(div)  # value at a = 1
    _, table_name = _one_point(head, 1)
    head_value = graber_value([head], 1, 0)
    coeff = pair_per_a**divisors * head_value
    power = divisors - 2
    if not coeff.is_real():
        raise ArithmeticError("degree-zero coefficient is not real")
    for a in range(1, checks + 1):
        direct = graber_value([head] + [div] * divisors, a, 0)
        if direct != coeff * a**power:
            raise ArithmeticError(f"coefficient at a = {a} is {direct}, expected {coeff * a**power}")
    series = coeff.re * polylog_negative(power)
    if series != closed:
        raise ArithmeticError("derived series disagrees with the closed form")
    return QInvariant(
        series,
        (f"{table_name} at a*B1", f"divisor axiom x{divisors}", f"c = {format_gauss(coeff)}, Li_-{power}"),
    )


# -- quantum relations ----------------------------------------------------------------------


def f_series() -> RatFunc:
    """f = q / (1 - q)."""
    return RatFunc(Poly.q(), Poly([1, -1]))


def f_relations(f: Scalar) -> tuple[TPoly, TPoly]:
    """The two quantum relations (with the second quantum parameter set to 0)."""
    f = to_gauss(f)
    rel1 = T1**3 - 9 * f * f * T1 * T2**2 + (9 * f * f - 2 * f) * T2**3
    rel2 = (1 - 18 * f) * T2**3 - 3 * (1 - 6 * f) * T1 * T2**2 + 6 * T1**2 * T2
    return rel1, rel2


S1 = T1**3 - Fraction(9, 4) * T1 * T2**2 + Fraction(13, 4) * T2**3
S2 = 5 * T2**3 - 6 * T1 * T2**2 + 3 * T1**2 * T2

R1_POLY = {(3, 0): 2, (1, 2): -3}
"""2 alpha^3 - 3 alpha gamma^2, as {(a, b): coefficient of alpha^a gamma^b}."""
R2_POLY = {(2, 1): 3, (0, 3): -4}
"""3 alpha^2 gamma - 4 gamma^3."""


@dataclass(frozen=True)
class CheckResult:
    identity: str
    ok: bool
    expected: str
    got: str

    def as_dict(self) -> dict:
        return {
            "identity": self.identity,
            "status": "pass" if self.ok else "fail",
            "expected": self.expected,
            "got": self.got,
        }


def _coeff_tuple(p: TPoly, monos: Sequence[tuple[int, int]]) -> tuple[GaussRational, ...]:
    t = p.terms()
    return tuple(t.get(m, _ZERO) for m in monos)


def _fmt_tuple(t: Sequence[GaussRational]) -> str:
    return "(" + ", ".join(format_gauss(x) for x in t) + ")"


def quantum_relation_check() -> list[CheckResult]:
    out: list[CheckResult] = []
    f0 = f_series()(-1)
    out.append(CheckResult("f(-1)", f0 == Fraction(-1, 2), "-1/2", format_gauss(f0)))
    rel1, rel2 = f_relations(f0)
    m1 = ((3, 0), (1, 2), (0, 3))
    got1 = _coeff_tuple(rel1, m1)
    want1 = (to_gauss(1), to_gauss(Fraction(-9, 4)), to_gauss(Fraction(13, 4)))
    out.append(CheckResult("S1 coefficients (T1^3, T1*T2^2, T2^3)", got1 == want1 and rel1 == S1,
                           _fmt_tuple(want1), _fmt_tuple(got1)))
    m2 = ((0, 3), (1, 2), (2, 1))
    half = rel2 * Fraction(1, 2)
    got2 = _coeff_tuple(half, m2)
    want2 = tuple(to_gauss(v) for v in (5, -6, 3))
    out.append(CheckResult("S2 coefficients (T2^3, T1*T2^2, T1^2*T2), halved", got2 == want2 and half == S2,
                           _fmt_tuple(want2), _fmt_tuple(got2)))
    L = bridge_map()
    lr1 = L.formal_poly(R1_POLY)
    out.append(CheckResult("L(R1) = S2", lr1 == S2, str(S2), str(lr1)))
    lr2 = L.formal_poly(R2_POLY)
    want = 4 * I * (S2 - S1)
    out.append(CheckResult("L(R2) = 4i(S2 - S1)", lr2 == want, str(want), str(lr2)))
    orb_top = orb_integrate(ALPHA**4)
    hilb_top = hilb_integrate(L(ALPHA**4))
    out.append(CheckResult("integral of a^4 = integral of L(a^4) = 3",
                           orb_top == hilb_top == 3, "3, 3",
                           f"{format_gauss(orb_top)}, {format_gauss(hilb_top)}"))
    return out


# -- full verification ------------------------------------------------------------------------

PUBLISHED_TWO_POINT: dict[str, tuple[dict[int, GaussRational], Fraction]] = {
    "a^4, a^2": ({-1: to_gauss(3), 0: to_gauss(12), 1: to_gauss(3)}, Fraction(6)),
    "a^4, g^2": ({-1: to_gauss(-3), 0: to_gauss(9), 1: to_gauss(6)}, Fraction(6)),
    "a^3, a^3": ({-1: to_gauss(9), 0: to_gauss(27), 1: to_gauss(9)}, Fraction(9)),
    "a^2*g, a^2*g": ({-1: to_gauss(-4), 0: to_gauss(8), 1: to_gauss(-4)}, Fraction(16)),
    "a^4, a*g": ({-1: 3 * I, 1: -3 * I}, Fraction(0)),
    "a^3, a^2*g": ({-1: I / 2, 1: -I / 2}, Fraction(0)),
}
"""Expected series and orbifold values of the six two-point shapes."""


def crc_verify(max_g: int = 3, engine=None) -> list[CheckResult]:
    """Generator-level comparison of both sides; one entry per identity."""
    if max_g < 1:
        raise ValueError("max_g must be at least 1")
    if engine is None:
        from .wdvv_engine import default_engine

        engine = default_engine()
    out: list[CheckResult] = []
    for name, (x, y) in TWO_POINT_SHAPES.items():
        q = crc_two_point(x, y)
        terms, published_value = PUBLISHED_TWO_POINT[name]
        expected_series = LaurentPoly(terms)
        out.append(CheckResult(f"series <{name}>_1", q.series == expected_series,
                               str(expected_series), str(q.series)))
        try:
            at = q.at(-1)
        except PoleError as exc:
            out.append(CheckResult(f"<{name}>_1 at q = -1", False, "finite", str(exc)))
            continue
        orb = engine.evaluate(1, [x, y])
        ok = at == orb == published_value
        out.append(CheckResult(f"<{name}>_1 at q = -1 vs orbifold", ok,
                               f"{format_gauss(orb)} (orbifold), {published_value} (expected)",
                               format_gauss(at)))
    for g in range(1, max_g + 1):
        q = crc_degree_zero(g, "ag")
        at = q.at(-1)
        orb = engine.evaluate(0, [ALPHA * GAMMA] + [GAMMA] * (2 * g + 1))
        closed = 2 * degree_zero_twisted(g)
        out.append(CheckResult(f"<a*g, g^{2 * g + 1}>_0 at q = -1 (g={g})", at == orb == closed,
                               f"{format_gauss(orb)} (orbifold), {closed} (closed form)", format_gauss(at)))
        q2 = crc_degree_zero(g, "g2")
        at2 = q2.at(-1)
        orb2 = engine.evaluate(0, [GAMMA * GAMMA] + [GAMMA] * (2 * g + 2))
        out.append(CheckResult(f"<g^2, g^{2 * g + 2}>_0 at q = -1 (g={g})", at2 == orb2 == 0,
                               f"{format_gauss(orb2)} (orbifold)", format_gauss(at2)))
        zeta_side = (-1) ** (g + 1) * 6 * (2 ** (2 * g) - 1) * zeta_nonpositive(2 * g - 1)
        out.append(CheckResult(f"Li_-{2 * g - 1}(-1) through zeta (g={g})", at == zeta_side,
                               str(zeta_side), format_gauss(at)))
    out.extend(quantum_relation_check())
    L = bridge_map()
    out.append(CheckResult("L invertible and degree preserving",
                           L.is_invertible() and L.is_degree_preserving(), "True",
                           str(L.is_invertible() and L.is_degree_preserving())))
    out.append(CheckResult("graded dimensions (1,2,3,2,1) on both sides", L.graded_dimensions_match(),
                           "True", str(L.graded_dimensions_match())))
    return out
