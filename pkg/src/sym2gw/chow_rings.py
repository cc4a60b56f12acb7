"""Chow rings of the symmetric square and of the Hilbert scheme of two points.

The orbifold ring is worked out once, at import time, from the double
cover P2 x P2 -> Sym2 P2:

* untwisted classes pull back into the S2-invariant part of
  Q[h1, h2]/(h1^3, h2^3) via alpha -> h1 + h2, beta -> h1*h2;
* an untwisted class acts on the twisted sector (a copy of P2) through
  its restriction to the diagonal, h1, h2 -> h;
* two twisted classes multiply to the push-forward of their product
  from the diagonal, whose class upstairs is h1^2 + h1*h2 + h2^2.

The Hilbert side is Q[T1, T2]/(T1^3, T2^3 - 3*T1*T2^2 - 3*T1^2*T2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact_arith import GaussRational, Scalar, format_gauss, invert_matrix, to_gauss

__all__ = [
    "ORB_NAMES",
    "ORB_DEGREES",
    "UNTWISTED",
    "TWISTED",
    "OrbClass",
    "ONE",
    "ALPHA",
    "ALPHA2",
    "BETA",
    "ALPHA3",
    "ALPHA4",
    "GAMMA",
    "GAMMA0",
    "GAMMA1",
    "GAMMA2",
    "PRODUCT",
    "PAIRING",
    "orb_product",
    "orb_pairing",
    "orb_integrate",
    "pairing_matrix",
    "pullback",
    "ring_axiom_violations",
    "verify_ring_relations",
    "RingReport",
    "HILB_MONOMIALS",
    "HilbClass",
    "TPoly",
    "T1",
    "T2",
    "hilb_normal_form",
    "hilb_product",
    "hilb_integrate",
    "hilb_pairing_matrix",
    "CurveClass",
    "EXCEPTIONAL_DIVISOR",
    "graded_dimensions",
]

_ZERO = GaussRational(0)
_ONE = GaussRational(1)

# basis order is part of the on-disk format: never reorder
ORB_NAMES: tuple[str, ...] = ("1", "a", "a^2", "b", "a^3", "a^4", "g", "g1", "g2")
ORB_DEGREES: tuple[int, ...] = (0, 1, 2, 2, 3, 4, 1, 2, 3)
UNTWISTED: tuple[int, ...] = (0, 1, 2, 3, 4, 5)
TWISTED: tuple[int, ...] = (6, 7, 8)

# -- truncated polynomials in h1, h2 -----------------------------------------

HPoly = dict  # {(i, j): Fraction} meaning sum c * h1^i h2^j with i, j <= 2


def _hmul(p: HPoly, q: HPoly) -> HPoly:
    out: HPoly = {}
    for (a, b), x in p.items():
        for (c, d), y in q.items():
            if a + c <= 2 and b + d <= 2:
                key = (a + c, b + d)
                out[key] = out.get(key, 0) + x * y
    return {k: v for k, v in out.items() if v}


_PULLBACKS: tuple[HPoly, ...] = (
    {(0, 0): Fraction(1)},
    {(1, 0): Fraction(1), (0, 1): Fraction(1)},
    {(2, 0): Fraction(1), (1, 1): Fraction(2), (0, 2): Fraction(1)},
    {(1, 1): Fraction(1)},
    {(2, 1): Fraction(3), (1, 2): Fraction(3)},
    {(2, 2): Fraction(6)},
)

_DIAGONAL: HPoly = {(2, 0): Fraction(1), (1, 1): Fraction(1), (0, 2): Fraction(1)}


def _descend(p: HPoly) -> list[Fraction]:
    """Write a symmetric truncated polynomial in the untwisted basis."""
    c = [Fraction(0)] * 6
    c[0] = Fraction(p.get((0, 0), 0))
    c[1] = Fraction(p.get((1, 0), 0))
    c[2] = Fraction(p.get((2, 0), 0))
    c[3] = Fraction(p.get((1, 1), 0)) - 2 * c[2]
    c[4] = Fraction(p.get((2, 1), 0)) / 3
    c[5] = Fraction(p.get((2, 2), 0)) / 6
    back: HPoly = {}
    for k, coeff in enumerate(c):
        for mono, v in _PULLBACKS[k].items():
            back[mono] = back.get(mono, 0) + coeff * v
    if {k: v for k, v in back.items() if v} != {k: v for k, v in p.items() if v}:
        raise ValueError(f"not an invariant class: {p}")
    return c


def _restrict_to_diagonal(p: HPoly) -> list[Fraction]:
    out = [Fraction(0)] * 3
    for (a, b), v in p.items():
        if a + b <= 2:
            out[a + b] += v
    return out


def _build_product_table() -> tuple[tuple[tuple[Fraction, ...], ...], ...]:
    table = [[None] * 9 for _ in range(9)]
    for i in range(9):
        for j in range(9):
            out = [Fraction(0)] * 9
            if i in UNTWISTED and j in UNTWISTED:
                out[:6] = _descend(_hmul(_PULLBACKS[i], _PULLBACKS[j]))
            elif i in TWISTED and j in TWISTED:
                twist = {(i - 6 + j - 6, 0): Fraction(1)} if i + j - 12 <= 2 else {}
                out[:6] = _descend(_hmul(_DIAGONAL, twist))
            else:
                u, t = (i, j) if i in UNTWISTED else (j, i)
                # push-pull along the gerbe over the diagonal: the factor 2
                # from the double cover and the 1/2 from the gerbe cancel
                restricted = _restrict_to_diagonal(_PULLBACKS[u])
                for m, v in enumerate(restricted):
                    if t - 6 + m <= 2:
                        out[t + m] += v
            table[i][j] = tuple(out)
    return tuple(tuple(row) for row in table)


PRODUCT = _build_product_table()
"""PRODUCT[i][j][k]: coefficient of basis k in e_i * e_j."""

PRODUCT_TERMS: tuple[tuple[tuple[tuple[int, Fraction], ...], ...], ...] = tuple(
    tuple(tuple((k, c) for k, c in enumerate(PRODUCT[i][j]) if c) for j in range(9))
    for i in range(9)
)

PAIRING: tuple[tuple[Fraction, ...], ...] = tuple(
    tuple(3 * PRODUCT[i][j][5] for j in range(9)) for i in range(9)
)
"""Poincare pairing of basis elements: the integral of their product."""


# -- OrbClass -----------------------------------------------------------------


class OrbClass:
    """A class in the orbifold Chow ring, as 9 coordinates over Q(i)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar]):
        cs = tuple(to_gauss(c) for c in coeffs)
        if len(cs) != 9:
            raise ValueError("an orbifold class has exactly 9 coordinates")
        self.coeffs: tuple[GaussRational, ...] = cs

    @classmethod
    def basis(cls, k: int) -> OrbClass:
        return cls(1 if j == k else 0 for j in range(9))

    @classmethod
    def zero(cls) -> OrbClass:
        return cls([0] * 9)

    @classmethod
    def scalar(cls, c: Scalar) -> OrbClass:
        return cls([c] + [0] * 8)

    def __getitem__(self, k: int) -> GaussRational:
        return self.coeffs[k]

    def support(self) -> tuple[int, ...]:
        return tuple(k for k, c in enumerate(self.coeffs) if c)

    def terms(self) -> list[tuple[int, GaussRational]]:
        return [(k, c) for k, c in enumerate(self.coeffs) if c]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def degrees(self) -> set[int]:
        return {ORB_DEGREES[k] for k in self.support()}

    def degree(self) -> int | None:
        """Orbifold degree if homogeneous and nonzero, else None."""
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def sectors(self) -> set[str]:
        return {"twisted" if k in TWISTED else "untwisted" for k in self.support()}

    def untwisted_part(self) -> OrbClass:
        return OrbClass(c if k in UNTWISTED else 0 for k, c in enumerate(self.coeffs))

    def twisted_part(self) -> OrbClass:
        return OrbClass(c if k in TWISTED else 0 for k, c in enumerate(self.coeffs))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussRational)):
            other = OrbClass.scalar(other)
        if not isinstance(other, OrbClass):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other) -> OrbClass:
        other = _as_orb(other)
        return OrbClass(x + y for x, y in zip(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self) -> OrbClass:
        return OrbClass(-x for x in self.coeffs)

    def __sub__(self, other) -> OrbClass:
        return self + (-_as_orb(other))

    def __rsub__(self, other) -> OrbClass:
        return _as_orb(other) - self

    def __mul__(self, other) -> OrbClass:
        if isinstance(other, OrbClass):
            return orb_product(self, other)
        c = to_gauss(other)
        return OrbClass(c * x for x in self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, other) -> OrbClass:
        c = to_gauss(other)
        return OrbClass(x / c for x in self.coeffs)

    def __pow__(self, k: int) -> OrbClass:
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self) -> str:
        return f"OrbClass({self})"

    def __str__(self) -> str:
        return _render_terms((ORB_NAMES[k], c) for k, c in self.terms())


def _as_orb(x) -> OrbClass:
    if isinstance(x, OrbClass):
        return x
    return OrbClass.scalar(x)


def _render_terms(terms: Iterable[tuple[str, GaussRational]]) -> str:
    parts = []
    for name, c in terms:
        cs = format_gauss(c)
        if not c.is_real():
            cs = f"({cs})"
        if name == "1":
            parts.append(cs)
        elif cs == "1":
            parts.append(name)
        elif cs == "-1":
            parts.append(f"-{name}")
        else:
            parts.append(f"{cs}*{name}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


ONE = OrbClass.basis(0)
ALPHA = OrbClass.basis(1)
ALPHA2 = OrbClass.basis(2)
BETA = OrbClass.basis(3)
ALPHA3 = OrbClass.basis(4)
ALPHA4 = OrbClass.basis(5)
GAMMA0 = OrbClass.basis(6)
GAMMA = GAMMA0
GAMMA1 = OrbClass.basis(7)
GAMMA2 = OrbClass.basis(8)


def orb_product(x: OrbClass, y: OrbClass) -> OrbClass:
    out = [_ZERO] * 9
    for i, a in x.terms():
        for j, b in y.terms():
            ab = a * b
            for k, c in PRODUCT_TERMS[i][j]:
                out[k] = out[k] + ab * c
    return OrbClass(out)


def orb_integrate(x: OrbClass) -> GaussRational:
    """Integral over the stack: 3 times the alpha^4 coordinate."""
    return 3 * x.coeffs[5]


def orb_pairing(x: OrbClass, y: OrbClass) -> GaussRational:
    acc = _ZERO
    for i, a in x.terms():
        for j, b in y.terms():
            if PAIRING[i][j]:
                acc = acc + a * b * PAIRING[i][j]
    return acc


def pairing_matrix() -> list[list[Fraction]]:
    return [list(row) for row in PAIRING]


def pullback(x: OrbClass) -> dict[tuple[int, int], GaussRational]:
    """Image of the untwisted part in Q[h1,h2]/(h1^3,h2^3), keyed by exponents."""
    out: dict[tuple[int, int], GaussRational] = {}
    for k, c in x.untwisted_part().terms():
        for mono, v in _PULLBACKS[k].items():
            out[mono] = out.get(mono, _ZERO) + c * v
    return {m: v for m, v in sorted(out.items()) if v}


@dataclass(frozen=True)
class RelationCheck:
    name: str
    ok: bool
    residual: str


@dataclass(frozen=True)
class RingReport:
    checks: tuple[RelationCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.ok]


def verify_ring_relations() -> RingReport:
    """Check R1, R2, gamma^4 = alpha^4/2 and the vanishing of degree-5 products."""
    g = GAMMA
    cases = [
        ("R1 = 2a^3 - 3a*g^2", 2 * ALPHA**3 - 3 * ALPHA * g * g),
        ("R2 = 3a^2*g - 4g^3", 3 * ALPHA**2 * g - 4 * g * g * g),
        ("g^4 - a^4/2", g**4 - ALPHA**4 / 2),
        ("a^5", ALPHA**5),
        ("a^4*g", ALPHA**4 * g),
    ]
    return RingReport(tuple(RelationCheck(name, r.is_zero(), str(r)) for name, r in cases))


def ring_axiom_violations() -> list[str]:
    """Exhaustive commutativity, associativity, unit, grading and Frobenius checks."""
    bad: list[str] = []
    basis = [OrbClass.basis(k) for k in range(9)]
    for i in range(9):
        if ONE * basis[i] != basis[i]:
            bad.append(f"unit fails on {ORB_NAMES[i]}")
        for j in range(9):
            xy = basis[i] * basis[j]
            if xy != basis[j] * basis[i]:
                bad.append(f"commutativity fails on ({ORB_NAMES[i]}, {ORB_NAMES[j]})")
            if not xy.is_zero() and xy.degree() != ORB_DEGREES[i] + ORB_DEGREES[j]:
                bad.append(f"grading fails on ({ORB_NAMES[i]}, {ORB_NAMES[j]})")
            for k in range(9):
                if xy * basis[k] != basis[i] * (basis[j] * basis[k]):
                    bad.append(
                        f"associativity fails on ({ORB_NAMES[i]}, {ORB_NAMES[j]}, {ORB_NAMES[k]})"
                    )
                if orb_pairing(xy, basis[k]) != orb_pairing(basis[i], basis[j] * basis[k]):
                    bad.append(
                        f"Frobenius fails on ({ORB_NAMES[i]}, {ORB_NAMES[j]}, {ORB_NAMES[k]})"
                    )
    return bad


# -- Hilbert scheme side ------------------------------------------------------

HILB_MONOMIALS: tuple[tuple[int, int], ...] = (
    (0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (1, 2), (2, 2),
)
_HILB_INDEX = {m: k for k, m in enumerate(HILB_MONOMIALS)}


def _mono_name(a: int, b: int) -> str:
    parts = []
    if a:
        parts.append("T1" if a == 1 else f"T1^{a}")
    if b:
        parts.append("T2" if b == 1 else f"T2^{b}")
    return "*".join(parts) or "1"


class TPoly:
    """Polynomial in the free commutative ring Q(i)[T1, T2]."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int], Scalar] | None = None):
        clean = {}
        for m, c in sorted((terms or {}).items()):
            c = to_gauss(c)
            if c:
                clean[(int(m[0]), int(m[1]))] = c
        self._terms: dict[tuple[int, int], GaussRational] = clean

    @classmethod
    def const(cls, c: Scalar) -> TPoly:
        return cls({(0, 0): c})

    def terms(self) -> dict[tuple[int, int], GaussRational]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussRational)):
            other = TPoly.const(other)
        if not isinstance(other, TPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __add__(self, other) -> TPoly:
        other = _as_tpoly(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, _ZERO) + c
        return TPoly(out)

    __radd__ = __add__

    def __neg__(self) -> TPoly:
        return TPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> TPoly:
        return self + (-_as_tpoly(other))

    def __rsub__(self, other) -> TPoly:
        return _as_tpoly(other) - self

    def __mul__(self, other) -> TPoly:
        other = _as_tpoly(other)
        out: dict[tuple[int, int], GaussRational] = {}
        for (a, b), x in self._terms.items():
            for (c, d), y in other._terms.items():
                key = (a + c, b + d)
                out[key] = out.get(key, _ZERO) + x * y
        return TPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> TPoly:
        out = TPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def normal_form(self) -> HilbClass:
        out = [_ZERO] * 9
        for (a, b), c in self._terms.items():
            for k, v in enumerate(hilb_normal_form((a, b)).coeffs):
                if v:
                    out[k] = out[k] + c * v
        return HilbClass(out)

    def __str__(self) -> str:
        return _render_terms((_mono_name(*m), c) for m, c in self._terms.items())

    def __repr__(self) -> str:
        return f"TPoly({self})"


def _as_tpoly(x) -> TPoly:
    if isinstance(x, TPoly):
        return x
    if isinstance(x, HilbClass):
        return x.to_tpoly()
    return TPoly.const(x)


T1 = TPoly({(1, 0): 1})
T2 = TPoly({(0, 1): 1})


def _reduce_monomial(a: int, b: int) -> dict[tuple[int, int], Fraction]:
    """Rewrite T1^a T2^b using T1^3 = 0 and T2^3 = 3 T1 T2^2 + 3 T1^2 T2."""
    todo = {(a, b): Fraction(1)}
    done: dict[tuple[int, int], Fraction] = {}
    while todo:
        (x, y), c = todo.popitem()
        if x >= 3 or not c:
            continue
        if y >= 3:
            for m in ((x + 1, y - 1), (x + 2, y - 2)):
                todo[m] = todo.get(m, 0) + 3 * c
            continue
        done[(x, y)] = done.get((x, y), 0) + c
    return done


def hilb_normal_form(exponents: tuple[int, int]) -> HilbClass:
    a, b = exponents
    if a < 0 or b < 0:
        raise ValueError("exponents must be nonnegative")
    out = [Fraction(0)] * 9
    for m, c in _reduce_monomial(a, b).items():
        out[_HILB_INDEX[m]] += c
    return HilbClass(out)


class HilbClass:
    """A class in A*(Hilb2 P2) in the monomial basis ``HILB_MONOMIALS``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar]):
        cs = tuple(to_gauss(c) for c in coeffs)
        if len(cs) != 9:
            raise ValueError("a Hilbert scheme class has exactly 9 coordinates")
        self.coeffs: tuple[GaussRational, ...] = cs

    @classmethod
    def basis(cls, k: int) -> HilbClass:
        return cls(1 if j == k else 0 for j in range(9))

    def terms(self) -> list[tuple[int, GaussRational]]:
        return [(k, c) for k, c in enumerate(self.coeffs) if c]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def degree(self) -> int | None:
        ds = {sum(HILB_MONOMIALS[k]) for k, _ in self.terms()}
        return ds.pop() if len(ds) == 1 else None

    def to_tpoly(self) -> TPoly:
        return TPoly({HILB_MONOMIALS[k]: c for k, c in self.terms()})

    def __eq__(self, other) -> bool:
        if isinstance(other, TPoly):
            other = other.normal_form()
        if not isinstance(other, HilbClass):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other) -> HilbClass:
        return (self.to_tpoly() + _as_tpoly(other)).normal_form()

    __radd__ = __add__

    def __neg__(self) -> HilbClass:
        return HilbClass(-c for c in self.coeffs)

    def __sub__(self, other) -> HilbClass:
        return (self.to_tpoly() - _as_tpoly(other)).normal_form()

    def __rsub__(self, other) -> HilbClass:
        return (_as_tpoly(other) - self.to_tpoly()).normal_form()

    def __mul__(self, other) -> HilbClass:
        return hilb_product(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> HilbClass:
        return (self.to_tpoly() ** k).normal_form()

    def __repr__(self) -> str:
        return f"HilbClass({self})"

    def __str__(self) -> str:
        return str(self.to_tpoly())


def hilb_product(x: HilbClass | TPoly | Scalar, y: HilbClass | TPoly | Scalar) -> HilbClass:
    return (_as_tpoly(x) * _as_tpoly(y)).normal_form()


def hilb_integrate(x: HilbClass) -> GaussRational:
    """A quarter of the T1^2 T2^2 coordinate, so that T2^4 integrates to 3."""
    return x.coeffs[8] / 4


def hilb_pairing_matrix() -> list[list[GaussRational]]:
    basis = [HilbClass.basis(k) for k in range(9)]
    return [[hilb_integrate(x * y) for y in basis] for x in basis]


def graded_dimensions(degrees: Sequence[int]) -> tuple[int, ...]:
    top = max(degrees)
    return tuple(sum(1 for d in degrees if d == k) for k in range(top + 1))


@dataclass(frozen=True, order=True)
class CurveClass:
    """The curve class a*B1 + b*B2, paired with divisors by T_i . B_j = delta_ij."""

    a: int
    b: int

    def pair(self, divisor: HilbClass | TPoly) -> GaussRational:
        h = divisor.normal_form() if isinstance(divisor, TPoly) else divisor
        if any(k not in (1, 2) for k, _ in h.terms()):
            raise ValueError("can only pair curve classes with divisors")
        return h.coeffs[1] * self.a + h.coeffs[2] * self.b

    def __add__(self, other: CurveClass) -> CurveClass:
        return CurveClass(self.a + other.a, self.b + other.b)

    def scaled(self, k: int) -> CurveClass:
        return CurveClass(k * self.a, k * self.b)

    def __str__(self) -> str:
        return f"{self.a}*B1 + {self.b}*B2"


EXCEPTIONAL_DIVISOR = (-2 * T1 + 2 * T2).normal_form()
"""E = -2 T1 + 2 T2; E . (a B1 + b B2) = 2 (b - a)."""


def _check_nondegenerate() -> None:
    invert_matrix(PAIRING)
    invert_matrix(hilb_pairing_matrix())


_check_nondegenerate()
