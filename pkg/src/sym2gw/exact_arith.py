"""Exact scalars and q-series.

Everything here is exact: rationals are :class:`fractions.Fraction`,
the only irrational number we ever need is ``i``, and series in the
quantum parameter ``q`` are either Laurent polynomials or reduced
rational functions.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence, Union

__all__ = [
    "Rational",
    "GaussRational",
    "I",
    "to_gauss",
    "format_rational",
    "parse_rational",
    "format_gauss",
    "parse_gauss",
    "Poly",
    "LaurentPoly",
    "RatFunc",
    "PoleError",
    "bernoulli",
    "zeta_nonpositive",
    "polylog_negative",
    "eval_at",
    "solve_linear",
    "invert_matrix",
    "SingularMatrixError",
]

Rational = Fraction
Scalar = Union[int, Fraction, "GaussRational"]


class PoleError(ArithmeticError):
    """Evaluation point is a root of the denominator."""


class SingularMatrixError(ArithmeticError):
    """Raised when an exact linear solve meets a singular matrix."""


class GaussRational:
    """An element ``re + im*i`` of Q(i). Immutable."""

    __slots__ = ("_re", "_im")

    def __init__(self, re: int | Fraction | str = 0, im: int | Fraction | str = 0):
        object.__setattr__(self, "_re", Fraction(re))
        object.__setattr__(self, "_im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    @property
    def re(self) -> Fraction:
        return self._re

    @property
    def im(self) -> Fraction:
        return self._im

    def is_real(self) -> bool:
        return self._im == 0

    def conjugate(self) -> GaussRational:
        return GaussRational(self._re, -self._im)

    def norm(self) -> Fraction:
        """``z * conj(z)``, always a nonnegative rational."""
        return self._re * self._re + self._im * self._im

    def __bool__(self) -> bool:
        return bool(self._re) or bool(self._im)

    def __repr__(self) -> str:
        return f"GaussRational({format_gauss(self)!r})"

    def __str__(self) -> str:
        return format_gauss(self)

    def __hash__(self) -> int:
        if self._im == 0:
            return hash(self._re)
        return hash((self._re, self._im))

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self._re == other._re and self._im == other._im

    def __neg__(self) -> GaussRational:
        return GaussRational(-self._re, -self._im)

    def __pos__(self) -> GaussRational:
        return self

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return GaussRational(self._re + other._re, self._im + other._im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return GaussRational(self._re - other._re, self._im - other._im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self._re, self._im, other._re, other._im
        return GaussRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * other.conjugate()
        return GaussRational(num._re / n, num._im / n)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, k: int) -> GaussRational:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussRational(1) / (self ** (-k))
        result = GaussRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result


I = GaussRational(0, 1)
_ZERO = GaussRational(0)
_ONE = GaussRational(1)


def _coerce(x) -> GaussRational | None:
    if isinstance(x, GaussRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussRational(x)
    return None


def to_gauss(x: Scalar) -> GaussRational:
    """Coerce an int, Fraction or GaussRational to GaussRational."""
    z = _coerce(x)
    if z is None:
        raise TypeError(f"cannot interpret {x!r} as an exact Gaussian rational")
    return z


# -- serialization ----------------------------------------------------------


def format_rational(x: int | Fraction) -> str:
    """``p/q`` or ``p``; never a decimal point."""
    return str(Fraction(x))


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text or any(ch in text for ch in ".eE"):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


def format_gauss(z: Scalar) -> str:
    """Render as ``p/q`` when real, otherwise ``p/q+r/s*i``."""
    z = to_gauss(z)
    if z.im == 0:
        return format_rational(z.re)
    sign = "+" if z.im >= 0 else "-"
    return f"{format_rational(z.re)}{sign}{format_rational(abs(z.im))}*i"


def parse_gauss(text: str) -> GaussRational:
    """Inverse of :func:`format_gauss`."""
    s = text.strip().replace(" ", "")
    if not s.endswith("*i"):
        return GaussRational(parse_rational(s))
    body = s[:-2]
    # the split point is the last sign that is not the leading one
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-":
            re_part, im_part = body[:pos], body[pos:]
            return GaussRational(parse_rational(re_part), parse_rational(im_part))
    raise ValueError(f"not an exact Gaussian rational: {text!r}")


# -- univariate polynomials ---------------------------------------------------


class Poly:
    """Dense univariate polynomial in q over Q(i), lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [to_gauss(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs: tuple[GaussRational, ...] = tuple(cs)

    @classmethod
    def q(cls) -> Poly:
        return cls([0, 1])

    @classmethod
    def const(cls, c: Scalar) -> Poly:
        return cls([c])

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> GaussRational:
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussRational)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({[format_gauss(c) for c in self.coeffs]})"

    def __neg__(self) -> Poly:
        return Poly(-c for c in self.coeffs)

    def __add__(self, other) -> Poly:
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (_ZERO,) * (n - len(self.coeffs))
        b = other.coeffs + (_ZERO,) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __sub__(self, other) -> Poly:
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> Poly:
        return _as_poly(other) - self

    def __mul__(self, other) -> Poly:
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            for j, y in enumerate(other.coeffs):
                out[i + j] = out[i + j] + x * y
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        result = Poly.const(1)
        for _ in range(k):
            result = result * self
        return result

    def scale(self, c: Scalar) -> Poly:
        c = to_gauss(c)
        return Poly(c * x for x in self.coeffs)

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [_ZERO] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.lead()
        for k in range(len(quot) - 1, -1, -1):
            c = rem[k + other.degree] / lead
            quot[k] = c
            if c:
                for j, y in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * y
        return Poly(quot), Poly(rem[: other.degree] if other.degree > 0 else [])

    def monic(self) -> Poly:
        if self.is_zero():
            return self
        return self.scale(_ONE / self.lead())

    def derivative(self) -> Poly:
        return Poly(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def __call__(self, x: Scalar) -> GaussRational:
        x = to_gauss(x)
        acc = _ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly.const(x)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


# -- Laurent polynomials ------------------------------------------------------


class LaurentPoly:
    """Finite sum of c_k q^k, k any integer. Zero coefficients are never stored."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Scalar] | None = None):
        clean: dict[int, GaussRational] = {}
        for k, c in sorted((terms or {}).items()):
            c = to_gauss(c)
            if c:
                clean[int(k)] = c
        self._terms = clean

    @classmethod
    def monomial(cls, k: int, c: Scalar = 1) -> LaurentPoly:
        return cls({k: c})

    def terms(self) -> dict[int, GaussRational]:
        return dict(self._terms)

    def support(self) -> tuple[int, ...]:
        return tuple(self._terms)

    def coefficient(self, k: int) -> GaussRational:
        return self._terms.get(k, _ZERO)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussRational)):
            other = LaurentPoly({0: other})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __add__(self, other) -> LaurentPoly:
        other = _as_laurent(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, _ZERO) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> LaurentPoly:
        return self + (-_as_laurent(other))

    def __rsub__(self, other) -> LaurentPoly:
        return _as_laurent(other) - self

    def __mul__(self, other) -> LaurentPoly:
        other = _as_laurent(other)
        out: dict[int, GaussRational] = {}
        for j, a in self._terms.items():
            for k, b in other._terms.items():
                out[j + k] = out.get(j + k, _ZERO) + a * b
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __call__(self, q0: Scalar) -> GaussRational:
        q0 = to_gauss(q0)
        if not q0 and any(k < 0 for k in self._terms):
            raise PoleError("Laurent polynomial with negative powers evaluated at q = 0")
        return sum((c * q0**k for k, c in self._terms.items()), _ZERO)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, c in self._terms.items():
            cs = format_gauss(c)
            if not c.is_real():
                cs = f"({cs})"
            if k == 0:
                parts.append(cs)
            else:
                mono = "q" if k == 1 else f"q^{k}"
                parts.append(mono if cs == "1" else f"-{mono}" if cs == "-1" else f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


def _as_laurent(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly({0: x})


# -- rational functions -------------------------------------------------------


class RatFunc:
    """num/den in lowest terms with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly | Scalar, den: Poly | Scalar = 1):
        num, den = _as_poly(num), _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = num.divmod(g)[0], den.divmod(g)[0]
        lead = den.lead()
        self.num = num.scale(_ONE / lead)
        self.den = den.scale(_ONE / lead)

    @classmethod
    def q(cls) -> RatFunc:
        return cls(Poly.q())

    @classmethod
    def _trusted(cls, num: Poly, den: Poly) -> RatFunc:
        """Skip reduction; the caller guarantees coprime parts and a monic den."""
        out = cls.__new__(cls)
        out.num, out.den = num, den
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussRational, Poly)):
            other = RatFunc(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RatFunc({self.num!r}, {self.den!r})"

    def __add__(self, other) -> RatFunc:
        other = _as_ratfunc(other)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RatFunc:
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> RatFunc:
        return self + (-_as_ratfunc(other))

    def __rsub__(self, other) -> RatFunc:
        return _as_ratfunc(other) - self

    def __mul__(self, other) -> RatFunc:
        other = _as_ratfunc(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RatFunc:
        other = _as_ratfunc(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def derivative(self) -> RatFunc:
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def q_derivative(self) -> RatFunc:
        """Apply the Euler operator q d/dq."""
        return self.derivative() * RatFunc.q()

    def __call__(self, q0: Scalar) -> GaussRational:
        q0 = to_gauss(q0)
        d = self.den(q0)
        if not d:
            raise PoleError(f"pole at q = {format_gauss(q0)}")
        return self.num(q0) / d

    def series(self, order: int) -> list[GaussRational]:
        """Power-series coefficients of q^0..q^order (requires den(0) != 0)."""
        d0 = self.den(0)
        if not d0:
            raise PoleError("series expansion needs a nonzero constant term in the denominator")
        num = list(self.num.coeffs) + [_ZERO] * (order + 1)
        den = self.den.coeffs
        out: list[GaussRational] = []
        for k in range(order + 1):
            acc = num[k]
            for j in range(1, min(k, len(den) - 1) + 1):
                acc = acc - den[j] * out[k - j]
            out.append(acc / d0)
        return out


def _as_ratfunc(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    return RatFunc(x)


def eval_at(f: RatFunc | LaurentPoly | Poly, q0: Scalar) -> GaussRational:
    """Exact value of a q-series at ``q0``; raises PoleError at a pole."""
    return f(q0)


# -- Bernoulli, zeta, polylog -------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1)]
_BERNOULLI_LOCK = threading.Lock()


def bernoulli(n: int) -> Fraction:
    """B_n from z/(e^z - 1), so B_1 = -1/2."""
    if n < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    with _BERNOULLI_LOCK:
        while len(_BERNOULLI) <= n:
            m = len(_BERNOULLI)
            acc = sum((comb(m + 1, k) * _BERNOULLI[k] for k in range(m)), Fraction(0))
            _BERNOULLI.append(-acc / (m + 1))
        return _BERNOULLI[n]


def zeta_nonpositive(m: int) -> Fraction:
    """zeta(-m) for m >= 0."""
    if m < 0:
        raise ValueError("expected m >= 0")
    return (-1) ** m * bernoulli(m + 1) / (m + 1)


@lru_cache(maxsize=None)
def polylog_negative(m: int) -> RatFunc:
    """Li_{-m}(q) = sum_{a>=1} a^m q^a as an exact rational function.

    Built from Eulerian numbers: q A_m(q) / (1 - q)^(m + 1). The numerator
    takes the value m! at q = 1, so the fraction is already reduced.
    """
    if m < 0:
        raise ValueError("expected m >= 0")
    if m == 0:
        return RatFunc(Poly.q(), Poly([1, -1]))
    euler = [
        sum((-1) ** j * comb(m + 1, j) * (k + 1 - j) ** m for j in range(k + 1))
        for k in range(m)
    ]
    sign = (-1) ** (m + 1)
    num = Poly([0] + [sign * a for a in euler])
    den = Poly([comb(m + 1, k) * (-1) ** (m + 1 - k) for k in range(m + 2)])
    return RatFunc._trusted(num, den)


# -- tiny dense exact linear algebra -----------------------------------------


def _gauss_jordan(rows: list[list[GaussRational]], ncols: int) -> list[list[GaussRational]]:
    n = len(rows)
    r = 0
    for c in range(ncols):
        pivot = next((k for k in range(r, n) if rows[k][c]), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = _ONE / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for k in range(n):
            if k != r and rows[k][c]:
                f = rows[k][c]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        r += 1
    return rows


def invert_matrix(m: Sequence[Sequence[Scalar]]) -> list[list[GaussRational]]:
    """Inverse of a square matrix over Q(i)."""
    n = len(m)
    rows = [
        [to_gauss(x) for x in row] + [_ONE if j == i else _ZERO for j in range(n)]
        for i, row in enumerate(m)
    ]
    done = _gauss_jordan(rows, n)
    return [row[n:] for row in done]


def solve_linear(m: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> list[GaussRational]:
    """Solve m x = rhs for square nonsingular m."""
    rows = [[to_gauss(x) for x in row] + [to_gauss(b)] for row, b in zip(m, rhs)]
    done = _gauss_jordan(rows, len(m))
    return [row[-1] for row in done]
