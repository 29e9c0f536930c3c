"""
Exact arithmetic for eigenvalues in polar form and for the coefficients they
generate.

An exact eigenvalue is ``r * exp(2 pi i a)`` with ``r`` and ``a`` rational.
Products of such values stay polar, but sums do not, so series coefficients
live in the cyclotomic field Q(zeta_L), where L is a common multiple of every
angle denominator in play (and of 4 when Gaussian rationals appear).  Elements
are stored in the power basis 1, zeta, ..., zeta^(phi(L)-1), which is a basis,
so equality and zero tests are exact.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

__all__ = ["PolarValue", "CyclotomicNumber", "cyclotomic_polynomial"]

# phi(L) grows roughly like L; beyond this exact series work is impractical.
MAX_FIELD_ORDER = 2520


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"expected a rational number, got {type(x).__name__}")


class PolarValue:
    """Nonzero complex number ``modulus * exp(2 pi i angle)`` with rational data.

    The angle is kept reduced to [0, 1).  Multiplication adds angles and
    multiplies moduli, so powers and monomials stay exact.
    """

    __slots__ = ("modulus", "angle")

    def __init__(self, modulus, angle=0):
        modulus = _as_fraction(modulus)
        if modulus <= 0:
            raise ValueError("polar modulus must be positive")
        angle = _as_fraction(angle)
        self.modulus = modulus
        self.angle = angle - math.floor(angle)

    def __mul__(self, other):
        if isinstance(other, PolarValue):
            return PolarValue(self.modulus * other.modulus, self.angle + other.angle)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, PolarValue):
            return PolarValue(self.modulus / other.modulus, self.angle - other.angle)
        return NotImplemented

    def __pow__(self, e: int):
        return PolarValue(self.modulus ** e, self.angle * e)

    def __eq__(self, other):
        if isinstance(other, PolarValue):
            return self.modulus == other.modulus and self.angle == other.angle
        return NotImplemented

    def __hash__(self):
        return hash((self.modulus, self.angle))

    def __complex__(self):
        return float(self.modulus) * cmath.exp(2j * math.pi * float(self.angle))

    def __abs__(self):
        return float(self.modulus)

    def __repr__(self):
        return f"PolarValue({self.modulus}, {self.angle})"

    @classmethod
    def one(cls):
        return cls(1, 0)

    def is_root_of_unity(self) -> bool:
        return self.modulus == 1

    def to_cyclotomic(self, order: int) -> "CyclotomicNumber":
        if order % self.angle.denominator:
            raise ValueError(f"angle {self.angle} does not live in Q(zeta_{order})")
        return CyclotomicNumber.root(order, int(self.angle * order), self.modulus)


# --------------------------------------------------------------------------
# integer / rational polynomial helpers (coefficient lists, low degree first)
# --------------------------------------------------------------------------

def _poly_divmod(num, den):
    num = list(num)
    q = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    lead = den[-1]
    while len(num) >= len(den) and any(num):
        shift = len(num) - len(den)
        c = Fraction(num[-1]) / lead
        q[shift] = c
        for i, d in enumerate(den):
            num[shift + i] -= c * d
        num.pop()
        while num and num[-1] == 0:
            num.pop()
    return q, num


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


@lru_cache(maxsize=None)
def cyclotomic_polynomial(order: int) -> tuple:
    """Integer coefficients of the order-th cyclotomic polynomial."""
    if order < 1:
        raise ValueError("order must be positive")
    p = [-1] + [0] * (order - 1) + [1]
    for d in range(1, order):
        if order % d == 0:
            p, r = _poly_divmod(p, list(cyclotomic_polynomial(d)))
            if any(r):
                raise ArithmeticError("cyclotomic division left a remainder")
    return tuple(int(c) for c in _trim(p))


@lru_cache(maxsize=None)
def _field(order: int):
    """Degree and reduction table: row e expresses zeta^e in the power basis."""
    if order > MAX_FIELD_ORDER:
        raise ValueError(
            f"cyclotomic order {order} exceeds {MAX_FIELD_ORDER}; use float mode"
        )
    phi = cyclotomic_polynomial(order)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    cur[0] = 1
    top = max(order, 2 * d - 1)
    for _ in range(top):
        rows.append(tuple(cur))
        # multiply by x and reduce x^d = -(phi_0 + ... + phi_{d-1} x^{d-1})
        carry = cur[-1]
        cur = [0] + cur[:-1]
        if carry:
            for i in range(d):
                cur[i] -= carry * phi[i]
    return d, tuple(rows)


class CyclotomicNumber:
    """Element of Q(zeta_L) in the power basis.

    Operations between elements of different fields lift both to the field of
    the least common multiple.  Integers and Fractions mix in freely.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        d, _ = _field(order)
        coeffs = tuple(coeffs)
        if len(coeffs) != d:
            raise ValueError(f"Q(zeta_{order}) elements need {d} coefficients")
        self.order = order
        self.coeffs = coeffs

    # construction ---------------------------------------------------------

    @classmethod
    def rational(cls, value, order: int = 1):
        d, _ = _field(order)
        return cls(order, (_as_fraction(value),) + (0,) * (d - 1))

    @classmethod
    def root(cls, order: int, exponent: int, scale=1):
        d, rows = _field(order)
        scale = _as_fraction(scale)
        row = rows[exponent % order]
        return cls(order, tuple(scale * c for c in row))

    @classmethod
    def gaussian(cls, re, im, order: int = 4):
        if order % 4:
            raise ValueError("Gaussian rationals need 4 | order")
        return cls.rational(re, order) + cls.root(order, order // 4, im)

    # field plumbing -------------------------------------------------------

    def lift(self, order: int) -> "CyclotomicNumber":
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"Q(zeta_{self.order}) is not a subfield of Q(zeta_{order})")
        d, rows = _field(order)
        step = order // self.order
        out = [0] * d
        for i, c in enumerate(self.coeffs):
            if c:
                row = rows[i * step]
                for t in range(d):
                    if row[t]:
                        out[t] += c * row[t]
        return CyclotomicNumber(order, out)

    def _coerce(self, other):
        if isinstance(other, CyclotomicNumber):
            if other.order == self.order:
                return self, other
            m = math.lcm(self.order, other.order)
            return self.lift(m), other.lift(m)
        if isinstance(other, PolarValue):
            m = math.lcm(self.order, other.angle.denominator)
            return self.lift(m), other.to_cyclotomic(m)
        if isinstance(other, (int, Fraction)):
            return self, CyclotomicNumber.rational(other, self.order)
        return None, None

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return CyclotomicNumber(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.order, [-x for x in self.coeffs])

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return CyclotomicNumber(a.order, [x - y for x, y in zip(a.coeffs, b.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.order, [x * other for x in self.coeffs])
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        d, rows = _field(a.order)
        if d == 1:
            return CyclotomicNumber(a.order, (a.coeffs[0] * b.coeffs[0],))
        conv = [0] * (2 * d - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        conv[i + j] += x * y
        out = conv[:d]
        for e in range(d, 2 * d - 1):
            c = conv[e]
            if c:
                row = rows[e]
                for t in range(d):
                    if row[t]:
                        out[t] += c * row[t]
        return CyclotomicNumber(a.order, out)

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        if not self:
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        d, _ = _field(self.order)
        if d == 1:
            return CyclotomicNumber(self.order, (1 / Fraction(self.coeffs[0]),))
        # extended Euclid: s * a + t * phi = 1
        r0 = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        r1 = _trim([Fraction(c) for c in self.coeffs])
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, _trim(r)
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        c = r1[0]
        s = [x / c for x in s1]
        _, rem = _poly_divmod(s, [Fraction(x) for x in cyclotomic_polynomial(self.order)])
        rem = rem + [0] * (d - len(rem))
        return CyclotomicNumber(self.order, rem[:d])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.order, [x / Fraction(other) for x in self.coeffs])
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return b * a.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CyclotomicNumber.rational(1, self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # comparison and conversion -------------------------------------------

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, complex):
            return False
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return a.coeffs == b.coeffs

    def __hash__(self):
        # equal values may sit in different fields; only rationals have an
        # order-independent fingerprint that is cheap to compute
        if self.is_rational():
            return hash(Fraction(self.coeffs[0]))
        return hash("cyclotomic-irrational")

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __complex__(self):
        z = 0j
        for i, c in enumerate(self.coeffs):
            if c:
                z += float(c) * cmath.exp(2j * math.pi * i / self.order)
        return z

    def __abs__(self):
        return abs(complex(self))

    def to_gaussian(self):
        """Return (re, im) Fractions if the value is a Gaussian rational, else None."""
        if self.is_rational():
            return Fraction(self.coeffs[0]), Fraction(0)
        if self.order % 4:
            return None
        d, rows = _field(self.order)
        irow = rows[self.order // 4]
        pivot = next((t for t in range(1, d) if irow[t]), None)
        if pivot is None:
            return None
        im = Fraction(self.coeffs[pivot]) / irow[pivot]
        re = Fraction(self.coeffs[0]) - im * irow[0]
        expect = [im * c for c in irow]
        expect[0] += re
        if list(expect) != [Fraction(c) for c in self.coeffs]:
            return None
        return re, im

    def polar_terms(self):
        """Decompose into (modulus, angle) pairs summing to this value."""
        out = []
        for i, c in enumerate(self.coeffs):
            if c:
                c = Fraction(c)
                angle = Fraction(i, self.order)
                if c < 0:
                    angle += Fraction(1, 2)
                out.append((abs(c), angle - math.floor(angle)))
        return out

    def __str__(self):
        g = self.to_gaussian()
        if g is not None:
            re, im = g
            if im == 0:
                return str(re)
            if re == 0:
                return f"{im}i"
            return f"{re}{'+' if im > 0 else '-'}{abs(im)}i"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(f"({c})*z{self.order}^{i}" if i else f"({c})")
        return " + ".join(parts)

    def __repr__(self):
        return f"CyclotomicNumber({self.order}, {self.coeffs!r})"


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])
