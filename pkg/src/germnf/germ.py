"""
Germs f(z) = Lambda z + f_hat(z) with diagonal linear part.

In exact mode every coefficient lives in one cyclotomic field Q(zeta_L) with
L the lcm of the eigenvalue angle denominators and of the fields used by the
tail coefficients.  L is only computed when coefficient arithmetic is needed,
so spectra with huge angle denominators remain usable for the spectral
commands.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property

from .cyclotomic import MAX_FIELD_ORDER, CyclotomicNumber, PolarValue
from .series import SeriesVector, TruncatedSeries
from .spectrum import Spectrum

__all__ = ["Germ", "exact_coefficient"]


def exact_coefficient(v, order: int = 1) -> CyclotomicNumber:
    """Bring an int, Fraction, PolarValue or CyclotomicNumber into Q(zeta_order)."""
    if isinstance(v, CyclotomicNumber):
        return v.lift(math.lcm(v.order, order))
    if isinstance(v, PolarValue):
        return v.to_cyclotomic(math.lcm(v.angle.denominator, order))
    if isinstance(v, (int, Fraction)):
        return CyclotomicNumber.rational(v, order)
    raise TypeError(f"cannot use {type(v).__name__} as an exact coefficient")


class Germ:
    """A truncated germ with diagonal spectrum and split order.

    ``epsilon`` holds the optional Jordan off-diagonal flags: entry i couples
    coordinate i + 1 into coordinate i (so component i gains
    ``epsilon[i] * z_{i+1}``).  Only the osculating-form check accepts them.
    """

    def __init__(self, spectrum: Spectrum, tail: SeriesVector, epsilon=None):
        n = spectrum.n
        if len(tail) != n or tail.n != n:
            raise ValueError(f"tail must have {n} components in {n} variables")
        for j, comp in enumerate(tail):
            for k, v in comp.items():
                if sum(k) < 2:
                    raise ValueError(
                        f"tail component {j + 1} has a term of degree {sum(k)}; "
                        "tails start at degree 2"
                    )
                if spectrum.exact and isinstance(v, (complex, float)):
                    raise TypeError("exact germs need exact coefficients")
                if not spectrum.exact and not isinstance(v, (complex, float, int)):
                    raise TypeError("float germs need numeric coefficients")
        if epsilon is None:
            epsilon = (0,) * (n - 1)
        epsilon = tuple(int(e) for e in epsilon)
        if len(epsilon) != n - 1 or any(e not in (0, 1) for e in epsilon):
            raise ValueError(f"epsilon entries must be n-1 = {n - 1} flags in {{0, 1}}")
        if not spectrum.exact:
            tail = SeriesVector([c.map(lambda k, v: complex(v)) for c in tail])
        self.spectrum = spectrum
        self.tail = tail
        self.epsilon = epsilon

    @property
    def n(self) -> int:
        return self.spectrum.n

    @property
    def s(self) -> int:
        return self.spectrum.s

    @property
    def trunc(self) -> int:
        return self.tail.trunc

    @property
    def exact(self) -> bool:
        return self.spectrum.exact

    def __eq__(self, other):
        if not isinstance(other, Germ):
            return NotImplemented
        return (self.spectrum, self.tail, self.epsilon) == (
            other.spectrum, other.tail, other.epsilon)

    __hash__ = None

    def __repr__(self):
        return f"Germ({self.spectrum!r}, N={self.trunc}, tail={self.tail!r})"

    # coefficient arithmetic ----------------------------------------------

    @cached_property
    def field_order(self) -> int:
        """Order L of the cyclotomic field used in exact mode (1 in float mode)."""
        if not self.exact:
            return 1
        orders = [v.angle.denominator for v in self.spectrum.values]
        for comp in self.tail:
            for _, v in comp.items():
                if isinstance(v, CyclotomicNumber):
                    orders.append(v.order)
        L = math.lcm(*orders)
        if L > MAX_FIELD_ORDER:
            raise ValueError(
                f"exact coefficient field Q(zeta_{L}) is too large (limit {MAX_FIELD_ORDER}); "
                "use float mode for this germ"
            )
        return L

    def scalar(self, v):
        """Convert a number into this germ's coefficient type."""
        if self.exact:
            return exact_coefficient(v, self.field_order)
        return complex(v)

    def zero(self):
        return self.scalar(0)

    def one(self):
        return self.scalar(1)

    def eigenvalue(self, j: int):
        return self.scalar(self.spectrum.values[j])

    def power(self, k):
        """lambda~^k in coefficient arithmetic."""
        if self.exact:
            return self.scalar(self.spectrum.power(k))
        return self.spectrum.power(k)

    @cached_property
    def exact_tail(self) -> SeriesVector:
        """Tail with every coefficient lifted into the common field."""
        if not self.exact:
            return self.tail
        return SeriesVector([c.map(lambda k, v: self.scalar(v)) for c in self.tail])

    # maps -----------------------------------------------------------------

    def linear_part(self) -> SeriesVector:
        vals = [self.eigenvalue(j) for j in range(self.n)]
        return SeriesVector.diagonal(vals, self.trunc)

    def full_map(self) -> SeriesVector:
        """Lambda z + f_hat(z) (epsilon entries excluded)."""
        return self.linear_part() + self.exact_tail

    def is_linear(self) -> bool:
        return all(c.is_zero() for c in self.tail)

    def with_tail(self, tail: SeriesVector) -> "Germ":
        return Germ(self.spectrum, tail, self.epsilon)

    def truncated(self, trunc: int) -> "Germ":
        return Germ(self.spectrum, self.tail.truncated(trunc), self.epsilon)

    @classmethod
    def from_terms(cls, spectrum: Spectrum, trunc: int, terms, epsilon=None) -> "Germ":
        """Build from (coord, index, value) triples; coord is 0-based, repeats add up."""
        n = spectrum.n
        comps = [dict() for _ in range(n)]
        for j, k, v in terms:
            k = tuple(k)
            if not 0 <= j < n:
                raise ValueError(f"coordinate {j + 1} outside 1..{n}")
            if len(k) != n:
                raise ValueError(f"index {k} has length {len(k)}, expected {n}")
            if sum(k) < 2:
                raise ValueError(f"term index {k} has degree below 2")
            comps[j][k] = comps[j][k] + v if k in comps[j] else v
        tail = SeriesVector([TruncatedSeries(n, trunc, c) for c in comps])
        return cls(spectrum, tail, epsilon)
