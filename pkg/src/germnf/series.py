"""
Truncated multivariate formal power series.

Coefficients are stored sparsely in a dict keyed by exponent tuples, never
holding an exact zero and never holding a term of degree above the truncation
bound.  Coefficients may be Python complex numbers (float mode) or
:class:`~germnf.cyclotomic.CyclotomicNumber` (exact mode); the algebra here is
generic over both.

Iteration is always in graded-lex order (total degree, then lexicographic
exponent tuple), which keeps float results reproducible.
"""

from __future__ import annotations

import math
import operator
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "MultiIndex",
    "monomials",
    "grlex_key",
    "TruncatedSeries",
    "SeriesVector",
    "add",
    "mul",
    "compose",
    "ord_x",
    "coeff_norm",
    "INFINITE_ORDER",
]

#: returned by :func:`ord_x` for the zero series
INFINITE_ORDER = math.inf


class MultiIndex(tuple):
    """Exponent vector with graded-lex ordering.

    Hashes and compares equal to the plain tuple with the same entries, so
    plain tuples can be used as dictionary keys interchangeably.
    """

    __slots__ = ()

    def __new__(cls, exponents: Iterable[int] = ()):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        return super().__new__(cls, exps)

    @property
    def degree(self) -> int:
        return sum(self)

    def __lt__(self, other):
        return grlex_key(self) < grlex_key(other)

    def __le__(self, other):
        return grlex_key(self) <= grlex_key(other)

    def __gt__(self, other):
        return grlex_key(self) > grlex_key(other)

    def __ge__(self, other):
        return grlex_key(self) >= grlex_key(other)

    def __add__(self, other):
        return MultiIndex(map(operator.add, self, other))

    def __sub__(self, other):
        return MultiIndex(map(operator.sub, self, other))

    def __repr__(self):
        return "(" + ",".join(str(e) for e in self) + ")"

    __hash__ = tuple.__hash__
    __eq__ = tuple.__eq__
    __ne__ = tuple.__ne__


def grlex_key(k: Sequence[int]):
    return (sum(k), tuple(k))


@lru_cache(maxsize=None)
def monomials(n: int, degree: int) -> tuple:
    """All exponent tuples in n variables of the given total degree, lex ascending."""
    if degree < 0:
        return ()
    out = []
    # stars and bars: choose n-1 bar positions among degree+n-1 slots
    for bars in combinations(range(degree + n - 1), n - 1):
        prev = -1
        exps = []
        for b in bars:
            exps.append(b - prev - 1)
            prev = b
        exps.append(degree + n - 1 - prev - 1)
        out.append(MultiIndex(exps))
    out.sort(key=tuple)
    return tuple(out)


def _add_index(a, b):
    return tuple(map(operator.add, a, b))


def _is_zero(v) -> bool:
    return not v


class TruncatedSeries:
    """One scalar series in ``n`` variables truncated above degree ``trunc``.

    Constant terms are rejected unless ``allow_constant`` is set, matching the
    germ-tail convention.
    """

    __slots__ = ("n", "trunc", "allow_constant", "_c")

    def __init__(
        self,
        n: int,
        trunc: int,
        coeffs: Mapping[Sequence[int], object] | None = None,
        allow_constant: bool = False,
    ):
        if n < 1:
            raise ValueError("series need at least one variable")
        if trunc < 0:
            raise ValueError("truncation degree must be non-negative")
        self.n = n
        self.trunc = trunc
        self.allow_constant = allow_constant
        c = {}
        for k, v in (coeffs or {}).items():
            k = MultiIndex(k)
            if len(k) != n:
                raise ValueError(f"index {k} has length {len(k)}, expected {n}")
            d = k.degree
            if d == 0 and not allow_constant:
                raise ValueError("constant term in a series without constant terms")
            if d > trunc or _is_zero(v):
                continue
            c[k] = c[k] + v if k in c else v
            if _is_zero(c[k]):
                del c[k]
        self._c = {k: c[k] for k in sorted(c, key=grlex_key)}

    @classmethod
    def _raw(cls, n, trunc, c, allow_constant=False):
        # trusted constructor: c already canonical
        obj = cls.__new__(cls)
        obj.n = n
        obj.trunc = trunc
        obj.allow_constant = allow_constant
        obj._c = {k: c[k] for k in sorted(c, key=grlex_key)}
        return obj

    @classmethod
    def zero(cls, n, trunc, allow_constant=False):
        return cls._raw(n, trunc, {}, allow_constant)

    @classmethod
    def variable(cls, n, trunc, i, one=1):
        e = [0] * n
        e[i] = 1
        return cls._raw(n, trunc, {MultiIndex(e): one} if trunc >= 1 else {})

    # access ---------------------------------------------------------------

    def coeff(self, k, default=0):
        return self._c.get(tuple(k), default)

    def __getitem__(self, k):
        return self.coeff(k)

    def items(self):
        return self._c.items()

    def support(self):
        return list(self._c)

    def __len__(self):
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def degree_slice(self, d: int) -> dict:
        return {k: v for k, v in self._c.items() if sum(k) == d}

    def by_degree(self):
        groups: dict[int, list] = {}
        for k, v in self._c.items():
            groups.setdefault(sum(k), []).append((k, v))
        return groups

    def min_degree(self):
        return min((sum(k) for k in self._c), default=None)

    def truncated(self, trunc: int) -> "TruncatedSeries":
        return TruncatedSeries._raw(
            self.n, trunc, {k: v for k, v in self._c.items() if sum(k) <= trunc},
            self.allow_constant,
        )

    def without_degrees_below(self, d: int) -> "TruncatedSeries":
        return TruncatedSeries._raw(
            self.n, self.trunc, {k: v for k, v in self._c.items() if sum(k) >= d},
            self.allow_constant,
        )

    def map(self, fn) -> "TruncatedSeries":
        """Apply ``fn(k, v)`` to every coefficient, dropping zero results."""
        out = {}
        for k, v in self._c.items():
            w = fn(k, v)
            if not _is_zero(w):
                out[k] = w
        return TruncatedSeries._raw(self.n, self.trunc, out, self.allow_constant)

    # algebra --------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            raise TypeError("expected a TruncatedSeries")
        if other.n != self.n or other.trunc != self.trunc:
            raise ValueError(
                f"series mismatch: (n={self.n}, N={self.trunc}) vs (n={other.n}, N={other.trunc})"
            )

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, -other)

    def __neg__(self):
        return TruncatedSeries._raw(
            self.n, self.trunc, {k: -v for k, v in self._c.items()}, self.allow_constant
        )

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "TruncatedSeries":
        if _is_zero(c):
            return TruncatedSeries.zero(self.n, self.trunc, self.allow_constant)
        return self.map(lambda k, v: c * v)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.n, self.trunc) == (other.n, other.trunc) and self._c == other._c

    __hash__ = None

    def __repr__(self):
        if not self._c:
            return f"TruncatedSeries(n={self.n}, N={self.trunc}, 0)"
        terms = " + ".join(f"{v}*w^{k!r}" for k, v in self._c.items())
        return f"TruncatedSeries(n={self.n}, N={self.trunc}, {terms})"


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check(b)
    out = dict(a._c)
    for k, v in b._c.items():
        if k in out:
            w = out[k] + v
            if _is_zero(w):
                del out[k]
            else:
                out[k] = w
        else:
            out[k] = v
    return TruncatedSeries._raw(a.n, a.trunc, out, a.allow_constant or b.allow_constant)


def _mul_dicts(a: dict, b: dict, trunc: int) -> dict:
    ga: dict[int, list] = {}
    for k, v in a.items():
        ga.setdefault(sum(k), []).append((k, v))
    gb: dict[int, list] = {}
    for k, v in b.items():
        gb.setdefault(sum(k), []).append((k, v))
    out: dict = {}
    for da in sorted(ga):
        for db in sorted(gb):
            if da + db > trunc:
                break
            for ka, va in ga[da]:
                for kb, vb in gb[db]:
                    k = _add_index(ka, kb)
                    p = va * vb
                    if k in out:
                        out[k] = out[k] + p
                    else:
                        out[k] = p
    return {k: v for k, v in out.items() if not _is_zero(v)}


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product, discarding every term above the shared truncation degree."""
    a._check(b)
    return TruncatedSeries._raw(
        a.n, a.trunc, _mul_dicts(a._c, b._c, a.trunc), a.allow_constant and b.allow_constant
    )


def ord_x(g: TruncatedSeries, s: int):
    """Largest m with g in the ideal (x_1, ..., x_s)^m; INFINITE_ORDER for g == 0."""
    if not 1 <= s <= g.n:
        raise ValueError(f"split {s} outside 1..{g.n}")
    if g.is_zero():
        return INFINITE_ORDER
    return min(sum(k[:s]) for k in g._c)


def coeff_norm(v: Iterable) -> float:
    """Sup norm of a coefficient vector."""
    return max((abs(x) for x in v), default=0.0)


class SeriesVector:
    """A map given by n component series in a common set of variables."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[TruncatedSeries]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a SeriesVector needs at least one component")
        n, trunc = comps[0].n, comps[0].trunc
        for c in comps:
            if c.n != n or c.trunc != trunc:
                raise ValueError("SeriesVector components disagree on dimension or truncation")
        self.components = comps

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def trunc(self) -> int:
        return self.components[0].trunc

    def __len__(self):
        return len(self.components)

    def __getitem__(self, j) -> TruncatedSeries:
        return self.components[j]

    def __iter__(self):
        return iter(self.components)

    @classmethod
    def identity(cls, n: int, trunc: int, one=1) -> "SeriesVector":
        return cls([TruncatedSeries.variable(n, trunc, i, one) for i in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence, trunc: int) -> "SeriesVector":
        n = len(values)
        return cls([TruncatedSeries.variable(n, trunc, i, values[i]) for i in range(n)])

    def coeff(self, k) -> tuple:
        return tuple(c.coeff(k) for c in self.components)

    def support(self) -> list:
        keys = set()
        for c in self.components:
            keys.update(c._c)
        return sorted(keys, key=grlex_key)

    def truncated(self, trunc: int) -> "SeriesVector":
        return SeriesVector([c.truncated(trunc) for c in self.components])

    def nonlinear_part(self) -> "SeriesVector":
        return SeriesVector([c.without_degrees_below(2) for c in self.components])

    def __add__(self, other):
        return SeriesVector([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        return SeriesVector([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return SeriesVector([-a for a in self.components])

    def __eq__(self, other):
        if not isinstance(other, SeriesVector):
            return NotImplemented
        return self.components == other.components

    __hash__ = None

    def __repr__(self):
        return "SeriesVector(" + ", ".join(repr(c) for c in self.components) + ")"

    def compose(self, inner: "SeriesVector") -> "SeriesVector":
        return compose(self, inner)

    def max_coeff_norm(self) -> float:
        return max((coeff_norm(self.coeff(k)) for k in self.support()), default=0.0)


class _PowerCache:
    """Memoized monomials inner^l truncated at a fixed degree."""

    def __init__(self, inner: SeriesVector, trunc: int):
        self.trunc = trunc
        self.inner = [dict(c._c) for c in inner.components]
        n = len(self.inner)
        self.cache: dict = {}
        for i in range(n):
            e = [0] * n
            e[i] = 1
            self.cache[tuple(e)] = {k: v for k, v in self.inner[i].items() if sum(k) <= trunc}

    def get(self, l) -> dict:
        l = tuple(l)
        hit = self.cache.get(l)
        if hit is not None:
            return hit
        if sum(l) > self.trunc:
            # every inner term has degree >= 1
            res = {}
        else:
            i = next(t for t, e in enumerate(l) if e)
            prev = list(l)
            prev[i] -= 1
            res = _mul_dicts(self.get(prev), self.inner[i], self.trunc)
        self.cache[l] = res
        return res


def compose(outer: SeriesVector, inner: SeriesVector) -> SeriesVector:
    """outer o inner, truncated at the smaller of the two truncation degrees.

    ``inner`` must have no constant terms.  Each monomial of ``outer`` is
    expanded by direct substitution using memoized powers of the inner
    components; terms are accumulated in graded-lex order.
    """
    if outer.n != len(inner):
        raise ValueError(
            f"outer series use {outer.n} variables but inner map has {len(inner)} components"
        )
    for c in inner.components:
        if c.coeff((0,) * c.n):
            raise ValueError("inner map has a nonzero constant term")
    trunc = min(outer.trunc, inner.trunc)
    m = inner.n
    powers = _PowerCache(inner, trunc)
    zero_in = (0,) * outer.n
    zero_out = (0,) * m
    comps = []
    for comp in outer.components:
        acc: dict = {}
        for l, c in comp._c.items():
            if l == zero_in:
                acc[zero_out] = acc[zero_out] + c if zero_out in acc else c
                continue
            for k, v in powers.get(l).items():
                p = c * v
                acc[k] = acc[k] + p if k in acc else p
        acc = {k: v for k, v in acc.items() if not _is_zero(v)}
        comps.append(TruncatedSeries._raw(m, trunc, acc, comp.allow_constant))
    return SeriesVector(comps)
