"""
JSON germ documents.

A document looks like::

    {
      "dimension": 2, "split": 1, "mode": "exact", "tolerance": 1e-12,
      "truncation": 6,
      "eigenvalues": [{"modulus_num": 3, "modulus_den": 2, "angle_num": 1, "angle_den": 5},
                      {"re": 1, "im": 0}],
      "epsilon_entries": [0],
      "terms": [{"coord": 1, "index": [2, 0], "re": [1, 1], "im": [0, 1]}]
    }

Coordinates are 1-based.  In exact mode ``re``/``im`` are ``[num, den]``
pairs (plain integers are accepted too).  Exact coefficients that are not
Gaussian rationals use ``"polar": [{"modulus": [p, q], "angle": [a, b]}, ...]``
instead, meaning the sum of ``(p/q) exp(2 pi i a/b)``.  Repeated
(coord, index) terms are added.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cyclotomic import CyclotomicNumber, PolarValue
from .germ import Germ
from .series import SeriesVector, TruncatedSeries
from .spectrum import Spectrum

__all__ = ["GermFormatError", "GermDocument", "load_germ", "dump_germ", "parse_germ",
           "germ_to_dict"]


class GermFormatError(ValueError):
    """The document does not describe a valid germ."""


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise GermFormatError(f"{where}: missing field {key!r}")
    return d[key]


def _int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise GermFormatError(f"{what} must be an integer, got {v!r}")
    return v


def _rational(v, what: str) -> Fraction:
    if isinstance(v, bool):
        raise GermFormatError(f"{what} must be rational, got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) and not isinstance(x, bool)
                                                   for x in v):
        if v[1] == 0:
            raise GermFormatError(f"{what} has zero denominator")
        return Fraction(v[0], v[1])
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError):
            pass
    raise GermFormatError(f"{what} must be an integer, a [num, den] pair or 'p/q', got {v!r}")


def _float(v, what: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise GermFormatError(f"{what} must be a number, got {v!r}")
    return float(v)


def _frac_pair(q: Fraction) -> list:
    return [q.numerator, q.denominator]


@dataclass
class GermDocument:
    dimension: int
    split: int
    mode: str
    tolerance: float
    truncation: int
    eigenvalues: list
    epsilon_entries: list = field(default_factory=list)
    terms: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, d) -> "GermDocument":
        if not isinstance(d, dict):
            raise GermFormatError("document must be a JSON object")
        n = _int(_need(d, "dimension", "document"), "dimension")
        s = _int(_need(d, "split", "document"), "split")
        if n < 1:
            raise GermFormatError("dimension must be at least 1")
        if not 1 <= s <= n:
            raise GermFormatError(f"split must satisfy 1 <= s <= n, got s={s}, n={n}")
        mode = d.get("mode", "float")
        if mode not in ("exact", "float"):
            raise GermFormatError(f"mode must be 'exact' or 'float', got {mode!r}")
        tol = _float(d.get("tolerance", 1e-12), "tolerance")
        if tol <= 0:
            raise GermFormatError("tolerance must be positive")
        N = _int(_need(d, "truncation", "document"), "truncation")
        if N < 1:
            raise GermFormatError("truncation must be at least 1")
        eig = _need(d, "eigenvalues", "document")
        if not isinstance(eig, list) or len(eig) != n:
            raise GermFormatError(f"eigenvalues must be a list of {n} entries")
        eps = d.get("epsilon_entries", [0] * (n - 1))
        if (not isinstance(eps, list) or len(eps) != n - 1
                or any(e not in (0, 1) or isinstance(e, bool) for e in eps)):
            raise GermFormatError(f"epsilon_entries must be {n - 1} flags in {{0, 1}}")
        terms = d.get("terms", [])
        if not isinstance(terms, list):
            raise GermFormatError("terms must be a list")
        return cls(n, s, mode, tol, N, list(eig), list(eps), list(terms))

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "split": self.split,
            "mode": self.mode,
            "tolerance": self.tolerance,
            "truncation": self.truncation,
            "eigenvalues": self.eigenvalues,
            "epsilon_entries": self.epsilon_entries,
            "terms": self.terms,
        }

    # conversion -----------------------------------------------------------

    def _eigenvalue(self, i: int, e):
        where = f"eigenvalue {i + 1}"
        if not isinstance(e, dict):
            raise GermFormatError(f"{where} must be an object")
        polar = "modulus_num" in e or "angle_num" in e
        if self.mode == "exact":
            if polar:
                mod = Fraction(_int(_need(e, "modulus_num", where), "modulus_num"),
                               _nonzero_den(e, "modulus_den", where))
                ang = Fraction(_int(e.get("angle_num", 0), "angle_num"),
                               _nonzero_den(e, "angle_den", where, default=1))
                if mod <= 0:
                    raise GermFormatError(f"{where} needs a positive modulus")
                return PolarValue(mod, ang)
            re = _rational(e.get("re", 0), f"{where} re")
            im = _rational(e.get("im", 0), f"{where} im")
            if re == 0 and im == 0:
                raise GermFormatError(f"{where} is zero")
            if im == 0:
                return PolarValue(abs(re), Fraction(0) if re > 0 else Fraction(1, 2))
            if re == 0:
                return PolarValue(abs(im), Fraction(1, 4) if im > 0 else Fraction(3, 4))
            raise GermFormatError(
                f"{where}: exact eigenvalues off the axes need the polar form "
                "(modulus_num, modulus_den, angle_num, angle_den)"
            )
        if polar:
            mod = _float(_need(e, "modulus_num", where), "modulus_num") / \
                _nonzero_den(e, "modulus_den", where)
            ang = _float(e.get("angle_num", 0), "angle_num") / \
                _nonzero_den(e, "angle_den", where, default=1)
            if mod <= 0:
                raise GermFormatError(f"{where} needs a positive modulus")
            return cmath.rect(mod, 2 * math.pi * ang)
        v = complex(_float(e.get("re", 0), f"{where} re"), _float(e.get("im", 0), f"{where} im"))
        if v == 0:
            raise GermFormatError(f"{where} is zero")
        return v

    def _coefficient(self, t: dict, where: str):
        if self.mode == "exact":
            if "polar" in t:
                parts = t["polar"]
                if not isinstance(parts, list):
                    raise GermFormatError(f"{where}: polar must be a list")
                total = CyclotomicNumber.rational(0)
                for p in parts:
                    if not isinstance(p, dict):
                        raise GermFormatError(f"{where}: polar entries must be objects")
                    mod = _rational(_need(p, "modulus", where), f"{where} modulus")
                    ang = _rational(p.get("angle", 0), f"{where} angle")
                    if mod < 0:
                        raise GermFormatError(f"{where}: polar modulus must be non-negative")
                    if mod:
                        pv = PolarValue(mod, ang)
                        total = total + pv.to_cyclotomic(pv.angle.denominator)
                return total
            re = _rational(t.get("re", 0), f"{where} re")
            im = _rational(t.get("im", 0), f"{where} im")
            return CyclotomicNumber.gaussian(re, im) if im else CyclotomicNumber.rational(re)
        if "polar" in t:
            raise GermFormatError(f"{where}: polar coefficients are only allowed in exact mode")
        return complex(_float(t.get("re", 0), f"{where} re"), _float(t.get("im", 0), f"{where} im"))

    def to_germ(self) -> Germ:
        n, s = self.dimension, self.split
        vals = [self._eigenvalue(i, e) for i, e in enumerate(self.eigenvalues)]
        spec = Spectrum(vals, s, self.mode, self.tolerance)
        comps = [dict() for _ in range(n)]
        for ti, t in enumerate(self.terms):
            where = f"term {ti + 1}"
            if not isinstance(t, dict):
                raise GermFormatError(f"{where} must be an object")
            j = _int(_need(t, "coord", where), f"{where} coord")
            if not 1 <= j <= n:
                raise GermFormatError(f"{where}: coord must be in 1..{n}, got {j}")
            k = _need(t, "index", where)
            if (not isinstance(k, list) or len(k) != n
                    or any(isinstance(e, bool) or not isinstance(e, int) or e < 0 for e in k)):
                raise GermFormatError(f"{where}: index must be {n} non-negative integers")
            if sum(k) < 2:
                raise GermFormatError(f"{where}: index {k} has degree {sum(k)} < 2")
            if sum(k) > self.truncation:
                continue
            v = self._coefficient(t, where)
            key = tuple(k)
            c = comps[j - 1]
            c[key] = c[key] + v if key in c else v
        tail = SeriesVector([TruncatedSeries(n, self.truncation, c) for c in comps])
        try:
            return Germ(spec, tail, self.epsilon_entries)
        except (ValueError, TypeError) as exc:
            raise GermFormatError(str(exc)) from exc

    @classmethod
    def from_germ(cls, germ: Germ) -> "GermDocument":
        spec = germ.spectrum
        eig = []
        for v in spec.values:
            if spec.exact:
                eig.append({"modulus_num": v.modulus.numerator, "modulus_den": v.modulus.denominator,
                            "angle_num": v.angle.numerator, "angle_den": v.angle.denominator})
            else:
                eig.append({"re": v.real, "im": v.imag})
        terms = []
        for j, comp in enumerate(germ.tail):
            for k, v in comp.items():
                t = {"coord": j + 1, "index": list(k)}
                t.update(encode_coefficient(v, spec.exact))
                terms.append(t)
        return cls(spec.n, spec.s, spec.mode, spec.tol, germ.trunc, eig,
                   list(germ.epsilon), terms)


def _nonzero_den(e, key, where, default=None):
    v = e.get(key, default)
    if v is None:
        raise GermFormatError(f"{where}: missing field {key!r}")
    v = _int(v, key) if not isinstance(v, float) else v
    if v == 0:
        raise GermFormatError(f"{where}: {key} must be nonzero")
    return v


def encode_coefficient(v, exact: bool) -> dict:
    """JSON fields for one coefficient (re/im pairs when possible, else polar)."""
    if exact:
        if isinstance(v, (int, Fraction)):
            q = Fraction(v)
            return {"re": _frac_pair(q), "im": [0, 1]}
        if isinstance(v, PolarValue):
            v = v.to_cyclotomic(v.angle.denominator)
        g = v.to_gaussian()
        if g is not None:
            return {"re": _frac_pair(g[0]), "im": _frac_pair(g[1])}
        return {"polar": [{"modulus": _frac_pair(m), "angle": _frac_pair(a)}
                          for m, a in v.polar_terms()]}
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def parse_germ(d: dict) -> Germ:
    return GermDocument.from_dict(d).to_germ()


def germ_to_dict(germ: Germ) -> dict:
    return GermDocument.from_germ(germ).to_dict()


def load_document(path) -> GermDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GermFormatError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GermFormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return GermDocument.from_dict(data)


def load_germ(path) -> Germ:
    return load_document(path).to_germ()


def dump_germ(germ: Germ, path=None) -> str:
    text = json.dumps(germ_to_dict(germ), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
