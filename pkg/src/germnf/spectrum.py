"""
Eigenvalue tuples: resonance classification, small-divisor tables and
Brjuno-type sums.

A spectrum is ``(lambda_1, ..., lambda_s, mu_1, ..., mu_r)``.  The first ``s``
entries are the "x" block and the remaining ``r = n - s`` the "y" block.
Coordinates are 0-based in this API.

Exact spectra hold :class:`~germnf.cyclotomic.PolarValue` entries, so
resonance is decided by comparing rationals.  Float spectra hold complex
numbers and use a tolerance.  Distances ``|lambda^k - lambda_j|`` are always
produced in log scale so hyperbolic spectra do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .cyclotomic import PolarValue
from .series import monomials

__all__ = [
    "Spectrum",
    "ResonanceReport",
    "OmegaTable",
    "BrjunoSumEstimate",
    "ReductionReport",
    "enumerate_resonances",
    "omega_tables",
    "brjuno_sum",
    "parse_sequence",
    "check_reduction_lemma",
    "power_law_fit",
    "NO_RESONANCES",
    "LEVEL_S_ONLY",
    "VIOLATES_LEVEL_S",
]

NO_RESONANCES = "no-resonances"
LEVEL_S_ONLY = "level-s-only"
VIOLATES_LEVEL_S = "violates-level-s"

PLAUSIBLY_FINITE = "plausibly-finite"
DIVERGING = "diverging-at-horizon"

# beyond this |lambda^k| the subtraction of a unit-size lambda_j is invisible
# in double precision, so the distance is taken to be |lambda^k| itself
_LOG_HUGE = 40.0
_EXACT_DPS = 60


class Spectrum:
    """Diagonal spectrum with split order ``s``.

    ``mode`` is ``"exact"`` (entries are PolarValue) or ``"float"`` (entries
    are complex).  ``tol`` is the float resonance tolerance; near-resonances
    inside ``(tol, 10 tol]`` are reported as warnings.
    """

    def __init__(self, values: Sequence, s: int, mode: str = "float", tol: float = 1e-12):
        values = tuple(values)
        n = len(values)
        if n < 1:
            raise ValueError("spectrum must have at least one eigenvalue")
        if not 1 <= s <= n:
            raise ValueError(f"split s={s} outside 1..{n}")
        if mode == "exact":
            conv = []
            for v in values:
                if not isinstance(v, PolarValue):
                    raise TypeError("exact spectra take PolarValue entries")
                conv.append(v)
            values = tuple(conv)
        elif mode == "float":
            values = tuple(complex(v) for v in values)
            if any(v == 0 for v in values):
                raise ValueError("eigenvalues must be nonzero")
            if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in values):
                raise ValueError("eigenvalues must be finite")
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        self.values = values
        self.n = n
        self.s = s
        self.mode = mode
        self.tol = float(tol)
        if mode == "float":
            self._logmod = [math.log(abs(v)) for v in values]
            self._arg = [math.atan2(v.imag, v.real) for v in values]

    @property
    def r(self) -> int:
        return self.n - self.s

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def __repr__(self):
        return f"Spectrum({list(self.values)!r}, s={self.s}, mode={self.mode!r})"

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (self.values, self.s, self.mode, self.tol) == (
            other.values, other.s, other.mode, other.tol)

    def __hash__(self):
        return hash((self.values, self.s, self.mode))

    def complex_values(self) -> list[complex]:
        return [complex(v) for v in self.values]

    def to_float(self, tol: float | None = None) -> "Spectrum":
        return Spectrum(self.complex_values(), self.s, "float", self.tol if tol is None else tol)

    def min_modulus(self) -> float:
        return min(abs(complex(v)) if self.mode == "float" else float(v.modulus)
                   for v in self.values)

    # powers and distances -------------------------------------------------

    def power(self, k: Sequence[int]):
        """lambda~^k as a PolarValue (exact) or complex (float)."""
        if self.exact:
            out = PolarValue.one()
            for v, e in zip(self.values, k):
                if e:
                    out = out * v ** e
            return out
        logm = sum(e * lm for e, lm in zip(k, self._logmod))
        ang = sum(e * a for e, a in zip(k, self._arg))
        return complex(math.exp(logm) * math.cos(ang), math.exp(logm) * math.sin(ang)) \
            if logm < 700 else complex(math.inf, 0)

    def log_distance(self, k: Sequence[int], j: int) -> float:
        """log |lambda~^k - lambda~_j|; -inf for an exact resonance."""
        if self.exact:
            p = self.power(k)
            q = self.values[j]
            if p == q:
                return -math.inf
            dtheta = p.angle - q.angle
            dtheta -= math.floor(dtheta + Fraction(1, 2))
            with mpmath.workdps(_EXACT_DPS):
                r1 = mpmath.mpf(p.modulus.numerator) / p.modulus.denominator
                r2 = mpmath.mpf(q.modulus.numerator) / q.modulus.denominator
                diff = p.modulus - q.modulus
                d = mpmath.mpf(diff.numerator) / diff.denominator
                th = mpmath.mpf(dtheta.numerator) / dtheta.denominator
                sq = d * d + 4 * r1 * r2 * mpmath.sin(mpmath.pi * th) ** 2
                return float(mpmath.log(sq) / 2)
        logm = sum(e * lm for e, lm in zip(k, self._logmod))
        if logm > _LOG_HUGE:
            return logm
        ang = sum(e * a for e, a in zip(k, self._arg)) - self._arg[j]
        r1 = math.exp(logm)
        r2 = abs(self.values[j])
        sq = (r1 - r2) ** 2 + 4.0 * r1 * r2 * math.sin(ang / 2.0) ** 2
        if sq == 0.0:
            return -math.inf
        return 0.5 * math.log(sq)

    def distance(self, k, j) -> float:
        return math.exp(self.log_distance(k, j))

    def is_resonant(self, k, j) -> bool:
        if self.exact:
            return self.power(k) == self.values[j]
        return self.log_distance(k, j) <= math.log(self.tol)

    def is_near_resonant(self, k, j) -> bool:
        """Float only: distance inside the warning band (tol, 10 tol]."""
        if self.exact:
            return False
        ld = self.log_distance(k, j)
        return math.log(self.tol) < ld <= math.log(10 * self.tol)

    # level-s sets ---------------------------------------------------------

    def in_K1(self, k) -> bool:
        """x-part is a unit vector and |k| >= 2."""
        return sum(k[: self.s]) == 1 and sum(k) >= 2

    def K1_index(self, k) -> int | None:
        """The p with k in K1^p (0-based), or None."""
        if not self.in_K1(k):
            return None
        return next(i for i in range(self.s) if k[i])

    def in_K2(self, k) -> bool:
        """x-part vanishes and |k| >= 2."""
        return sum(k[: self.s]) == 0 and sum(k) >= 2

    def _trailing_power(self, k):
        kk = (0,) * self.s + tuple(k[self.s:])
        return kk

    def in_K1_tilde(self, k) -> bool:
        """x-part sums to 1 and mu^{k''} = 1."""
        if sum(k[: self.s]) != 1 or sum(k) < 2:
            return False
        kk = self._trailing_power(k)
        if self.exact:
            return self.power(kk) == PolarValue.one()
        return abs(self.power(kk) - 1) <= self.tol

    def in_K2_tilde(self, k) -> bool:
        """x-part vanishes and mu^{k''} = mu_j for some j."""
        if not self.in_K2(k):
            return False
        return any(self.is_resonant(k, j) for j in range(self.s, self.n))


@dataclass
class ResonanceReport:
    m: int
    n: int
    s: int
    resonances: list[list[tuple]]  # per coordinate j
    K1_tilde: list[tuple]
    K2_tilde: list[tuple]
    K1: list[tuple]
    K2: list[tuple]
    verdict: str
    witness: tuple | None = None  # (k, j) breaking level-s, 0-based j
    warnings: list[str] = field(default_factory=list)

    def K1_p(self, p: int) -> list[tuple]:
        return [k for k in self.K1 if k[p] == 1]

    def to_dict(self) -> dict:
        return {
            "degree_bound": self.m,
            "resonances": [
                {"coord": j + 1, "indices": [list(k) for k in ks]}
                for j, ks in enumerate(self.resonances)
            ],
            "K1_tilde": [list(k) for k in self.K1_tilde],
            "K2_tilde": [list(k) for k in self.K2_tilde],
            "verdict": self.verdict,
            "witness": None if self.witness is None else
            {"index": list(self.witness[0]), "coord": self.witness[1] + 1},
            "warnings": list(self.warnings),
        }


def enumerate_resonances(spec: Spectrum, m: int) -> ResonanceReport:
    """All resonances lambda~^k = lambda~_j with 2 <= |k| <= m, classified."""
    if m < 2:
        raise ValueError("degree bound must be at least 2")
    n, s = spec.n, spec.s
    res: list[list[tuple]] = [[] for _ in range(n)]
    K1t, K2t, K1, K2 = [], [], [], []
    warnings = []
    witness = None
    any_res = False
    for d in range(2, m + 1):
        for k in monomials(n, d):
            k = tuple(k)
            if spec.in_K1(k):
                K1.append(k)
            if spec.in_K2(k):
                K2.append(k)
            k1t = spec.in_K1_tilde(k)
            k2t = spec.in_K2_tilde(k)
            if k1t:
                K1t.append(k)
            if k2t:
                K2t.append(k)
            for j in range(n):
                if spec.is_resonant(k, j):
                    res[j].append(k)
                    any_res = True
                    # a resonance is level-s iff it comes from K1~ with j the
                    # x-coordinate carrying the unit, or from K2~ with j > s
                    ok = (k1t and j < s and k[j] == 1) or (k2t and j >= s)
                    if not ok and witness is None:
                        witness = (k, j)
                elif spec.is_near_resonant(k, j):
                    warnings.append(
                        f"near-resonance at index {_fmt(k)}, coordinate {j + 1}: "
                        f"|lambda^k - lambda_j| = {spec.distance(k, j):.3e}"
                    )
    if witness is not None:
        verdict = VIOLATES_LEVEL_S
    elif any_res:
        verdict = LEVEL_S_ONLY
    else:
        verdict = NO_RESONANCES
    return ResonanceReport(m, n, s, res, K1t, K2t, K1, K2, verdict, witness, warnings)


def _fmt(k) -> str:
    return "(" + ",".join(str(e) for e in k) + ")"


@dataclass
class OmegaTable:
    """omega_s(m) and omega~(m) for m = 2..m_max, stored as logs.

    ``log_partial`` is None when omega_s vanishes somewhere in range;
    ``partial_error`` then explains why.
    """

    m_max: int
    log_partial: list[float] | None
    log_reduced: list[float]
    partial_witness: list[tuple] | None
    reduced_witness: list[tuple]
    partial_error: str | None = None

    def _check(self, m):
        if not 2 <= m <= self.m_max:
            raise ValueError(f"m={m} outside table range 2..{self.m_max}")

    def log_omega(self, which: str, m: int) -> float:
        self._check(m)
        if which == "partial":
            if self.log_partial is None:
                raise ValueError(self.partial_error)
            return self.log_partial[m - 2]
        if which == "reduced":
            return self.log_reduced[m - 2]
        raise ValueError(f"unknown table {which!r}")

    def omega(self, which: str, m: int) -> float:
        return math.exp(self.log_omega(which, m))

    def partial(self, m: int) -> float:
        return self.omega("partial", m)

    def reduced(self, m: int) -> float:
        return self.omega("reduced", m)

    def witness(self, which: str, m: int) -> tuple:
        self._check(m)
        if which == "partial":
            if self.partial_witness is None:
                raise ValueError(self.partial_error)
            return self.partial_witness[m - 2]
        return self.reduced_witness[m - 2]

    def rows(self, which: str):
        """(m, omega, log omega, k, j) rows, j 0-based."""
        out = []
        for m in range(2, self.m_max + 1):
            lo = self.log_omega(which, m)
            k, j = self.witness(which, m)
            out.append((m, math.exp(lo), lo, k, j))
        return out


def omega_tables(spec: Spectrum, m_max: int) -> OmegaTable:
    """Running minima of |lambda~^k - lambda~_j| over 2 <= |k| <= m.

    omega_s restricts k to the first s coordinates and ranges over every j.
    omega~ ranges over all k and all j with (k, j) non-resonant.
    """
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    n, s = spec.n, spec.s
    best_p, wit_p = math.inf, None
    best_r, wit_r = math.inf, None
    lp, wp, lr, wr = [], [], [], []
    perr = None
    for d in range(2, m_max + 1):
        for k in monomials(n, d):
            k = tuple(k)
            x_only = not any(k[s:])
            for j in range(n):
                ld = spec.log_distance(k, j)
                resonant = spec.is_resonant(k, j)
                if x_only:
                    if resonant and perr is None:
                        perr = (f"omega_s vanishes: resonance at index {_fmt(k)}, "
                                f"coordinate {j + 1}, with k supported on the first s coordinates")
                    if ld < best_p:
                        best_p, wit_p = ld, (k, j)
                if not resonant and ld < best_r:
                    best_r, wit_r = ld, (k, j)
        lp.append(best_p)
        wp.append(wit_p)
        lr.append(best_r)
        wr.append(wit_r)
    if perr is not None:
        return OmegaTable(m_max, None, lr, None, wr, perr)
    return OmegaTable(m_max, lp, lr, wp, wr, None)


def parse_sequence(spec: str | Sequence[int], count: int) -> list[int]:
    """First ``count`` terms of a {p_nu} sequence.

    ``"pow2"`` gives 2^nu, ``"all"`` gives 1, 2, 3, ... and ``"list:1,3,7"``
    or a plain sequence of ints is taken literally.
    """
    if isinstance(spec, str):
        if spec == "pow2":
            return [2 ** v for v in range(count)]
        if spec == "all":
            return list(range(1, count + 1))
        if spec.startswith("list:"):
            seq = [int(t) for t in spec[5:].split(",") if t.strip()]
        else:
            raise ValueError(f"unknown sequence {spec!r} (use pow2, all, or list:a,b,...)")
    else:
        seq = [int(t) for t in spec]
    if len(seq) < count:
        raise ValueError(f"sequence has {len(seq)} terms, {count} needed")
    return seq[:count]


def _validate_sequence(seq):
    if not seq or seq[0] != 1:
        raise ValueError("sequence must start with p_0 = 1")
    if any(b <= a for a, b in zip(seq, seq[1:])):
        raise ValueError("sequence must be strictly increasing")


@dataclass
class BrjunoSumEstimate:
    which: str
    sequence: list[int]
    terms: list[float]
    partial_sums: list[float]
    verdict: str
    threshold: float
    tail: int

    def to_dict(self) -> dict:
        return {
            "which": self.which,
            "sequence": list(self.sequence),
            "terms": list(self.terms),
            "partial_sums": list(self.partial_sums),
            "verdict": self.verdict,
            "verdict_rule": (
                f"heuristic: diverging-at-horizon iff each of the last {self.tail} "
                f"terms is >= {self.threshold}; finite horizons cannot decide convergence"
            ),
        }


def brjuno_sum(
    table: OmegaTable,
    which: str = "reduced",
    sequence: str | Sequence[int] = "pow2",
    horizon: int = 10,
    threshold: float = 1.0,
) -> BrjunoSumEstimate:
    """Terms p_nu^{-1} log omega(p_{nu+1})^{-1} for nu = 0..horizon."""
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    seq = parse_sequence(sequence, horizon + 2)
    _validate_sequence(seq)
    if seq[horizon + 1] > table.m_max:
        raise ValueError(
            f"p_{horizon + 1} = {seq[horizon + 1]} exceeds the table range m_max = {table.m_max}"
        )
    terms, sums = [], []
    acc = 0.0
    for v in range(horizon + 1):
        t = -table.log_omega(which, seq[v + 1]) / seq[v]
        terms.append(t)
        acc += t
        sums.append(acc)
    tail = max(1, math.ceil(horizon / 3))
    diverging = all(t >= threshold for t in terms[-tail:])
    return BrjunoSumEstimate(
        which, seq[: horizon + 2], terms, sums,
        DIVERGING if diverging else PLAUSIBLY_FINITE, threshold, tail,
    )


@dataclass
class ReductionReport:
    holds: bool
    checked: list[int]  # the p_nu values with p_nu - shift >= 2
    violation: dict | None
    derived_sequence: list[int]
    precondition_ok: bool
    note: str = ""


def check_reduction_lemma(
    spec: Spectrum,
    shift: int,
    alpha: float,
    sequence: str | Sequence[int] = "pow2",
    horizon: int = 6,
    table: OmegaTable | None = None,
    report: ResonanceReport | None = None,
) -> ReductionReport:
    """Check omega~(p_nu - shift) >= omega_s(p_nu)^alpha along a sequence.

    Only p_nu with p_nu - shift >= 2 can be tested (omega~ starts at 2).  The
    derived sequence is q_j = p_{nu0 + j} - shift where nu0 is the first
    index with p_nu0 > shift.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if shift < 0:
        raise ValueError("shift must be non-negative")
    seq = parse_sequence(sequence, horizon + 1)
    _validate_sequence(seq)
    m_max = seq[-1]
    if table is None:
        table = omega_tables(spec, max(m_max, 2))
    if report is None:
        report = enumerate_resonances(spec, max(m_max, 2))
    pre_ok = report.verdict != VIOLATES_LEVEL_S
    if table.log_partial is None:
        return ReductionReport(False, [], None, [], pre_ok, table.partial_error)
    checked, violation = [], None
    for p in seq:
        if p - shift < 2 or p > table.m_max:
            continue
        checked.append(p)
        lhs = table.log_omega("reduced", p - shift)
        rhs = alpha * table.log_omega("partial", p)
        if lhs < rhs - 1e-12 and violation is None:
            violation = {
                "p": p,
                "omega_reduced": math.exp(lhs),
                "omega_partial_pow_alpha": math.exp(rhs),
            }
    nu0 = next((i for i, p in enumerate(seq) if p > shift), len(seq))
    derived = [p - shift for p in seq[nu0:]]
    note = "" if pre_ok else "spectrum has resonances outside the level-s structure"
    return ReductionReport(violation is None, checked, violation, derived, pre_ok, note)


def power_law_fit(table: OmegaTable, which: str = "reduced", m_min: int = 2):
    """Least-squares fit log omega(m) ~ log C - beta log m.  Returns (C, beta)."""
    ms = list(range(m_min, table.m_max + 1))
    if len(ms) < 2:
        raise ValueError("need at least two table rows for a fit")
    x = np.log(np.array(ms, dtype=float))
    y = np.array([table.log_omega(which, m) for m in ms])
    slope, intercept = np.polyfit(x, y, 1)
    return float(math.exp(intercept)), float(-slope)
