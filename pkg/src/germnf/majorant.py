"""
Majorant machinery for the linearization series.

The coefficients psi_k of the formal linearization are bounded by
alpha_{|k|} * delta_k, where alpha comes from a scalar functional equation
and delta_k collects the small divisors met along the recursion.  This module
computes both sequences, records how each delta_k factors into divisors, and
checks the counting bounds and growth bounds that control those factors.

All delta and epsilon values are kept as natural logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import mpmath

from .germ import Germ
from .linearizer import LinearizationResult
from .series import SeriesVector, coeff_norm, grlex_key, monomials
from .spectrum import OmegaTable, Spectrum, omega_tables, parse_sequence

__all__ = [
    "normalize_germ",
    "DivisorDatum",
    "epsilon_of",
    "ThetaReport",
    "theta_of",
    "alpha_sequence",
    "alpha_closed_form",
    "alpha_taylor",
    "ALPHA_RADIUS",
    "DeltaEntry",
    "DeltaTable",
    "delta_table",
    "count_small_divisors",
    "CountingReport",
    "check_counting_bound",
    "GrowthReport",
    "growth_diagnostic",
    "DominationReport",
    "check_domination",
    "BrjunoGrowthReport",
    "brjuno_growth_bound",
]

#: radius of convergence of the alpha series
ALPHA_RADIUS = 3 - 2 * math.sqrt(2)

# log-scale comparisons treat values closer than this as ties
_TIE = 1e-12

# default size limit for delta tables
DELTA_CAP = 12


# normalization ------------------------------------------------------------

def _rational_ceiling(x: float) -> Fraction:
    q = Fraction(x).limit_denominator(1000)
    if q < x:
        q = Fraction(math.ceil(x * 1000 * (1 + 1e-12)), 1000)
    return q


def normalize_germ(f: Germ):
    """Rescale so every nonlinear coefficient has norm at most 1.

    With P = max ||f_l||^{1/|l|} and Q = max(1, P^2) the rescaled germ is
    g(z) = Q f(z / Q), i.e. g_l = f_l Q^{1 - |l|}.  Its linearization is
    psi_g(w) = Q psi_f(w / Q), so (psi_g)_k = (psi_f)_k Q^{1 - |k|}.
    In exact mode Q is a rational no smaller than P^2.
    """
    tail = f.tail
    P = 0.0
    for k in tail.support():
        nk = coeff_norm(tail.coeff(k))
        if nk:
            P = max(P, nk ** (1.0 / sum(k)))
    P2 = P * P
    if P2 <= 1:
        return f, (Fraction(1) if f.exact else 1.0)
    Q = _rational_ceiling(P2) if f.exact else P2
    comps = [c.map(lambda k, v: v * Q ** (1 - sum(k))) for c in tail]
    return f.with_tail(SeriesVector(comps)), Q


# divisors -----------------------------------------------------------------

@dataclass(frozen=True)
class DivisorDatum:
    k: tuple
    log_epsilon: float
    index: int  # i_k, 0-based

    @property
    def epsilon(self) -> float:
        return math.exp(self.log_epsilon)


def epsilon_of(spec: Spectrum, k) -> DivisorDatum:
    """epsilon_k and the coordinate i_k attaining it (smallest index on ties).

    For k in K1 the minimum runs over the y-coordinates only.
    """
    k = tuple(k)
    if sum(k) < 2:
        raise ValueError("epsilon_k is defined for |k| >= 2")
    if spec.in_K2(k):
        raise ValueError(f"epsilon_k is undefined for k = {k} in K2")
    coords = range(spec.s, spec.n) if spec.in_K1(k) else range(spec.n)
    best, arg = math.inf, None
    for i in coords:
        ld = spec.log_distance(k, i)
        if arg is None or ld < best - _TIE:
            best, arg = ld, i
    return DivisorDatum(k, best, arg)


@dataclass
class ThetaReport:
    theta: float
    min_modulus: float
    advisory: str

    @property
    def log_theta(self) -> float:
        return math.log(self.theta)


def theta_of(spec: Spectrum) -> ThetaReport:
    """theta = min |lambda~_h| / 4, with an advisory when that minimum exceeds 1."""
    mm = spec.min_modulus()
    adv = ""
    if mm > 1:
        adv = ("min |lambda_h| > 1: the estimates assume min |lambda_h| <= 1, "
               "which holds for the inverse germ; it is not inverted here")
    return ThetaReport(mm / 4, mm, adv)


# alpha --------------------------------------------------------------------

def alpha_sequence(J: int) -> list[int]:
    """alpha_1..alpha_J: alpha_1 = 1 and alpha_j sums products over ordered
    compositions of j into at least two parts."""
    if J < 1:
        raise ValueError("J must be at least 1")
    a = [0] * (J + 1)
    a[1] = 1
    # pw[v][j] = coefficient of t^j in (sum alpha_i t^i)^v
    pw = [[0] * (J + 1) for _ in range(J + 1)]
    pw[1][1] = 1
    for j in range(2, J + 1):
        # powers v >= 2 at degree j only need alpha_i with i <= j - 1
        for v in range(2, j + 1):
            pw[v][j] = sum(pw[v - 1][i] * a[j - i] for i in range(v - 1, j))
        a[j] = sum(pw[v][j] for v in range(2, j + 1))
        pw[1][j] = a[j]
    return a[1:]


def alpha_closed_form(t):
    """The solution of alpha - t = alpha^2 / (1 - alpha) vanishing at t = 0.

    Evaluated as 2t / ((1 + t) + sqrt(1 - 6t + t^2)), which equals
    (t + 1)/4 * (1 - sqrt(1 - 8t/(1 + t)^2)) on the domain and has no
    cancellation near t = 0.  Real t must satisfy t <= 3 - 2 sqrt 2; complex
    t must satisfy |t| < 3 - 2 sqrt 2.
    """
    if isinstance(t, (int, float, Fraction)) or (isinstance(t, mpmath.mpf)):
        if t > ALPHA_RADIUS + 1e-15:
            raise ValueError(f"alpha is defined for real t <= 3 - 2 sqrt 2, got {t}")
        if isinstance(t, mpmath.mpf):
            return 2 * t / ((1 + t) + mpmath.sqrt(max(1 - 6 * t + t * t, 0)))
        t = float(t)
        return 2 * t / ((1 + t) + math.sqrt(max(1 - 6 * t + t * t, 0.0)))
    if isinstance(t, (complex, mpmath.mpc)):
        if abs(t) >= ALPHA_RADIUS:
            raise ValueError(f"alpha needs |t| < 3 - 2 sqrt 2 for complex t, got |t| = {abs(t)}")
        if isinstance(t, mpmath.mpc):
            return 2 * t / ((1 + t) + mpmath.sqrt(1 - 6 * t + t * t))
        import cmath
        return 2 * t / ((1 + t) + cmath.sqrt(1 - 6 * t + t * t))
    raise TypeError(f"unsupported argument type {type(t).__name__}")


def alpha_taylor(J: int, dps: int = 50) -> list:
    """Taylor coefficients 1..J of the closed form, by mpmath differentiation."""
    with mpmath.workdps(dps):
        coeffs = mpmath.taylor(lambda t: alpha_closed_form(mpmath.mpf(t) if not isinstance(
            t, (mpmath.mpf, mpmath.mpc)) else t), 0, J)
        return [c for c in coeffs[1:]]


# delta table --------------------------------------------------------------

@dataclass
class DeltaEntry:
    k: tuple
    log_delta: float
    parts: list  # maximizing decomposition (empty for K1 entries)
    factors: list  # l_0 = k, l_1, ..., l_q


@dataclass
class DeltaTable:
    spec: Spectrum
    N: int
    entries: dict  # k -> DeltaEntry, K2 indices absent
    divisors: dict  # k -> DivisorDatum

    def log_delta(self, k) -> float:
        """log delta_k; 0 for |k| = 1 and -inf for K2."""
        k = tuple(k)
        if sum(k) == 1:
            return 0.0
        e = self.entries.get(k)
        return -math.inf if e is None else e.log_delta

    def __iter__(self):
        return iter(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def factor_data(self, k) -> list[DivisorDatum]:
        return [self.divisors[l] for l in self.entries[tuple(k)].factors]


def _sub_indices(k):
    """Nonzero proper sub-indices a <= k in graded-lex order."""
    full = tuple(k)
    out = [a for a in product(*(range(e + 1) for e in k)) if any(a) and a != full]
    out.sort(key=grlex_key)
    return out


def _delta_size(n: int, N: int) -> int:
    return sum(math.comb(d + n - 1, n - 1) for d in range(2, N + 1))


def delta_table(spec: Spectrum, N: int, cap: int | None = DELTA_CAP) -> DeltaTable:
    """delta_k for 2 <= |k| <= N with recorded maximizing decompositions.

    The maximum over decompositions into at least two parts is computed from
    B(c), the best product over decompositions of c into at least one part:
    B(c) = max(delta_c, max_a delta_a B(c - a)).  Candidates are scanned in
    graded-lex order and only a strictly larger value replaces the current
    best, so ties go to the graded-lex smallest first part.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    n = spec.n
    if cap is not None and n <= 3 and N > cap:
        raise ValueError(
            f"delta table for n={n}, N={N} has {_delta_size(n, N)} entries and "
            f"needs roughly {_delta_size(n, N) * 600 // 1024} KiB plus sub-index scans; "
            f"the default cap is N <= {cap} (pass cap=None to override)"
        )
    entries, divisors = {}, {}
    best_many: dict = {}  # B(c) for |c| >= 1: (log value, first part or None)

    def logd(a):
        if sum(a) == 1:
            return 0.0
        e = entries.get(a)
        return -math.inf if e is None else e.log_delta

    for i in range(n):
        e = [0] * n
        e[i] = 1
        best_many[tuple(e)] = (0.0, None)

    def parts_of(c):
        out = []
        while True:
            val, first = best_many[c]
            if first is None:
                out.append(c)
                return out
            out.append(first)
            c = tuple(x - y for x, y in zip(c, first))

    for d in range(2, N + 1):
        for k in monomials(n, d):
            k = tuple(k)
            subs = _sub_indices(k)
            # best split into >= 2 parts
            best, first = -math.inf, None
            for a in subs:
                la = logd(a)
                if la == -math.inf:
                    continue
                rest = tuple(x - y for x, y in zip(k, a))
                lr = best_many[rest][0]
                if lr == -math.inf:
                    continue
                if first is None or la + lr > best + _TIE:
                    best, first = la + lr, a
            if spec.in_K2(k):
                # delta_k = 0, but k may still be a sum of admissible parts
                best_many[k] = (best, first) if first is not None else (-math.inf, None)
                continue
            dd = epsilon_of(spec, k)
            divisors[k] = dd
            if spec.in_K1(k):
                entry = DeltaEntry(k, -dd.log_epsilon, [], [k])
            else:
                rest = tuple(x - y for x, y in zip(k, first))
                parts = [first] + parts_of(rest)
                factors = []
                for p in parts:
                    if sum(p) >= 2:
                        factors.extend(entries[p].factors)
                factors.sort(key=lambda l: -sum(l))
                entry = DeltaEntry(k, -dd.log_epsilon + best, parts, [k] + factors)
            entries[k] = entry
            own = entry.log_delta
            if first is not None and best >= own - _TIE:
                best_many[k] = (best, first)
            else:
                best_many[k] = (own, None)
    return DeltaTable(spec, N, entries, divisors)


# counting -----------------------------------------------------------------

def count_small_divisors(table: DeltaTable, m: int, j: int, theta: float,
                         omega: OmegaTable) -> dict:
    """N^j_m(k) for every table entry: factors l with eps_l < theta omega~(m)
    and i_l = j (j 0-based)."""
    if m < 2:
        raise ValueError("m must be at least 2")
    if not 0 <= j < table.spec.n:
        raise ValueError(f"coordinate {j + 1} outside 1..{table.spec.n}")
    cut = math.log(theta) + omega.log_omega("reduced", m)
    out = {}
    for e in table:
        c = 0
        for l in e.factors:
            dd = table.divisors[l]
            if dd.index == j and dd.log_epsilon < cut:
                c += 1
        out[e.k] = c
    return out


@dataclass
class CountingReport:
    holds: bool
    checked: int
    violation: dict | None
    factor_count_ok: bool
    factor_violation: dict | None
    shape_ok: bool
    shape_violation: dict | None
    separation_ok: bool
    separation_violation: dict | None

    @property
    def all_ok(self) -> bool:
        return self.holds and self.factor_count_ok and self.shape_ok and self.separation_ok

    def to_dict(self) -> dict:
        return {
            "counting_bound": "pass" if self.holds else "fail",
            "entries_checked": self.checked,
            "first_violation": self.violation,
            "factor_count_bound": "pass" if self.factor_count_ok else "fail",
            "factor_count_violation": self.factor_violation,
            "decomposition_shape": "pass" if self.shape_ok else "fail",
            "shape_violation": self.shape_violation,
            "separation": "pass" if self.separation_ok else "fail",
            "separation_violation": self.separation_violation,
        }


def _counting_limit(k_deg: int, m: int) -> float:
    return 0.0 if k_deg <= m else 2.0 * k_deg / m - 1.0


def check_counting_bound(table: DeltaTable, ms=None, theta: ThetaReport | None = None,
                         omega: OmegaTable | None = None) -> CountingReport:
    """Check the small-divisor counting bound and the factor-list invariants.

    * N^j_m(k) <= 0 for |k| <= m and <= 2|k|/m - 1 otherwise.
    * at most 2|k| - 1 factors per delta_k.
    * factor lists have strictly smaller tail degrees than |k|, non-increasing,
      all >= 2 and none in K2.
    * small divisors l, l' with the same index, l' <= l componentwise and
      l - l' outside K2 satisfy |l| - |l'| >= m.
    """
    spec = table.spec
    N = table.N
    if ms is None:
        ms = range(2, N + 1)
    ms = list(ms)
    if theta is None:
        theta = theta_of(spec)
    if omega is None:
        omega = omega_tables(spec, max(max(ms, default=2), 2))
    viol = fviol = sviol = pviol = None
    checked = 0
    for e in table:
        k, deg = e.k, sum(e.k)
        if len(e.factors) > 2 * deg - 1 and fviol is None:
            fviol = {"k": list(k), "factors": len(e.factors), "limit": 2 * deg - 1}
        tail = [sum(l) for l in e.factors[1:]]
        bad_shape = (
            e.factors[0] != k
            or any(t >= deg for t in tail)
            or any(a < b for a, b in zip(tail, tail[1:]))
            or any(t < 2 for t in tail)
            or any(spec.in_K2(l) for l in e.factors)
        )
        if bad_shape and sviol is None:
            sviol = {"k": list(k), "factors": [list(l) for l in e.factors]}
    for m in ms:
        cut = theta.log_theta + omega.log_omega("reduced", m)
        for j in range(spec.n):
            counts = count_small_divisors(table, m, j, theta.theta, omega)
            for k, c in counts.items():
                checked += 1
                lim = _counting_limit(sum(k), m)
                if c > lim + 1e-12 and viol is None:
                    viol = {"k": list(k), "m": m, "coord": j + 1, "count": c, "limit": lim}
        if pviol is None:
            pviol = _separation_scan(table, m, cut)
    return CountingReport(viol is None, checked, viol, fviol is None, fviol,
                          sviol is None, sviol, pviol is None, pviol)


def _separation_scan(table: DeltaTable, m: int, cut: float):
    spec = table.spec
    for e in table:
        small = [l for l in e.factors if table.divisors[l].log_epsilon < cut]
        for a_i, a in enumerate(small):
            for b in small[a_i + 1:]:
                if table.divisors[a].index != table.divisors[b].index:
                    continue
                if not all(x >= y for x, y in zip(a, b)) or a == b:
                    continue
                diff = tuple(x - y for x, y in zip(a, b))
                if spec.in_K2(diff):
                    continue
                if sum(a) - sum(b) < m:
                    return {"k": list(e.k), "m": m, "l": list(a), "l_prime": list(b)}
    return None


# growth -------------------------------------------------------------------

@dataclass
class GrowthReport:
    sup: float | None
    argsup: tuple | None
    profile: dict  # degree -> max (1/|k|) log ||psi_k||
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "sup_log_growth": self.sup,
            "attained_at": None if self.argsup is None else list(self.argsup),
            "per_degree": {str(d): v for d, v in sorted(self.profile.items())},
            "message": self.message,
        }


def growth_diagnostic(result: LinearizationResult) -> GrowthReport:
    """max over 2 <= |k| <= N of (1/|k|) log ||psi_k||, plus per-degree maxima."""
    psi = result.psi
    profile, best, arg = {}, None, None
    for k in psi.support():
        d = sum(k)
        if d < 2:
            continue
        nk = coeff_norm(psi.coeff(k))
        if nk == 0:
            continue
        v = math.log(nk) / d
        if d not in profile or v > profile[d]:
            profile[d] = v
        if best is None or v > best:
            best, arg = v, tuple(k)
    if best is None:
        return GrowthReport(None, None, {}, "no nonlinear coefficients")
    return GrowthReport(best, arg, profile)


@dataclass
class DominationReport:
    holds: bool
    checked: int
    violations: list  # dicts, worst first
    max_ratio: float


def check_domination(result: LinearizationResult, table: DeltaTable,
                     alpha: list | None = None, slack: float = 1e-9) -> DominationReport:
    """Compare ||psi_k|| with alpha_{|k|} delta_k for every 2 <= |k| <= N.

    The comparison is made in log scale with a relative slack.
    """
    N = min(result.trunc, table.N)
    if alpha is None:
        alpha = alpha_sequence(N)
    viol, checked, worst = [], 0, -math.inf
    for k in result.psi.support():
        d = sum(k)
        if d < 2 or d > N:
            continue
        nk = coeff_norm(result.psi.coeff(k))
        if nk == 0:
            continue
        checked += 1
        bound = math.log(alpha[d - 1]) + table.log_delta(k)
        lhs = math.log(nk)
        worst = max(worst, lhs - bound)
        if lhs > bound + math.log1p(slack):
            viol.append({"k": list(k), "norm": nk, "log_bound": bound})
    viol.sort(key=lambda v: -(math.log(v["norm"]) - v["log_bound"]))
    return DominationReport(not viol, checked, viol, math.exp(worst) if checked else 0.0)


@dataclass
class BrjunoGrowthReport:
    bound: float
    sup_log_delta: float
    holds: bool
    argsup: tuple | None
    sequence: list
    terms: list

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "sup_log_delta_over_degree": self.sup_log_delta,
            "attained_at": None if self.argsup is None else list(self.argsup),
            "holds": self.holds,
            "sequence": list(self.sequence),
            "terms": list(self.terms),
        }


def brjuno_growth_bound(table: DeltaTable, omega: OmegaTable, sequence="pow2",
                        theta: ThetaReport | None = None, horizon: int | None = None
                        ) -> BrjunoGrowthReport:
    """2n sum_nu q_nu^{-1} log(theta^{-1} omega~(q_{nu+1})^{-1}) at the horizon,
    compared with every tabulated (1/|k|) log delta_k.

    By default the horizon is the largest nu with q_{nu+1} within the omega
    table.
    """
    spec = table.spec
    if theta is None:
        theta = theta_of(spec)
    if horizon is None:
        seq = parse_sequence(sequence, 64) if not isinstance(sequence, str) or sequence != "pow2" \
            else [2 ** v for v in range(64)]
        horizon = max(v for v in range(len(seq) - 1) if seq[v + 1] <= omega.m_max)
    seq = parse_sequence(sequence, horizon + 2)
    if seq[0] != 1 or any(b <= a for a, b in zip(seq, seq[1:])):
        raise ValueError("sequence must be strictly increasing with q_0 = 1")
    if seq[horizon + 1] > omega.m_max:
        raise ValueError(
            f"q_{horizon + 1} = {seq[horizon + 1]} exceeds the omega table range {omega.m_max}")
    terms = [(-theta.log_theta - omega.log_omega("reduced", seq[v + 1])) / seq[v]
             for v in range(horizon + 1)]
    bound = 2 * spec.n * sum(terms)
    sup, arg = -math.inf, None
    for e in table:
        v = e.log_delta / sum(e.k)
        if v > sup:
            sup, arg = v, e.k
    return BrjunoGrowthReport(bound, sup, sup <= bound + 1e-12, arg, seq[: horizon + 2], terms)
