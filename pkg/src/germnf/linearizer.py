"""
Formal linearization and Poincare-Dulac normal forms.

The conjugacy f o psi = psi o Lambda with psi = id + psi_hat reads, at the
coefficient of w^k in coordinate j,

    (lambda~^k - lambda~_j) psi_{k,j} = [f_hat o psi]_{k,j},

and the right side at degree d only involves psi of degree < d.  The solver
sweeps degrees 2..N and, inside a degree, indices in graded-lex order.

Index policy (x = first s coordinates, y = the rest):

* x-coordinates: psi is forced to zero on K1 and K2.
* y-coordinates: psi is forced to zero on K2; on K1^p it is given by
  f_{k,j} / (lambda~^k - mu_j), the germ's own coefficient over the divisor.
* every other index is solved from the right side.

Where the policy and the equation disagree (a forced zero facing a nonzero
right side, or a K1 formula whose germ coefficient differs from the right
side) the outcome depends on the divisor.  A resonant divisor makes the
equation unsolvable, and the index becomes an obstruction.  A non-resonant
divisor is solved anyway and marked ``solved-off-policy``, which means the
germ is outside the osculating normal form the policy assumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .germ import Germ
from .series import SeriesVector, TruncatedSeries, compose, monomials, ord_x

__all__ = [
    "LinearizationResult",
    "NormalFormResult",
    "OsculatingReport",
    "solve_linearization",
    "poincare_dulac",
    "verify_conjugacy",
    "conjugacy_defect",
    "check_osculating_form",
    "k1_substitution_holds",
    "SOLVED",
    "FORCED_ZERO",
    "RESONANT_FORMULA",
    "RESONANT_ZERO",
    "OFF_POLICY",
]

SOLVED = "solved"
FORCED_ZERO = "forced-zero"
RESONANT_FORMULA = "resonant-formula"
RESONANT_ZERO = "resonant-zero"
OFF_POLICY = "solved-off-policy"


@dataclass(frozen=True)
class Obstruction:
    index: tuple
    coord: int  # 0-based
    coefficient: object

    def to_dict(self, fmt=str) -> dict:
        return {"index": list(self.index), "coord": self.coord + 1,
                "coefficient": fmt(self.coefficient)}


@dataclass
class LinearizationResult:
    psi: SeriesVector
    provenance: dict  # (k, j) -> tag, j 0-based
    obstructions: list[Obstruction]
    residual: float
    rhs: dict  # (k, j) -> assembled right-side coefficient (nonzero only)
    warnings: list[str] = field(default_factory=list)
    trunc: int = 0

    @property
    def obstructed(self) -> bool:
        return bool(self.obstructions)

    @property
    def off_policy(self) -> list:
        return [kj for kj, tag in self.provenance.items() if tag == OFF_POLICY]

    @property
    def status(self) -> str:
        return "obstructed" if self.obstructions else "linearized"


@dataclass
class NormalFormResult:
    g: SeriesVector  # full normal form, linear part included
    phi: SeriesVector
    resonant_support: list  # (k, j) of nonzero nonlinear g coefficients
    certificate: bool  # every such (k, j) is resonant
    residual: float
    warnings: list[str] = field(default_factory=list)
    trunc: int = 0

    @property
    def is_linear(self) -> bool:
        return not self.resonant_support


def _require_diagonal(f: Germ):
    if any(f.epsilon):
        raise ValueError(
            "the solver needs a diagonal linear part; epsilon entries are only "
            "accepted by the osculating-form check"
        )


class _Divisors:
    """Cached divisors lambda~^k - lambda~_j and resonance flags."""

    def __init__(self, f: Germ):
        self.f = f
        self.spec = f.spectrum
        self.eig = [f.eigenvalue(j) for j in range(f.n)]
        self._pow = {}

    def power(self, k):
        p = self._pow.get(k)
        if p is None:
            p = self._pow[k] = self.f.power(k)
        return p

    def divisor(self, k, j):
        return self.power(k) - self.eig[j]

    def resonant(self, k, j) -> bool:
        return self.spec.is_resonant(k, j)


def _is_nonzero(value, scale: float, f: Germ) -> bool:
    if f.exact:
        return bool(value)
    return abs(value) > f.spectrum.tol * max(1.0, scale)


def _slice_scale(slice_vals) -> float:
    return max((abs(v) for v in slice_vals), default=0.0)


def _rhs_slice(f: Germ, psi_comps: list[dict], d: int) -> list[dict]:
    """Degree-d part of f_hat o psi_{<d}, as one dict per coordinate."""
    n = f.n
    inner = SeriesVector([TruncatedSeries._raw(n, d, c) for c in psi_comps])
    outer = f.exact_tail.truncated(d)
    comp = compose(outer, inner)
    return [c.degree_slice(d) for c in comp]


def _identity_dicts(f: Germ) -> list[dict]:
    one = f.one()
    out = []
    for i in range(f.n):
        e = [0] * f.n
        e[i] = 1
        out.append({tuple(e): one})
    return out


def solve_linearization(f: Germ) -> LinearizationResult:
    """Solve the homological equation degree by degree under the index policy."""
    _require_diagonal(f)
    n, s, N = f.n, f.s, f.trunc
    spec = f.spectrum
    div = _Divisors(f)
    tail = f.exact_tail
    psi = _identity_dicts(f)
    provenance, rhs_log, obstructions, warnings = {}, {}, [], []
    for d in range(2, N + 1):
        rhs = _rhs_slice(f, psi, d)
        scale = _slice_scale(v for r in rhs for v in r.values())
        for k in monomials(n, d):
            k = tuple(k)
            in_k1 = spec.in_K1(k)
            in_k2 = spec.in_K2(k)
            for j in range(n):
                R = rhs[j].get(k)
                nonzero = R is not None and _is_nonzero(R, scale, f)
                if nonzero:
                    rhs_log[(k, j)] = R
                resonant = div.resonant(k, j)
                if not resonant and spec.is_near_resonant(k, j):
                    warnings.append(
                        f"near-resonant divisor at index {_fmt(k)}, coordinate {j + 1}: "
                        f"|lambda^k - lambda_j| = {spec.distance(k, j):.3e}"
                    )
                forced = in_k2 or (j < s and in_k1)
                if forced:
                    if not nonzero:
                        provenance[(k, j)] = FORCED_ZERO
                    elif resonant:
                        provenance[(k, j)] = FORCED_ZERO
                        obstructions.append(Obstruction(k, j, R))
                    else:
                        psi[j][k] = R / div.divisor(k, j)
                        provenance[(k, j)] = OFF_POLICY
                    continue
                if in_k1 and j >= s:
                    fk = tail[j].coeff(k)
                    if resonant:
                        provenance[(k, j)] = RESONANT_ZERO
                        if nonzero:
                            obstructions.append(Obstruction(k, j, R))
                        continue
                    target = fk if fk else f.zero()
                    agrees = not _is_nonzero((R if R is not None else f.zero()) - target, scale, f)
                    if agrees:
                        if fk:
                            psi[j][k] = fk / div.divisor(k, j)
                        provenance[(k, j)] = RESONANT_FORMULA
                    else:
                        if nonzero:
                            psi[j][k] = R / div.divisor(k, j)
                        provenance[(k, j)] = OFF_POLICY
                    continue
                if resonant:
                    provenance[(k, j)] = RESONANT_ZERO
                    if nonzero:
                        obstructions.append(Obstruction(k, j, R))
                    continue
                if nonzero:
                    psi[j][k] = R / div.divisor(k, j)
                provenance[(k, j)] = SOLVED
    psi_vec = SeriesVector([TruncatedSeries(n, N, c) for c in psi])
    residual = verify_conjugacy(f, psi_vec)
    return LinearizationResult(psi_vec, provenance, obstructions, residual, rhs_log, warnings, N)


def poincare_dulac(f: Germ) -> NormalFormResult:
    """Eliminate every non-resonant monomial; resonant ones move into g.

    Solves f o phi = phi o g with phi tangent to the identity and
    g = Lambda + g_hat.  At degree d, with R the degree-d part of
    f_hat o phi - phi_hat_{<d} o g_{<d}, a resonant (k, j) gets g = R and
    phi = 0, and any other gets phi = R / (lambda~^k - lambda~_j).
    """
    _require_diagonal(f)
    n, N = f.n, f.trunc
    spec = f.spectrum
    div = _Divisors(f)
    phi = _identity_dicts(f)
    g_hat = [dict() for _ in range(n)]
    lam = f.linear_part()
    support, warnings = [], []
    cert = True
    for d in range(2, N + 1):
        rhs = _rhs_slice(f, phi, d)
        phi_hat = SeriesVector([
            TruncatedSeries._raw(n, d, {k: v for k, v in c.items() if sum(k) >= 2}) for c in phi
        ])
        g_low = lam.truncated(d) + SeriesVector([TruncatedSeries._raw(n, d, c) for c in g_hat])
        back = compose(phi_hat, g_low)
        R_all = []
        for j in range(n):
            r = dict(rhs[j])
            for k, v in back[j].degree_slice(d).items():
                r[k] = r[k] - v if k in r else -v
            R_all.append(r)
        scale = _slice_scale(v for r in R_all for v in r.values())
        for k in monomials(n, d):
            k = tuple(k)
            for j in range(n):
                R = R_all[j].get(k)
                nonzero = R is not None and _is_nonzero(R, scale, f)
                if div.resonant(k, j):
                    if nonzero:
                        g_hat[j][k] = R
                        support.append((k, j))
                    continue
                if spec.is_near_resonant(k, j):
                    warnings.append(
                        f"near-resonant divisor at index {_fmt(k)}, coordinate {j + 1}: "
                        f"|lambda^k - lambda_j| = {spec.distance(k, j):.3e}"
                    )
                if nonzero:
                    phi[j][k] = R / div.divisor(k, j)
    for k, j in support:
        cert = cert and spec.is_resonant(k, j)
    g = lam + SeriesVector([TruncatedSeries(n, N, c) for c in g_hat])
    phi_vec = SeriesVector([TruncatedSeries(n, N, c) for c in phi])
    residual = _max_abs(
        compose(f.full_map(), phi_vec) - compose(phi_vec, g)
    )
    return NormalFormResult(g, phi_vec, support, cert, residual, warnings, N)


def _max_abs(vec: SeriesVector) -> float:
    return max((abs(v) for c in vec for _, v in c.items()), default=0.0)


def conjugacy_defect(f: Germ, psi: SeriesVector) -> SeriesVector:
    """f o psi - psi o Lambda through the truncation degree."""
    if len(psi) != f.n or psi.n != f.n:
        raise ValueError("psi must have n components in n variables")
    if psi.trunc != f.trunc:
        raise ValueError(f"psi truncation {psi.trunc} differs from germ truncation {f.trunc}")
    one = f.one()
    for i, c in enumerate(psi):
        for k, v in c.items():
            if sum(k) == 1 and (k[i] != 1 or v != one):
                raise ValueError("psi must be tangent to the identity")
            if sum(k) == 0:
                raise ValueError("psi must fix the origin")
    if f.exact:
        psi = SeriesVector([c.map(lambda k, v: f.scalar(v)) for c in psi])
    div = _Divisors(f)
    lhs = compose(f.full_map(), psi)
    rhs = SeriesVector([c.map(lambda k, v: v * div.power(k)) for c in psi])
    return lhs - rhs


def verify_conjugacy(f: Germ, psi: SeriesVector) -> float:
    """Largest coefficient modulus of f o psi - psi o Lambda."""
    return _max_abs(conjugacy_defect(f, psi))


@dataclass
class OsculatingReport:
    invariant: bool
    osculating: bool
    restriction_linear: bool
    x_orders: list  # ord_x of f^1_i, i <= s
    y_orders: list  # ord_x of f^2_j
    trunc: int

    def to_dict(self) -> dict:
        enc = lambda o: "infinite-at-truncation" if o == math.inf else int(o)
        return {
            "invariant": self.invariant,
            "osculating": self.osculating,
            "restriction-linear": self.restriction_linear,
            "ord_x_x_block": [enc(o) for o in self.x_orders],
            "ord_x_y_block": [enc(o) for o in self.y_orders],
            "up_to_degree": self.trunc,
        }


def check_osculating_form(f: Germ) -> OsculatingReport:
    """Read the adapted-coordinate conditions off the truncated tail.

    Epsilon entry i adds z_{i+1} to component i.  Couplings inside a block
    are linear and leave the order conditions alone; the coupling of y_1
    into x_s (entry s - 1) has ord_x 0 and breaks invariance of {x = 0}.
    """
    n, s, N = f.n, f.s, f.trunc
    comps = [f.tail[i] for i in range(n)]
    if s < n and f.epsilon[s - 1]:
        e = [0] * n
        e[s] = 1
        comps[s - 1] = comps[s - 1] + TruncatedSeries(n, N, {tuple(e): 1})
    xo = [ord_x(comps[i], s) for i in range(s)]
    yo = [ord_x(comps[j], s) for j in range(s, n)]
    return OsculatingReport(
        invariant=all(o >= 1 for o in xo),
        osculating=all(o >= 2 for o in xo),
        restriction_linear=all(o >= 1 for o in yo),
        x_orders=xo,
        y_orders=yo,
        trunc=N,
    )


def k1_substitution_holds(psi: SeriesVector, l, s: int) -> bool:
    """Check psi(w)^l = w^l + (terms of ord_u >= 2) for l in K1."""
    n = psi.n
    trunc = psi.trunc
    acc = TruncatedSeries(n, trunc, {(0,) * n: 1}, allow_constant=True)
    for i, e in enumerate(l):
        comp = TruncatedSeries(n, trunc, dict(psi[i].items()), allow_constant=True)
        for _ in range(e):
            acc = acc * comp
    for k, v in acc.items():
        if tuple(k) == tuple(l):
            if v != 1 and not (isinstance(v, complex) and abs(v - 1) < 1e-12):
                return False
            continue
        if sum(k[:s]) < 2:
            return False
    return True


def _fmt(k) -> str:
    return "(" + ",".join(str(e) for e in k) + ")"
