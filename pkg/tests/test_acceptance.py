"""The ten acceptance criteria, each at its stated tolerance.

Every test records a PASS/FAIL line that is repeated in the terminal summary.
"""

import cmath
import math
import random

import pytest

from germnf import Germ, Spectrum, load_germ
from germnf.linearizer import check_osculating_form, poincare_dulac, solve_linearization
from germnf.majorant import (
    alpha_closed_form,
    alpha_sequence,
    alpha_taylor,
    check_counting_bound,
    check_domination,
    delta_table,
    normalize_germ,
)
from germnf.series import monomials
from germnf.spectrum import (
    DIVERGING,
    NO_RESONANCES,
    PLAUSIBLY_FINITE,
    brjuno_sum,
    enumerate_resonances,
    omega_tables,
)

from conftest import (
    FIXTURES,
    random_gaussian_germ,
    random_level_s_spectrum,
    random_osculating_germ,
)
from oracles import GQ, brute_resonances, dense_linearization


def test_criterion_01_koenigs(acceptance):
    exact = load_germ(FIXTURES / "koenigs.json")
    assert exact.trunc == 10
    res = solve_linearization(exact)
    psi2 = res.psi[0].coeff((2,))
    fl = solve_linearization(load_germ(FIXTURES / "koenigs_float.json"))
    ok = psi2 == -4 and res.residual == 0 and fl.residual <= 1e-12
    acceptance(1, "Koenigs regression", ok,
               f"exact psi_2={psi2}, exact residual={res.residual}, float residual={fl.residual:.2e}"
               " vs 1e-12")
    assert psi2 == -4 and res.residual == 0
    assert fl.residual <= 1e-12


def _obstruction_check(f):
    res = solve_linearization(f)
    deg2 = [o for o in res.obstructions if sum(o.index) == 2]
    lam = f.eigenvalue(0)
    if f.exact:
        same = len(deg2) == 1 and deg2[0].coefficient == lam
    else:
        same = len(deg2) == 1 and abs(deg2[0].coefficient - lam) <= 1e-15
    located = same and deg2[0].index == (1, 1) and deg2[0].coord == 0
    return located, check_osculating_form(f).osculating


def test_criterion_02_obstruction(acceptance, obstructed_germ):
    exact_ok, exact_osc = _obstruction_check(obstructed_germ)
    g = (math.sqrt(5) - 1) / 2
    lam = cmath.exp(2j * math.pi * g)
    fl = Germ.from_terms(Spectrum([lam, 1.0], 1), 6, [(0, (1, 1), lam), (0, (2, 0), 1.0)])
    float_ok, float_osc = _obstruction_check(fl)
    ok = exact_ok and not exact_osc and float_ok and not float_osc
    acceptance(2, "obstruction regression", ok,
               "exact lambda=(3/2)e^{2 pi i/5} and float golden-angle lambda")
    assert ok


def test_criterion_03_single_resonance(acceptance):
    spec = load_germ(FIXTURES / "single_resonance.json").spectrum
    rep = enumerate_resonances(spec, 8)
    pairs = [(v.modulus, v.angle) for v in spec.values]
    got = sorted((k, j) for j, ks in enumerate(rep.resonances) for k in ks)
    brute = brute_resonances(pairs, 8)
    ok = rep.K1_tilde == [] and rep.K2_tilde == [(0, 1, 2, 0, 0)] and got == brute
    acceptance(3, "resonance-set regression", ok, f"brute force found {brute}")
    assert ok


def test_criterion_04_alpha(acceptance):
    seq = alpha_sequence(8)
    taylor = alpha_taylor(8)
    coeff_err = max(abs(float(c) - a) for c, a in zip(taylor, seq))
    points = [-0.3, -0.2, -0.1, -0.05, -0.01, 0.001, 0.01, 0.05, 0.1, 0.15]
    ident_err = max(abs((alpha_closed_form(t) - t) - alpha_closed_form(t) ** 2
                        / (1 - alpha_closed_form(t))) for t in points)
    ok = seq[:4] == [1, 1, 3, 11] and coeff_err <= 1e-12 and ident_err <= 1e-13
    acceptance(4, "alpha machinery", ok,
               f"alpha={seq}, Taylor error={coeff_err:.1e}, identity error={ident_err:.1e}")
    assert ok


def test_criterion_05_domination(acceptance):
    rng = random.Random(505)
    N, bad, worst = 6, 0, 0.0
    for i in range(100):
        spec = random_level_s_spectrum(rng, trailing_one=bool(i % 2))
        f, _ = normalize_germ(random_osculating_germ(rng, spec, N))
        res = solve_linearization(f)
        assert not res.obstructions
        rep = check_domination(res, delta_table(spec, N), slack=1e-9)
        bad += len(rep.violations)
        worst = max(worst, rep.max_ratio)
    acceptance(5, "majorant domination", bad == 0,
               f"100 germs, {bad} violations, worst ratio {worst:.3f}")
    assert bad == 0


def test_criterion_06_counting(acceptance):
    rng = random.Random(606)
    failing, factor_bad = [], 0
    for i in range(100):
        spec = random_level_s_spectrum(rng, trailing_one=bool(i % 2))
        N = rng.randint(2, 8)
        rep = check_counting_bound(delta_table(spec, N), ms=range(2, N + 1))
        if not rep.holds:
            failing.append((i, rep.violation))
        if not rep.factor_count_ok:
            factor_bad += 1
    ok = not failing and factor_bad == 0
    detail = f"{len(failing)}/100 spectra violate the bound, {factor_bad} exceed 2|k|-1 factors"
    if failing:
        detail += f"; first: spectrum {failing[0][0]} {failing[0][1]}"
    acceptance(6, "counting lemma", ok, detail)
    assert factor_bad == 0
    assert not failing


def _random_spectrum(rng):
    n = rng.choice([2, 3, 4])
    s = rng.randint(1, n - 1)
    vals = [cmath.rect(rng.uniform(0.3, 1.0), 2 * math.pi * rng.random()) for _ in range(n)]
    return vals, s


def test_criterion_07_omega_ordering(acceptance):
    rng = random.Random(707)
    order_bad, equal_bad, first = 0, 0, None
    for _ in range(200):
        vals, s = _random_spectrum(rng)
        tab = omega_tables(Spectrum(vals, s), 12)
        if any(r > p for r, p in zip(tab.log_reduced, tab.log_partial)):
            order_bad += 1
        ones = omega_tables(Spectrum(vals[:s] + [1.0] * (len(vals) - s), s), 12)
        if any(abs(r - p) > 1e-12 for r, p in zip(ones.log_reduced, ones.log_partial)):
            equal_bad += 1
            if first is None:
                m = next(m for m in range(2, 13)
                         if abs(ones.log_omega("reduced", m) - ones.log_omega("partial", m)) > 1e-12)
                first = (len(vals), s, m, ones.witness("reduced", m))
    ok = order_bad == 0 and equal_bad == 0
    acceptance(7, "omega ordering", ok,
               f"ordering violated on {order_bad}/200, trailing-one equality violated on "
               f"{equal_bad}/200" + (f"; first (n, s, m, witness) = {first}" if first else ""))
    assert order_bad == 0
    assert equal_bad == 0


def _random_float_nonresonant(rng, N):
    while True:
        n = rng.choice([1, 2, 3])
        vals = [cmath.rect(rng.uniform(0.3, 1.0), 2 * math.pi * rng.random()) for _ in range(n)]
        spec = Spectrum(vals, rng.randint(1, n))
        if enumerate_resonances(spec, N).verdict == NO_RESONANCES:
            break
    terms = [(j, k, complex(rng.uniform(-1, 1), rng.uniform(-1, 1)))
             for d in range(2, N + 1) for k in monomials(n, d) for j in range(n)
             if rng.random() < 0.4]
    return Germ.from_terms(spec, N, terms)


def test_criterion_08_no_resonance_completeness(acceptance):
    rng = random.Random(808)
    N, bad = 6, []
    germs = [random_gaussian_germ(rng, N, density=0.3)[0] for _ in range(25)]
    germs += [_random_float_nonresonant(rng, N) for _ in range(25)]
    for i, f in enumerate(germs):
        assert enumerate_resonances(f.spectrum, N).verdict == NO_RESONANCES
        res = solve_linearization(f)
        nf = poincare_dulac(f)
        if res.obstructions or not nf.is_linear:
            bad.append(i)
    acceptance(8, "no-resonance completeness", not bad,
               f"50 spectra (25 exact, 25 float), failures {bad}")
    assert not bad


def test_criterion_09_dense_oracle(acceptance):
    rng = random.Random(909)
    N, mismatches = 4, 0
    for _ in range(25):
        f, eigs, raw = random_gaussian_germ(rng, N)
        res = solve_linearization(f)
        dense = dense_linearization([GQ(*e) for e in eigs],
                                    [(j, k, GQ(*v)) for j, k, v in raw], 2, N)
        keys = {(k, j) for j in range(2) for k, _ in res.psi[j].items() if sum(k) >= 2}
        keys |= set(dense)
        for k, j in keys:
            mine = res.psi[j].coeff(k, f.zero()).to_gaussian()
            ref = dense.get((k, j), GQ(0))
            if mine != (ref.a, ref.b):
                mismatches += 1
    acceptance(9, "brute-force oracle equivalence", mismatches == 0,
               f"25 germs, n=2, N=4, {mismatches} coefficient mismatches")
    assert mismatches == 0


def test_criterion_10_brjuno_contrast(acceptance):
    verdicts = {}
    for name in ("golden_mean.json", "liouville.json"):
        spec = load_germ(FIXTURES / name).spectrum
        tab = omega_tables(spec, 2048)
        verdicts[name] = brjuno_sum(tab, "reduced", "pow2", horizon=10).verdict
    ok = verdicts["golden_mean.json"] == PLAUSIBLY_FINITE and verdicts["liouville.json"] == DIVERGING
    acceptance(10, "Brjuno-sum contrast", ok, f"{verdicts}")
    assert ok
