import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from germnf import load_germ
from germnf.spectrum import (
    DIVERGING,
    LEVEL_S_ONLY,
    NO_RESONANCES,
    PLAUSIBLY_FINITE,
    VIOLATES_LEVEL_S,
    Spectrum,
    brjuno_sum,
    check_reduction_lemma,
    enumerate_resonances,
    omega_tables,
    parse_sequence,
    power_law_fit,
)

from conftest import FIXTURES, exact_spectrum, polar
from oracles import brute_resonances


def test_single_resonance_example():
    spec = load_germ(FIXTURES / "single_resonance.json").spectrum
    rep = enumerate_resonances(spec, 8)
    assert rep.K1_tilde == []
    assert rep.K2_tilde == [(0, 1, 2, 0, 0)]
    assert rep.verdict == LEVEL_S_ONLY


def test_no_resonances_example():
    rep = enumerate_resonances(exact_spectrum([("1/2", 0), ("1/3", 0)], 2), 6)
    assert all(r == [] for r in rep.resonances)
    assert rep.verdict == NO_RESONANCES


def test_trailing_one_resonances():
    spec = exact_spectrum([("3/2", "1/5"), (1, 0)], 1)
    rep = enumerate_resonances(spec, 3)
    assert {(1, 1), (1, 2)} <= set(rep.resonances[0])
    assert {(0, 2), (0, 3)} <= set(rep.resonances[1])
    assert rep.verdict == LEVEL_S_ONLY


def test_violation_witness():
    # lambda_1 = lambda_2^2 with both in the x block
    spec = exact_spectrum([("1/4", 0), ("1/2", 0)], 2)
    rep = enumerate_resonances(spec, 3)
    assert rep.verdict == VIOLATES_LEVEL_S
    assert rep.witness == ((0, 2), 0)


def test_matches_brute_force():
    pairs = [(Fraction(1, 2), Fraction(0)), (Fraction(1), Fraction(1, 2)), (Fraction(2), Fraction(1, 3))]
    spec = Spectrum([polar(m, a) for m, a in pairs], 1, "exact")
    rep = enumerate_resonances(spec, 6)
    got = sorted((k, j) for j, ks in enumerate(rep.resonances) for k in ks)
    assert got == brute_resonances(pairs, 6)


def test_float_near_resonance_warns():
    spec = Spectrum([0.5, 0.25 + 5e-12], 2, "float", tol=1e-12)
    rep = enumerate_resonances(spec, 2)
    assert rep.resonances[1] == []
    assert rep.warnings


def test_float_resonance_within_tolerance():
    spec = Spectrum([0.5, 0.25 + 1e-14], 2, "float")
    rep = enumerate_resonances(spec, 2)
    assert (2, 0) in rep.resonances[1]


def test_degree_bound_error():
    with pytest.raises(ValueError):
        enumerate_resonances(exact_spectrum([("1/2", 0)], 1), 1)


def test_omega_examples():
    tab = omega_tables(exact_spectrum([("1/2", 0)], 1), 10)
    for m in range(2, 11):
        assert tab.partial(m) == pytest.approx(0.25, rel=1e-14)
        assert tab.reduced(m) == pytest.approx(0.25, rel=1e-14)
    assert tab.witness("partial", 10) == ((2,), 0)
    assert omega_tables(exact_spectrum([(2, 0)], 1), 2).partial(2) == pytest.approx(2.0)


def test_partial_omega_zero_is_error():
    tab = omega_tables(exact_spectrum([("1/4", 0), ("1/2", 0)], 2), 4)
    assert tab.log_partial is None
    with pytest.raises(ValueError, match="vanishes"):
        tab.partial(2)
    assert tab.reduced(2) > 0


def test_omega_trailing_one_corrected_identity():
    # omega_s of (lam, 1) is omega of (lam) with the |lam^k - 1| distances added
    lam = cmath.rect(0.9, 2 * math.pi * 0.3819660112501051)
    with_one = omega_tables(Spectrum([lam, 1], 1), 12)
    alone = omega_tables(Spectrum([lam], 1), 12)
    for m in range(2, 13):
        extra = min(abs(lam ** a - 1) for a in range(2, m + 1))
        assert with_one.partial(m) == pytest.approx(min(alone.partial(m), extra), rel=1e-12)


def test_omega_trailing_one_equal_when_unit_distances_large():
    a = omega_tables(exact_spectrum([("1/2", 0), (1, 0)], 1), 10)
    b = omega_tables(exact_spectrum([("1/2", 0)], 1), 10)
    assert a.log_partial == pytest.approx(b.log_partial, abs=1e-14)


def test_brjuno_constant_table():
    tab = omega_tables(exact_spectrum([("1/2", 0)], 1), 2 ** 7)
    est = brjuno_sum(tab, "partial", "pow2", horizon=6)
    expect = [math.log(4) * sum(2.0 ** -v for v in range(i + 1)) for i in range(7)]
    assert est.partial_sums == pytest.approx(expect, rel=1e-12)
    assert est.partial_sums[-1] < 2 * math.log(4)
    assert est.verdict == PLAUSIBLY_FINITE


def test_brjuno_horizon_zero():
    tab = omega_tables(exact_spectrum([("1/2", 0)], 1), 4)
    est = brjuno_sum(tab, "reduced", "pow2", horizon=0)
    assert est.terms == pytest.approx([math.log(4)])
    assert est.sequence == [1, 2]


def test_brjuno_sequence_checks():
    tab = omega_tables(exact_spectrum([("1/2", 0)], 1), 8)
    with pytest.raises(ValueError):
        brjuno_sum(tab, horizon=3)  # needs p_4 = 16
    with pytest.raises(ValueError):
        brjuno_sum(tab, sequence="list:2,3,4", horizon=1)
    with pytest.raises(ValueError):
        brjuno_sum(tab, sequence="list:1,3,3", horizon=1)
    assert parse_sequence("list:1,2,5", 3) == [1, 2, 5]


def test_negative_terms_are_kept():
    tab = omega_tables(exact_spectrum([(2, 0)], 1), 4)
    est = brjuno_sum(tab, "partial", "all", horizon=2)
    assert all(t < 0 for t in est.terms)


def test_golden_mean_plausibly_finite():
    g = (math.sqrt(5) - 1) / 2
    tab = omega_tables(Spectrum([cmath.exp(2j * math.pi * g)], 1), 2048)
    assert brjuno_sum(tab, "partial", "pow2", 10).verdict == PLAUSIBLY_FINITE


def test_divergence_rule_uses_tail():
    tab = omega_tables(exact_spectrum([("1/2", 0)], 1), 8)
    est = brjuno_sum(tab, "partial", "all", horizon=6, threshold=0.1)
    assert est.tail == 2
    assert est.verdict == DIVERGING


def test_reduction_lemma_examples():
    # positive reals in the x block, +-1 behind, shift 1
    spec = exact_spectrum([("1/2", 0), (1, "1/2")], 1)
    r = check_reduction_lemma(spec, 1, 1.0, "all", 11)
    assert r.holds and r.precondition_ok and r.checked[0] == 3
    # trailing ones, shift 0, alpha 1: equality
    spec = exact_spectrum([("1/3", 0), (1, 0)], 1)
    tab = omega_tables(spec, 10)
    assert tab.log_reduced == pytest.approx(tab.log_partial, abs=1e-14)
    assert check_reduction_lemma(spec, 0, 1.0, "all", 9, table=tab).holds
    spec = exact_spectrum([("1/2", 0), (1, 0)], 1)
    r = check_reduction_lemma(spec, 0, 1.0, "pow2", 8)
    assert r.holds and r.derived_sequence[:3] == [1, 2, 4]


def test_reduction_lemma_reports_violation():
    spec = exact_spectrum([("2/3", 0), ("3/5", 0), (1, 0)], 2)
    r = check_reduction_lemma(spec, 0, 1.0, "all", 6)
    assert not r.holds and r.violation["p"] == 2


def test_power_law_fit_recovers_exponent():
    from germnf.spectrum import OmegaTable
    ms = range(2, 40)
    tab = OmegaTable(39, None, [math.log(3.0) - 2.5 * math.log(m) for m in ms], [((m,), 0) for m in ms],
                     None, "unused")
    C, beta = power_law_fit(tab, "reduced")
    assert C == pytest.approx(3.0) and beta == pytest.approx(2.5)


# properties ----------------------------------------------------------------

@st.composite
def float_spectra(draw, n_max=3):
    n = draw(st.integers(1, n_max))
    s = draw(st.integers(1, n))
    vals = [cmath.rect(draw(st.floats(0.2, 1.5)), 2 * math.pi * draw(st.floats(0, 1)))
            for _ in range(n)]
    return Spectrum(vals, s)


@st.composite
def exact_spectra(draw, n_max=3):
    n = draw(st.integers(1, n_max))
    s = draw(st.integers(1, n))
    vals = [polar(draw(st.sampled_from(["1/3", "1/2", "2/3", "1", "3/2", "2"])),
                  Fraction(draw(st.integers(0, 7)), 8)) for _ in range(n)]
    return Spectrum(vals, s, "exact")


@settings(max_examples=40, deadline=None)
@given(float_spectra())
def test_omega_monotone_and_ordered(spec):
    tab = omega_tables(spec, 7)
    red = tab.log_reduced
    assert all(b <= a for a, b in zip(red, red[1:]))
    if tab.log_partial is not None:
        par = tab.log_partial
        assert all(b <= a for a, b in zip(par, par[1:]))
        assert all(r <= p + 1e-15 for r, p in zip(red, par))


@settings(max_examples=40, deadline=None)
@given(exact_spectra())
def test_k_inclusions(spec):
    rep = enumerate_resonances(spec, 5)
    assert set(rep.K1_tilde) <= set(rep.K1)
    assert set(rep.K2_tilde) <= set(rep.K2)
    for ks in rep.resonances:
        assert all(sum(k) >= 2 for k in ks)


@settings(max_examples=25, deadline=None)
@given(exact_spectra(n_max=2))
def test_exact_float_agreement(spec):
    ex = omega_tables(spec, 12)
    fl = omega_tables(spec.to_float(), 12)
    for m in range(2, 13):
        a, b = ex.reduced(m), fl.reduced(m)
        assert abs(a - b) <= 1e-10 * max(a, 1e-300) or (a == 0 and b == 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.data())
def test_trailing_ones_reduced_omega(n, data):
    # one-unit x indices add |lam_p - lam_q| and |lam_p - 1| to the reduced min
    s = data.draw(st.integers(1, n - 1))
    lam = [cmath.rect(data.draw(st.floats(0.3, 0.95)), 2 * math.pi * data.draw(st.floats(0, 1)))
           for _ in range(s)]
    assume(all(abs(a - b) > 1e-3 for i, a in enumerate(lam) for b in lam[i + 1:]))
    tab = omega_tables(Spectrum(lam + [1.0] * (n - s), s), 8)
    assume(tab.log_partial is not None)
    extra = min([abs(a - 1) for a in lam]
                + [abs(a - b) for i, a in enumerate(lam) for b in lam[i + 1:]])
    for m in range(2, 9):
        assert tab.reduced(m) == pytest.approx(min(tab.partial(m), extra), rel=1e-9)
    if s == 1:
        assert tab.log_reduced == pytest.approx(tab.log_partial, abs=1e-12)
