import random
from fractions import Fraction

import pytest

from germnf import Germ, PolarValue, Spectrum

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])


def polar(mod, ang=0):
    return PolarValue(Fraction(mod), Fraction(ang))


def exact_spectrum(pairs, s):
    return Spectrum([polar(m, a) for m, a in pairs], s, "exact")


@pytest.fixture
def koenigs():
    spec = exact_spectrum([("1/2", 0)], 1)
    return Germ.from_terms(spec, 10, [(0, (2,), 1)])


@pytest.fixture
def obstructed_germ():
    # f(x, y) = (lam (1 + y) x + x^2, y), lam = (3/2) e^{2 pi i/5}
    lam = polar("3/2", "1/5")
    spec = Spectrum([lam, polar(1)], 1, "exact")
    return Germ.from_terms(spec, 6, [(0, (1, 1), lam), (0, (2, 0), 1)])


@pytest.fixture
def rng():
    return random.Random(20240611)


FIXTURES = __import__("pathlib").Path(__import__("germnf").__file__).parent / "fixtures"


def random_level_s_spectrum(rng, trailing_one=False):
    """Float 2D spectrum (lam, mu), s = 1, with moduli in [0.3, 1]."""
    import cmath
    import math

    from germnf.spectrum import VIOLATES_LEVEL_S, enumerate_resonances

    while True:
        lam = cmath.rect(rng.uniform(0.3, 1.0), 2 * math.pi * rng.random())
        mu = 1.0 if trailing_one else cmath.rect(rng.uniform(0.3, 1.0), 2 * math.pi * rng.random())
        spec = Spectrum([lam, mu], 1)
        if enumerate_resonances(spec, 8).verdict != VIOLATES_LEVEL_S:
            return spec


def random_osculating_germ(rng, spec, N, density=0.5):
    """Tail with ord_x >= 2 in the x component and ord_x >= 1 in the y component."""
    from germnf.series import monomials

    terms = []
    for d in range(2, N + 1):
        for k in monomials(2, d):
            for j, need in ((0, 2), (1, 1)):
                if k[0] >= need and rng.random() < density:
                    terms.append((j, k, complex(rng.uniform(-1, 1), rng.uniform(-1, 1))))
    return Germ.from_terms(spec, N, terms)


QUARTER_MODULI = ["1/3", "1/2", "2/3", "3/4", "3/2", "2", "5/2", "3"]


def random_gaussian_germ(rng, N, density=0.6):
    """Exact non-resonant 2D germ whose field is Q(i), plus its oracle data.

    Returns (germ, eigenvalues as (Fraction re, Fraction im), terms).
    """
    from germnf.cyclotomic import CyclotomicNumber
    from germnf.series import monomials
    from germnf.spectrum import NO_RESONANCES, enumerate_resonances

    while True:
        pairs = [(Fraction(rng.choice(QUARTER_MODULI)), Fraction(rng.randrange(4), 4))
                 for _ in range(2)]
        spec = Spectrum([polar(m, a) for m, a in pairs], rng.choice([1, 2]), "exact")
        if enumerate_resonances(spec, N).verdict == NO_RESONANCES:
            break
    unit = {0: (1, 0), 1: (0, 1), 2: (-1, 0), 3: (0, -1)}
    eigs = [(m * unit[int(a * 4)][0], m * unit[int(a * 4)][1]) for m, a in pairs]
    terms, raw = [], []
    for d in range(2, N + 1):
        for k in monomials(2, d):
            for j in range(2):
                if rng.random() < density:
                    re = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                    im = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                    if re or im:
                        terms.append((j, k, CyclotomicNumber.gaussian(re, im)))
                        raw.append((j, tuple(k), (re, im)))
    return Germ.from_terms(spec, N, terms), eigs, raw
