"""Formal linearization, normal forms and small-divisor diagnostics for
holomorphic germs with diagonal linear part."""

from .cyclotomic import CyclotomicNumber, PolarValue
from .germ import Germ
from .io import GermDocument, GermFormatError, dump_germ, load_germ
from .linearizer import (
    check_osculating_form,
    poincare_dulac,
    solve_linearization,
    verify_conjugacy,
)
from .majorant import (
    alpha_closed_form,
    alpha_sequence,
    check_counting_bound,
    delta_table,
    epsilon_of,
    growth_diagnostic,
    normalize_germ,
    theta_of,
)
from .series import MultiIndex, SeriesVector, TruncatedSeries, add, coeff_norm, compose, mul, ord_x
from .spectrum import (
    Spectrum,
    brjuno_sum,
    check_reduction_lemma,
    enumerate_resonances,
    omega_tables,
)

__version__ = "0.1.0"
