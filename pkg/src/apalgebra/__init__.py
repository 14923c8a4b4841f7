"""Exact and numerical computation with almost periodic trig polynomials."""

from .freqmod import (
    Frequency,
    FrequencyBasis,
    GeneratorTable,
    SemigroupSpec,
    default_table,
    extract_basis,
    freq_parse,
    membership,
    sign_of,
)
from .trigpoly import CRational, TrigPoly
from .torus import LaurentPoly, transfer, transfer_many, torus_max_abs, torus_min_abs, torus_min_sumabs
from .expr import parse_expr, parse_laurent
from .corona import invertible, unimodular, bezout
from .aplus import extend, is_ap_plus

__version__ = "0.1.0"
