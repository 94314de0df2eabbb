"""Exact-arithmetic toolkit for polynomial complexity measures of Boolean
functions and communication bounds of their XOR lifts."""

from . import cli, comm, lifting, lp, measures, modfn
from .core import (
    BooleanFunction,
    CapacityError,
    CommMatrix,
    FourierTable,
    SparsePolynomial,
    SpecParseError,
    SymmetricPredicate,
    build_function,
    expansion,
    fourier,
    from_predicate,
    fwht,
    poly_arith,
    restrict,
    spectral_norm_xor,
    weight,
    xor_compose,
)

__version__ = "0.1.0"
