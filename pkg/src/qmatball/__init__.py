"""Symbolic and numeric toolkit for the quantum matrix ball."""

from .scalars import QScalar
from .algebra import AlgElement, normalize
from .series import SeriesConfig, SeriesError, SpectrumGrid
from .spectral import ExactScalar, SpectralElement, SpectralFn, SpectralKindError
from .uq import Generator, act, act_expansion, all_generators
from .representations import rep_model, verify_relations
from .integrals import (
    DivergentIntegralError,
    h_closed,
    h_compact,
    h_disc,
    h_trace,
    invariance_residual,
    jackson_01,
    jackson_0inf,
)
from .fodc import CalculusRep, build_calculus, d, q_derivative
from .exprs import ExprError, parse_element, parse_expr, render_element

__all__ = [
    "QScalar",
    "AlgElement",
    "normalize",
    "SeriesConfig",
    "SeriesError",
    "SpectrumGrid",
    "ExactScalar",
    "SpectralElement",
    "SpectralFn",
    "SpectralKindError",
    "Generator",
    "act",
    "act_expansion",
    "all_generators",
    "rep_model",
    "verify_relations",
    "DivergentIntegralError",
    "h_closed",
    "h_compact",
    "h_disc",
    "h_trace",
    "invariance_residual",
    "jackson_01",
    "jackson_0inf",
    "CalculusRep",
    "build_calculus",
    "d",
    "q_derivative",
    "ExprError",
    "parse_element",
    "parse_expr",
    "render_element",
]
