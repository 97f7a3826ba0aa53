"""Numerical curvature algebra: algebraic curvature tensors, the Lichnerowicz Γ
operator, curvature-operator partial traces, first jets and lower bounds, each
checked by independent computation routes.
"""
from ._backend import BACKEND
from .core import Metric, kulkarni_nomizu, random_curvature_tensor
from .algebra import decompose, gamma, gamma_form, gamma_quadratic, operator_spectrum
from .estimates import tachibana_slack, traceless_bound_slack, weyl_bound_slack
from .jets import CurvJet, random_jet
from .spectral import BoundReport, partial_trace, sym_eigen

__all__ = [
    "BACKEND",
    "BoundReport",
    "CurvJet",
    "Metric",
    "decompose",
    "gamma",
    "gamma_form",
    "gamma_quadratic",
    "kulkarni_nomizu",
    "operator_spectrum",
    "partial_trace",
    "random_curvature_tensor",
    "random_jet",
    "sym_eigen",
    "tachibana_slack",
    "traceless_bound_slack",
    "weyl_bound_slack",
]
__version__ = "0.1.0"
