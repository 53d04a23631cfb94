"""Exact verification toolkit for the cubic Shimura-lift fundamental lemma over Q_p."""

from .cyclo import CycValue, Mu3, psi
from .errors import (
    CostGuard,
    CubicFLError,
    FirstFailure,
    HypothesisNotMet,
    InvalidField,
    NotCovered,
    StratumUndefined,
)
from .matcher import MatchRecord, MatchReport, sweep, verify_degenerate, verify_fl, verify_functional_equations
from .orbital_i import I_brute, I_closed, I_deg_brute, I_deg_closed
from .orbital_j import J_brute, J_closed, J_deg, J_deg_closed
from .padic import FieldParams, PAdicNumber, make_field
from .sums import SumParams, default_params, hilbert3

__version__ = "0.1.0"

__all__ = [
    "CostGuard", "CubicFLError", "CycValue", "FieldParams", "FirstFailure", "HypothesisNotMet", "I_brute",
    "I_closed", "I_deg_brute", "I_deg_closed", "InvalidField", "J_brute", "J_closed", "J_deg", "J_deg_closed",
    "MatchRecord", "MatchReport", "Mu3", "NotCovered", "PAdicNumber", "StratumUndefined", "SumParams",
    "default_params", "hilbert3", "make_field", "psi", "sweep", "verify_degenerate", "verify_fl",
    "verify_functional_equations",
]
