"""Exact p-adic tools for logarithmic matrices and a bounded-rank criterion."""

from .cyclotomic import CycloElement, cyclo_val, eps, phi_at_zeta, phi_poly
from .iwasawa import Character, IwasawaSeries, MuLambda, eval_at_character, newton_invariants, omega_poly
from .padic import PadicNumber, Valuation, invert_unit, reduce_precision, val_p

__version__ = "0.1.0"

__all__ = [
    "Character", "CycloElement", "IwasawaSeries", "MuLambda", "PadicNumber", "Valuation",
    "cyclo_val", "eps", "eval_at_character", "invert_unit", "newton_invariants", "omega_poly",
    "phi_at_zeta", "phi_poly", "reduce_precision", "val_p",
]
