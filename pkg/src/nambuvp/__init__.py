"""Exact symbolic and numeric checks for Nambu mechanics and the volume-preserving hierarchy."""

from . import flows, forms, hierarchy, nambu, symalg
from .symalg import LaurentSeries, MultiPoly, Variable, VariableTable

__all__ = ["symalg", "nambu", "flows", "hierarchy", "forms",
           "MultiPoly", "LaurentSeries", "Variable", "VariableTable"]
__version__ = "0.1.0"
