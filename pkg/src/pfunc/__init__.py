"""Numerical laboratory for P-functions of quasi-linear elliptic equations."""

from .errors import PFuncError
from .funcalg import (Fn1, Fn2, MuKind, PFunctionSpec, Separable, invert_monotone, paper_example)
from .grid import Field2, Grid2, Profile1
from .report import CheckReport

__all__ = ["CheckReport", "Field2", "Fn1", "Fn2", "Grid2", "MuKind", "PFuncError", "PFunctionSpec",
           "Profile1", "Separable", "invert_monotone", "paper_example"]
__version__ = "0.1.0"
