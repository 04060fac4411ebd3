"""Planar three-body molecular ions bound by a screened (K0) interaction."""

from .constants import MOLECULES, PotentialModel
from .specfun import k0, k1

__all__ = ["MOLECULES", "PotentialModel", "k0", "k1"]
__version__ = "0.1.0"
