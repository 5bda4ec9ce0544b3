"""Exact computations in unipotent Hecke algebras with idempotents."""

from .scalars import Cyclo, Laurent, Laurent2, LaurentInt

__all__ = ["Cyclo", "Laurent", "Laurent2", "LaurentInt"]
__version__ = "0.1.0"
