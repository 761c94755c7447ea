"""Exact engine for rank-one lattice vertex operator algebras and their A4 orbifold."""

from latvoa.scalars import Scalar
from latvoa.fock import LatticeContext, State, Monomial
from latvoa.qseries import QSeries

__version__ = "0.1.0"

__all__ = ["Scalar", "LatticeContext", "State", "Monomial", "QSeries", "__version__"]
