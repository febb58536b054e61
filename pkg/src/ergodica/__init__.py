"""Finite-dimensional operator algebras, invariant and ergodic states under
group actions, twisted equivalence and type classification, and crossed
products with their canonical conditional expectation, together with the
exact classical (measure-preserving) counterparts and a bridge between the
two pictures.  Every structural theorem the library implements is backed by
an executable property suite (`ergodica verify`, or tests/test_acceptance.py).
"""

from ._kernels import active_path
from .numerics import DEFAULT_TOL, ToleranceConfig
from .config import DEFAULT_SEED

__version__ = "0.1.0"

__all__ = ["ToleranceConfig", "DEFAULT_TOL", "DEFAULT_SEED", "active_path", "__version__"]
