"""pdlab: a finite-dimensional laboratory for projection-method operators.

Builds alternating-projection and Douglas-Rachford operators from
subspaces, measures convergence rates, computes numerical ranges and
resolvent profiles, and runs the slow/fast convergence experiments at
desk scale.
"""

from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
