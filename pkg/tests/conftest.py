import numpy as np
import pytest

from pdlab import _kernels
from pdlab.projections import orth_projection
from pdlab.spaces import random_subspace


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT compilation happens once here so timed tests measure math, not
    # compilation.
    _kernels.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_map_operator(dim, ranks, rng):
    """Product of orthogonal projections onto random subspaces."""
    t = np.eye(dim, dtype=np.complex128)
    for r in ranks:
        t = orth_projection(random_subspace(dim, r, rng)).matrix @ t
    return t


def random_dr_operator(dim, r1, r2, rng):
    from pdlab.operators import dr_operator

    p1 = orth_projection(random_subspace(dim, r1, rng))
    p2 = orth_projection(random_subspace(dim, r2, rng))
    return dr_operator(p1, p2).matrix
