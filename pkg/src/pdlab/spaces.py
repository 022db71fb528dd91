"""Subspace arithmetic and the finite-dimensional l^p space descriptor.

Subspaces carry an explicit column-orthonormal basis; the zero subspace is
the d x 0 basis so complements, intersections and direct sums degrade
without special cases.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_vector, lp_norm, qr_orthonormalize


@dataclass(frozen=True)
class Subspace:
    basis: np.ndarray  # (ambient_dim, dim), column-orthonormal

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.complex128)
        if b.ndim != 2:
            raise ValueError("basis must be 2-D")
        if b.shape[1] > b.shape[0]:
            raise ValueError("more basis columns than the ambient dimension")
        if b.shape[1] > 0:
            gram = b.conj().T @ b
            if np.abs(gram - np.eye(b.shape[1])).max() > 1e-10:
                raise ValueError("basis columns are not orthonormal to 1e-10")
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def is_zero(self):
        return self.dim == 0

    @classmethod
    def from_spanning(cls, vectors, dim=None, tol=None):
        return cls(qr_orthonormalize(vectors, tol=tol, dim=dim))

    @classmethod
    def zero(cls, dim):
        return cls(np.zeros((dim, 0), dtype=np.complex128))

    @classmethod
    def full(cls, dim):
        return cls(np.eye(dim, dtype=np.complex128))

    def project_vector(self, x):
        x = as_vector(x)
        return self.basis @ (self.basis.conj().T @ x)

    def residual(self, x):
        """Distance of x from the subspace."""
        x = as_vector(x)
        return float(np.linalg.norm(x - self.project_vector(x)))


def complement(s):
    """Orthogonal complement."""
    d, r = s.ambient_dim, s.dim
    if r == 0:
        return Subspace.full(d)
    u = np.linalg.svd(s.basis, full_matrices=True)[0]
    return Subspace(np.ascontiguousarray(u[:, r:]))


def intersect(a, b, tol=1e-8):
    """Intersection via principal-vector thresholding (cosine >= 1 - tol)."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if a.is_zero or b.is_zero:
        return Subspace.zero(a.ambient_dim)
    if a.dim > b.dim:
        a, b = b, a
    u, s, _ = np.linalg.svd(a.basis.conj().T @ b.basis)
    k = int((np.minimum(s, 1.0) >= 1.0 - tol).sum())
    if k == 0:
        return Subspace.zero(a.ambient_dim)
    return Subspace(qr_orthonormalize(a.basis @ u[:, :k]))


def intersect_many(subspaces, tol=1e-8):
    """Left fold of pairwise intersection."""
    subspaces = list(subspaces)
    if not subspaces:
        raise ValueError("no subspaces")
    acc = subspaces[0]
    for s in subspaces[1:]:
        acc = intersect(acc, s, tol)
    return acc


def principal_angles(a, b):
    """Non-increasing cosines of the principal angles, clamped to [0, 1]."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if a.is_zero or b.is_zero:
        raise ValueError("principal angles need nonzero subspaces")
    s = np.linalg.svd(a.basis.conj().T @ b.basis, compute_uv=False)
    return np.clip(s, 0.0, 1.0)


def _deflate(s, m):
    # orthogonal complement of m inside s; its dimension is forced, so the
    # rank cut cannot be fooled by the near-zero residual columns
    if m.is_zero:
        return s
    keep = s.dim - m.dim
    if keep <= 0:
        return Subspace.zero(s.ambient_dim)
    w = s.basis - m.basis @ (m.basis.conj().T @ s.basis)
    u = np.linalg.svd(w, full_matrices=False)[0]
    return Subspace(np.ascontiguousarray(u[:, :keep]))


def friedrichs_number(a, b, tol=1e-8):
    """Largest principal-angle cosine after removing the intersection.

    Equals 0 when either deflated space is zero; always < 1 for finite
    dimensions since the intersection is deflated away.
    """
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if a.is_zero or b.is_zero:
        return 0.0
    m = intersect(a, b, tol)
    da, db = _deflate(a, m), _deflate(b, m)
    if da.is_zero or db.is_zero:
        return 0.0
    return float(principal_angles(da, db)[0])


@dataclass(frozen=True)
class LpSpace:
    """Finite-dimensional l^p with its convexity/smoothness exponents."""

    dim: int
    p: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not (1.0 < self.p < np.inf):
            raise ValueError(f"p must lie in (1, inf), got {self.p}")

    @property
    def q_convexity_exponent(self):
        return max(2.0, self.p)

    @property
    def p_smoothness_exponent(self):
        return min(2.0, self.p)

    @property
    def dual_exponent(self):
        return self.p / (self.p - 1.0)

    def norm(self, x):
        return lp_norm(as_vector(x), self.p)


def duality_map(space, x):
    """Norming functional phi_x with <x, phi_x> = ||x||_p^2, ||phi_x||_q = ||x||_p.

    The pairing is the bilinear dot product sum_i x_i phi_i; entries are
    ||x||_p^{2-p} |x_i|^{p-2} conj(x_i), zero where x_i is zero. For p = 2
    this is plain conjugation.
    """
    x = as_vector(x)
    if x.size != space.dim:
        raise ValueError("vector length does not match the space dimension")
    nx = lp_norm(x, space.p)
    if nx == 0.0:
        raise ValueError("the duality map is undefined at zero")
    mags = np.abs(x)
    phi = np.zeros_like(x)
    nz = mags > 0
    phi[nz] = nx ** (2.0 - space.p) * mags[nz] ** (space.p - 2.0) * np.conj(x[nz])
    return phi


def random_subspace(ambient_dim, dim, rng, real=False):
    """Haar-ish random subspace from a Gaussian matrix QR."""
    if dim == 0:
        return Subspace.zero(ambient_dim)
    g = rng.standard_normal((ambient_dim, dim))
    if not real:
        g = g + 1j * rng.standard_normal((ambient_dim, dim))
    q = np.linalg.qr(g)[0]
    return Subspace(q.astype(np.complex128))


def random_unit(dim, rng, p=2.0, real=False):
    g = rng.standard_normal(dim)
    if not real:
        g = g + 1j * rng.standard_normal(dim)
    g = g.astype(np.complex128)
    return g / lp_norm(g, p)
