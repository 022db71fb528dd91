"""Projection construction and classification.

Covers Hilbert orthogonal projections, oblique projections along a
complement, the ||P - rI|| <= 1 - r family and its r = 1/2 special case,
and norm-one conditional-expectation projections on finite l^p.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, operator_pnorm, spectral_norm
from .spaces import LpSpace, duality_map

HILBERT_ORTHOGONAL = "hilbert-orthogonal"
OBLIQUE = "oblique"
LP_CONDITIONAL_EXPECTATION = "lp-conditional-expectation"


@dataclass(frozen=True)
class ProjectionOp:
    matrix: np.ndarray
    kind: str
    range_dim: int
    condition_number: float = 1.0

    def __post_init__(self):
        m = as_matrix(self.matrix, "projection matrix")
        if m.shape[0] != m.shape[1]:
            raise ValueError("projection matrix must be square")
        scale = max(1.0, spectral_norm(m) ** 2)
        if spectral_norm(m @ m - m) > 1e-10 * scale:
            raise ValueError("matrix is not idempotent to 1e-10")
        if self.kind == HILBERT_ORTHOGONAL:
            if spectral_norm(m - m.conj().T) > 1e-10 * max(1.0, spectral_norm(m)):
                raise ValueError("orthogonal projection must be Hermitian")
            if spectral_norm(m) > 1.0 + 1e-10:
                raise ValueError("orthogonal projection must be a contraction")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]


def orth_projection(s):
    """Orthogonal projection onto a subspace: P = B B^H."""
    p = s.basis @ s.basis.conj().T
    if s.is_zero:
        p = np.zeros((s.ambient_dim, s.ambient_dim), dtype=np.complex128)
    return ProjectionOp(matrix=p, kind=HILBERT_ORTHOGONAL, range_dim=s.dim)


def oblique_projection(range_space, kernel_space):
    """Projection onto range_space along kernel_space.

    The two spaces must be complementary; the condition number of the
    stacked basis is reported so callers can scale error budgets.
    """
    if range_space.ambient_dim != kernel_space.ambient_dim:
        raise ValueError("ambient dimensions differ")
    d = range_space.ambient_dim
    if range_space.dim + kernel_space.dim != d:
        raise ValueError(
            f"dimensions {range_space.dim} + {kernel_space.dim} do not sum to {d}"
        )
    if range_space.is_zero:
        return ProjectionOp(
            matrix=np.zeros((d, d), dtype=np.complex128),
            kind=OBLIQUE, range_dim=0,
        )
    w = np.hstack([range_space.basis, kernel_space.basis])
    svals = np.linalg.svd(w, compute_uv=False)
    if svals[-1] <= 1e-12 * svals[0]:
        raise ValueError(
            "range and kernel are not complementary "
            f"(smallest stacked singular value {svals[-1]:.3e})"
        )
    cond = float(svals[0] / svals[-1])
    winv = np.linalg.inv(w)
    p = range_space.basis @ winv[: range_space.dim, :]
    return ProjectionOp(matrix=p, kind=OBLIQUE, range_dim=range_space.dim,
                        condition_number=cond)


def type_d_radius(p, tol=1e-8):
    """Some r in (0,1) with ||P - rI|| <= 1 - r (+ tol), or None.

    g(r) = ||P - rI|| - (1 - r) is convex, so a ternary search (bracket
    width 1e-10, equal-shrink tie-break) locates its minimum. The minimum
    can be a flat segment; the type-U center r = 1/2 is returned whenever
    it qualifies, which keeps the answer canonical for orthoprojections
    and the identity.
    """
    m = p.matrix if isinstance(p, ProjectionOp) else as_matrix(p)
    if spectral_norm(m) == 0.0:
        raise ValueError("the zero projection is excluded")
    d = m.shape[0]
    eye = np.eye(d)

    def g(r):
        return spectral_norm(m - r * eye) - (1.0 - r)

    if g(0.5) <= tol:
        return 0.5
    lo, hi = 1e-12, 1.0 - 1e-12
    while hi - lo > 1e-10:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        g1, g2 = g(m1), g(m2)
        if g1 < g2:
            hi = m2
        elif g2 < g1:
            lo = m1
        else:
            lo, hi = m1, m2
    r = 0.5 * (lo + hi)
    return r if g(r) <= tol else None


def is_type_u(p, tol=1e-8):
    """True iff ||P - I/2|| <= 1/2 (+ tol)."""
    m = p.matrix if isinstance(p, ProjectionOp) else as_matrix(p)
    return spectral_norm(m - 0.5 * np.eye(m.shape[0])) <= 0.5 + tol


@dataclass(frozen=True)
class LpPartitionProjection:
    """Conditional-expectation projection on l^p from disjoint blocks.

    Each block keeps the component along its unit vector u_b, paired with
    the duality functional of u_b: P x = sum_b <x, phi_{u_b}> u_b. Its
    l^p -> l^p norm is 1 (certified at construction); norm_bound records
    the certificate value and norm_method how it was obtained.
    """

    space: LpSpace
    blocks: tuple
    unit_vectors: tuple
    matrix: np.ndarray
    norm_bound: float
    norm_method: str

    @property
    def range_dim(self):
        return len(self.blocks)

    def as_projection_op(self):
        return ProjectionOp(matrix=self.matrix, kind=LP_CONDITIONAL_EXPECTATION,
                            range_dim=self.range_dim)


def lp_partition_projection(space, blocks, unit_vectors):
    d, p = space.dim, space.p
    blocks = tuple(tuple(int(i) for i in b) for b in blocks)
    seen = set()
    for b in blocks:
        for i in b:
            if not 0 <= i < d:
                raise ValueError(f"index {i} outside dimension {d}")
            if i in seen:
                raise ValueError(f"blocks overlap at index {i}")
            seen.add(i)
    unit_vectors = tuple(np.asarray(u, dtype=np.complex128).reshape(-1)
                         for u in unit_vectors)
    if len(unit_vectors) != len(blocks):
        raise ValueError("one unit vector per block is required")
    mat = np.zeros((d, d), dtype=np.complex128)
    for b, u in zip(blocks, unit_vectors):
        if u.size != d:
            raise ValueError("unit vectors live in the ambient space")
        outside = np.delete(np.arange(d), list(b))
        if outside.size and np.abs(u[outside]).max() > 0:
            raise ValueError("unit vector supported outside its block")
        nu = (np.abs(u) ** p).sum() ** (1.0 / p)
        if abs(nu - 1.0) > 1e-10:
            raise ValueError(f"block vector has l^{p} norm {nu}, expected 1")
        phi = duality_map(space, u)
        mat += np.outer(u, phi)  # bilinear pairing: P x = u (phi . x)
    idem = spectral_norm(mat @ mat - mat)
    if idem > 1e-10:
        raise ValueError(f"construction lost idempotency ({idem:.3e})")

    is_real = blocks == () or np.abs(mat.imag).max() == 0.0
    if (is_real and d <= 4) or d <= 2:
        bound = operator_pnorm(mat, p, mode="exact-small") if blocks else 0.0
        method = "exact-small"
    else:
        bound = operator_pnorm(mat, p, mode="estimate") if blocks else 0.0
        method = "estimate"
    if bound > 1.0 + 1e-6:
        raise ValueError(f"certified p-norm {bound} exceeds 1 + 1e-6")
    return LpPartitionProjection(space=space, blocks=blocks,
                                 unit_vectors=unit_vectors, matrix=mat,
                                 norm_bound=float(bound), norm_method=method)
