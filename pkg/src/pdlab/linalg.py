"""Dense complex linear algebra: factorizations, spectra, norms.

Matrices are plain 2-D complex128 ndarrays. Factorizations and the
eigensolver are backed by LAPACK through numpy; the residual contracts
below are what this package actually relies on.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import _kernels


class SingularMatrixError(np.linalg.LinAlgError):
    """Coefficient matrix is singular to working precision."""

    def __init__(self, message, smallest_singular_value):
        super().__init__(message)
        self.smallest_singular_value = smallest_singular_value


class EigensolverError(RuntimeError):
    """Eigenvalue iteration failed to converge; no partial result is kept."""


def as_matrix(a, name="matrix"):
    """Coerce to a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be 2-D and nonempty, got shape {m.shape}")
    if not np.isfinite(m.real).all() or not np.isfinite(m.imag).all():
        raise ValueError(f"{name} contains non-finite entries")
    return m


def as_vector(x, name="vector"):
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if v.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.isfinite(v.real).all() or not np.isfinite(v.imag).all():
        raise ValueError(f"{name} contains non-finite entries")
    return v


def spectral_norm(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def lp_norm(x, p):
    return float((np.abs(x) ** p).sum() ** (1.0 / p))


def rank_threshold(shape, largest_sv):
    # machine epsilon x max dimension x largest singular value
    return np.finfo(np.float64).eps * max(shape) * largest_sv


@dataclass(frozen=True)
class SvdResult:
    """Compact SVD A = U diag(s) V^H with column-orthonormal U, V."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        return (self.u * self.s) @ self.v.conj().T


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with algebraic multiplicity."""

    values: np.ndarray

    @property
    def spectral_radius(self):
        return float(np.abs(self.values).max()) if self.values.size else 0.0

    def distance_to(self, point):
        return float(np.abs(self.values - point).min())


def qr_orthonormalize(vectors, tol=None, dim=None):
    """Column-orthonormal basis of span(vectors), rank-revealed by SVD.

    ``vectors`` is a sequence of length-d vectors or a d x k array of
    columns. Empty input returns a d x 0 matrix (``dim`` required then).
    The rank cut keeps singular values above tol x largest column norm;
    tol defaults to 1e-12 x d.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        cols = vectors.astype(np.complex128)
        d = cols.shape[0]
    else:
        vs = [as_vector(v) for v in vectors]
        if not vs:
            if dim is None:
                raise ValueError("empty input needs an explicit dim")
            return np.zeros((dim, 0), dtype=np.complex128)
        d = vs[0].size
        if any(v.size != d for v in vs):
            raise ValueError("vectors have mismatched lengths")
        cols = np.column_stack(vs)
    if cols.shape[1] == 0:
        return np.zeros((d, 0), dtype=np.complex128)
    if not np.isfinite(cols).all():
        raise ValueError("non-finite entries")
    if tol is None:
        tol = 1e-12 * d
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    col_norms = np.linalg.norm(cols, axis=0)
    scale = col_norms.max()
    if scale == 0.0:
        return np.zeros((d, 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    rank = int((s > tol * scale).sum())
    return np.ascontiguousarray(u[:, :rank])


def svd(a):
    """Compact SVD as an SvdResult."""
    a = as_matrix(a)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return SvdResult(u=u, s=s, v=vh.conj().T)


def eigenvalues(a):
    """Spectrum of a square matrix (LAPACK Hessenberg + shifted QR)."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    try:
        vals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigenvalue iteration failed: {exc}") from exc
    return Spectrum(values=vals)


def hermitian_extreme_eig(h):
    """Largest eigenvalue and a unit eigenvector of a Hermitian matrix."""
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError("matrix must be square")
    scale = spectral_norm(h)
    if spectral_norm(h - h.conj().T) > 1e-10 * max(scale, 1.0):
        raise ValueError("matrix is not Hermitian to working precision")
    hs = (h + h.conj().T) / 2.0
    w, v = np.linalg.eigh(hs)
    return float(w[-1]), v[:, -1].copy()


def solve_linear(a, b):
    """Solve A X = B; raises SingularMatrixError when A is not safely invertible."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B") if np.asarray(b).ndim == 2 else as_vector(b, "B")
    if a.shape[0] != a.shape[1]:
        raise ValueError("A must be square")
    if b.shape[0] != a.shape[0]:
        raise ValueError("incompatible shapes")
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        smin = float(np.linalg.svd(a, compute_uv=False)[-1])
        raise SingularMatrixError(
            f"singular matrix (smallest singular value {smin:.3e})", smin
        ) from exc
    norm_a = spectral_norm(a)
    norm_x = np.linalg.norm(x)
    residual = np.linalg.norm(a @ x - b)
    if residual > 1e-10 * max(norm_a * norm_x, 1e-300):
        smin = float(np.linalg.svd(a, compute_uv=False)[-1])
        raise SingularMatrixError(
            f"solve residual {residual:.3e} exceeds contract; matrix is singular "
            f"to working precision (smallest singular value {smin:.3e})",
            smin,
        )
    return x


# ---------------------------------------------------------------------------
# Operator p-norms
# ---------------------------------------------------------------------------

def _ascent_starts(a, seed, starts):
    n = a.shape[1]
    cols = [np.eye(n, dtype=np.complex128)[:, i] for i in range(min(n, 4))]
    cols.append(np.ones(n, dtype=np.complex128) / np.sqrt(n))
    rng = np.random.default_rng(seed)
    while len(cols) < starts:
        cols.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return np.column_stack(cols)


def _sphere_angle_grid(n, k):
    # spherical coordinates: n-2 polar angles in [0, pi], one azimuthal in [0, 2pi)
    if n == 2:
        return [(t,) for t in np.linspace(0.0, 2 * np.pi, 2 * k, endpoint=False)]
    polar = [np.linspace(0.0, np.pi, k) for _ in range(n - 2)]
    azim = np.linspace(0.0, 2 * np.pi, 2 * k, endpoint=False)
    return list(itertools.product(*polar, azim))


def _angles_to_point(angles, n):
    x = np.empty(n)
    s = 1.0
    for i, ang in enumerate(angles):
        x[i] = s * np.cos(ang)
        s *= np.sin(ang)
    x[n - 1] = s
    return x


def _refine(value_fn, best_angles, step, rounds=48, shrink=0.6):
    # deterministic stencil descent: perturb each retained candidate along
    # +-step in every angle coordinate, keep the best few, shrink
    dims = len(best_angles[0][1])
    stencil = [s for s in itertools.product((-1.0, 0.0, 1.0), repeat=dims)
               if any(s)]
    cands = list(best_angles)
    best = max(v for v, _ in cands)
    for _ in range(rounds):
        new = list(cands)
        for _, ang in cands:
            for s in stencil:
                a2 = tuple(ang[i] + step * s[i] for i in range(dims))
                new.append((value_fn(a2), a2))
        new.sort(key=lambda t: -t[0])
        best = max(best, new[0][0])
        cands = new[:4]
        step *= shrink
    return best


def _pnorm_exact_real(a, p, k=32):
    n = a.shape[1]
    if n == 1:
        return lp_norm(a[:, 0], p)

    def val(angles):
        x = _angles_to_point(angles, n)
        nx = lp_norm(x, p)
        return lp_norm(a @ x, p) / nx if nx > 0 else 0.0

    grid = _sphere_angle_grid(n, k)
    scored = sorted(((val(g), g) for g in grid), key=lambda t: -t[0])
    return _refine(val, scored[:8], step=np.pi / k)


def _pnorm_exact_complex2(a, p, k=72):
    # x = (cos t, sin t e^{i phi}); the global phase is fixed by linearity
    def val(angles):
        t, ph = angles
        x = np.array([np.cos(t), np.sin(t) * np.exp(1j * ph)])
        nx = lp_norm(x, p)
        return lp_norm(a @ x, p) / nx if nx > 0 else 0.0

    grid = [(t, ph)
            for t in np.linspace(0.0, np.pi / 2, k)
            for ph in np.linspace(0.0, 2 * np.pi, 2 * k, endpoint=False)]
    scored = sorted(((val(g), g) for g in grid), key=lambda t: -t[0])
    return _refine(val, scored[:8], step=np.pi / (2 * k))


def operator_pnorm(a, p, mode="estimate", seed=0, starts=16, iters=300):
    """Operator norm of A on l^p, 1 < p < inf.

    "estimate" runs the dual-vector fixed-point ascent from ``starts``
    seeded start vectors and returns a lower bound. "exact-small" runs a
    dense direction-grid search with deterministic stencil refinement and
    is limited to 4 real degrees of freedom (real matrices up to 4 columns,
    complex ones up to 2); real inputs are searched over the real sphere,
    which gives the complex norm as well because complexification does not
    change the norm of an operator between l^p spaces. p = 2 is answered
    exactly by the largest singular value in both modes.
    """
    a = as_matrix(a)
    if not (1.0 < p < np.inf):
        raise ValueError(f"p must lie in (1, inf), got {p}")
    if p == 2.0:
        return spectral_norm(a)
    if mode == "estimate":
        x0 = _ascent_starts(a, seed, max(starts, 16))
        return float(_kernels.pnorm_ascent(a, float(p), x0, iters, 1e-14))
    if mode == "exact-small":
        is_real = np.abs(a.imag).max() == 0.0
        n = a.shape[1]
        if is_real and n <= 4:
            return float(_pnorm_exact_real(a.real.astype(np.float64), p))
        if n == 1:
            return lp_norm(a[:, 0], p)
        if n <= 2:
            return float(_pnorm_exact_complex2(a, p))
        raise ValueError(
            "exact-small supports at most 4 real degrees of freedom "
            f"(real n <= 4, complex n <= 2); got {'real' if is_real else 'complex'} n = {n}"
        )
    raise ValueError(f"unknown mode {mode!r}")
