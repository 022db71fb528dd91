"""Spectral geometry: resolvent profiles, numerical ranges, Stolz fits,
Ritt diagnostics and the related inequality checks."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import convex_hull, densify_hull_boundary, hull_distance
from .linalg import (EigensolverError, as_matrix, eigenvalues, solve_linear,
                     spectral_norm)
from .spaces import duality_map, random_unit

K_SPECTRAL_CONSTANT = 1.0 + math.sqrt(2.0)


def _loglog_fit(x, y):
    """Least-squares slope/intercept of log y vs log x, with R^2."""
    lx, ly = np.log(x), np.log(y)
    a = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(a, ly, rcond=None)
    pred = a @ coef
    ss_res = ((ly - pred) ** 2).sum()
    ss_tot = ((ly - ly.mean()) ** 2).sum()
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), float(r2)


def spectrum_check(t, tol=1e-8):
    """Spectrum plus the flag 'unit-circle part is at most the point 1'."""
    spec = eigenvalues(_as_square(t))
    mod = np.abs(spec.values)
    ok = bool(np.all((mod <= 1.0 - tol) | (np.abs(spec.values - 1.0) <= tol)))
    return spec, ok


def _as_square(t):
    m = t.matrix if hasattr(t, "matrix") else as_matrix(t)
    if m.shape[0] != m.shape[1]:
        raise ValueError("square matrix required")
    return m


@dataclass(frozen=True)
class ResolventProfile:
    """Norms ||R(e^{i theta}, T)|| on a positive angle grid.

    Each stored norm is the max over the pair +-theta, which also makes
    the profile invariant under conjugate transposition. alpha_hat is the
    fitted growth exponent over the window; it is reported as 0 when the
    spectrum stays away from 1 (bounded branch).
    """

    thetas: np.ndarray
    norms: np.ndarray
    alpha_hat: float
    c_hat: float
    r_squared: float
    window: float
    touches_one: bool
    skipped: tuple = ()


def resolvent_profile(t, thetas=None, window=0.1, n_points=200):
    tm = _as_square(t)
    spec, ok = spectrum_check(tm)
    if not ok:
        raise ValueError("spectrum meets the unit circle away from 1")
    if thetas is None:
        thetas = np.geomspace(1e-4, np.pi, n_points)
    thetas = np.asarray(thetas, dtype=np.float64)
    if (thetas <= 0).any() or (thetas > np.pi + 1e-15).any():
        raise ValueError("angles must lie in (0, pi]")
    d = tm.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    norms = np.empty(thetas.size)
    skipped = []
    for i, th in enumerate(thetas):
        vals = []
        for sign in (1.0, -1.0):
            lam = np.exp(1j * sign * th)
            if spec.distance_to(lam) < 1e-12:
                skipped.append((float(th), sign))
                continue
            vals.append(spectral_norm(solve_linear(lam * eye - tm, eye)))
        norms[i] = max(vals) if vals else np.nan
    touches = spec.distance_to(1.0) <= 1e-8
    mask = (thetas <= window) & np.isfinite(norms)
    if mask.sum() >= 2:
        slope, intercept, r2 = _loglog_fit(1.0 / thetas[mask], norms[mask])
        alpha, c = slope, float(np.exp(intercept))
    else:
        alpha, c, r2 = 0.0, float(np.nanmax(norms, initial=1.0)), 1.0
    if not touches:
        alpha = 0.0
    return ResolventProfile(thetas=thetas, norms=norms, alpha_hat=float(alpha),
                            c_hat=c, r_squared=r2, window=float(window),
                            touches_one=bool(touches), skipped=tuple(skipped))


ROTATION_BOUNDARY = "rotation-boundary"
DUALITY_SAMPLING = "duality-sampling"


@dataclass(frozen=True)
class NumericalRangeSample:
    """Points approximating W(T) plus the hull of what was seen.

    The rotation-boundary method yields true boundary points (support
    points of the field of values); duality sampling on l^p is an inner
    sampling only. Either way the hull is an inner approximation.
    """

    points: np.ndarray
    method: str
    hull: np.ndarray
    support_vectors: np.ndarray = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        worst = max(hull_distance(z, self.hull) for z in pts)
        if worst > 1e-10:
            raise ValueError(f"hull misses a sample point by {worst:.3e}")
        object.__setattr__(self, "points", pts)

    def boundary_points(self, total=2048):
        return densify_hull_boundary(self.hull, total)


def numerical_range_hilbert(t, m=720):
    """Rotation algorithm: support points of W(T) at m equispaced angles.

    For each angle the top eigenvector of the Hermitian part of e^{i psi} T
    realizes the support function; the hull of the recorded Rayleigh
    quotients is an inner approximation whose gap shrinks like 1/m^2 for
    smooth boundaries.
    """
    tm = _as_square(t)
    if m < 8:
        raise ValueError("need at least 8 angles")
    try:
        pts, vecs = _kernels.rotation_support(tm, int(m))
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"rotation sweep failed: {exc}") from exc
    sample = NumericalRangeSample(points=pts, method=ROTATION_BOUNDARY,
                                  hull=convex_hull(pts), support_vectors=vecs)
    if spectral_norm(tm) <= 1.0 + 1e-10:
        if np.abs(pts).max() > 1.0 + 1e-8:
            raise ValueError("contraction produced numerical-range points outside the disk")
    return sample


def numerical_range_lp(t, space, count=1000, seed=0):
    """Inner sampling of W(T) on l^p via the duality map (bilinear pairing)."""
    tm = _as_square(t)
    if count < 100:
        raise ValueError("need at least 100 samples")
    if tm.shape[0] != space.dim:
        raise ValueError("dimension mismatch")
    rng = np.random.default_rng(seed)
    pts = np.empty(count, dtype=np.complex128)
    for i in range(count):
        x = random_unit(space.dim, rng, p=space.p)
        pts[i] = np.dot(tm @ x, duality_map(space, x))
    return NumericalRangeSample(points=pts, method=DUALITY_SAMPLING,
                                hull=convex_hull(pts))


@dataclass(frozen=True)
class StolzFit:
    """Verified constants for 1 - |lambda| >= c |lambda - 1|^alpha near 1."""

    alpha: float
    c: float
    eps: float
    status: str  # "ok" | "failed" | "vacuous"
    witness: complex = None
    per_alpha: tuple = ()


def _sample_points(sample):
    if isinstance(sample, NumericalRangeSample):
        # the numerical range is the full hull; edge interiors carry the
        # near-1 geometry that the finitely many support points can miss
        return sample.boundary_points()
    return np.asarray(sample, dtype=np.complex128).reshape(-1)


def stolz_fit(sample, eps=0.5, alpha_grid=None, c_min=1e-3):
    """Smallest grid alpha whose margin constant clears c_min.

    For each alpha, c(alpha) = min over sampled points with
    0 < |lambda - 1| <= eps of (1 - |lambda|) / |lambda - 1|^alpha; a
    NumericalRangeSample is assessed along its densified hull boundary.
    With no points in the window the fit is vacuous by construction.
    """
    pts = _sample_points(sample)
    if np.abs(pts).max() > 1.0 + 1e-8:
        raise ValueError("points must lie in the closed unit disk (+1e-8)")
    if alpha_grid is None:
        alpha_grid = np.arange(1.0, 8.0 + 1e-9, 0.25)
    dist1 = np.abs(pts - 1.0)
    # the contact point itself is excluded; below 1e-12 separation a point
    # is indistinguishable from 1 at working precision
    window = (dist1 > 1e-12) & (dist1 <= eps)
    if not window.any():
        return StolzFit(alpha=float(alpha_grid[0]), c=np.inf, eps=eps,
                        status="vacuous")
    lam = pts[window]
    gap = 1.0 - np.abs(lam)
    d1 = np.abs(lam - 1.0)
    per_alpha = []
    for alpha in alpha_grid:
        ratios = gap / d1 ** alpha
        j = int(np.argmin(ratios))
        per_alpha.append((float(alpha), float(ratios[j]), complex(lam[j])))
    for alpha, c, witness in per_alpha:
        if c >= c_min:
            return StolzFit(alpha=alpha, c=c, eps=eps, status="ok",
                            witness=witness, per_alpha=tuple(per_alpha))
    alpha, c, witness = max(per_alpha, key=lambda t: t[1])
    return StolzFit(alpha=alpha, c=c, eps=eps, status="failed",
                    witness=witness, per_alpha=tuple(per_alpha))


@dataclass(frozen=True)
class HullBoundReport:
    """Check of ||R(e^{i theta},T)|| <= (1 + slack) / dist(e^{i theta}, hull)."""

    passed: bool
    worst_ratio: float
    worst_theta: float
    slack: float
    checked: int
    skipped: tuple = ()


def hull_distance_bound_check(t, sample, thetas=None, slack=None):
    tm = _as_square(t)
    if sample.method != ROTATION_BOUNDARY:
        raise ValueError("a rotation-boundary (Hilbert) sample is required")
    if spectral_norm(tm) > 1.0 + 1e-10:
        raise ValueError("a contraction is required")
    spec, ok = spectrum_check(tm)
    if not ok:
        raise ValueError("spectrum meets the unit circle away from 1")
    if thetas is None:
        thetas = np.geomspace(1e-4, np.pi, 400)
    if slack is None:
        slack = 1e-6 + 1.0 / len(sample.points) ** 2
    d = tm.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    worst, worst_theta = -np.inf, np.nan
    skipped, checked = [], 0
    for th in np.asarray(thetas, dtype=np.float64):
        lam = np.exp(1j * th)
        dist = hull_distance(lam, sample.hull)
        if dist < 1e-12 or spec.distance_to(lam) < 1e-12:
            skipped.append(float(th))
            continue
        rnorm = spectral_norm(solve_linear(lam * eye - tm, eye))
        ratio = rnorm * dist
        checked += 1
        if ratio > worst:
            worst, worst_theta = ratio, float(th)
    return HullBoundReport(passed=bool(worst <= 1.0 + slack),
                           worst_ratio=float(worst), worst_theta=worst_theta,
                           slack=float(slack), checked=checked,
                           skipped=tuple(skipped))


@dataclass(frozen=True)
class RittDiagnostic:
    """Sequence n ||T^n (I - T)|| and its boundedness verdict."""

    values: np.ndarray
    sup: float
    consistent: bool


def ritt_diagnostic(t, n=1000):
    """Ritt-consistent when the last quartile's max stays within 5% of the
    first quartile's max (bounded, non-growing sequence)."""
    tm = _as_square(t)
    if n < 10:
        raise ValueError("need N >= 10")
    vals = _kernels.ritt_curve(tm, int(n))
    head = vals[: max(n // 4, 1)].max()
    tail = vals[3 * n // 4:].max()
    consistent = bool(tail <= head * 1.05 + 1e-14)
    return RittDiagnostic(values=vals, sup=float(vals.max()),
                          consistent=consistent)


@dataclass(frozen=True)
class ZnBetaResult:
    """s_n = sup |lambda^n (1 - lambda)| over Omega and its decay exponent."""

    s: np.ndarray
    beta_hat: float
    implied_alpha: float
    r_squared: float
    fit_window: tuple


def zn_beta(omega, n):
    """Power-decay profile of sup |lambda^n (1 - lambda)| over a point set.

    ``omega`` is a finite point set or a NumericalRangeSample, in which
    case the densified hull boundary is used (the max of an analytic
    function's modulus over a convex region sits on the boundary curve).
    """
    if isinstance(omega, NumericalRangeSample):
        pts = omega.boundary_points()
    else:
        pts = np.asarray(omega, dtype=np.complex128).reshape(-1)
    if pts.size == 0:
        raise ValueError("empty point set")
    if n < 10:
        raise ValueError("need N >= 10")
    s = _kernels.zn_sup_curve(np.ascontiguousarray(pts), int(n))
    lo = max(n // 2, 1)
    ns = np.arange(lo, n + 1, dtype=np.float64)
    sv = s[lo - 1: n]
    pos = sv > 0
    if pos.sum() >= 2:
        slope, _, r2 = _loglog_fit(ns[pos], sv[pos])
        beta = -slope
    else:
        beta, r2 = np.inf, 1.0
    implied = 1.0 / beta if beta > 0 else np.inf
    return ZnBetaResult(s=s, beta_hat=float(beta), implied_alpha=float(implied),
                        r_squared=float(r2), fit_window=(lo, n))


@dataclass(frozen=True)
class KSpectralReport:
    """||T^n (I-T)|| <= (1 + sqrt 2) s_n + tol, s_n from the sampled range."""

    passed: bool
    max_excess: float
    first_failure: int
    lhs: np.ndarray
    s: np.ndarray
    beta_hat: float
    k: float = K_SPECTRAL_CONSTANT


def k_spectral_check(t, sample, n=200, tol=1e-8):
    tm = _as_square(t)
    if sample.method != ROTATION_BOUNDARY:
        raise ValueError("a rotation-boundary (Hilbert) sample is required")
    if spectral_norm(tm) > 1.0 + 1e-10:
        raise ValueError("a contraction is required")
    lhs = _kernels.ritt_curve(tm, int(n)) / np.arange(1, n + 1)
    zres = zn_beta(sample, n)
    excess = lhs - (K_SPECTRAL_CONSTANT * zres.s + tol)
    bad = np.nonzero(excess > 0)[0]
    return KSpectralReport(passed=bad.size == 0,
                           max_excess=float(excess.max()),
                           first_failure=int(bad[0] + 1) if bad.size else -1,
                           lhs=lhs, s=zres.s, beta_hat=zres.beta_hat)
