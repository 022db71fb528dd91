"""Hot inner loops: orbit sweeps, power-norm curves, p-norm ascent, sampling.

Every kernel exists twice: a loop form compiled with numba's @njit, and a
plain-numpy form. The numba path is the default; set ``PDLAB_NO_NUMBA=1``
(or uninstall numba) to select the numpy fallback. Both paths compute the
same quantities; ``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

import numpy as np


def numba_requested():
    flag = os.environ.get("PDLAB_NO_NUMBA", "").strip().lower()
    if flag in ("1", "true", "yes", "on"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


# ---------------------------------------------------------------------------
# Loop forms. These are written against the numba-supported numpy subset
# (explicit element loops, np.linalg.svd/eigh, contiguous matmul).
# ---------------------------------------------------------------------------

def _power_gap_curve_loop(t, p, n):
    d = t.shape[0]
    out = np.empty(n + 1)
    m = np.eye(d, dtype=np.complex128)
    for i in range(n + 1):
        s = np.linalg.svd(m - p)[1]
        out[i] = s[0]
        m = t @ m
    return out


def _orbit_residuals_loop(t, x, limit, n, p):
    out = np.empty(n + 1)
    v = x.copy()
    for i in range(n + 1):
        acc = 0.0
        for j in range(v.shape[0]):
            acc += abs(v[j] - limit[j]) ** p
        out[i] = acc ** (1.0 / p)
        v = t @ v
    return out


def _ritt_curve_loop(t, n):
    d = t.shape[0]
    a = np.eye(d, dtype=np.complex128) - t
    m = t.copy()
    out = np.empty(n)
    for i in range(1, n + 1):
        s = np.linalg.svd(m @ a)[1]
        out[i - 1] = i * s[0]
        m = t @ m
    return out


def _zn_sup_curve_loop(lam, n):
    # only magnitudes matter: |lam^n (1 - lam)| = |lam|^n |1 - lam|
    k = lam.shape[0]
    out = np.empty(n)
    alam = np.empty(k)
    w = np.empty(k)
    pw = np.empty(k)
    for j in range(k):
        alam[j] = abs(lam[j])
        w[j] = abs(1.0 - lam[j])
        pw[j] = alam[j]
    for i in range(n):
        best = 0.0
        for j in range(k):
            v = pw[j] * w[j]
            if v > best:
                best = v
        out[i] = best
        if i < n - 1:
            for j in range(k):
                pw[j] *= alam[j]
    return out


def _pnorm_ascent_loop(a, p, starts, iters, tol):
    # Dual-vector fixed-point iteration; the returned value is the best
    # lower bound over all start columns.
    q = p / (p - 1.0)
    ah = np.ascontiguousarray(a.conj().T)
    best = 0.0
    for c in range(starts.shape[1]):
        x = starts[:, c].copy()
        nx = 0.0
        for j in range(x.shape[0]):
            nx += abs(x[j]) ** p
        nx = nx ** (1.0 / p)
        if nx <= 1e-300:
            continue
        x = x / nx
        prev = 0.0
        for _ in range(iters):
            y = a @ x
            ny = 0.0
            for j in range(y.shape[0]):
                ny += abs(y[j]) ** p
            ny = ny ** (1.0 / p)
            if ny <= 1e-300:
                break
            if ny > best:
                best = ny
            if ny <= prev * (1.0 + tol):
                break
            prev = ny
            u = np.zeros_like(y)
            for j in range(y.shape[0]):
                m = abs(y[j])
                if m > 0.0:
                    u[j] = (y[j] / m) * m ** (p - 1.0)
            g = ah @ u
            z = np.zeros_like(g)
            nz = 0.0
            for j in range(g.shape[0]):
                m = abs(g[j])
                if m > 0.0:
                    z[j] = (g[j] / m) * m ** (q - 1.0)
            for j in range(z.shape[0]):
                nz += abs(z[j]) ** p
            nz = nz ** (1.0 / p)
            if nz <= 1e-300:
                break
            x = z / nz
    return best


def _rotation_support_loop(t, m_angles):
    d = t.shape[0]
    pts = np.empty(m_angles, dtype=np.complex128)
    vecs = np.empty((d, m_angles), dtype=np.complex128)
    for j in range(m_angles):
        psi = 2.0 * np.pi * j / m_angles
        a = np.exp(1j * psi) * t
        h = (a + a.conj().T) * 0.5
        w, v = np.linalg.eigh(h)
        x = v[:, d - 1].copy()
        tx = t @ x
        acc = 0.0 + 0.0j
        for i in range(d):
            acc += np.conj(x[i]) * tx[i]
        pts[j] = acc
        vecs[:, j] = x
    return pts, vecs


def _halperin_ratios_loop(t, xs, p, expo):
    d, k = xs.shape
    ys = t @ xs
    out = np.empty(k)
    for c in range(k):
        num = 0.0
        ny = 0.0
        if p == 2.0:  # dominant case: plain squared magnitudes, no pow
            for j in range(d):
                dz = xs[j, c] - ys[j, c]
                num += dz.real * dz.real + dz.imag * dz.imag
                y = ys[j, c]
                ny += y.real * y.real + y.imag * y.imag
            num = num ** 0.5
            ny = ny ** 0.5
        else:
            for j in range(d):
                num += abs(xs[j, c] - ys[j, c]) ** p
                ny += abs(ys[j, c]) ** p
            num = num ** (1.0 / p)
            ny = ny ** (1.0 / p)
        den = 1.0 - ny
        if den <= 1e-14:
            out[c] = -1.0
        else:
            out[c] = num / den ** expo
    return out


# ---------------------------------------------------------------------------
# Plain-numpy forms. Sequential sweeps keep their python loop but use
# vectorized per-step numpy ops; batch kernels vectorize over the batch.
# ---------------------------------------------------------------------------

def _power_gap_curve_np(t, p, n):
    d = t.shape[0]
    out = np.empty(n + 1)
    m = np.eye(d, dtype=np.complex128)
    for i in range(n + 1):
        out[i] = np.linalg.svd(m - p, compute_uv=False)[0]
        m = t @ m
    return out


def _orbit_residuals_np(t, x, limit, n, p):
    out = np.empty(n + 1)
    v = x.copy()
    for i in range(n + 1):
        out[i] = (np.abs(v - limit) ** p).sum() ** (1.0 / p)
        v = t @ v
    return out


def _ritt_curve_np(t, n):
    d = t.shape[0]
    a = np.eye(d, dtype=np.complex128) - t
    m = t.copy()
    out = np.empty(n)
    for i in range(1, n + 1):
        out[i - 1] = i * np.linalg.svd(m @ a, compute_uv=False)[0]
        m = t @ m
    return out


def _zn_sup_curve_np(lam, n):
    out = np.empty(n)
    w = np.abs(1.0 - lam)
    pw = np.abs(lam).copy()
    alam = np.abs(lam)
    for i in range(n):
        out[i] = (pw * w).max()
        if i < n - 1:
            pw *= alam
    return out


def _pnorm_ascent_np(a, p, starts, iters, tol):
    q = p / (p - 1.0)
    ah = a.conj().T

    def lp(v):
        return (np.abs(v) ** p).sum(axis=0) ** (1.0 / p)

    x = starts.astype(np.complex128).copy()
    nx = lp(x)
    keep = nx > 1e-300
    x = x[:, keep] / nx[keep]
    best = 0.0
    prev = np.zeros(x.shape[1])
    for _ in range(iters):
        if x.shape[1] == 0:
            break
        y = a @ x
        ny = lp(y)
        best = max(best, float(ny.max(initial=0.0)))
        active = (ny > 1e-300) & (ny > prev * (1.0 + tol))
        if not active.any():
            break
        x, y, ny = x[:, active], y[:, active], ny[active]
        prev = ny
        m = np.abs(y)
        u = np.where(m > 0, y * np.where(m > 0, m, 1.0) ** (p - 2.0), 0)
        g = ah @ u
        mg = np.abs(g)
        z = np.where(mg > 0, g * np.where(mg > 0, mg, 1.0) ** (q - 2.0), 0)
        nz = lp(z)
        ok = nz > 1e-300
        x, prev = z[:, ok] / nz[ok], prev[ok]
    return best


def _rotation_support_np(t, m_angles):
    d = t.shape[0]
    pts = np.empty(m_angles, dtype=np.complex128)
    vecs = np.empty((d, m_angles), dtype=np.complex128)
    for j in range(m_angles):
        a = np.exp(2j * np.pi * j / m_angles) * t
        h = (a + a.conj().T) * 0.5
        _, v = np.linalg.eigh(h)
        x = v[:, -1]
        pts[j] = x.conj() @ (t @ x)
        vecs[:, j] = x
    return pts, vecs


def _halperin_ratios_np(t, xs, p, expo):
    ys = t @ xs
    num = (np.abs(xs - ys) ** p).sum(axis=0) ** (1.0 / p)
    den = 1.0 - (np.abs(ys) ** p).sum(axis=0) ** (1.0 / p)
    return np.where(den > 1e-14, num / np.maximum(den, 1e-300) ** expo, -1.0)


NUMPY_IMPLS = {
    "power_gap_curve": _power_gap_curve_np,
    "orbit_residuals": _orbit_residuals_np,
    "ritt_curve": _ritt_curve_np,
    "zn_sup_curve": _zn_sup_curve_np,
    "pnorm_ascent": _pnorm_ascent_np,
    "rotation_support": _rotation_support_np,
    "halperin_ratios": _halperin_ratios_np,
}

_LOOP_IMPLS = {
    "power_gap_curve": _power_gap_curve_loop,
    "orbit_residuals": _orbit_residuals_loop,
    "ritt_curve": _ritt_curve_loop,
    "zn_sup_curve": _zn_sup_curve_loop,
    "pnorm_ascent": _pnorm_ascent_loop,
    "rotation_support": _rotation_support_loop,
    "halperin_ratios": _halperin_ratios_loop,
}


def jit_impls():
    """Compile and return the numba variants, or None if numba is off."""
    if not numba_requested():
        return None
    from numba import njit

    return {name: njit(cache=True)(fn) for name, fn in _LOOP_IMPLS.items()}


_JIT = jit_impls()
BACKEND = "numba" if _JIT is not None else "numpy"
_ACTIVE = _JIT if _JIT is not None else NUMPY_IMPLS

power_gap_curve = _ACTIVE["power_gap_curve"]
orbit_residuals = _ACTIVE["orbit_residuals"]
ritt_curve = _ACTIVE["ritt_curve"]
zn_sup_curve = _ACTIVE["zn_sup_curve"]
pnorm_ascent = _ACTIVE["pnorm_ascent"]
rotation_support = _ACTIVE["rotation_support"]
halperin_ratios = _ACTIVE["halperin_ratios"]


def warmup():
    """Trigger compilation of every active kernel on tiny inputs."""
    t = np.eye(2, dtype=np.complex128) * 0.5
    p = np.zeros((2, 2), dtype=np.complex128)
    x = np.ones(2, dtype=np.complex128)
    power_gap_curve(t, p, 1)
    orbit_residuals(t, x, np.zeros(2, dtype=np.complex128), 1, 2.0)
    ritt_curve(t, 2)
    zn_sup_curve(np.array([0.5 + 0j]), 2)
    pnorm_ascent(t, 3.0, x.reshape(2, 1), 4, 1e-12)
    rotation_support(t, 8)
    halperin_ratios(t, x.reshape(2, 1) / np.sqrt(2), 2.0, 0.5)
