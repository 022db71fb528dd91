"""Numba and numpy kernel paths must agree."""

import numpy as np
import pytest

from pdlab import _kernels

pytestmark = pytest.mark.skipif(
    _kernels.jit_impls() is None,
    reason="numba backend disabled; nothing to compare against",
)


@pytest.fixture(scope="module")
def both():
    return _kernels.jit_impls(), _kernels.NUMPY_IMPLS


@pytest.fixture(scope="module")
def sample_operator():
    rng = np.random.default_rng(321)
    g = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    return np.ascontiguousarray(g / (np.linalg.norm(g, 2) * 1.1))


def test_power_gap_curve(both, sample_operator):
    jit, np_ = both
    p = np.zeros((6, 6), dtype=np.complex128)
    a = jit["power_gap_curve"](sample_operator, p, 60)
    b = np_["power_gap_curve"](sample_operator, p, 60)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


def test_orbit_residuals(both, sample_operator):
    jit, np_ = both
    x = np.ones(6, dtype=np.complex128)
    limit = np.zeros(6, dtype=np.complex128)
    for p in (2.0, 3.0):
        a = jit["orbit_residuals"](sample_operator, x, limit, 40, p)
        b = np_["orbit_residuals"](sample_operator, x, limit, 40, p)
        np.testing.assert_allclose(a, b, rtol=1e-12)


def test_ritt_curve(both, sample_operator):
    jit, np_ = both
    a = jit["ritt_curve"](sample_operator, 50)
    b = np_["ritt_curve"](sample_operator, 50)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_zn_sup_curve(both):
    jit, np_ = both
    rng = np.random.default_rng(4)
    lam = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    lam = lam / (np.abs(lam).max() * 1.01)
    a = jit["zn_sup_curve"](lam, 80)
    b = np_["zn_sup_curve"](lam, 80)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_pnorm_ascent(both, sample_operator):
    jit, np_ = both
    starts = np.eye(6, dtype=np.complex128)
    a = jit["pnorm_ascent"](sample_operator, 3.0, starts, 200, 1e-14)
    b = np_["pnorm_ascent"](sample_operator, 3.0, starts, 200, 1e-14)
    assert a == pytest.approx(b, rel=1e-9)


def test_rotation_support(both, sample_operator):
    jit, np_ = both
    pa, _ = jit["rotation_support"](sample_operator, 64)
    pb, _ = np_["rotation_support"](sample_operator, 64)
    np.testing.assert_allclose(pa, pb, atol=1e-12)


def test_halperin_ratios(both, sample_operator):
    jit, np_ = both
    rng = np.random.default_rng(9)
    xs = rng.standard_normal((6, 100)) + 1j * rng.standard_normal((6, 100))
    xs /= (np.abs(xs) ** 2).sum(axis=0) ** 0.5
    xs = np.ascontiguousarray(xs)
    a = jit["halperin_ratios"](sample_operator, xs, 2.0, 0.5)
    b = np_["halperin_ratios"](sample_operator, xs, 2.0, 0.5)
    np.testing.assert_allclose(a, b, rtol=1e-11)


def test_backend_name_matches_env():
    assert _kernels.BACKEND in ("numba", "numpy")
