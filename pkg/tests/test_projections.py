import numpy as np
import pytest

from pdlab.linalg import operator_pnorm, spectral_norm
from pdlab.projections import (ProjectionOp, is_type_u, lp_partition_projection,
                               oblique_projection, orth_projection,
                               type_d_radius)
from pdlab.spaces import LpSpace, Subspace, complement, random_subspace


def line(*coords):
    return Subspace.from_spanning([np.array(coords, dtype=complex)])


class TestOrthProjection:
    def test_full_space(self):
        p = orth_projection(Subspace.full(3))
        np.testing.assert_allclose(p.matrix, np.eye(3), atol=1e-14)

    def test_coordinate_line(self):
        p = orth_projection(line(1, 0))
        np.testing.assert_allclose(p.matrix, np.diag([1.0, 0.0]), atol=1e-14)

    def test_diagonal_line(self):
        p = orth_projection(line(1 / np.sqrt(2), 1 / np.sqrt(2)))
        np.testing.assert_allclose(p.matrix, np.full((2, 2), 0.5), atol=1e-12)

    def test_zero_subspace(self):
        p = orth_projection(Subspace.zero(2))
        np.testing.assert_allclose(p.matrix, np.zeros((2, 2)))

    def test_range_residual(self, rng):
        s = random_subspace(6, 3, rng)
        p = orth_projection(s)
        np.testing.assert_allclose(p.matrix @ s.basis, s.basis, atol=1e-10)


class TestObliqueProjection:
    def test_orthogonal_pair(self):
        p = oblique_projection(line(1, 0), line(0, 1))
        np.testing.assert_allclose(p.matrix, np.diag([1.0, 0.0]), atol=1e-12)

    def test_slanted_kernel(self):
        p = oblique_projection(line(1, 0), line(1 / np.sqrt(2), 1 / np.sqrt(2)))
        np.testing.assert_allclose(p.matrix, [[1.0, -1.0], [0.0, 0.0]], atol=1e-12)
        assert p.condition_number > 1.0

    def test_acts_correctly(self, rng):
        r = random_subspace(5, 2, rng)
        k = complement(r)
        p = oblique_projection(r, k)
        x = r.basis @ rng.standard_normal(2)
        np.testing.assert_allclose(p.matrix @ x, x,
                                   atol=1e-8 * p.condition_number)
        y = k.basis @ rng.standard_normal(3)
        assert np.linalg.norm(p.matrix @ y) <= 1e-8 * p.condition_number

    def test_overlapping_pair_rejected(self):
        with pytest.raises(ValueError):
            oblique_projection(line(1, 0), line(1, 0))


class TestTypeD:
    def test_orthogonal_projection_gets_half(self):
        p = orth_projection(line(1, 0))
        assert type_d_radius(p) == pytest.approx(0.5)

    def test_identity(self):
        assert type_d_radius(np.eye(3, dtype=complex)) == pytest.approx(0.5)

    def test_wild_oblique_rejected(self):
        r = type_d_radius(np.array([[1.0, 10.0], [0.0, 0.0]], dtype=complex))
        assert r is None

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            type_d_radius(np.zeros((2, 2), dtype=complex))

    def test_ternary_branch_off_center(self):
        # normal contraction whose admissible radii exclude 1/2
        t = np.diag([0.9j, 0.2]).astype(complex)
        r = type_d_radius(t)
        assert r is not None and r < 0.1
        assert spectral_norm(t - r * np.eye(2)) <= 1.0 - r + 1e-8


class TestTypeU:
    def test_orthogonal_projection(self, rng):
        s = random_subspace(5, 2, rng)
        assert is_type_u(orth_projection(s))

    def test_identity(self):
        assert is_type_u(np.eye(4, dtype=complex))

    def test_oblique_fails(self):
        assert not is_type_u(np.array([[1.0, -1.0], [0.0, 0.0]], dtype=complex))

    def test_type_u_implies_type_d_at_half(self, rng):
        s = random_subspace(4, 2, rng)
        p = orth_projection(s)
        assert is_type_u(p)
        assert type_d_radius(p) == pytest.approx(0.5)


class TestSemigroup:
    def test_products_and_convex_combinations_stay_type_d(self, rng):
        # contractions with ||Q - rI|| <= 1 - r form a convex multiplicative
        # semigroup; verify on orthogonal projection products (the search
        # itself applies to any contraction, not only idempotents)
        for _ in range(5):
            a = orth_projection(random_subspace(5, int(rng.integers(1, 4)), rng))
            b = orth_projection(random_subspace(5, int(rng.integers(1, 4)), rng))
            assert type_d_radius(a) is not None
            assert type_d_radius(b) is not None
            prod = a.matrix @ b.matrix
            r = type_d_radius(prod)
            assert r is not None
            assert spectral_norm(prod - r * np.eye(5)) <= 1.0 - r + 1e-8
            mix = 0.5 * prod + 0.5 * a.matrix
            assert type_d_radius(mix) is not None


class TestProjectionOpInvariants:
    def test_idempotency_required(self):
        with pytest.raises(ValueError):
            ProjectionOp(matrix=np.array([[0.5, 0], [0, 0.5]], dtype=complex),
                         kind="oblique", range_dim=1)

    def test_nonzero_projection_norm_at_least_one(self, rng):
        for _ in range(5):
            s = random_subspace(5, int(rng.integers(1, 5)), rng)
            p = orth_projection(s)
            assert spectral_norm(p.matrix) >= 1.0 - 1e-10


class TestLpPartitionProjection:
    def test_coordinate_projection(self):
        space = LpSpace(dim=4, p=3.0)
        e1 = np.array([1.0, 0, 0, 0])
        e3 = np.array([0, 0, 1.0, 0])
        proj = lp_partition_projection(space, [(0,), (2,)], [e1, e3])
        np.testing.assert_allclose(proj.matrix.real, np.diag([1.0, 0, 1.0, 0]),
                                   atol=1e-14)
        assert proj.norm_bound <= 1.0 + 1e-6
        assert proj.norm_method == "exact-small"

    def test_rank_one_block_p3(self):
        space = LpSpace(dim=2, p=3.0)
        u = np.array([1.0, 1.0]) / 2 ** (1 / 3)
        proj = lp_partition_projection(space, [(0, 1)], [u])
        np.testing.assert_allclose(proj.matrix @ np.ones(2), np.ones(2), atol=1e-12)
        assert proj.norm_bound == pytest.approx(1.0, abs=1e-3)
        est = operator_pnorm(proj.matrix, 3.0, mode="estimate")
        assert est <= 1.0 + 1e-6

    def test_empty_blocks_zero_operator(self):
        space = LpSpace(dim=3, p=1.5)
        proj = lp_partition_projection(space, [], [])
        np.testing.assert_allclose(proj.matrix, np.zeros((3, 3)))

    def test_overlap_rejected(self):
        space = LpSpace(dim=3, p=3.0)
        e = np.eye(3)
        with pytest.raises(ValueError):
            lp_partition_projection(space, [(0, 1), (1, 2)], [e[0], e[2]])

    def test_non_unit_rejected(self):
        space = LpSpace(dim=2, p=3.0)
        with pytest.raises(ValueError):
            lp_partition_projection(space, [(0, 1)], [np.array([1.0, 1.0])])

    def test_support_outside_block_rejected(self):
        space = LpSpace(dim=3, p=3.0)
        u = np.array([1.0, 0.0, 0.0])
        with pytest.raises(ValueError):
            lp_partition_projection(space, [(1, 2)], [u])

    def test_idempotent_and_norm_bound(self, rng):
        space = LpSpace(dim=6, p=2.5)
        u1 = np.zeros(6)
        u1[:3] = rng.standard_normal(3)
        u1 /= (np.abs(u1) ** 2.5).sum() ** (1 / 2.5)
        u2 = np.zeros(6)
        u2[4:] = rng.standard_normal(2)
        u2 /= (np.abs(u2) ** 2.5).sum() ** (1 / 2.5)
        proj = lp_partition_projection(space, [(0, 1, 2), (4, 5)], [u1, u2])
        assert spectral_norm(proj.matrix @ proj.matrix - proj.matrix) <= 1e-10
        assert proj.norm_bound <= 1.0 + 1e-6
