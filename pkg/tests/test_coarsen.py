import numpy as np
import pytest

from layer_0 import FilterError, FlowState, GridSpec, ScalarField3D, gradient
from layer_1 import (
    FilterSpec,
    block_mean,
    block_replicate,
    box_filter,
    conservation_report,
    favre_filter,
    sgs_divergence,
    sgs_stress,
    upsample_nearest_state,
)


class TestFilterSpec:
    @pytest.mark.parametrize("factor", [0, 1, 3, 64])
    def test_invalid_factor(self, factor):
        with pytest.raises(FilterError):
            FilterSpec(factor)

    def test_non_divisible_grid(self):
        with pytest.raises(FilterError):
            FilterSpec(4).coarse_grid(GridSpec(8, 8, 10))

    def test_coarse_grid(self):
        g = FilterSpec(8).coarse_grid(GridSpec(128, 64, 32, dx=0.5))
        assert g.shape == (16, 8, 4)
        assert g.dx == 4.0


class TestBoxFilter:
    def test_block_of_flat_indices(self):
        assert block_mean(np.arange(8.0).reshape(2, 2, 2), 2).item() == 3.5

    def test_constant(self):
        f = ScalarField3D(GridSpec.cube(8), np.full(512, 4.25))
        out = box_filter(f, FilterSpec(4))
        assert out.grid.shape == (2, 2, 2)
        assert np.all(out.values == 4.25)

    def test_mean_preserved(self, rng):
        f = ScalarField3D(GridSpec.cube(16), rng.standard_normal(16 ** 3))
        out = box_filter(f, FilterSpec(4))
        assert out.values.mean() == pytest.approx(f.values.mean(), abs=1e-12)


class TestFavre:
    def test_uniform_density_is_box(self, rng):
        u = rng.standard_normal((3, 8, 8, 8))
        state = FlowState.from_arrays(np.full((8, 8, 8), 1.3), *u)
        coarse = favre_filter(state, FilterSpec(2))
        for k in range(3):
            np.testing.assert_allclose(coarse.u[k].values, block_mean(u[k], 2), rtol=1e-12, atol=1e-14)

    def test_weighted_block(self):
        block = np.array([1, 1, 1, 1, 3, 3, 3, 3], dtype=float).reshape(2, 2, 2)
        rho = np.tile(block, (2, 2, 2))
        state = FlowState.from_arrays(rho, rho, rho, rho)
        coarse = favre_filter(state, FilterSpec(2))
        np.testing.assert_allclose(coarse.rho.values, 2.0)
        np.testing.assert_allclose(coarse.u[0].values, 2.5)

    @pytest.mark.parametrize("factor", [2, 4, 8])
    def test_conservation(self, seeded_states, factor):
        for fine in seeded_states(100, (32, 32, 32)):
            coarse = favre_filter(fine, FilterSpec(factor))
            report = conservation_report(fine, coarse, FilterSpec(factor))
            assert set(report) == {"mass", "momentum_1", "momentum_2", "momentum_3"}
            assert max(report.values()) < 1e-10

    def test_idempotent_on_block_constant_state(self, make_state):
        spec = FilterSpec(4)
        coarse = favre_filter(make_state((16, 16, 16)), spec)
        again = favre_filter(upsample_nearest_state(coarse, 4), spec)
        for a, b in zip(again.channels, coarse.channels):
            np.testing.assert_allclose(a.values, b.values, rtol=1e-12, atol=1e-14)

    def test_normalized_state_refused(self):
        z = np.zeros((4, 4, 4))
        with pytest.raises(FilterError):
            favre_filter(FlowState.from_arrays(z, z, z, z, normalized=True), FilterSpec(2))


class TestSgs:
    def test_block_constant_velocity_has_no_stress(self, rng):
        u = [np.repeat(np.repeat(np.repeat(rng.standard_normal((2, 2, 2)), 4, 0), 4, 1), 4, 2) for _ in range(3)]
        state = FlowState.from_arrays(1.0 + rng.random((8, 8, 8)), *u)
        tau = sgs_stress(state, FilterSpec(4))
        for comp in tau.as_tuple():
            np.testing.assert_allclose(comp.values, 0.0, atol=1e-12)

    def test_variance_identity(self):
        checker = np.indices((4, 4, 4)).sum(axis=0) % 2 * 2.0 - 1.0
        z = np.zeros((4, 4, 4))
        tau = sgs_stress(FlowState.from_arrays(np.ones((4, 4, 4)), checker, z, z), FilterSpec(2))
        np.testing.assert_allclose(tau[1, 1].values, 1.0)
        for ij in [(2, 2), (3, 3), (1, 2), (1, 3), (2, 3)]:
            np.testing.assert_allclose(tau[ij].values, 0.0, atol=1e-15)
        assert tau[2, 1] is tau[1, 2]

    @pytest.mark.parametrize("factor", [2, 4, 8])
    def test_diagonal_nonnegative(self, seeded_states, factor):
        for fine in seeded_states(100, (32, 32, 32)):
            tau = sgs_stress(fine, FilterSpec(factor))
            assert min(tau[i, i].values.min() for i in (1, 2, 3)) >= -1e-12

    def test_divergence_matches_gradient_composition(self, make_state):
        fine = make_state((24, 24, 24), dx=0.1)
        spec = FilterSpec(4)
        tau = sgs_stress(fine, spec)
        div = sgs_divergence(fine, spec)
        assert div[0].grid.dx == pytest.approx(0.4)
        for k in (1, 2, 3):
            expected = sum(gradient(tau[k, j], j).values for j in (1, 2, 3))
            np.testing.assert_allclose(div[k - 1].values, expected, rtol=0, atol=1e-10)

    def test_uniform_stress_has_zero_divergence(self):
        ones = np.ones((8, 8, 8))
        div = sgs_divergence(FlowState.from_arrays(ones, 2 * ones, ones, -ones), FilterSpec(2))
        for d in div:
            np.testing.assert_allclose(d.values, 0.0, atol=1e-12)


class TestNearestBaseline:
    def test_block_replicate(self):
        f = ScalarField3D(GridSpec.cube(2, dx=2.0), np.arange(8.0))
        up = block_replicate(f, 2)
        assert up.grid.shape == (4, 4, 4) and up.grid.dx == 1.0
        assert np.array_equal(block_mean(up.values, 2), f.values)

    def test_factor_too_small(self):
        with pytest.raises(FilterError):
            block_replicate(ScalarField3D(GridSpec.cube(2), np.zeros(8)), 1)
