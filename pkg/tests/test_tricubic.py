import itertools
import time

import numpy as np
import pytest

from layer_0 import DomainTooSmallError, FieldValidationError, FilterError, FlowState, GridSpec, ScalarField3D
from layer_3 import FlopsModel, build_coef_matrix, flops, interpolate_cell, upsample, upsample_state
from layer_3.tricubic import _axis_map, _stencil_index

OFFSETS = np.arange(-1, 3, dtype=float)


def _stencil(fn):
    X, Y, Z = np.meshgrid(OFFSETS, OFFSETS, OFFSETS, indexing="ij")
    return fn(X, Y, Z)


class TestCoefMatrix:
    def test_zero_count(self):
        coef = build_coef_matrix()
        assert coef.B8.shape == (64, 64)
        assert coef.n_zero == 2765
        assert coef.nnz == 64 * 64 - 2765

    def test_integer_and_invertible(self):
        coef = build_coef_matrix()
        assert coef.B8.dtype.kind == "i" and coef.A2_8.dtype.kind == "i"
        assert abs(np.linalg.det(coef.A1.astype(float))) > 0.5
        np.testing.assert_allclose(coef.A1 @ coef.B8, coef.A2_8, atol=1e-9)

    def test_sparse_matches_dense(self, rng):
        coef = build_coef_matrix()
        phi = rng.standard_normal((10, 64))
        np.testing.assert_allclose(coef.coefficients(phi, "sparse"), coef.coefficients(phi, "dense"), rtol=0, atol=1e-12)

    def test_unknown_mode(self):
        with pytest.raises(FieldValidationError):
            build_coef_matrix().coefficients(np.zeros(64), "fft")


class TestInterpolateCell:
    def test_constant(self):
        stencil = np.full((4, 4, 4), 2.5)
        for xyz in [(0, 0, 0), (0.3, 0.7, 0.1), (1, 1, 1)]:
            assert interpolate_cell(stencil, xyz) == pytest.approx(2.5, abs=1e-12)

    def test_corners_reproduced(self, rng):
        stencil = rng.standard_normal((4, 4, 4))
        for corner in itertools.product((0, 1), repeat=3):
            expected = stencil[corner[0] + 1, corner[1] + 1, corner[2] + 1]
            assert interpolate_cell(stencil, corner) == pytest.approx(expected, abs=1e-12)

    def test_quadratic_reproduced(self):
        fn = lambda x, y, z: x ** 2 + y ** 2 - 0.5 * z ** 2 + 0.25 * x * y + 1.0
        stencil = _stencil(fn)
        for xyz in [(0.5, 0.5, 0.5), (0.1, 0.9, 0.3), (0.77, 0.21, 0.64)]:
            exact = fn(*xyz)
            assert interpolate_cell(stencil, xyz) == pytest.approx(exact, rel=1e-8, abs=1e-10)

    def test_cubic_bounded_and_modes_agree(self):
        stencil = _stencil(lambda x, y, z: x ** 3)
        for xyz in [(0.25, 0.5, 0.5), (0.6, 0.1, 0.9)]:
            sparse = interpolate_cell(stencil, xyz, "sparse")
            dense = interpolate_cell(stencil, xyz, "dense")
            assert sparse == pytest.approx(dense, abs=1e-12)
            assert abs(sparse - xyz[0] ** 3) < 0.5

    def test_face_continuity(self, rng):
        data = rng.standard_normal((5, 4, 4))
        left, right = data[0:4], data[1:5]
        for y, z in rng.random((10, 2)):
            a = interpolate_cell(left, (1.0, y, z))
            b = interpolate_cell(right, (0.0, y, z))
            assert a == pytest.approx(b, abs=1e-10)

    def test_outside_cell(self):
        with pytest.raises(FieldValidationError):
            interpolate_cell(np.zeros((4, 4, 4)), (1.2, 0.5, 0.5))


class TestUpsample:
    def test_constant(self):
        f = ScalarField3D(GridSpec.cube(4, dx=8.0), np.full(64, -1.75))
        up = upsample(f, 8)
        assert up.grid.shape == (32, 32, 32) and up.grid.dx == 1.0
        np.testing.assert_allclose(up.values, -1.75, rtol=0, atol=1e-12)

    def test_shape_16_to_128(self):
        f = ScalarField3D(GridSpec.cube(16), np.zeros(16 ** 3))
        assert upsample(f, 8).grid.shape == (128, 128, 128)

    def test_linear_interior_exact(self):
        n, factor = 8, 4
        c = np.arange(n, dtype=float)
        X, Y, Z = np.meshgrid(c, c, c, indexing="ij")
        f = ScalarField3D(GridSpec.cube(n), 0.5 * X - 2.0 * Y + 0.25 * Z + 3.0)
        up = upsample(f, factor).values
        cell, t = _axis_map(n, factor)
        coord = cell + t
        inner = np.flatnonzero((cell >= 1) & (cell <= n - 3))
        FX, FY, FZ = np.meshgrid(coord, coord, coord, indexing="ij")
        expected = 0.5 * FX - 2.0 * FY + 0.25 * FZ + 3.0
        sl = np.ix_(inner, inner, inner)
        np.testing.assert_allclose(up[sl], expected[sl], rtol=1e-12, atol=1e-10)

    def test_matches_per_cell_sweep(self, rng):
        n, factor = 8, 2
        values = rng.standard_normal((n, n, n))
        up = upsample(ScalarField3D(GridSpec.cube(n), values), factor).values
        idx = _stencil_index(n)
        cell, t = _axis_map(n, factor)
        oracle = np.empty_like(up)
        for i, j, k in itertools.product(range(n * factor), repeat=3):
            stencil = values[np.ix_(idx[cell[i]], idx[cell[j]], idx[cell[k]])]
            oracle[i, j, k] = interpolate_cell(stencil, (t[i], t[j], t[k]), "dense")
        np.testing.assert_allclose(up, oracle, rtol=0, atol=1e-12)

    def test_dense_mode_agrees(self, rng):
        f = ScalarField3D(GridSpec(5, 6, 7), rng.standard_normal(5 * 6 * 7))
        np.testing.assert_allclose(upsample(f, 2, "sparse").values, upsample(f, 2, "dense").values, atol=1e-12)

    def test_errors(self):
        f = ScalarField3D(GridSpec.cube(4), np.zeros(64))
        with pytest.raises(FilterError):
            upsample(f, 1)
        with pytest.raises(DomainTooSmallError):
            upsample(ScalarField3D(GridSpec(3, 4, 4), np.zeros(48)), 2)

    def test_state(self, make_state):
        up = upsample_state(make_state((4, 4, 4)), 2)
        assert up.grid.shape == (8, 8, 8)
        assert len(up.channels) == 4

    def test_density_overshoot_is_clamped(self, caplog):
        rho = np.full((8, 4, 4), 1e-3)
        rho[:2] = 1.0
        zeros = np.zeros((8, 4, 4))
        coarse = FlowState.from_arrays(rho, zeros, zeros, zeros)
        raw = upsample(coarse.rho, 4).values
        assert raw[10, 0, 0] < 0.0
        with caplog.at_level("WARNING", logger="layer_3.tricubic"):
            fine = upsample_state(coarse, 4)
        assert fine.rho.values.min() == pytest.approx(1e-6, rel=1e-12)
        assert "clamped" in caplog.text
        kept = raw >= 1e-6
        np.testing.assert_array_equal(fine.rho.values[kept], raw[kept])

    def test_normalized_density_is_not_clamped(self):
        rho = np.full((4, 4, 4), -0.5)
        rho[:2] = 1.0
        coarse = FlowState.from_arrays(rho, rho, rho, rho, normalized=True)
        fine = upsample_state(coarse, 2)
        np.testing.assert_array_equal(fine.rho.values, upsample(coarse.rho, 2).values)


class TestFlops:
    def test_sparse_128(self):
        start = time.perf_counter()
        assert flops(GridSpec.cube(128), 4, "sparse") == 22_968_008_704
        assert time.perf_counter() - start < 1e-3

    def test_dense_128(self):
        assert flops(GridSpec.cube(128), 4, "dense") == 69_860_327_424

    def test_unit_scale(self):
        assert flops(1, 1, "sparse") == 2738
        assert FlopsModel("dense").per_voxel == 8328

    def test_unknown_mode(self):
        with pytest.raises(FieldValidationError):
            flops(8, 1, "gpu")
