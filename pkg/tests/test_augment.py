import collections

import numpy as np
import pytest

from layer_0 import SymmetryError
from layer_5 import (
    CubeSymmetry,
    all_symmetries,
    apply,
    apply_array,
    compose,
    inverse,
    random_symmetry,
    verify_continuity,
)


def _same(a, b):
    return all(np.array_equal(x.values, y.values) for x, y in zip(a.channels, b.channels))


class TestGroup:
    def test_sizes(self):
        full = all_symmetries()
        assert len(full) == 48 and len(set(full)) == 48
        rotations = all_symmetries(rotations_only=True)
        assert len(rotations) == 24
        assert all(g.det == 1 for g in rotations)
        assert full[0].is_identity and rotations[0].is_identity

    def test_inverse_and_closure(self):
        elements = set(all_symmetries())
        for g in elements:
            assert compose(g, inverse(g)).is_identity
            assert compose(inverse(g), g).is_identity
        for g in list(elements)[:12]:
            for h in elements:
                assert compose(h, g) in elements

    def test_rotations_closed(self):
        rotations = set(all_symmetries(rotations_only=True))
        for g in rotations:
            for h in rotations:
                assert compose(h, g) in rotations

    def test_bad_elements(self):
        with pytest.raises(SymmetryError):
            CubeSymmetry((0, 0, 1))
        with pytest.raises(SymmetryError):
            CubeSymmetry(signs=(1, 2, 1))

    def test_label(self):
        assert CubeSymmetry((1, 0, 2), (-1, 1, 1)).label() == "-y +x +z"


class TestApply:
    def test_identity(self, make_state):
        s = make_state((6, 6, 6))
        assert _same(apply(s, CubeSymmetry()), s)

    def test_flip_x(self, make_state):
        s = make_state((6, 6, 6))
        out = apply(s, CubeSymmetry(signs=(-1, 1, 1)))
        np.testing.assert_array_equal(out.rho.values, s.rho.values[::-1])
        np.testing.assert_array_equal(out.u[0].values, -s.u[0].values[::-1])
        np.testing.assert_array_equal(out.u[1].values, s.u[1].values[::-1])

    def test_axis_swap(self, make_state):
        s = make_state((5, 5, 5))
        out = apply(s, CubeSymmetry((1, 0, 2)))
        np.testing.assert_array_equal(out.rho.values, np.transpose(s.rho.values, (1, 0, 2)))
        np.testing.assert_array_equal(out.u[0].values, np.transpose(s.u[1].values, (1, 0, 2)))

    def test_inverse_round_trip_is_exact(self, make_state):
        s = make_state((6, 6, 6))
        for g in all_symmetries():
            assert _same(apply(apply(s, g), inverse(g)), s)

    def test_action_is_homomorphism(self, make_state, rng):
        s = make_state((5, 5, 5))
        elements = all_symmetries()
        for _ in range(20):
            g, h = (elements[i] for i in rng.integers(48, size=2))
            assert _same(apply(s, compose(h, g)), apply(apply(s, g), h))

    def test_array_matches_state_density(self, make_state):
        s = make_state((4, 4, 4))
        g = CubeSymmetry((2, 0, 1), (1, -1, -1))
        np.testing.assert_array_equal(apply(s, g).rho.values, apply_array(s.rho.values, g))

    def test_non_cubic(self, make_state):
        s = make_state((6, 6, 8))
        with pytest.raises(SymmetryError):
            apply(s, CubeSymmetry((1, 0, 2)))
        flipped = apply(s, CubeSymmetry(signs=(1, -1, -1)))
        assert flipped.grid.shape == (6, 6, 8)


class TestContinuity:
    def test_all_elements_preserve_continuity(self, seeded_states):
        elements = all_symmetries()
        for s in seeded_states(20, (24, 24, 24)):
            assert max(verify_continuity(s, g) for g in elements) < 1e-10

    def test_wrong_sign_is_detected(self, make_state):
        s = make_state((12, 12, 12))
        g = CubeSymmetry(signs=(-1, 1, 1))
        good = apply(s, g)
        bad = good.__class__(good.rho, (good.u[0].with_values(-good.u[0].values), good.u[1], good.u[2]))
        assert verify_continuity(s, g, bad) > 1e-3


class TestRandomSymmetry:
    def test_seeded_draw_repeats(self):
        assert random_symmetry(7) == random_symmetry(7)
        assert random_symmetry(3, rotations_only=True).det == 1

    def test_uniform(self):
        rng = np.random.default_rng(2024)
        counts = collections.Counter(random_symmetry(rng) for _ in range(48_000))
        assert len(counts) == 48
        assert all(850 <= c <= 1150 for c in counts.values())
