"""The 48 lattice symmetries of the cube acting on (ρ, u) states.

An element g = (perm, signs) maps centred coordinates by x'_k = signs[k]·x_perm[k],
i.e. by the signed permutation matrix M with M[k, perm[k]] = signs[k]. Scalars
are moved by index gather (transpose, then flip the negated axes); velocity is
moved the same way and then rotated by M, so u'_k = signs[k]·u_perm[k].
With that, ∇·(ρu) of the transformed state is the transformed ∇·(ρu).
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple, Union

import numpy as np

from layer_0.errors import SymmetryError
from layer_0.fields import FlowState, ScalarField3D, divergence

logger = logging.getLogger(__name__)

IDENTITY_PERM = (0, 1, 2)


@dataclass(frozen=True)
class CubeSymmetry:
    perm: Tuple[int, int, int] = IDENTITY_PERM
    signs: Tuple[int, int, int] = (1, 1, 1)

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        signs = tuple(int(s) for s in self.signs)
        if sorted(perm) != [0, 1, 2]:
            raise SymmetryError(f"perm must be a permutation of (0, 1, 2), got {self.perm}")
        if len(signs) != 3 or any(s not in (1, -1) for s in signs):
            raise SymmetryError(f"signs must be three values in {{+1, -1}}, got {self.signs}")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)

    @property
    def matrix(self) -> np.ndarray:
        M = np.zeros((3, 3), dtype=np.int64)
        for k in range(3):
            M[k, self.perm[k]] = self.signs[k]
        return M

    @property
    def det(self) -> int:
        return int(round(np.linalg.det(self.matrix)))

    @property
    def is_identity(self) -> bool:
        return self.perm == IDENTITY_PERM and self.signs == (1, 1, 1)

    @property
    def permutes(self) -> bool:
        return self.perm != IDENTITY_PERM

    @classmethod
    def from_matrix(cls, M: np.ndarray) -> "CubeSymmetry":
        M = np.asarray(M)
        perm = tuple(int(np.flatnonzero(M[k])[0]) for k in range(3))
        signs = tuple(int(M[k, perm[k]]) for k in range(3))
        return cls(perm, signs)

    def label(self) -> str:
        axes = "xyz"
        return " ".join(("+" if s > 0 else "-") + axes[p] for p, s in zip(self.perm, self.signs))


def compose(h: CubeSymmetry, g: CubeSymmetry) -> CubeSymmetry:
    """h∘g: apply g first, then h."""
    return CubeSymmetry.from_matrix(h.matrix @ g.matrix)


def inverse(g: CubeSymmetry) -> CubeSymmetry:
    return CubeSymmetry.from_matrix(g.matrix.T)


@lru_cache(maxsize=2)
def _elements(rotations_only: bool) -> Tuple[CubeSymmetry, ...]:
    out = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            g = CubeSymmetry(perm, signs)
            if not rotations_only or g.det == 1:
                out.append(g)
    return tuple(out)


def all_symmetries(rotations_only: bool = False) -> List[CubeSymmetry]:
    """All 48 elements (24 proper rotations with ``rotations_only``), identity first."""
    return list(_elements(rotations_only))


def random_symmetry(seed: Union[int, np.random.Generator, None] = None, rotations_only: bool = False) -> CubeSymmetry:
    """Uniform draw; an int seed always gives the same element."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    elements = _elements(rotations_only)
    return elements[int(rng.integers(len(elements)))]


def apply_array(values: np.ndarray, g: CubeSymmetry) -> np.ndarray:
    """Index-transform a 3D array as a scalar field."""
    out = np.transpose(values, g.perm)
    flip = tuple(k for k in range(3) if g.signs[k] < 0)
    if flip:
        out = np.flip(out, axis=flip)
    return out


def _check_domain(state_shape: Tuple[int, int, int], g: CubeSymmetry) -> None:
    if g.permutes and len(set(state_shape)) != 1:
        raise SymmetryError(f"axis permutation {g.label()} needs a cubic domain, got {state_shape}")


def apply_scalar(f: ScalarField3D, g: CubeSymmetry) -> ScalarField3D:
    _check_domain(f.grid.shape, g)
    return f.with_values(apply_array(f.values, g))


def apply(state: FlowState, g: CubeSymmetry) -> FlowState:
    _check_domain(state.grid.shape, g)
    if g.is_identity:
        return state
    rho = state.rho.with_values(apply_array(state.rho.values, g))
    u = tuple(
        state.u[k].with_values(g.signs[k] * apply_array(state.u[g.perm[k]].values, g))
        for k in range(3)
    )
    return FlowState(rho, u, normalized=state.normalized)


def momentum_divergence(state: FlowState) -> ScalarField3D:
    rho = state.rho.values
    m = [ScalarField3D(state.grid, rho * c.values, "") for c in state.u]
    return divergence(*m)


def verify_continuity(state: FlowState, g: CubeSymmetry, transformed: Optional[FlowState] = None) -> float:
    """Max |g(∇·ρu) − ∇·(ρu)'| over interior voxels.

    ``transformed`` defaults to ``apply(state, g)``; passing another state
    checks that one instead.
    """
    expected = apply_array(momentum_divergence(state).values, g)
    moved = transformed if transformed is not None else apply(state, g)
    actual = momentum_divergence(moved).values
    if actual.shape != expected.shape:
        raise SymmetryError(f"transformed state has grid {actual.shape}, expected {expected.shape}")
    inner = (slice(1, -1),) * 3
    return float(np.max(np.abs(actual[inner] - expected[inner])))
