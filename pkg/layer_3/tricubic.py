"""Finite-difference tricubic interpolation (Lekien & Marsden form) for
integer-factor upsampling, plus the FLOP model of applying it.

Per cell, the 64 coefficients of p(x,y,z) = Σ a_ijk x^i y^j z^k come from the
4×4×4 neighbourhood φ of the cell:  8·a = A1⁻¹ (8·A2) φ = B8 φ.
A1 maps coefficients to values/derivatives at the 8 corners; 8·A2 extracts
those values and central-difference derivatives from φ. Both are integer
matrices, so B8 is too.

Index conventions: a is flattened as 16·i + 4·j + k (powers of x, y, z) and
φ as 16·p + 4·q + r for stencil[p, q, r], with p = 0..3 the offsets -1..2
from the cell's lower corner.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix

from layer_0.errors import DomainTooSmallError, FieldValidationError, FilterError
from layer_0.fields import FlowState, GridSpec, ScalarField3D

logger = logging.getLogger(__name__)

Mode = Literal["sparse", "dense"]

# FLOPs per voxel and channel of applying B (63 adds + 84 muls evaluate p)
FLOPS_PER_VOXEL = {"sparse": 2738, "dense": 8328}


def _monomial_derivative(power: int, order: int, at: int) -> int:
    """d^order/dt^order of t^power evaluated at t = at (0 or 1)."""
    if order == 0:
        return 1 if power == 0 else at ** power
    return power * at ** (power - 1) if power >= 1 else 0


def _stencil_weights(corner: int, order: int) -> np.ndarray:
    """2× the 1D weights over offsets -1..2 giving the value (order 0) or the
    central-difference derivative (order 1) at node ``corner``."""
    w = np.zeros(4, dtype=np.int64)
    if order == 0:
        w[corner + 1] = 2
    else:
        w[corner + 2] = 1
        w[corner] = -1
    return w


@dataclass(frozen=True, eq=False)
class TricubicCoefMatrix:
    A1: np.ndarray
    A2_8: np.ndarray
    B8: np.ndarray

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.B8))

    @property
    def n_zero(self) -> int:
        return int(self.B8.size - self.nnz)

    @property
    def sparse(self) -> csr_matrix:
        return csr_matrix(self.B8.astype(np.float64))

    def coefficients(self, phi: np.ndarray, mode: Mode = "sparse") -> np.ndarray:
        """Polynomial coefficients for one or many flattened stencils.

        ``phi`` is (64,) or (n_cells, 64); returns the same shape.
        """
        phi = np.asarray(phi, dtype=np.float64)
        flat = phi.reshape(-1, 64)
        if mode == "sparse":
            alpha = np.asarray(self.sparse @ flat.T).T
        elif mode == "dense":
            alpha = flat @ self.B8.astype(np.float64).T
        else:
            raise FieldValidationError(f"unknown mode {mode!r}, expected 'sparse' or 'dense'")
        return (alpha / 8.0).reshape(phi.shape)


@lru_cache(maxsize=1)
def build_coef_matrix() -> TricubicCoefMatrix:
    corners = list(itertools.product((0, 1), repeat=3))
    orders = list(itertools.product((0, 1), repeat=3))
    powers = list(itertools.product(range(4), repeat=3))
    A1 = np.zeros((64, 64), dtype=np.int64)
    A2_8 = np.zeros((64, 64), dtype=np.int64)
    row = 0
    for order in orders:
        for corner in corners:
            for col, pw in enumerate(powers):
                A1[row, col] = np.prod([_monomial_derivative(pw[a], order[a], corner[a]) for a in range(3)])
            wx, wy, wz = (_stencil_weights(corner[a], order[a]) for a in range(3))
            A2_8[row] = np.einsum("p,q,r->pqr", wx, wy, wz).reshape(64)
            row += 1
    B8 = np.rint(np.linalg.solve(A1.astype(np.float64), A2_8.astype(np.float64))).astype(np.int64)
    for arr in (A1, A2_8, B8):
        arr.flags.writeable = False
    coef = TricubicCoefMatrix(A1, A2_8, B8)
    logger.debug("tricubic B8: %d nonzero, %d zero entries", coef.nnz, coef.n_zero)
    return coef


def _powers(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    return np.stack([np.ones_like(t), t, t * t, t * t * t], axis=-1)


def interpolate_cell(stencil: np.ndarray, xyz: Sequence[float], mode: Mode = "sparse") -> float:
    """Evaluate the tricubic interpolant of one 4×4×4 stencil at unit-cell coordinates."""
    stencil = np.asarray(stencil, dtype=np.float64)
    if stencil.shape != (4, 4, 4):
        raise FieldValidationError(f"stencil must be 4x4x4, got {stencil.shape}")
    x, y, z = (float(v) for v in xyz)
    if not all(0.0 <= v <= 1.0 for v in (x, y, z)):
        raise FieldValidationError(f"coordinates {xyz} lie outside the unit cell")
    alpha = build_coef_matrix().coefficients(stencil.reshape(64), mode).reshape(4, 4, 4)
    return float(np.einsum("ijk,i,j,k->", alpha, _powers(x), _powers(y), _powers(z)))


def _axis_map(n: int, factor: int) -> Tuple[np.ndarray, np.ndarray]:
    """Cell index and local coordinate of every fine voxel along one axis."""
    c = (np.arange(n * factor) + 0.5) / factor - 0.5
    cell = np.clip(np.floor(c), 0, n - 2).astype(np.intp)
    t = np.clip(c - cell, 0.0, 1.0)
    return cell, t


def _stencil_index(n: int) -> np.ndarray:
    """(n-1, 4) clamped stencil indices of every cell along one axis."""
    base = np.arange(n - 1)[:, None] + np.arange(-1, 3)[None, :]
    return np.clip(base, 0, n - 1)


def _slab_coefficients(values: np.ndarray, ix: np.ndarray, iy: np.ndarray, iz: np.ndarray, mode: Mode) -> np.ndarray:
    """(ncy, ncz, 4, 4, 4) coefficients of the cells of one x-slab.

    ``ix`` holds the 4 stencil planes of the slab, ``iy``/``iz`` come from
    :func:`_stencil_index`.
    """
    phi = values[ix[None, None, :, None, None], iy[:, None, None, :, None], iz[None, :, None, None, :]]
    ncy, ncz = phi.shape[:2]
    alpha = build_coef_matrix().coefficients(phi.reshape(-1, 64), mode)
    return alpha.reshape(ncy, ncz, 4, 4, 4)


def upsample(field: ScalarField3D, factor: int, mode: Mode = "sparse") -> ScalarField3D:
    """Tricubic upsampling by an integer factor on cell-centred samples.

    Fine voxel i sits at coarse coordinate (i + 0.5)/factor − 0.5. Voxels
    beyond the outermost cell centres are held at the boundary value.
    """
    if factor < 2:
        raise FilterError(f"upsampling factor must be >= 2, got {factor}")
    if min(field.grid.shape) < 4:
        raise DomainTooSmallError(f"tricubic upsampling needs >= 4 voxels per axis, got {field.grid.shape}")
    values = field.values
    ix, iy, iz = (_stencil_index(n) for n in field.grid.shape)
    (cx, tx), (cy, ty), (cz, tz) = (_axis_map(n, factor) for n in field.grid.shape)
    px, py, pz = _powers(tx), _powers(ty), _powers(tz)
    out = np.empty(tuple(n * factor for n in field.grid.shape), dtype=np.float64)
    for cell in range(field.grid.nx - 1):
        rows = np.flatnonzero(cx == cell)
        if rows.size == 0:
            continue
        alpha = _slab_coefficients(values, ix[cell], iy, iz, mode)
        slab = alpha[cy][:, cz]  # (nfy, nfz, 4, 4, 4)
        out[rows] = np.einsum("ia,jb,kc,jkabc->ijk", px[rows], py, pz, slab, optimize=True)
    g = field.grid
    grid = GridSpec(g.nx * factor, g.ny * factor, g.nz * factor, g.dx / factor)
    return ScalarField3D(grid, out, field.unit)


def upsample_state(state: FlowState, factor: int, mode: Mode = "sparse", rho_floor: float = 1e-3) -> FlowState:
    """Upsample every channel independently.

    On physical states, upsampled density below ``rho_floor`` times the
    coarse minimum is clamped to that floor and the count is logged.
    """
    rho = upsample(state.rho, factor, mode)
    if not state.normalized:
        floor = rho_floor * float(state.rho.values.min())
        low = rho.values < floor
        n_low = int(np.count_nonzero(low))
        if n_low:
            logger.warning("clamped %d upsampled density voxels to %.3g (overshoot at a density jump)", n_low, floor)
            rho = rho.with_values(np.where(low, floor, rho.values))
    u = tuple(upsample(c, factor, mode) for c in state.u)
    return FlowState(rho, u, normalized=state.normalized)


@dataclass(frozen=True)
class FlopsModel:
    mode: Mode = "sparse"

    def __post_init__(self):
        if self.mode not in FLOPS_PER_VOXEL:
            raise FieldValidationError(f"unknown mode {self.mode!r}, expected one of {sorted(FLOPS_PER_VOXEL)}")

    @property
    def per_voxel(self) -> int:
        return FLOPS_PER_VOXEL[self.mode]

    def count(self, n_vox: int, n_channels: int) -> int:
        return self.per_voxel * int(n_vox) * int(n_channels)


def flops(grid: Union[GridSpec, int], n_channels: int, mode: Mode = "sparse") -> int:
    """FLOPs of applying B to every voxel and channel. ``grid`` may also be a
    bare voxel count."""
    n_vox = grid.n_vox if isinstance(grid, GridSpec) else int(grid)
    return FlopsModel(mode).count(n_vox, n_channels)
