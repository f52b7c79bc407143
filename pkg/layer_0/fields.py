"""Volumetric field types and the finite-difference helpers every layer uses.

Arrays are stored as (nx, ny, nz) C-order float64, so the flat index is
x*ny*nz + y*nz + z (z fastest), the same order as a reshaped BLASTNet binary.
Fields are read-only once built.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainTooSmallError, FieldValidationError, GridError

logger = logging.getLogger(__name__)

RHO_UNIT = "kgm-3"
VEL_UNIT = "ms-1"


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    nz: int
    dx: float = 1.0

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if int(n) != n or n < 2:
                raise GridError(f"{name} must be an integer >= 2, got {n}")
        if not np.isfinite(self.dx) or self.dx <= 0:
            raise GridError(f"dx must be positive, got {self.dx}")
        if self.n_vox > np.iinfo(np.intp).max:
            raise GridError(f"grid {self.shape} exceeds the addressable array size")

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (int(self.nx), int(self.ny), int(self.nz))

    @property
    def n_vox(self) -> int:
        return int(self.nx) * int(self.ny) * int(self.nz)

    @property
    def is_cubic(self) -> bool:
        return self.nx == self.ny == self.nz

    @classmethod
    def cube(cls, n: int, dx: float = 1.0) -> "GridSpec":
        return cls(n, n, n, dx)


@dataclass(frozen=True, eq=False)
class ScalarField3D:
    grid: GridSpec
    values: np.ndarray
    unit: str = ""

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.size != self.grid.n_vox:
            raise GridError(f"values length {arr.size} does not match grid {self.grid.shape}")
        arr = np.array(arr.reshape(self.grid.shape), dtype=np.float64, order="C", copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def with_values(self, values: np.ndarray, unit: Optional[str] = None, grid: Optional[GridSpec] = None) -> "ScalarField3D":
        return ScalarField3D(grid or self.grid, values, self.unit if unit is None else unit)

    def all_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())


@dataclass(frozen=True, eq=False)
class FlowState:
    """Density plus three velocity components on one grid.

    ``normalized`` marks states produced by :func:`normalize`; those may hold
    nonpositive density, physical states may not.
    """

    rho: ScalarField3D
    u: Tuple[ScalarField3D, ScalarField3D, ScalarField3D]
    normalized: bool = False

    def __post_init__(self):
        u = tuple(self.u)
        if len(u) != 3:
            raise FieldValidationError(f"expected 3 velocity components, got {len(u)}")
        object.__setattr__(self, "u", u)
        for comp in u:
            if comp.grid != self.rho.grid:
                raise GridError(f"velocity grid {comp.grid} differs from density grid {self.rho.grid}")
        if not self.normalized:
            bad = np.flatnonzero(~(self.rho.values > 0).reshape(-1))
            if bad.size:
                raise FieldValidationError(
                    f"density must be strictly positive; voxel {int(bad[0])} holds {self.rho.flat[bad[0]]}"
                )

    @property
    def grid(self) -> GridSpec:
        return self.rho.grid

    @property
    def channels(self) -> Tuple[ScalarField3D, ...]:
        return (self.rho,) + self.u

    def velocity_array(self) -> np.ndarray:
        """(3, nx, ny, nz) stack of the velocity components."""
        return np.stack([c.values for c in self.u])

    @classmethod
    def from_arrays(cls, rho: np.ndarray, u1: np.ndarray, u2: np.ndarray, u3: np.ndarray,
                    dx: float = 1.0, normalized: bool = False) -> "FlowState":
        rho = np.asarray(rho)
        if rho.ndim != 3:
            raise GridError(f"expected 3D arrays, got shape {rho.shape}")
        grid = GridSpec(*rho.shape, dx=dx)
        return cls(
            ScalarField3D(grid, rho, RHO_UNIT),
            tuple(ScalarField3D(grid, np.asarray(c), VEL_UNIT) for c in (u1, u2, u3)),
            normalized=normalized,
        )


@dataclass(frozen=True)
class ChannelStats:
    rho_mean: float
    rho_std: float
    vel_mean: float
    vel_std: float

    def check(self) -> None:
        if not (self.rho_std > 0 and self.vel_std > 0):
            raise FieldValidationError(
                f"channel standard deviations must be positive (rho_std={self.rho_std}, vel_std={self.vel_std})"
            )

    def to_dict(self) -> dict:
        return {"rho_mean": self.rho_mean, "rho_std": self.rho_std,
                "vel_mean": self.vel_mean, "vel_std": self.vel_std}


def _per_metre(unit: str) -> str:
    return f"{unit}m-1" if unit else "m-1"


def gradient(f: ScalarField3D, axis: int) -> ScalarField3D:
    """d f / d x_axis, axis in 1..3.

    Second-order central differences inside, first-order one-sided at the two
    boundary planes.
    """
    if axis not in (1, 2, 3):
        raise GridError(f"axis must be 1, 2 or 3, got {axis}")
    n = f.grid.shape[axis - 1]
    if n < 3:
        raise DomainTooSmallError(f"gradient along axis {axis} needs >= 3 voxels, got {n}")
    g = np.gradient(f.values, f.grid.dx, axis=axis - 1, edge_order=1)
    return ScalarField3D(f.grid, g, _per_metre(f.unit))


def divergence(v1: ScalarField3D, v2: ScalarField3D, v3: ScalarField3D) -> ScalarField3D:
    if not (v1.grid == v2.grid == v3.grid):
        raise GridError("divergence operands live on different grids")
    total = gradient(v1, 1).values + gradient(v2, 2).values + gradient(v3, 3).values
    return ScalarField3D(v1.grid, total, _per_metre(v1.unit))


def normalize(state: FlowState, stats: ChannelStats) -> FlowState:
    stats.check()
    rho = state.rho.with_values((state.rho.values - stats.rho_mean) / stats.rho_std, unit="")
    u = tuple(c.with_values((c.values - stats.vel_mean) / stats.vel_std, unit="") for c in state.u)
    return FlowState(rho, u, normalized=True)


def denormalize(state: FlowState, stats: ChannelStats) -> FlowState:
    stats.check()
    rho = state.rho.with_values(state.rho.values * stats.rho_std + stats.rho_mean, unit=RHO_UNIT)
    u = tuple(c.with_values(c.values * stats.vel_std + stats.vel_mean, unit=VEL_UNIT) for c in state.u)
    return FlowState(rho, u, normalized=False)


def compute_stats(states: Sequence[FlowState]) -> ChannelStats:
    """Pooled population mean/std of density and of all velocity components.

    Sums are accumulated per state in float64 and combined in input order.
    """
    states = list(states)
    if not states:
        raise FieldValidationError("compute_stats needs at least one state")

    def _pooled(arrays: Iterable[np.ndarray]) -> Tuple[float, float]:
        n = 0
        s = 0.0
        chunks = []
        for a in arrays:
            a = np.asarray(a, dtype=np.float64).reshape(-1)
            chunks.append(a)
            n += a.size
            s += float(np.sum(a))
        mean = s / n
        ss = 0.0
        for a in chunks:
            ss += float(np.sum((a - mean) ** 2))
        return mean, float(np.sqrt(ss / n))

    rho_mean, rho_std = _pooled(s.rho.values for s in states)
    vel_mean, vel_std = _pooled(c.values for s in states for c in s.u)
    if rho_std == 0 or vel_std == 0:
        logger.warning("zero standard deviation in channel stats; normalize() will refuse them")
    return ChannelStats(rho_mean, rho_std, vel_mean, vel_std)
