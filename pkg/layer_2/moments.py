"""Sub-volume tiling and the velocity-moment features used for clustering."""
import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy.stats import kurtosis, skew

from layer_0.errors import DomainTooSmallError, FieldValidationError
from layer_0.fields import FlowState, GridSpec, ScalarField3D

logger = logging.getLogger(__name__)

MOMENT_NAMES = ("mean", "var", "skew", "kurt")
FEATURE_NAMES = tuple(f"u{k}_{m}" for k in (1, 2, 3) for m in MOMENT_NAMES)


@dataclass(frozen=True, eq=False)
class MomentVector:
    """mean, variance, skewness and kurtosis of u1, u2, u3 (12 values)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        if v.size != len(FEATURE_NAMES):
            raise FieldValidationError(f"a moment vector has {len(FEATURE_NAMES)} entries, got {v.size}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def component(self, k: int) -> dict:
        """Moments of velocity component k (1-based)."""
        chunk = self.values[4 * (k - 1): 4 * k]
        return dict(zip(MOMENT_NAMES, (float(x) for x in chunk)))

    def to_dict(self) -> dict:
        return dict(zip(FEATURE_NAMES, (float(x) for x in self.values)))


def _channel_moments(values: np.ndarray) -> List[float]:
    v = values.reshape(-1)
    mean = float(np.mean(v))
    if v.max() == v.min():
        return [mean, 0.0, 0.0, 3.0]
    return [
        mean,
        float(np.var(v)),
        float(skew(v, bias=True)),
        float(kurtosis(v, fisher=False, bias=True)),
    ]


def moments(state: FlowState) -> MomentVector:
    """Population moments of each velocity component; a constant component
    has skewness 0 and kurtosis 3."""
    out: List[float] = []
    for c in state.u:
        out.extend(_channel_moments(c.values))
    return MomentVector(np.array(out))


def feature_matrix(vectors: Sequence[MomentVector]) -> np.ndarray:
    return np.stack([v.values for v in vectors]) if vectors else np.empty((0, len(FEATURE_NAMES)))


def extract_subvolumes(state: FlowState, size: int) -> List[FlowState]:
    """Non-overlapping size³ tiles in x-major order; partial edge tiles are dropped."""
    if size < 2:
        raise FieldValidationError(f"sub-volume size must be >= 2, got {size}")
    if size > min(state.grid.shape):
        raise DomainTooSmallError(f"sub-volume size {size} exceeds grid {state.grid.shape}")
    counts = [n // size for n in state.grid.shape]
    grid = GridSpec.cube(size, state.grid.dx)
    tiles: List[FlowState] = []
    for i in range(counts[0]):
        for j in range(counts[1]):
            for k in range(counts[2]):
                sl = (slice(i * size, (i + 1) * size), slice(j * size, (j + 1) * size), slice(k * size, (k + 1) * size))
                rho = ScalarField3D(grid, state.rho.values[sl], state.rho.unit)
                u = tuple(ScalarField3D(grid, c.values[sl], c.unit) for c in state.u)
                tiles.append(FlowState(rho, u, normalized=state.normalized))
    dropped = [n - c * size for n, c in zip(state.grid.shape, counts)]
    if any(dropped):
        logger.info("dropped %s remainder voxels per axis when tiling %s by %d", dropped, state.grid.shape, size)
    return tiles
