"""Box and Favre (density-weighted) filtering onto a coarser grid, plus the
subgrid-scale stress that the coarsening throws away.

Filtering is a block mean over non-overlapping f³ blocks: the array is
reshaped to (nx/f, f, ny/f, f, nz/f, f) and averaged over the f axes.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from layer_0.config import VALID_FACTORS
from layer_0.errors import FilterError
from layer_0.fields import FlowState, GridSpec, ScalarField3D, gradient

logger = logging.getLogger(__name__)

SGS_UNIT = "kgm-1s-2"
SGS_COMPONENTS = ((1, 1), (2, 2), (3, 3), (1, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class FilterSpec:
    factor: int = 8

    def __post_init__(self):
        if self.factor not in VALID_FACTORS:
            raise FilterError(f"filter factor must be one of {VALID_FACTORS}, got {self.factor}")

    def check(self, grid: GridSpec) -> None:
        bad = [n for n in grid.shape if n % self.factor]
        if bad:
            raise FilterError(f"factor {self.factor} does not divide grid {grid.shape}")

    def coarse_grid(self, grid: GridSpec) -> GridSpec:
        self.check(grid)
        f = self.factor
        return GridSpec(grid.nx // f, grid.ny // f, grid.nz // f, grid.dx * f)


def block_mean(values: np.ndarray, factor: int) -> np.ndarray:
    """Mean over non-overlapping factor³ blocks of a 3D array."""
    nx, ny, nz = values.shape
    if nx % factor or ny % factor or nz % factor:
        raise FilterError(f"factor {factor} does not divide array shape {values.shape}")
    f = factor
    blocks = np.asarray(values, dtype=np.float64).reshape(nx // f, f, ny // f, f, nz // f, f)
    return blocks.mean(axis=(1, 3, 5))


def box_filter(f: ScalarField3D, spec: FilterSpec) -> ScalarField3D:
    grid = spec.coarse_grid(f.grid)
    return ScalarField3D(grid, block_mean(f.values, spec.factor), f.unit)


def _favre_parts(state: FlowState, spec: FilterSpec) -> Tuple[GridSpec, np.ndarray, np.ndarray]:
    """Coarse grid, ρ̄ and the (3, ...) stack of ũ."""
    grid = spec.coarse_grid(state.grid)
    rho = state.rho.values
    rho_bar = block_mean(rho, spec.factor)
    u_tilde = np.stack([block_mean(rho * c.values, spec.factor) / rho_bar for c in state.u])
    return grid, rho_bar, u_tilde


def favre_filter(state: FlowState, spec: FilterSpec) -> FlowState:
    """ρ̄ = box(ρ), ũ_k = box(ρ u_k) / ρ̄ on the coarse grid."""
    if state.normalized:
        raise FilterError("Favre filtering needs physical (positive) density, got a normalized state")
    grid, rho_bar, u_tilde = _favre_parts(state, spec)
    rho = ScalarField3D(grid, rho_bar, state.rho.unit)
    u = tuple(ScalarField3D(grid, u_tilde[k], c.unit) for k, c in enumerate(state.u))
    return FlowState(rho, u)


@dataclass(frozen=True, eq=False)
class SgsTensorField:
    """Symmetric τ^sgs on the coarse grid, keyed by 1-based (i, j) with i <= j."""

    components: Dict[Tuple[int, int], ScalarField3D]

    def __post_init__(self):
        missing = [ij for ij in SGS_COMPONENTS if ij not in self.components]
        if missing:
            raise FilterError(f"SGS tensor is missing components {missing}")

    def __getitem__(self, ij: Tuple[int, int]) -> ScalarField3D:
        i, j = ij
        return self.components[(min(i, j), max(i, j))]

    @property
    def grid(self) -> GridSpec:
        return self.components[(1, 1)].grid

    def as_tuple(self) -> Tuple[ScalarField3D, ...]:
        """(τ11, τ22, τ33, τ12, τ13, τ23)."""
        return tuple(self.components[ij] for ij in SGS_COMPONENTS)


def sgs_stress(fine: FlowState, spec: FilterSpec) -> SgsTensorField:
    """τ_ij = ρ̄ (box(ρ u_i u_j)/ρ̄ − ũ_i ũ_j)."""
    if fine.normalized:
        raise FilterError("SGS stress needs physical (positive) density, got a normalized state")
    grid, rho_bar, u_tilde = _favre_parts(fine, spec)
    rho = fine.rho.values
    comps = {}
    for i, j in SGS_COMPONENTS:
        ui, uj = fine.u[i - 1].values, fine.u[j - 1].values
        favre_uiuj = block_mean(rho * ui * uj, spec.factor) / rho_bar
        comps[(i, j)] = ScalarField3D(grid, rho_bar * (favre_uiuj - u_tilde[i - 1] * u_tilde[j - 1]), SGS_UNIT)
    return SgsTensorField(comps)


def sgs_divergence(fine: FlowState, spec: FilterSpec) -> Tuple[ScalarField3D, ScalarField3D, ScalarField3D]:
    """(∇·τ)_k = Σ_j ∂τ_kj/∂x_j at coarse spacing factor·dx."""
    tau = sgs_stress(fine, spec)
    out = []
    for k in (1, 2, 3):
        total = sum(gradient(tau[(k, j)], j).values for j in (1, 2, 3))
        out.append(ScalarField3D(tau.grid, total, SGS_UNIT + "m-1"))
    return tuple(out)


def block_replicate(f: ScalarField3D, factor: int) -> ScalarField3D:
    """Nearest-neighbour upsampling: every coarse voxel becomes a factor³ block."""
    if factor < 2:
        raise FilterError(f"replication factor must be >= 2, got {factor}")
    v = f.values
    for axis in range(3):
        v = np.repeat(v, factor, axis=axis)
    g = f.grid
    grid = GridSpec(g.nx * factor, g.ny * factor, g.nz * factor, g.dx / factor)
    return ScalarField3D(grid, v, f.unit)


def upsample_nearest_state(state: FlowState, factor: int) -> FlowState:
    rho = block_replicate(state.rho, factor)
    u = tuple(block_replicate(c, factor) for c in state.u)
    return FlowState(rho, u, normalized=state.normalized)


def conservation_report(fine: FlowState, coarse: FlowState, spec: FilterSpec) -> Dict[str, float]:
    """Relative mass/momentum mismatch between a fine state and its Favre filter."""
    vol = float(spec.factor ** 3)
    rho_f = fine.rho.values
    rho_c = coarse.rho.values
    mass = float(rho_f.sum())
    out = {"mass": abs(float(rho_c.sum()) * vol - mass) / abs(mass)}
    for k in range(3):
        m_f = float((rho_f * fine.u[k].values).sum())
        m_c = float((rho_c * coarse.u[k].values).sum()) * vol
        scale = max(abs(m_f), float(np.abs(rho_f * fine.u[k].values).sum()), np.finfo(float).tiny)
        out[f"momentum_{k + 1}"] = abs(m_c - m_f) / scale
    logger.debug("conservation residuals: %s", out)
    return out
