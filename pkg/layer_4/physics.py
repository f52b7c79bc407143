"""Kinetic energy and dissipation of a FlowState (ν = 1)."""
import logging

import numpy as np

from layer_0.errors import DomainTooSmallError, GridError
from layer_0.fields import FlowState, ScalarField3D, gradient

logger = logging.getLogger(__name__)

ENERGY_UNIT = "Jm-3"


def specific_kinetic_energy(state: FlowState) -> ScalarField3D:
    """The ρe^k field, ρ (u1² + u2² + u3²) / 2."""
    u2 = sum(c.values ** 2 for c in state.u)
    return ScalarField3D(state.grid, 0.5 * state.rho.values * u2, ENERGY_UNIT)


def kinetic_energy(state: FlowState) -> float:
    """Volume-averaged ρe^k (uniform grid, so a plain mean)."""
    return float(np.mean(specific_kinetic_energy(state).values))


def kinetic_energy_error_map(pred: FlowState, truth: FlowState) -> ScalarField3D:
    """|ρ̂ê^k − ρe^k| / max(ρe^k), the normalised error map of a prediction."""
    if pred.grid.shape != truth.grid.shape:
        raise GridError(f"grids differ: {pred.grid.shape} vs {truth.grid.shape}")
    ek_true = specific_kinetic_energy(truth).values
    ek_pred = specific_kinetic_energy(pred).values
    scale = float(ek_true.max())
    if scale <= 0.0:
        logger.warning("truth has zero kinetic energy everywhere; error map is left unscaled")
        scale = 1.0
    return ScalarField3D(truth.grid, np.abs(ek_pred - ek_true) / scale, "")


def velocity_gradient(state: FlowState) -> np.ndarray:
    """G[i, j] = ∂u_i/∂x_j as a (3, 3, nx, ny, nz) array."""
    return np.stack([np.stack([gradient(c, j).values for j in (1, 2, 3)]) for c in state.u])


def dissipation(state: FlowState) -> float:
    """ε = ⟨(τ/ρ) : ∇u⟩ over interior voxels, τ/ρ = ∇u + ∇uᵀ − (2/3)(∇·u) I."""
    if min(state.grid.shape) < 3:
        raise DomainTooSmallError(f"dissipation needs >= 3 voxels per axis, got {state.grid.shape}")
    G = velocity_gradient(state)[..., 1:-1, 1:-1, 1:-1]
    div = np.trace(G, axis1=0, axis2=1)
    S = G + G.transpose(1, 0, 2, 3, 4)
    for i in range(3):
        S[i, i] -= (2.0 / 3.0) * div
    return float(np.mean(np.einsum("ij...,ij...->...", S, G)))
