"""Layer 5: augmentation and training losses

Exposes:
 - CubeSymmetry, all_symmetries(), random_symmetry(seed), apply(state, g), compose, inverse
 - verify_continuity(state, g)
 - LossConfig, mse_loss, mae_loss, grad_loss, phys_loss
"""
from .symmetry import (
    CubeSymmetry,
    all_symmetries,
    apply,
    apply_array,
    apply_scalar,
    compose,
    inverse,
    momentum_divergence,
    random_symmetry,
    verify_continuity,
)
from .sr_loss import LossConfig, grad_loss, mae_loss, mse_loss, phys_loss

__all__ = [
    "CubeSymmetry",
    "all_symmetries",
    "apply",
    "apply_array",
    "apply_scalar",
    "compose",
    "inverse",
    "momentum_divergence",
    "random_symmetry",
    "verify_continuity",
    "LossConfig",
    "grad_loss",
    "mae_loss",
    "mse_loss",
    "phys_loss",
]
