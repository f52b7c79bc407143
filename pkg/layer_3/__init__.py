"""Layer 3: tricubic baseline reconstructor

Exports:
- build_coef_matrix(), TricubicCoefMatrix
- interpolate_cell(stencil, xyz), upsample(field, factor), upsample_state(state, factor)
- flops(grid, n_channels, mode), FlopsModel
"""
from .tricubic import (
    FLOPS_PER_VOXEL,
    FlopsModel,
    TricubicCoefMatrix,
    build_coef_matrix,
    flops,
    interpolate_cell,
    upsample,
    upsample_state,
)

__all__ = [
    "FLOPS_PER_VOXEL",
    "FlopsModel",
    "TricubicCoefMatrix",
    "build_coef_matrix",
    "flops",
    "interpolate_cell",
    "upsample",
    "upsample_state",
]
