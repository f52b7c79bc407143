"""Layer 1: coarsening

Exports:
- FilterSpec, block_mean, box_filter, favre_filter
- SgsTensorField, sgs_stress, sgs_divergence
- block_replicate, upsample_nearest_state, conservation_report

Turns a fine FlowState into the coarse SR input (Favre filter) and the
subgrid-scale ground truth that the SGS metrics compare against.
"""
from .favre_filter import (
    SGS_COMPONENTS,
    FilterSpec,
    SgsTensorField,
    block_mean,
    block_replicate,
    box_filter,
    conservation_report,
    favre_filter,
    sgs_divergence,
    sgs_stress,
    upsample_nearest_state,
)

__all__ = [
    "SGS_COMPONENTS",
    "FilterSpec",
    "SgsTensorField",
    "block_mean",
    "block_replicate",
    "box_filter",
    "conservation_report",
    "favre_filter",
    "sgs_divergence",
    "sgs_stress",
    "upsample_nearest_state",
]
