"""Layer 0: volumetric field types, BLASTNet I/O, configuration and errors.

Exports:
- GridSpec, ScalarField3D, FlowState, ChannelStats
- gradient, divergence, normalize, denormalize, compute_stats
- read_volume, write_volume, scan_volume, read_info, write_info
- load_flow_state, save_flow_state, load_momentum_sample, load_state, resolve_channels
- atomic_write, grid_spacing
- parse_manifest, emit_manifest, momentum_filename
- RunConfig, load_config, setup_logging
"""
from .errors import (
    BenchmarkError,
    ConfigError,
    DomainTooSmallError,
    FieldValidationError,
    FilterError,
    GridError,
    ManifestError,
    MissingChannelError,
    NonFiniteError,
    SamplingError,
    SymmetryError,
    VolumeSizeError,
)
from .fields import (
    ChannelStats,
    FlowState,
    GridSpec,
    ScalarField3D,
    compute_stats,
    denormalize,
    divergence,
    gradient,
    normalize,
)
from .blastnet_io import (
    STATE_VARS,
    GlobalMeta,
    atomic_write,
    LocalMeta,
    ManifestRecord,
    emit_manifest,
    grid_spacing,
    load_flow_state,
    load_momentum_sample,
    load_state,
    momentum_filename,
    parse_manifest,
    read_info,
    read_volume,
    resolve_channels,
    save_flow_state,
    scan_volume,
    write_info,
    write_volume,
)
from .config import RunConfig, load_config
from .logs import setup_logging

__all__ = [
    "BenchmarkError",
    "ConfigError",
    "DomainTooSmallError",
    "FieldValidationError",
    "FilterError",
    "GridError",
    "ManifestError",
    "MissingChannelError",
    "NonFiniteError",
    "SamplingError",
    "SymmetryError",
    "VolumeSizeError",
    "ChannelStats",
    "FlowState",
    "GridSpec",
    "ScalarField3D",
    "compute_stats",
    "denormalize",
    "divergence",
    "gradient",
    "normalize",
    "STATE_VARS",
    "GlobalMeta",
    "atomic_write",
    "LocalMeta",
    "ManifestRecord",
    "emit_manifest",
    "grid_spacing",
    "load_flow_state",
    "load_momentum_sample",
    "load_state",
    "momentum_filename",
    "parse_manifest",
    "read_info",
    "read_volume",
    "resolve_channels",
    "save_flow_state",
    "scan_volume",
    "write_info",
    "write_volume",
    "RunConfig",
    "load_config",
    "setup_logging",
]
