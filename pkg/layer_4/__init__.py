"""Layer 4: evaluation metrics

Exports:
- SsimConfig, ssim3d, nrmse, metric_rho_u, metric_sgs
- kinetic_energy, dissipation, specific_kinetic_energy, kinetic_energy_error_map
- Spectrum, tke_spectrum
- MetricReport, BatchReport, evaluate_pair, evaluate_batch
"""
from .ssim3d import SsimConfig, metric_rho_u, metric_sgs, nrmse, nrmse_parts, sgs_divergence_trimmed, ssim3d
from .physics import dissipation, kinetic_energy, kinetic_energy_error_map, specific_kinetic_energy, velocity_gradient
from .spectrum import Spectrum, tke_spectrum
from .report import BatchReport, MetricReport, evaluate_batch, evaluate_pair

__all__ = [
    "SsimConfig",
    "metric_rho_u",
    "metric_sgs",
    "nrmse",
    "nrmse_parts",
    "sgs_divergence_trimmed",
    "ssim3d",
    "dissipation",
    "kinetic_energy",
    "kinetic_energy_error_map",
    "specific_kinetic_energy",
    "velocity_gradient",
    "Spectrum",
    "tke_spectrum",
    "BatchReport",
    "MetricReport",
    "evaluate_batch",
    "evaluate_pair",
]
