"""Volumetric SSIM, NRMSE and the channel / SGS macro-averages."""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from skimage.metrics import structural_similarity

from layer_0.errors import DomainTooSmallError, FieldValidationError, GridError
from layer_0.fields import ChannelStats, FlowState, GridSpec, ScalarField3D, normalize
from layer_1.favre_filter import FilterSpec, sgs_divergence

logger = logging.getLogger(__name__)

Metric = Callable[[ScalarField3D, ScalarField3D], float]
FieldLike = Union[ScalarField3D, np.ndarray]


@dataclass(frozen=True)
class SsimConfig:
    window: int = 9
    c1: float = 0.1
    c2: float = 0.3

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise FieldValidationError(f"SSIM window must be odd and >= 3, got {self.window}")
        if not (self.c1 > 0 and self.c2 > 0):
            raise FieldValidationError(f"SSIM stabilizers must be positive, got c1={self.c1}, c2={self.c2}")


def ssim3d(a: ScalarField3D, b: ScalarField3D, cfg: Optional[SsimConfig] = None) -> float:
    """Mean SSIM over all stride-1 window³ boxes lying fully inside the domain.

    Window statistics are unweighted population moments and the stabilizers
    enter as c1² and c2² (``data_range`` 1 with K1=c1, K2=c2).
    """
    cfg = cfg or SsimConfig()
    if a.grid.shape != b.grid.shape:
        raise GridError(f"SSIM operands have different grids: {a.grid.shape} vs {b.grid.shape}")
    if min(a.grid.shape) < cfg.window:
        raise DomainTooSmallError(f"domain {a.grid.shape} is smaller than the {cfg.window}^3 SSIM window")
    return float(structural_similarity(
        a.values, b.values,
        win_size=cfg.window,
        data_range=1.0,
        K1=cfg.c1,
        K2=cfg.c2,
        gaussian_weights=False,
        use_sample_covariance=False,
    ))


def _flat_pair(pred: FieldLike, truth: FieldLike) -> Tuple[np.ndarray, np.ndarray]:
    p = pred.values if isinstance(pred, ScalarField3D) else np.asarray(pred, dtype=np.float64)
    t = truth.values if isinstance(truth, ScalarField3D) else np.asarray(truth, dtype=np.float64)
    if p.shape != t.shape:
        raise GridError(f"NRMSE operands have different shapes: {p.shape} vs {t.shape}")
    return p.reshape(-1), t.reshape(-1)


def nrmse_parts(pred: Union[FieldLike, Sequence[FieldLike]], truth: Union[FieldLike, Sequence[FieldLike]]) -> Tuple[float, float]:
    """(Σ(φ−φ̂)², Σφ²) over all voxels, and over all samples for sequences."""
    if isinstance(pred, (ScalarField3D, np.ndarray)):
        pred, truth = [pred], [truth]
    pred, truth = list(pred), list(truth)
    if len(pred) != len(truth):
        raise FieldValidationError(f"batch sizes differ: {len(pred)} predictions vs {len(truth)} truths")
    num = 0.0
    den = 0.0
    for p, t in zip(pred, truth):
        p, t = _flat_pair(p, t)
        num += float(np.sum((t - p) ** 2))
        den += float(np.sum(t * t))
    return num, den


def nrmse(pred, truth, sqrt: bool = False) -> float:
    """Σ(φ−φ̂)²/Σφ². ``sqrt=True`` returns the square root of that ratio."""
    num, den = nrmse_parts(pred, truth)
    if den == 0.0:
        raise FieldValidationError("NRMSE is undefined for an all-zero truth field")
    ratio = num / den
    return float(np.sqrt(ratio)) if sqrt else ratio


def resolve_metric(metric: Union[str, Metric], cfg: Optional[SsimConfig] = None) -> Metric:
    if callable(metric):
        return metric
    if metric == "ssim":
        return lambda p, t: ssim3d(p, t, cfg)
    if metric == "nrmse":
        return nrmse
    raise FieldValidationError(f"unknown metric {metric!r}, expected 'ssim', 'nrmse' or a callable")


def metric_rho_u(pred: FlowState, truth: FlowState, metric: Union[str, Metric] = "ssim",
                 stats: Optional[ChannelStats] = None, cfg: Optional[SsimConfig] = None) -> float:
    """Macro-average of ``metric(pred_channel, truth_channel)`` over ρ, u1, u2, u3.

    With ``stats`` both states are normalized first.
    """
    fn = resolve_metric(metric, cfg)
    if stats is not None:
        pred, truth = normalize(pred, stats), normalize(truth, stats)
    return float(sum(fn(p, t) for p, t in zip(pred.channels, truth.channels)) / 4.0)


def _trim(f: ScalarField3D) -> ScalarField3D:
    g = f.grid
    shape = tuple(n - 2 for n in g.shape)
    if min(shape) < 2:
        raise DomainTooSmallError(f"grid {g.shape} leaves nothing after removing the edge voxels")
    return ScalarField3D(GridSpec(*shape, dx=g.dx), f.values[1:-1, 1:-1, 1:-1], f.unit)


def sgs_divergence_trimmed(fine: FlowState, spec: FilterSpec) -> Tuple[ScalarField3D, ...]:
    """∇·τ^sgs on the coarse grid with one voxel removed from every face."""
    return tuple(_trim(d) for d in sgs_divergence(fine, spec))


def metric_sgs(pred_fine: FlowState, truth_fine: FlowState, spec: FilterSpec,
               metric: Union[str, Metric] = "ssim", cfg: Optional[SsimConfig] = None) -> float:
    """(1/3) Σ_k metric over the edge-trimmed SGS-divergence components.

    Both states must be in physical units (positive density).
    """
    fn = resolve_metric(metric, cfg)
    if metric == "ssim":
        window = (cfg or SsimConfig()).window
        coarse = spec.coarse_grid(truth_fine.grid)
        if min(coarse.shape) - 2 < window:
            raise DomainTooSmallError(
                f"coarse grid {coarse.shape} is too small for a {window}^3 SSIM window after edge trimming"
            )
    d_pred = sgs_divergence_trimmed(pred_fine, spec)
    d_true = sgs_divergence_trimmed(truth_fine, spec)
    return float(sum(fn(p, t) for p, t in zip(d_pred, d_true)) / 3.0)
