"""Training losses of SR models, evaluated as metrics (no autodiff)."""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from layer_0.errors import FieldValidationError
from layer_0.fields import ChannelStats, FlowState, gradient, normalize

logger = logging.getLogger(__name__)

Batch = Union[FlowState, Sequence[FlowState]]


@dataclass(frozen=True)
class LossConfig:
    lam: float = 0.99
    delta: Optional[float] = None  # grid spacing; the prediction's dx when None

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise FieldValidationError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.delta is not None and not self.delta > 0:
            raise FieldValidationError(f"delta must be positive, got {self.delta}")


def _pairs(pred: Batch, truth: Batch, stats: Optional[ChannelStats]) -> List[Tuple[FlowState, FlowState]]:
    preds = [pred] if isinstance(pred, FlowState) else list(pred)
    truths = [truth] if isinstance(truth, FlowState) else list(truth)
    if not preds or len(preds) != len(truths):
        raise FieldValidationError(f"need matching non-empty batches, got {len(preds)} and {len(truths)}")
    for p, t in zip(preds, truths):
        if p.grid.shape != t.grid.shape:
            raise FieldValidationError(f"prediction grid {p.grid.shape} differs from truth grid {t.grid.shape}")
    if stats is not None:
        preds = [normalize(p, stats) for p in preds]
        truths = [normalize(t, stats) for t in truths]
    return list(zip(preds, truths))


def _mean_error(pred: Batch, truth: Batch, stats: Optional[ChannelStats], power: int) -> float:
    total = 0.0
    count = 0
    for p, t in _pairs(pred, truth, stats):
        for pc, tc in zip(p.channels, t.channels):
            total += float(np.sum(np.abs(tc.values - pc.values) ** power))
            count += tc.values.size
    return total / count


def mse_loss(pred: Batch, truth: Batch, stats: Optional[ChannelStats] = None) -> float:
    """Mean squared error over voxels, samples and the 4 channels."""
    return _mean_error(pred, truth, stats, 2)


def mae_loss(pred: Batch, truth: Batch, stats: Optional[ChannelStats] = None) -> float:
    return _mean_error(pred, truth, stats, 1)


def grad_loss(pred: Batch, truth: Batch, cfg: Optional[LossConfig] = None,
              stats: Optional[ChannelStats] = None) -> float:
    """Δ² · mean over voxels, samples, channels and the 3 directions of
    the squared gradient error."""
    cfg = cfg or LossConfig()
    pairs = _pairs(pred, truth, stats)
    delta = cfg.delta if cfg.delta is not None else pairs[0][0].grid.dx
    total = 0.0
    count = 0
    for p, t in pairs:
        for pc, tc in zip(p.channels, t.channels):
            for axis in (1, 2, 3):
                diff = gradient(tc, axis).values - gradient(pc, axis).values
                total += float(np.sum(diff * diff))
            count += 3 * tc.values.size
    return delta * delta * total / count


def phys_loss(pred: Batch, truth: Batch, cfg: Optional[LossConfig] = None,
              stats: Optional[ChannelStats] = None) -> float:
    """(1 − λ)·MSE + λ·grad."""
    cfg = cfg or LossConfig()
    return (1.0 - cfg.lam) * mse_loss(pred, truth, stats) + cfg.lam * grad_loss(pred, truth, cfg, stats)
