"""Metric reports for one (prediction, truth) pair and for batches of pairs."""
import json
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator
from tqdm import tqdm

from layer_0.blastnet_io import atomic_write
from layer_0.errors import FieldValidationError
from layer_0.fields import ChannelStats, FlowState, compute_stats, normalize
from layer_1.favre_filter import FilterSpec
from .physics import dissipation, kinetic_energy
from .ssim3d import SsimConfig, nrmse_parts, sgs_divergence_trimmed, ssim3d

logger = logging.getLogger(__name__)

REPORT_FIELDS = [
    "ssim_rho_u", "ssim_sgs", "nrmse_rho_u", "nrmse_sgs", "nrmse_Ek", "nrmse_eps",
    "Ek_true", "Ek_pred", "eps_true", "eps_pred",
]
LOSS_FIELDS = ["mse", "grad", "phys"]


def _ratio(num: float, den: float, what: str) -> float:
    if den == 0.0:
        if num == 0.0:
            return 0.0
        raise FieldValidationError(f"NRMSE of {what} is undefined: the truth is zero")
    return num / den


class MetricReport(BaseModel):
    ssim_rho_u: float
    ssim_sgs: Optional[float] = None
    nrmse_rho_u: float = Field(ge=0)
    nrmse_sgs: float = Field(ge=0)
    nrmse_Ek: float = Field(ge=0)
    nrmse_eps: float = Field(ge=0)
    Ek_true: float
    Ek_pred: float
    eps_true: float
    eps_pred: float
    mse: Optional[float] = None
    grad: Optional[float] = None
    phys: Optional[float] = None

    @field_validator("ssim_rho_u", "ssim_sgs")
    @classmethod
    def _ssim_range(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not -1.0 - 1e-9 <= v <= 1.0 + 1e-9:
            raise ValueError(f"SSIM must lie in [-1, 1], got {v}")
        return v

    def to_row(self) -> Dict[str, Optional[float]]:
        return {k: getattr(self, k) for k in REPORT_FIELDS + LOSS_FIELDS}

    def save_json(self, path: str) -> str:
        text = self.model_dump_json(indent=2)

        def _write(tmp: str) -> None:
            with open(tmp, "w", encoding="utf-8") as f:
                f.write(text)

        return atomic_write(path, _write)

    @classmethod
    def load_json(cls, path: str) -> "MetricReport":
        with open(path, "r", encoding="utf-8") as f:
            return cls.model_validate(json.load(f))


def _evaluate(pred: FlowState, truth: FlowState, spec: FilterSpec, stats: ChannelStats,
              cfg: SsimConfig) -> Tuple[MetricReport, List[Tuple[float, float]], List[Tuple[float, float]]]:
    if pred.grid.shape != truth.grid.shape:
        raise FieldValidationError(f"prediction grid {pred.grid.shape} differs from truth grid {truth.grid.shape}")
    p_norm, t_norm = normalize(pred, stats), normalize(truth, stats)
    channel_parts = [nrmse_parts(p, t) for p, t in zip(p_norm.channels, t_norm.channels)]
    ssim_rho_u = sum(ssim3d(p, t, cfg) for p, t in zip(p_norm.channels, t_norm.channels)) / 4.0
    nrmse_rho_u = sum(_ratio(n, d, "a channel") for n, d in channel_parts) / 4.0

    d_pred = sgs_divergence_trimmed(pred, spec)
    d_true = sgs_divergence_trimmed(truth, spec)
    sgs_parts = [nrmse_parts(p, t) for p, t in zip(d_pred, d_true)]
    if min(d_true[0].grid.shape) < cfg.window:
        logger.warning("SGS interior %s is smaller than the %d^3 SSIM window; ssim_sgs skipped",
                       d_true[0].grid.shape, cfg.window)
        ssim_sgs = None
    else:
        ssim_sgs = sum(ssim3d(p, t, cfg) for p, t in zip(d_pred, d_true)) / 3.0
    nrmse_sgs = sum(_ratio(n, d, "the SGS divergence") for n, d in sgs_parts) / 3.0

    ek_t, ek_p = kinetic_energy(truth), kinetic_energy(pred)
    eps_t, eps_p = dissipation(truth), dissipation(pred)
    report = MetricReport(
        ssim_rho_u=ssim_rho_u, ssim_sgs=ssim_sgs,
        nrmse_rho_u=nrmse_rho_u, nrmse_sgs=nrmse_sgs,
        nrmse_Ek=_ratio((ek_t - ek_p) ** 2, ek_t ** 2, "E^k"),
        nrmse_eps=_ratio((eps_t - eps_p) ** 2, eps_t ** 2, "dissipation"),
        Ek_true=ek_t, Ek_pred=ek_p, eps_true=eps_t, eps_pred=eps_p,
    )
    return report, channel_parts, sgs_parts


def evaluate_pair(pred: FlowState, truth: FlowState, spec: FilterSpec,
                  stats: Optional[ChannelStats] = None, cfg: Optional[SsimConfig] = None) -> MetricReport:
    """Every metric for one physical-unit (prediction, truth) pair.

    Channel metrics use normalized fields (``stats``, or the truth's own
    stats when omitted); SGS, E^k and ε use physical fields.
    """
    stats = stats or compute_stats([truth])
    report, _, _ = _evaluate(pred, truth, spec, stats, cfg or SsimConfig())
    return report


class BatchReport(BaseModel):
    labels: List[str]
    pairs: List[MetricReport]
    ssim_rho_u: float
    ssim_sgs: Optional[float] = None
    nrmse_rho_u: float
    nrmse_sgs: float
    nrmse_Ek: float
    nrmse_eps: float
    mse: Optional[float] = None
    grad: Optional[float] = None
    phys: Optional[float] = None

    def summary(self) -> Dict[str, Optional[float]]:
        keys = ["ssim_rho_u", "ssim_sgs", "nrmse_rho_u", "nrmse_sgs", "nrmse_Ek", "nrmse_eps"] + LOSS_FIELDS
        return {k: getattr(self, k) for k in keys}

    def to_frame(self) -> pd.DataFrame:
        rows = [dict(label=label, **r.to_row()) for label, r in zip(self.labels, self.pairs)]
        return pd.DataFrame(rows, columns=["label"] + REPORT_FIELDS + LOSS_FIELDS)

    def write_rows(self, path: str) -> str:
        df = self.to_frame()
        return atomic_write(path, lambda tmp: df.to_csv(tmp, index=False, lineterminator="\n"))


def evaluate_batch(preds: Sequence[FlowState], truths: Sequence[FlowState], spec: FilterSpec,
                   stats: Optional[ChannelStats] = None, cfg: Optional[SsimConfig] = None,
                   labels: Optional[Sequence[str]] = None, losses: Optional[Dict[str, float]] = None,
                   progress: bool = False) -> BatchReport:
    """Per-pair reports plus batch aggregates.

    SSIMs are sample means; ``ssim_sgs`` averages the pairs that have one and
    stays None when none do. NRMSEs take one ratio of summed squares over all
    voxels and samples per channel, then macro-average the channels; E^k and ε
    use the same summed form over samples.
    """
    preds, truths = list(preds), list(truths)
    if not preds or len(preds) != len(truths):
        raise FieldValidationError(f"need matching non-empty batches, got {len(preds)} and {len(truths)}")
    labels = list(labels) if labels is not None else [str(i) for i in range(len(preds))]
    stats = stats or compute_stats(truths)
    cfg = cfg or SsimConfig()

    reports: List[MetricReport] = []
    ch_num, ch_den = np.zeros(4), np.zeros(4)
    sgs_num, sgs_den = np.zeros(3), np.zeros(3)
    for pred, truth in tqdm(zip(preds, truths), total=len(preds), desc="evaluate", disable=not progress):
        report, channel_parts, sgs_parts = _evaluate(pred, truth, spec, stats, cfg)
        reports.append(report)
        for c, (n, d) in enumerate(channel_parts):
            ch_num[c] += n
            ch_den[c] += d
        for c, (n, d) in enumerate(sgs_parts):
            sgs_num[c] += n
            sgs_den[c] += d

    ek_t = np.array([r.Ek_true for r in reports])
    ek_p = np.array([r.Ek_pred for r in reports])
    eps_t = np.array([r.eps_true for r in reports])
    eps_p = np.array([r.eps_pred for r in reports])
    sgs_ssims = [r.ssim_sgs for r in reports if r.ssim_sgs is not None]
    losses = losses or {}
    return BatchReport(
        labels=labels,
        pairs=reports,
        ssim_rho_u=float(np.mean([r.ssim_rho_u for r in reports])),
        ssim_sgs=float(np.mean(sgs_ssims)) if sgs_ssims else None,
        nrmse_rho_u=float(np.mean([_ratio(n, d, "a channel") for n, d in zip(ch_num, ch_den)])),
        nrmse_sgs=float(np.mean([_ratio(n, d, "the SGS divergence") for n, d in zip(sgs_num, sgs_den)])),
        nrmse_Ek=_ratio(float(np.sum((ek_t - ek_p) ** 2)), float(np.sum(ek_t ** 2)), "E^k"),
        nrmse_eps=_ratio(float(np.sum((eps_t - eps_p) ** 2)), float(np.sum(eps_t ** 2)), "dissipation"),
        mse=losses.get("mse"),
        grad=losses.get("grad"),
        phys=losses.get("phys"),
    )
