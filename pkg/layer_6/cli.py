"""Command-line front end: inspect, coarsen, baseline, evaluate, sample,
augment-test and spectrum.

Errors are printed as ``error[<code>]: <message>`` on stderr and exit with
status 2; results go to stdout as a rich table plus a CSV row.
"""
import functools
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
import typer
from rich.console import Console
from rich.table import Table
from tqdm import tqdm

from layer_0.blastnet_io import (
    STATE_VARS,
    atomic_write,
    emit_manifest,
    load_momentum_sample,
    load_state,
    parse_manifest,
    resolve_channels,
    save_flow_state,
    scan_volume,
)
from layer_0.config import RunConfig, load_config
from layer_0.errors import BenchmarkError, ConfigError, SamplingError, SymmetryError
from layer_0.fields import ChannelStats, FlowState, compute_stats
from layer_0.logs import err_console, setup_logging
from layer_1.favre_filter import FilterSpec, conservation_report, favre_filter
from layer_2.moments import moments
from layer_2.selection import sample_manifest
from layer_3.tricubic import flops, upsample_state
from layer_4.physics import specific_kinetic_energy
from layer_4.report import LOSS_FIELDS, REPORT_FIELDS, evaluate_batch, evaluate_pair
from layer_4.spectrum import tke_spectrum
from layer_4.ssim3d import SsimConfig
from layer_5.sr_loss import LossConfig, grad_loss, mse_loss, phys_loss
from layer_5.symmetry import all_symmetries, momentum_divergence, verify_continuity

logger = logging.getLogger(__name__)

app = typer.Typer(add_completion=False, no_args_is_help=True,
                  help="Turbulence super-resolution benchmark tools.")
console = Console()

_state: Dict[str, Any] = {"config": "config.json"}

EXIT_ERROR = 2


def _fail(code: str, message: str) -> None:
    err_console.print(f"error[{code}]: {message}", markup=False, highlight=False, soft_wrap=True)
    raise typer.Exit(EXIT_ERROR)


def handle_errors(fn):
    """Turn library and I/O errors into coded messages and exit status 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BenchmarkError as e:
            _fail(e.code, str(e))
        except OSError as e:
            _fail("E_IO", str(e))

    return wrapper


@app.callback()
def main(
    config: str = typer.Option("config.json", "--config", help="JSON config file (flags override it)."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging."),
):
    setup_logging(verbose)
    _state["config"] = config


def _config(**overrides) -> RunConfig:
    return load_config(_state["config"], overrides)


def _print_table(title: str, rows: List[Dict[str, Any]]) -> None:
    if not rows:
        return
    table = Table(title=title)
    for col in rows[0]:
        table.add_column(str(col))
    for row in rows:
        table.add_row(*(_fmt(v) for v in row.values()))
    console.print(table)


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return "" if v is None else str(v)


def _csv_row(values: Dict[str, Any]) -> None:
    typer.echo(",".join(values.keys()))
    typer.echo(",".join("" if v is None else repr(v) if isinstance(v, float) else str(v) for v in values.values()))


def _emit(cfg: RunConfig, title: str, rows: List[Dict[str, Any]]) -> None:
    if cfg.report_format in ("table", "both"):
        _print_table(title, rows)
    if cfg.report_format in ("row", "both"):
        for row in rows:
            _csv_row(row)


def _load(path: Path, hash_id: Optional[str], n: int, dx: float) -> FlowState:
    return load_state(path, hash_id=hash_id, n=n, dx=dx)


@app.command()
@handle_errors
def inspect(
    path: Path = typer.Argument(..., help="info.json, its directory, or a Momentum128 directory (with --hash)."),
    hash_id: Optional[str] = typer.Option(None, "--hash", help="Momentum128 sample hash."),
    n: int = typer.Option(128, "--n", help="Cube edge of Momentum128 samples."),
    snapshot: int = typer.Option(0, "--snapshot"),
):
    """Dims, min/max and NaN scan per channel, then density positivity and ρe^k stats."""
    cfg = _config()
    grid, files = resolve_channels(path, hash_id, snapshot, n)
    rows = []
    clean = True
    for var, file in files.items():
        info = scan_volume(file, grid)
        clean = clean and info["n_nonfinite"] == 0
        rows.append({"channel": var, "dims": "x".join(map(str, grid.shape)), "min": info["min"],
                     "max": info["max"], "nonfinite": info["n_nonfinite"]})
    _emit(cfg, f"{path}", rows)
    if not clean:
        logger.warning("non-finite values found; skipping state checks")
        return
    if not all(v in files for v in STATE_VARS):
        logger.info("not a full rho/u state; skipping state checks")
        return
    state = load_state(path, snapshot=snapshot, hash_id=hash_id, n=n)
    ek = specific_kinetic_energy(state).values
    _emit(cfg, "state", [{
        "rho_min": float(state.rho.values.min()),
        "rho_positive": bool((state.rho.values > 0).all()),
        "ek_mean": float(ek.mean()),
        "ek_std": float(ek.std()),
    }])


@app.command()
@handle_errors
def coarsen(
    state_in: Path = typer.Argument(..., help="Fine state (info.json or directory)."),
    out: Path = typer.Argument(..., help="Output directory."),
    factor: Optional[int] = typer.Option(None, "--factor", help="Filter width (2, 4, 8, 16, 32)."),
    hash_id: Optional[str] = typer.Option(None, "--hash"),
    n: int = typer.Option(128, "--n"),
):
    """Favre-filter a fine state and write the coarse state."""
    cfg = _config(factor=factor)
    spec = FilterSpec(cfg.factor)
    fine = _load(state_in, hash_id, n, 1.0)
    coarse = favre_filter(fine, spec)
    tag = f"{hash_id or 'state'}_f{spec.factor}"
    info = save_flow_state(coarse, out, tag=tag, dataset_id=f"coarse-f{spec.factor}")
    residuals = conservation_report(fine, coarse, spec)
    _emit(cfg, "coarsen", [dict(
        {"out": info, "fine": "x".join(map(str, fine.grid.shape)), "coarse": "x".join(map(str, coarse.grid.shape))},
        **residuals,
    )])


@app.command()
@handle_errors
def baseline(
    coarse_in: Path = typer.Argument(..., help="Coarse state (info.json or directory)."),
    out: Path = typer.Argument(..., help="Output directory."),
    factor: Optional[int] = typer.Option(None, "--factor"),
    mode: str = typer.Option("sparse", "--mode", help="sparse or dense coefficient application."),
    hash_id: Optional[str] = typer.Option(None, "--hash"),
    n: int = typer.Option(16, "--n"),
):
    """Tricubic upsampling of every channel; prints sparse and dense FLOPs."""
    cfg = _config(factor=factor)
    coarse = _load(coarse_in, hash_id, n, 1.0)
    fine = upsample_state(coarse, cfg.factor, mode=mode)
    info = save_flow_state(fine, out, tag=f"{hash_id or 'state'}_tricubic{cfg.factor}", dataset_id="tricubic")
    _emit(cfg, "baseline", [{
        "out": info,
        "fine": "x".join(map(str, fine.grid.shape)),
        "flops_sparse": flops(fine.grid, 4, "sparse"),
        "flops_dense": flops(fine.grid, 4, "dense"),
    }])


def _read_stats(path: Optional[Path]) -> Optional[ChannelStats]:
    if path is None:
        return None
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"stats file {path} is not valid JSON: {e}") from e
    try:
        stats = ChannelStats(**{k: float(raw[k]) for k in ("rho_mean", "rho_std", "vel_mean", "vel_std")})
    except KeyError as e:
        raise ConfigError(f"stats file {path} is missing {e}") from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f"stats file {path} has a non-numeric entry: {e}") from e
    stats.check()
    return stats


def _losses(preds: List[FlowState], truths: List[FlowState], stats: ChannelStats, lam: float) -> Dict[str, float]:
    loss_cfg = LossConfig(lam=lam)
    return {
        "mse": mse_loss(preds, truths, stats),
        "grad": grad_loss(preds, truths, loss_cfg, stats),
        "phys": phys_loss(preds, truths, loss_cfg, stats),
    }


@app.command()
@handle_errors
def evaluate(
    pred: Path = typer.Argument(..., help="Predicted state, or a directory of samples with --manifest."),
    truth: Path = typer.Argument(..., help="Ground-truth state, or a directory of samples with --manifest."),
    factor: Optional[int] = typer.Option(None, "--factor"),
    window: Optional[int] = typer.Option(None, "--window"),
    c1: Optional[float] = typer.Option(None, "--c1"),
    c2: Optional[float] = typer.Option(None, "--c2"),
    lam: Optional[float] = typer.Option(None, "--lambda"),
    stats_path: Optional[Path] = typer.Option(None, "--stats", help="JSON with rho_mean/rho_std/vel_mean/vel_std."),
    manifest: Optional[Path] = typer.Option(None, "--manifest", help="Batch mode: one pair per manifest row."),
    out: Optional[Path] = typer.Option(None, "--out", help="Report directory (default: output_dir)."),
):
    """Full metric suite for one pair or a manifest of pairs."""
    cfg = _config(factor=factor, window=window, c1=c1, c2=c2, lam=lam)
    spec = FilterSpec(cfg.factor)
    ssim_cfg = SsimConfig(cfg.window, cfg.c1, cfg.c2)
    out_dir = Path(out or cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stats = _read_stats(stats_path)

    if manifest is None:
        p, t = load_state(pred), load_state(truth)
        stats = stats or compute_stats([t])
        report = evaluate_pair(p, t, spec, stats, ssim_cfg)
        report = report.model_copy(update=_losses([p], [t], stats, cfg.lam))
        report.save_json(str(out_dir / "report.json"))
        row = report.to_row()
        atomic_write(out_dir / "report.csv", lambda tmp: _write_rows(tmp, [dict(label=pred.name, **row)]))
        _emit(cfg, "metrics", [row])
        return

    records = parse_manifest(manifest)
    preds, truths = [], []
    for rec in tqdm(records, desc="load", disable=len(records) < 2):
        preds.append(load_momentum_sample(pred, rec.hash_id, n=rec.nx))
        truths.append(load_momentum_sample(truth, rec.hash_id, n=rec.nx))
    stats = stats or compute_stats(truths)
    batch = evaluate_batch(preds, truths, spec, stats, ssim_cfg, labels=[r.hash_id for r in records],
                           losses=_losses(preds, truths, stats, cfg.lam), progress=len(records) > 1)
    batch.write_rows(str(out_dir / "report_rows.csv"))
    summary = batch.summary()
    atomic_write(out_dir / "summary.json", lambda tmp: Path(tmp).write_text(json.dumps(summary, indent=2)))
    _emit(cfg, "batch metrics", [summary])


def _write_rows(path: str, rows: List[Dict[str, Any]]) -> None:
    pd.DataFrame(rows, columns=["label"] + REPORT_FIELDS + LOSS_FIELDS).to_csv(path, index=False, lineterminator="\n")


@app.command()
@handle_errors
def sample(
    manifest_in: Path = typer.Argument(..., help="Manifest of candidate sub-volumes."),
    manifest_out: Path = typer.Argument(..., help="Manifest of the selected, split sub-volumes."),
    data_root: Optional[Path] = typer.Option(None, "--data-root", help="Directory with the sample files (env TSRB_DATA_ROOT)."),
    k: Optional[int] = typer.Option(None, "--k", help="Fixed cluster count (default: elbow)."),
    k_min: Optional[int] = typer.Option(None, "--k-min"),
    k_max: Optional[int] = typer.Option(None, "--k-max"),
    n_target: Optional[int] = typer.Option(None, "--n-target"),
    seed: Optional[int] = typer.Option(None, "--seed"),
):
    """Moments → k-means/elbow → balanced selection → 80:10:10 split."""
    cfg = _config(data_root=data_root, k=k, k_min=k_min, k_max=k_max, n_target=n_target, seed=seed)
    records = parse_manifest(manifest_in)
    if cfg.n_target is not None and cfg.n_target > len(records):
        raise SamplingError(f"n_target {cfg.n_target} exceeds the {len(records)} samples in {manifest_in}")
    features = [
        moments(load_momentum_sample(cfg.data_root, rec.hash_id, n=rec.nx))
        for rec in tqdm(records, desc="moments", disable=len(records) < 2)
    ]
    selected, summary = sample_manifest(records, features, n_target=cfg.n_target, k=cfg.k,
                                        k_range=(cfg.k_min, cfg.k_max), seed=cfg.seed)
    emit_manifest(selected, manifest_out)
    _emit(cfg, "sample", [{
        "k": summary["k"],
        "selected": summary["n_selected"],
        "train": summary["split_sizes"]["train"],
        "val": summary["split_sizes"]["val"],
        "test": summary["split_sizes"]["test"],
        "out": str(manifest_out),
    }])


@app.command("augment-test")
@handle_errors
def augment_test(
    state_in: Path = typer.Argument(..., help="State (info.json or directory)."),
    hash_id: Optional[str] = typer.Option(None, "--hash"),
    n: int = typer.Option(128, "--n"),
    rotations_only: bool = typer.Option(False, "--rotations-only"),
    tol: float = typer.Option(1e-10, "--tol", help="Allowed deviation relative to max |div(rho u)|."),
):
    """Continuity check of every cube symmetry on one state."""
    cfg = _config(rotations_only=rotations_only or None)
    state = _load(state_in, hash_id, n, 1.0)
    cubic = state.grid.is_cubic
    rows = []
    worst = 0.0
    scale = max(1.0, float(np.abs(momentum_divergence(state).values).max()))
    for g in all_symmetries(cfg.rotations_only):
        if g.permutes and not cubic:
            rows.append({"element": g.label(), "det": g.det, "deviation": None, "status": "skipped (non-cubic)"})
            continue
        dev = verify_continuity(state, g)
        worst = max(worst, dev)
        rows.append({"element": g.label(), "det": g.det, "deviation": dev,
                     "status": "ok" if dev <= tol * scale else "FAIL"})
    skipped = sum(r["deviation"] is None for r in rows)
    if skipped:
        logger.warning("%d permuting symmetries skipped: grid %s is not cubic", skipped, state.grid.shape)
    _emit(cfg, "augment-test", rows)
    typer.echo(f"max deviation: {worst!r}")
    if any(r["status"] == "FAIL" for r in rows):
        raise SymmetryError(f"continuity deviation {worst:.3g} exceeds {tol:g} x {scale:.3g}")


@app.command()
@handle_errors
def spectrum(
    state_in: Path = typer.Argument(..., help="State (info.json or directory)."),
    out: Path = typer.Argument(..., help="CSV file with columns k,E."),
    hash_id: Optional[str] = typer.Option(None, "--hash"),
    n: int = typer.Option(128, "--n"),
    normalize: bool = typer.Option(False, "--normalize", help="Divide velocity by its RMS first."),
):
    """Shell-averaged TKE spectrum to a table file."""
    _config()
    state = _load(state_in, hash_id, n, 1.0)
    spec = tke_spectrum(state, normalize=normalize)
    df = spec.to_frame()
    atomic_write(out, lambda tmp: df.to_csv(tmp, index=False, lineterminator="\n"))
    typer.echo(f"wrote {out} ({len(df)} shells), peak shell {spec.peak()}")
    typer.echo(f"parseval: sum E = {spec.total!r}, tke = {spec.tke!r}, residual = {spec.parseval_residual!r}")
