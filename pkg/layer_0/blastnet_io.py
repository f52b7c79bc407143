"""BLASTNet volume, metadata and Momentum128 manifest I/O.

Volumes are raw little-endian float32 with no header, 4*nx*ny*nz bytes, in
the (nx, ny, nz) C-order layout used by :mod:`layer_0.fields`. Metadata lives
in an ``info.json`` holding a ``global`` object and a ``local`` list of
per-snapshot file records. Manifests are CSV files with one row per
sub-volume.
"""
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import (
    FieldValidationError,
    GridError,
    ManifestError,
    MissingChannelError,
    NonFiniteError,
    VolumeSizeError,
)
from .fields import FlowState, GridSpec, ScalarField3D

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

VOLUME_DTYPE = np.dtype("<f4")
RHO_VAR = "RHO_kgm-3"
VELOCITY_VARS = ("UX_ms-1", "UY_ms-1", "UZ_ms-1")
STATE_VARS = (RHO_VAR,) + VELOCITY_VARS
MANIFEST_COLUMNS = ["hash_id", "kaggle_id", "description", "cluster", "nx", "ny", "nz", "split"]
SPLITS = ("train", "val", "test", "param-variation", "forced-hit")

# planes per chunk when streaming a memory-mapped volume
_SCAN_PLANES = 8


def _unit_of(var: str) -> str:
    return var.split("_", 1)[1] if "_" in var else ""


def atomic_write(path: PathLike, writer: Callable[[str], None]) -> str:
    """Call ``writer(tmp_path)`` then rename the temp file onto ``path``."""
    path = os.fspath(path)
    if not path or os.path.isdir(path):
        raise IsADirectoryError(f"cannot write to directory target {path!r}")
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise FileNotFoundError(f"parent directory {parent} does not exist")
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=parent)
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return path


# --- volumes ---

def _check_size(path: PathLike, grid: GridSpec) -> None:
    expected = VOLUME_DTYPE.itemsize * grid.n_vox
    actual = os.path.getsize(path)
    if actual != expected:
        raise VolumeSizeError(
            f"{path}: {actual} bytes on disk, expected {expected} for grid {grid.shape}",
            path=os.fspath(path), expected=expected, actual=actual,
        )


def _first_nonfinite(arr: np.ndarray) -> int:
    """Flat index of the first NaN/Inf, or -1. Scans plane chunks of memmaps."""
    plane = arr.shape[1] * arr.shape[2]
    for start in range(0, arr.shape[0], _SCAN_PLANES):
        block = np.asarray(arr[start:start + _SCAN_PLANES])
        bad = np.flatnonzero(~np.isfinite(block))
        if bad.size:
            return start * plane + int(bad[0])
    return -1


def read_volume(path: PathLike, grid: GridSpec, unit: str = "", mmap: bool = False) -> ScalarField3D:
    """Decode one raw float32 volume into a float64 field."""
    _check_size(path, grid)
    if mmap:
        raw = np.memmap(path, dtype=VOLUME_DTYPE, mode="r", shape=grid.shape)
    else:
        raw = np.fromfile(path, dtype=VOLUME_DTYPE).reshape(grid.shape)
    bad = _first_nonfinite(raw)
    if bad >= 0:
        raise NonFiniteError(f"{path}: non-finite value at voxel {bad}", voxel_index=bad, path=os.fspath(path))
    return ScalarField3D(grid, np.asarray(raw, dtype=np.float64), unit)


def scan_volume(path: PathLike, grid: GridSpec) -> Dict[str, Any]:
    """Min/max/non-finite count of a volume without rejecting NaN payloads."""
    _check_size(path, grid)
    raw = np.memmap(path, dtype=VOLUME_DTYPE, mode="r", shape=grid.shape)
    lo, hi, n_bad = np.inf, -np.inf, 0
    first_bad = -1
    plane = grid.ny * grid.nz
    for start in range(0, grid.nx, _SCAN_PLANES):
        block = np.asarray(raw[start:start + _SCAN_PLANES], dtype=np.float64)
        finite = np.isfinite(block)
        n_bad += int(block.size - finite.sum())
        if first_bad < 0 and not finite.all():
            first_bad = start * plane + int(np.flatnonzero(~finite)[0])
        if finite.any():
            lo = min(lo, float(block[finite].min()))
            hi = max(hi, float(block[finite].max()))
    return {"path": os.fspath(path), "shape": grid.shape, "min": lo, "max": hi,
            "n_nonfinite": n_bad, "first_nonfinite": first_bad}


def write_volume(field: ScalarField3D, path: PathLike) -> str:
    """Narrow to float32 (round-to-nearest-even) and write atomically."""
    bad = _first_nonfinite(field.values)
    if bad >= 0:
        raise NonFiniteError(f"refusing to write non-finite value at voxel {bad}", voxel_index=bad)
    payload = np.ascontiguousarray(field.values, dtype=VOLUME_DTYPE)
    return atomic_write(path, payload.tofile)


# --- info.json metadata ---

class GlobalMeta(BaseModel):
    """``metadata['global']``; unknown keys are kept as extras."""

    model_config = ConfigDict(extra="allow")

    dataset_id: str = ""
    Nxyz: List[int]
    snapshots: int = 1
    variables: List[str]
    grid: Dict[str, str] = Field(default_factory=dict)
    numerics: Any = None
    bc: Any = None
    ic: Any = None
    doi: str = ""
    contributors: str = ""
    description: str = ""

    @field_validator("Nxyz")
    @classmethod
    def _nxyz_ok(cls, v: List[int]) -> List[int]:
        if len(v) != 3 or any(n < 1 for n in v):
            raise ValueError(f"Nxyz must hold three positive integers, got {v}")
        return v

    @field_validator("variables")
    @classmethod
    def _variables_ok(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("variables must not be empty")
        return v


class LocalMeta(BaseModel):
    id: int
    time: Optional[float] = None
    files: Dict[str, str] = Field(default_factory=dict)

    @classmethod
    def from_raw(cls, raw: Dict[str, Any]) -> "LocalMeta":
        files = {}
        time = None
        for key, val in raw.items():
            key = key.strip()
            if key.endswith(" filename"):
                files[key[: -len(" filename")].strip()] = val
            elif key.startswith("time"):
                time = val
        return cls(id=raw["id"], time=time, files=files)

    def to_raw(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"id": self.id}
        if self.time is not None:
            out["time [s]"] = self.time
        for var, path in self.files.items():
            out[f"{var} filename"] = path
        return out


def read_info(path: PathLike) -> Tuple[GlobalMeta, List[LocalMeta]]:
    path = Path(path)
    if path.is_dir():
        path = path / "info.json"
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    try:
        meta = GlobalMeta(**raw["global"])
        local = [LocalMeta.from_raw(r) for r in raw.get("local", [])]
    except (KeyError, ValidationError) as e:
        raise FieldValidationError(f"{path}: malformed metadata: {e}") from e
    ids = [rec.id for rec in local]
    if ids != list(range(len(ids))):
        raise FieldValidationError(f"{path}: local ids must be unique and contiguous from 0, got {ids}")
    known = set(meta.variables)
    for rec in local:
        unknown = set(rec.files) - known
        if unknown:
            raise FieldValidationError(f"{path}: local record {rec.id} references unknown variables {sorted(unknown)}")
    return meta, local


def write_info(path: PathLike, meta: GlobalMeta, local: Sequence[LocalMeta]) -> str:
    doc = {"global": meta.model_dump(exclude_none=True), "local": [rec.to_raw() for rec in local]}
    text = json.dumps(doc, indent=2)

    def _write(tmp: str) -> None:
        with open(tmp, "w", encoding="utf-8") as f:
            f.write(text)

    return atomic_write(path, _write)


def grid_spacing(meta: GlobalMeta, root: Path) -> float:
    """Uniform spacing from the x grid file, the ``dx_m`` extra, or 1.0."""
    xfile = meta.grid.get("x")
    if xfile and (root / xfile).exists():
        xs = np.fromfile(root / xfile, dtype=VOLUME_DTYPE).astype(np.float64)
        nx, ny, nz = meta.Nxyz
        if xs.size == nx * ny * nz:
            xs = xs.reshape(nx, ny, nz)[:, 0, 0]
        steps = np.diff(xs)
        if steps.size == 0 or not np.allclose(steps, steps[0], rtol=1e-4):
            raise GridError(f"{root / xfile}: only uniform grids are supported")
        return float(steps[0])
    extra = meta.model_extra or {}
    return float(extra.get("dx_m", 1.0))


def load_flow_state(meta: GlobalMeta, local: LocalMeta, root: PathLike = ".", mmap: bool = False) -> FlowState:
    """The rho/u1/u2/u3 state of one snapshot record, with paths relative to ``root``."""
    root = Path(root)
    missing = [v for v in STATE_VARS if v not in meta.variables or v not in local.files]
    if missing:
        raise MissingChannelError(f"snapshot {local.id} lacks channels {missing}")
    absent = [v for v in STATE_VARS if not (root / local.files[v]).exists()]
    if absent:
        raise MissingChannelError(f"{root}: snapshot {local.id} files for {absent} do not exist")
    grid = GridSpec(*meta.Nxyz, dx=grid_spacing(meta, root))
    fields = [read_volume(root / local.files[v], grid, _unit_of(v), mmap=mmap) for v in STATE_VARS]
    return FlowState(fields[0], tuple(fields[1:]))


def save_flow_state(state: FlowState, out_dir: PathLike, tag: str, dataset_id: str = "", **extra) -> str:
    """Write the four channels as ``<Var>_id<tag>.dat`` plus an ``info.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {}
    for var, fld in zip(STATE_VARS, state.channels):
        name = momentum_filename(var, tag)
        write_volume(fld, out_dir / name)
        files[var] = f"./{name}"
    meta = GlobalMeta(dataset_id=dataset_id, Nxyz=list(state.grid.shape), snapshots=1,
                      variables=list(STATE_VARS), dx_m=state.grid.dx, **extra)
    return write_info(out_dir / "info.json", meta, [LocalMeta(id=0, files=files)])


def momentum_filename(var: str, hash_id: str) -> str:
    if not var:
        raise ManifestError("variable name must not be empty")
    if not hash_id:
        raise ManifestError("hash id must not be empty")
    return f"{var}_id{hash_id}.dat"


def load_momentum_sample(root: PathLike, hash_id: str, n: int = 128, dx: float = 1.0, mmap: bool = False) -> FlowState:
    """Read the rho/u1/u2/u3 files of one Momentum128 sub-volume."""
    return load_state(root, hash_id=hash_id, n=n, dx=dx, mmap=mmap)


def _info_path(path: Path) -> Path:
    return path if path.suffix == ".json" else path / "info.json"


def _read_snapshot(info: Path, snapshot: int) -> Tuple[GlobalMeta, LocalMeta]:
    meta, local = read_info(info)
    if not 0 <= snapshot < len(local):
        raise FieldValidationError(f"{info}: snapshot {snapshot} out of range (have {len(local)})")
    return meta, local[snapshot]


def resolve_channels(path: PathLike, hash_id: Optional[str] = None, snapshot: int = 0,
                     n: int = 128, dx: float = 1.0) -> Tuple[GridSpec, Dict[str, Path]]:
    """Grid and per-variable file paths of a state.

    ``path`` is an info.json, a directory holding one, or (with ``hash_id``)
    a Momentum128 directory of n³ samples.
    """
    path = Path(path)
    info = _info_path(path)
    if hash_id is None and info.exists():
        meta, rec = _read_snapshot(info, snapshot)
        root = info.parent
        grid = GridSpec(*meta.Nxyz, dx=grid_spacing(meta, root))
        return grid, {var: root / rel for var, rel in rec.files.items()}
    if hash_id is None:
        raise FileNotFoundError(f"{path}: no info.json and no hash id given")
    return GridSpec.cube(n, dx), {v: path / momentum_filename(v, hash_id) for v in STATE_VARS}


def load_state(path: PathLike, snapshot: int = 0, hash_id: Optional[str] = None,
               n: int = 128, dx: float = 1.0, mmap: bool = False) -> FlowState:
    """Load the rho/u1/u2/u3 state found by :func:`resolve_channels`.

    info.json snapshots go through :func:`load_flow_state`.
    """
    info = _info_path(Path(path))
    if hash_id is None and info.exists():
        meta, rec = _read_snapshot(info, snapshot)
        return load_flow_state(meta, rec, info.parent, mmap=mmap)
    grid, files = resolve_channels(path, hash_id, snapshot, n, dx)
    missing = [v for v in STATE_VARS if v not in files or not files[v].exists()]
    if missing:
        raise MissingChannelError(f"{path}: missing channels {missing}")
    fields = [read_volume(files[v], grid, _unit_of(v), mmap=mmap) for v in STATE_VARS]
    return FlowState(fields[0], tuple(fields[1:]))


# --- manifests ---

class ManifestRecord(BaseModel):
    hash_id: str
    kaggle_id: str = ""
    description: str = ""
    cluster: Optional[int] = None
    nx: int = 128
    ny: int = 128
    nz: int = 128
    split: Optional[Literal["train", "val", "test", "param-variation", "forced-hit"]] = None

    @field_validator("hash_id")
    @classmethod
    def _hash_ok(cls, v: str) -> str:
        if not v:
            raise ValueError("hash_id must not be empty")
        return v

    @field_validator("cluster", "split", mode="before")
    @classmethod
    def _blank_is_none(cls, v):
        return None if v == "" else v

    def to_row(self) -> Dict[str, str]:
        row = self.model_dump()
        return {k: "" if row[k] is None else str(row[k]) for k in MANIFEST_COLUMNS}


def parse_manifest(path: PathLike) -> List[ManifestRecord]:
    if os.path.getsize(path) == 0:
        return []
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, on_bad_lines="error")
    except pd.errors.EmptyDataError:
        return []
    except pd.errors.ParserError as e:
        raise ManifestError(f"{path}: malformed row: {e}") from e
    missing = [c for c in MANIFEST_COLUMNS if c not in df.columns]
    if missing:
        raise ManifestError(f"{path}: header lacks columns {missing}")
    records: List[ManifestRecord] = []
    seen = set()
    for i, row in enumerate(df[MANIFEST_COLUMNS].itertuples(index=False), start=2):
        values = row._asdict()
        if any(pd.isna(v) for v in values.values()):
            raise ManifestError(f"{path}: line {i} has missing fields")
        try:
            rec = ManifestRecord(**values)
        except ValidationError as e:
            raise ManifestError(f"{path}: line {i} is malformed: {e}") from e
        if rec.hash_id in seen:
            raise ManifestError(f"{path}: duplicate hash_id {rec.hash_id!r} on line {i}")
        seen.add(rec.hash_id)
        records.append(rec)
    return records


def emit_manifest(records: Sequence[ManifestRecord], path: PathLike) -> str:
    ids = [r.hash_id for r in records]
    if len(ids) != len(set(ids)):
        raise ManifestError("duplicate hash_id in records")
    df = pd.DataFrame([r.to_row() for r in records], columns=MANIFEST_COLUMNS)
    return atomic_write(path, lambda tmp: df.to_csv(tmp, index=False, lineterminator="\n"))
