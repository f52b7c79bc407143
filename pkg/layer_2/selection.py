"""Cluster-balanced sample selection, train/val/test split and the manifest
pipeline that ties moments, k-means and selection together."""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from layer_0.blastnet_io import ManifestRecord
from layer_0.errors import SamplingError
from .clustering import elbow, inertia_curve, kmeans
from .moments import MomentVector, feature_matrix

logger = logging.getLogger(__name__)


def cluster_quotas(sizes: Sequence[int], n_target: int) -> List[int]:
    """Water-filling quota per cluster.

    Every round hands floor(remaining / active) to each cluster that still
    has members, capped by its size. Leftover units go one at a time to
    active clusters in ascending cluster order.
    """
    sizes = [int(s) for s in sizes]
    total = sum(sizes)
    if n_target < 0 or n_target > total:
        raise SamplingError(f"n_target must lie in [0, {total}], got {n_target}")
    quota = [0] * len(sizes)
    remaining = n_target
    while remaining > 0:
        active = [c for c, s in enumerate(sizes) if quota[c] < s]
        share = remaining // len(active)
        if share == 0:
            for c in active[:remaining]:
                quota[c] += 1
            remaining = 0
            break
        for c in active:
            take = min(share, sizes[c] - quota[c])
            quota[c] += take
            remaining -= take
    return quota


def balanced_select(assignments: Sequence[int], n_target: int, seed: int = 0) -> np.ndarray:
    """Sorted indices of ``n_target`` samples spread evenly over clusters."""
    labels = np.asarray(assignments, dtype=np.intp)
    clusters = np.unique(labels)
    members = [np.flatnonzero(labels == c) for c in clusters]
    quotas = cluster_quotas([m.size for m in members], n_target)
    rng = np.random.default_rng(seed)
    chosen = [rng.permutation(m)[:q] for m, q in zip(members, quotas)]
    logger.debug("cluster quotas: %s", dict(zip(clusters.tolist(), quotas)))
    return np.sort(np.concatenate(chosen)) if chosen else np.empty(0, dtype=np.intp)


def split(indices: Sequence[int], seed: int = 0) -> Dict[str, np.ndarray]:
    """80:10:10 by count: val and test get floor(n/10) each, train the rest."""
    idx = np.asarray(indices, dtype=np.intp)
    if np.unique(idx).size != idx.size:
        raise SamplingError("split indices contain duplicates")
    shuffled = np.random.default_rng(seed).permutation(idx)
    n_hold = idx.size // 10
    return {
        "train": np.sort(shuffled[2 * n_hold:]),
        "val": np.sort(shuffled[:n_hold]),
        "test": np.sort(shuffled[n_hold:2 * n_hold]),
    }


def sample_manifest(records: Sequence[ManifestRecord], features: Sequence[MomentVector],
                    n_target: Optional[int] = None, k: Optional[int] = None,
                    k_range: Tuple[int, int] = (1, 20), seed: int = 0) -> Tuple[List[ManifestRecord], Dict]:
    """Cluster, select and split manifest records.

    ``k`` fixes the cluster count; otherwise the elbow over ``k_range``
    (inclusive) picks it. Returns the selected records, in input order,
    with cluster and split filled in, plus a summary dict.
    """
    records = list(records)
    if len(records) != len(features):
        raise SamplingError(f"{len(records)} records but {len(features)} feature vectors")
    if not records:
        raise SamplingError("cannot sample an empty manifest")
    n_target = len(records) if n_target is None else n_target
    if n_target > len(records):
        raise SamplingError(f"n_target {n_target} exceeds the {len(records)} available samples")
    X = feature_matrix(features)
    curve = None
    if k is None:
        k_min, k_max = k_range
        curve = inertia_curve(X, range(k_min, k_max + 1), seed)
        k = elbow(X, curve.keys(), seed, curve=curve)
    model = kmeans(X, k, seed)
    chosen = balanced_select(model.labels, n_target, seed)
    parts = split(chosen, seed)
    label_of = {int(i): name for name, arr in parts.items() for i in arr}
    out = [
        records[i].model_copy(update={"cluster": int(model.labels[i]), "split": label_of[int(i)]})
        for i in chosen
    ]
    summary = {
        "k": k,
        "inertia": model.inertia,
        "inertia_curve": curve,
        "n_selected": len(out),
        "split_sizes": {name: int(arr.size) for name, arr in parts.items()},
        "cluster_sizes": np.bincount(model.labels, minlength=k).tolist(),
    }
    return out, summary
