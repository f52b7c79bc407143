"""k-means on standardized moment features and elbow selection of k."""
import logging
import warnings
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Union

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning
from sklearn.preprocessing import StandardScaler

from layer_0.errors import SamplingError
from .moments import MomentVector, feature_matrix

logger = logging.getLogger(__name__)

Features = Union[np.ndarray, Sequence[MomentVector]]


@dataclass(frozen=True, eq=False)
class ClusterModel:
    k: int
    centroids: np.ndarray  # standardized space
    centroids_raw: np.ndarray
    inertia: float
    labels: np.ndarray
    scaler: StandardScaler

    def predict(self, features: Features) -> np.ndarray:
        z = self.scaler.transform(_as_matrix(features))
        d = ((z[:, None, :] - self.centroids[None, :, :]) ** 2).sum(axis=-1)
        return np.argmin(d, axis=1)


def _as_matrix(features: Features) -> np.ndarray:
    if isinstance(features, np.ndarray):
        X = np.asarray(features, dtype=np.float64)
        return X.reshape(-1, 1) if X.ndim == 1 else X
    return feature_matrix(list(features))


def kmeans(features: Features, k: int, seed: int = 0) -> ClusterModel:
    """k-means++ seeded Lloyd iterations (best of 10 restarts, at most 300
    iterations each) on per-dimension z-scored features."""
    X = _as_matrix(features)
    n = X.shape[0]
    if n == 0:
        raise SamplingError("k-means needs at least one feature vector")
    if not 1 <= k <= n:
        raise SamplingError(f"k must lie in [1, {n}], got {k}")
    scaler = StandardScaler().fit(X)
    Z = scaler.transform(X)
    km = KMeans(n_clusters=k, init="k-means++", n_init=10, max_iter=300, tol=0.0,
                random_state=seed, algorithm="lloyd")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        km.fit(Z)
    for w in caught:
        logger.warning("k=%d: %s", k, w.message)
    centroids = km.cluster_centers_
    return ClusterModel(
        k=k,
        centroids=centroids,
        centroids_raw=scaler.inverse_transform(centroids),
        inertia=float(km.inertia_),
        labels=km.labels_.astype(np.intp),
        scaler=scaler,
    )


def inertia_curve(features: Features, k_range: Iterable[int], seed: int = 0) -> Dict[int, float]:
    X = _as_matrix(features)
    ks = sorted(set(int(k) for k in k_range))
    usable = [k for k in ks if 1 <= k <= X.shape[0]]
    if len(usable) < len(ks):
        logger.warning("skipping k values above the sample count %d: %s", X.shape[0], sorted(set(ks) - set(usable)))
    if not usable:
        raise SamplingError(f"no usable k in {ks} for {X.shape[0]} samples")
    return {k: kmeans(X, k, seed).inertia for k in usable}


def elbow(features: Features, k_range: Iterable[int], seed: int = 0,
          curve: Optional[Dict[int, float]] = None) -> int:
    """Knee of the inertia curve.

    Each interior k scores (I(k−1) − 2I(k) + I(k+1)) / I(k), the second
    difference relative to the inertia left at k. The highest score wins and
    ties go to the smaller k. A curve with no positive score anywhere (a
    straight line, or all zero) returns the smallest k.
    """
    curve = curve if curve is not None else inertia_curve(features, k_range, seed)
    ks = sorted(curve)
    best_k, best = ks[0], 0.0
    for k in ks[1:-1]:
        if k - 1 not in curve or k + 1 not in curve:
            continue
        num = curve[k - 1] - 2.0 * curve[k] + curve[k + 1]
        if num <= 0:
            continue
        score = num / curve[k] if curve[k] > 0 else np.inf
        if score > best:
            best_k, best = k, score
    if best_k == ks[0]:
        logger.info("inertia curve has no knee; using k=%d", best_k)
    else:
        logger.info("elbow at k=%d (relative second difference %.3g)", best_k, best)
    return best_k
