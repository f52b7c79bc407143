"""Layer 2: dataset subsampling

Exports:
- extract_subvolumes(state, size), moments(state), MomentVector
- kmeans(features, k, seed), ClusterModel, inertia_curve, elbow(features, k_range, seed)
- balanced_select(assignments, n_target, seed), split(indices, seed)
- sample_manifest(records, features, ...)

"""
from .moments import FEATURE_NAMES, MomentVector, extract_subvolumes, feature_matrix, moments
from .clustering import ClusterModel, elbow, inertia_curve, kmeans
from .selection import balanced_select, cluster_quotas, sample_manifest, split

__all__ = [
    "FEATURE_NAMES",
    "MomentVector",
    "extract_subvolumes",
    "feature_matrix",
    "moments",
    "ClusterModel",
    "elbow",
    "inertia_curve",
    "kmeans",
    "balanced_select",
    "cluster_quotas",
    "sample_manifest",
    "split",
]
