"""Tile a synthetic field, cluster the tiles and print the selection summary."""
import numpy as np

from layer_0 import FlowState, ManifestRecord
from layer_2 import extract_subvolumes, moments, sample_manifest


def run():
    rng = np.random.default_rng(2)
    n, size = 64, 16
    x = np.linspace(0.0, 1.0, n)[:, None, None] * np.ones((n, n, n))
    u1 = np.where(x < 0.5, 1.0, 4.0) + 0.2 * rng.standard_normal((n, n, n))
    state = FlowState.from_arrays(np.ones((n, n, n)), u1, rng.standard_normal((n, n, n)), np.zeros((n, n, n)))
    tiles = extract_subvolumes(state, size)
    feats = [moments(t) for t in tiles]
    records = [ManifestRecord(hash_id=f"{i:04x}", nx=size, ny=size, nz=size) for i in range(len(tiles))]
    selected, summary = sample_manifest(records, feats, n_target=20, k_range=(1, 6), seed=0)
    print("Tiles:", len(tiles), "| selected:", len(selected))
    print(summary)


if __name__ == '__main__':
    run()
