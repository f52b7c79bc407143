"""Create a small synthetic dataset under outputs/demo/ so every CLI command can
be tried without downloading BLASTNet.

It creates:
 - outputs/demo/fine/        Taylor–Green state (4 x .dat + info.json)
 - outputs/demo/momentum/    <Var>_id<hash>.dat sub-volumes from three flow families
 - outputs/demo/manifest.csv manifest listing those sub-volumes
 - outputs/demo/stats.json   normalization stats of the sub-volumes

Usage: python scripts/generate_demo_assets.py '{"n": 64, "tile": 32, "seed": 0}'
"""
import hashlib
import json
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import numpy as np
from tqdm import tqdm

from layer_0 import (
    STATE_VARS,
    FlowState,
    ManifestRecord,
    atomic_write,
    compute_stats,
    emit_manifest,
    momentum_filename,
    save_flow_state,
    setup_logging,
    write_volume,
)
from layer_2 import extract_subvolumes

OUT = os.path.join('outputs', 'demo')

# (velocity amplitude, density fluctuation, noise level) per flow family
FAMILIES = {
    "calm": (0.2, 0.02, 0.01),
    "vortex": (1.0, 0.10, 0.05),
    "noisy": (0.5, 0.05, 0.40),
}


def taylor_green(n: int, amp: float = 1.0, drho: float = 0.1, noise: float = 0.0, rng=None) -> FlowState:
    x = (np.arange(n) + 0.5) * 2 * np.pi / n
    X, Y, Z = np.meshgrid(x, x, x, indexing='ij')
    rng = rng if rng is not None else np.random.default_rng(0)

    def jitter():
        return noise * rng.standard_normal(X.shape) if noise else 0.0

    rho = 1.0 + drho * np.cos(2 * X) * np.cos(2 * Y)
    u1 = amp * np.sin(X) * np.cos(Y) * np.cos(Z) + jitter()
    u2 = -amp * np.cos(X) * np.sin(Y) * np.cos(Z) + jitter()
    u3 = np.zeros_like(X) + jitter()
    return FlowState.from_arrays(rho, u1, u2, u3, dx=2 * np.pi / n)


def write_momentum_sample(state: FlowState, root: str, hash_id: str) -> None:
    for var, field in zip(STATE_VARS, state.channels):
        write_volume(field, os.path.join(root, momentum_filename(var, hash_id)))


def _dump_json(obj, path: str) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(obj, f, indent=2)


def main():
    setup_logging()
    args = {}
    if len(sys.argv) > 1:
        try:
            args = json.loads(sys.argv[1])
        except json.JSONDecodeError:
            print('Could not parse runner JSON arg:', sys.argv[1])
    n = int(args.get('n', 64))
    tile = int(args.get('tile', 32))
    seed = int(args.get('seed', 0))
    rng = np.random.default_rng(seed)

    print('Writing Taylor-Green state...')
    info = save_flow_state(taylor_green(n), os.path.join(OUT, 'fine'), tag='taylor_green', dataset_id='demo-taylor-green')
    print('  ->', info)

    momentum = os.path.join(OUT, 'momentum')
    os.makedirs(momentum, exist_ok=True)
    records, samples = [], []
    for family, (amp, drho, noise) in tqdm(FAMILIES.items(), desc='families'):
        # phase shifts give each family several distinct tiles
        for shift in range(2):
            state = taylor_green(n, amp, drho, noise, rng)
            if shift:
                state = FlowState.from_arrays(*(np.roll(c.values, n // 4, axis=0) for c in state.channels), dx=state.grid.dx)
            for i, sub in enumerate(extract_subvolumes(state, tile)):
                hash_id = hashlib.sha1(f'{family}-{shift}-{i}'.encode()).hexdigest()[:12]
                write_momentum_sample(sub, momentum, hash_id)
                records.append(ManifestRecord(hash_id=hash_id, description=family, nx=tile, ny=tile, nz=tile))
                samples.append(sub)

    manifest = emit_manifest(records, os.path.join(OUT, 'manifest.csv'))
    stats = compute_stats(samples).to_dict()
    atomic_write(os.path.join(OUT, 'stats.json'), lambda tmp: _dump_json(stats, tmp))
    print(f'{len(records)} sub-volumes listed in {manifest}')
    print('Demo assets written to', OUT)


if __name__ == '__main__':
    main()
