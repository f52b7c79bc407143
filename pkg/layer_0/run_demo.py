"""Round-trip a small random state through the BLASTNet writer/reader."""
import numpy as np

from layer_0 import FlowState, compute_stats, load_state, normalize, save_flow_state


def run(out_dir: str = "outputs/layer0_demo"):
    rng = np.random.default_rng(0)
    shape = (16, 16, 16)
    state = FlowState.from_arrays(1.0 + 0.1 * rng.random(shape), *rng.standard_normal((3,) + shape))
    info = save_flow_state(state, out_dir, tag="demo", dataset_id="layer0-demo")
    back = load_state(info)
    stats = compute_stats([back])
    err = max(float(np.abs(a.values - b.values).max()) for a, b in zip(state.channels, back.channels))
    print("Wrote", info, "| max float32 round-trip error:", err)
    print("Channel stats:", stats.to_dict())
    print("Normalized rho mean:", float(normalize(back, stats).rho.values.mean()))


if __name__ == '__main__':
    run()
