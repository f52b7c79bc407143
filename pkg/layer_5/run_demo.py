"""Run the continuity check over all 48 cube symmetries and print a few losses."""
import numpy as np

from layer_0 import FlowState
from layer_5 import LossConfig, all_symmetries, mse_loss, phys_loss, verify_continuity


def run():
    rng = np.random.default_rng(3)
    shape = (16, 16, 16)
    state = FlowState.from_arrays(1.0 + rng.random(shape), *rng.standard_normal((3,) + shape))
    worst = max(verify_continuity(state, g) for g in all_symmetries())
    print("Max continuity deviation over 48 symmetries:", worst)
    noisy = FlowState.from_arrays(state.rho.values, *(c.values + 0.01 * rng.standard_normal(shape) for c in state.u))
    print("MSE:", mse_loss(noisy, state), "phys:", phys_loss(noisy, state, LossConfig()))


if __name__ == '__main__':
    run()
