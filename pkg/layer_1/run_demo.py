"""Coarsen a random 32³ state by 4 and print conservation residuals and SGS ranges."""
import numpy as np

from layer_0 import FlowState
from layer_1 import FilterSpec, conservation_report, favre_filter, sgs_stress


def run():
    rng = np.random.default_rng(1)
    shape = (32, 32, 32)
    fine = FlowState.from_arrays(1.0 + rng.random(shape), *rng.standard_normal((3,) + shape))
    spec = FilterSpec(4)
    coarse = favre_filter(fine, spec)
    print("Coarse grid:", coarse.grid)
    print("Conservation residuals:", conservation_report(fine, coarse, spec))
    tau = sgs_stress(fine, spec)
    for name, comp in zip(("t11", "t22", "t33", "t12", "t13", "t23"), tau.as_tuple()):
        print(f"{name}: min {comp.values.min():.4g} max {comp.values.max():.4g}")


if __name__ == '__main__':
    run()
