"""Score the tricubic baseline on a coarsened Taylor–Green state."""
import numpy as np

from layer_0 import FlowState
from layer_1 import FilterSpec, favre_filter
from layer_3 import upsample_state
from layer_4 import evaluate_pair, tke_spectrum


def taylor_green(n: int = 64) -> FlowState:
    x = (np.arange(n) + 0.5) * 2 * np.pi / n
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    u1 = np.sin(X) * np.cos(Y) * np.cos(Z)
    u2 = -np.cos(X) * np.sin(Y) * np.cos(Z)
    rho = 1.0 + 0.1 * np.cos(2 * X) * np.cos(2 * Y)
    return FlowState.from_arrays(rho, u1, u2, np.zeros_like(u1), dx=2 * np.pi / n)


def run():
    truth = taylor_green()
    spec = FilterSpec(4)
    pred = upsample_state(favre_filter(truth, spec), spec.factor)
    report = evaluate_pair(pred, truth, spec)
    print(report.model_dump_json(indent=2))
    spec_t = tke_spectrum(truth)
    print("Spectrum peak shell:", spec_t.peak(), "Parseval residual:", spec_t.parseval_residual)


if __name__ == '__main__':
    run()
