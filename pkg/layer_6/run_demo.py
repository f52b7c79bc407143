"""Drive the CLI end to end on a small synthetic state in a temp directory."""
import tempfile
from pathlib import Path

import numpy as np
from typer.testing import CliRunner

from layer_0 import FlowState, save_flow_state
from layer_6 import app


def run():
    n = 64
    x = (np.arange(n) + 0.5) * 2 * np.pi / n
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    state = FlowState.from_arrays(
        1.0 + 0.1 * np.cos(X) * np.cos(Y),
        np.sin(X) * np.cos(Y) * np.cos(Z),
        -np.cos(X) * np.sin(Y) * np.cos(Z),
        np.zeros_like(X),
        dx=2 * np.pi / n,
    )
    runner = CliRunner()
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        save_flow_state(state, tmp / "fine", tag="tg")
        for args in (
            ["inspect", str(tmp / "fine")],
            ["coarsen", str(tmp / "fine"), str(tmp / "coarse"), "--factor", "4"],
            ["baseline", str(tmp / "coarse"), str(tmp / "up"), "--factor", "4"],
            ["evaluate", str(tmp / "up"), str(tmp / "fine"), "--factor", "4", "--out", str(tmp / "report")],
            ["spectrum", str(tmp / "fine"), str(tmp / "spectrum.csv")],
        ):
            result = runner.invoke(app, args)
            print(f"$ {' '.join(args[:1])} (exit {result.exit_code})")
            print(result.output)


if __name__ == '__main__':
    run()
