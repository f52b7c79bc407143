"""Upsample a smooth 16³ field by 8 and print the error against the analytic field."""
import numpy as np

from layer_0 import GridSpec, ScalarField3D
from layer_3 import build_coef_matrix, flops, upsample


def _sampled(n: int, dx: float) -> np.ndarray:
    x = (np.arange(n) + 0.5) * dx
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    return np.sin(X) * np.cos(Y) * np.sin(2 * Z)


def main():
    coef = build_coef_matrix()
    print("B8 zero entries:", coef.n_zero, "nonzero:", coef.nnz)
    n, factor = 16, 8
    dx = 2 * np.pi / n
    coarse = ScalarField3D(GridSpec.cube(n, dx), _sampled(n, dx))
    fine = upsample(coarse, factor)
    err = np.abs(fine.values - _sampled(n * factor, dx / factor))
    print("Fine grid:", fine.grid.shape, "max error:", float(err.max()), "mean error:", float(err.mean()))
    print("FLOPs (sparse):", flops(fine.grid, 1), "(dense):", flops(fine.grid, 1, "dense"))


if __name__ == '__main__':
    main()
