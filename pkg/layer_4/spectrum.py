"""Shell-averaged turbulent kinetic energy spectrum of a cubic, periodic state."""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.fft import fftfreq, fftn

from layer_0.errors import GridError
from layer_0.fields import FlowState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """E(κ) on integer shells κ = 0, 1, ... in units of 2π/L."""

    k: np.ndarray
    E: np.ndarray
    tke: float

    @property
    def total(self) -> float:
        return float(np.sum(self.E))

    @property
    def parseval_residual(self) -> float:
        """|ΣE − ½⟨|u'|²⟩| relative to the physical-space energy (absolute if that is 0)."""
        diff = abs(self.total - self.tke)
        return diff / self.tke if self.tke > 0 else diff

    def peak(self) -> int:
        return int(self.k[int(np.argmax(self.E))])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"k": self.k, "E": self.E})


def tke_spectrum(state: FlowState, normalize: bool = False) -> Spectrum:
    """E(κ) = ½ Σ_{shell κ} Σ_i |û_i|² / N², N the voxel count.

    Each velocity component has its mean removed first. With ``normalize``
    the fluctuations are divided by u_rms = sqrt(⟨u'·u'⟩/3).
    """
    grid = state.grid
    if not grid.is_cubic:
        raise GridError(f"spectra need a cubic domain, got {grid.shape}")
    n = grid.nx
    u = np.stack([c.values - c.values.mean() for c in state.u])
    if normalize:
        rms = float(np.sqrt(np.mean(np.sum(u * u, axis=0)) / 3.0))
        if rms > 0:
            u = u / rms
        else:
            logger.warning("zero velocity fluctuations; spectrum left unnormalized")
    tke = 0.5 * float(np.mean(np.sum(u * u, axis=0)))

    kk = fftfreq(n) * n
    kx, ky, kz = np.meshgrid(kk, kk, kk, indexing="ij")
    shell = np.rint(np.sqrt(kx * kx + ky * ky + kz * kz)).astype(np.intp).reshape(-1)

    power = np.zeros(grid.n_vox, dtype=np.float64)
    for comp in u:
        uh = fftn(comp)
        power += (np.abs(uh) ** 2).reshape(-1)
    power *= 0.5 / float(grid.n_vox) ** 2
    E = np.bincount(shell, weights=power, minlength=int(shell.max()) + 1)
    return Spectrum(np.arange(E.size), E, tke)
