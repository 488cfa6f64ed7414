"""Assembly of the non-Hermitian axial-evolution generator.

The stationary scattering problem is recast as an evolution in the axial
coordinate x: two-component momentum-space amplitudes F = (F1, F2) obey
i dF/dx = H(x) F with

    H(x) = (1/2) E(-x) [ V(x) W^-1 (x) K ] E(x)  -  i W_im s3,

where V(x) is the transverse-convolution matrix of the potential, W the
diagonal axial-wavenumber matrix, E(x) = exp(i x W_re s3) the free-phase
frame, K = [[1, 1], [-1, -1]] the two-component coupling, and s3 =
diag(1, -1).  For a single-point grid (d = 0) this reduces to the 2x2
matrix returned by assemble_h_1d.
"""

from __future__ import annotations

import numpy as np

from .core import BlockOperator, MomentumGrid, dispersion_diagonals
from .potential import PotentialModel, XOnlyPotential

__all__ = ["assemble_v", "assemble_h", "assemble_h_1d", "HamiltonianFactory"]


def assemble_v(model: PotentialModel, grid: MomentumGrid, x: float) -> np.ndarray:
    """Convolution matrix of the potential slice at axial position x.

    V[i, j] = vtilde(x, p_i - p_j) * weights[j] / (2*pi)^d, so that V @ f
    is the quadrature of the momentum-space convolution integral.
    """
    support = model.support_bounds()
    if support is None or not (support[0] <= x <= support[1]):
        return np.zeros((grid.size, grid.size), dtype=complex)
    vt = model.fourier_pairs(x, grid)
    return vt * (grid.weights[None, :] / (2.0 * np.pi) ** grid.d)


class HamiltonianFactory:
    """Caches grid-derived factors and assembles H(x) on demand."""

    def __init__(self, model: PotentialModel, grid: MomentumGrid, k: float | None = None):
        if model.d != grid.d:
            raise ValueError(f"potential has d={model.d} but grid has d={grid.d}")
        self.model = model
        self.grid = grid
        self.k = grid.k if k is None else float(k)
        disp = dispersion_diagonals(grid, self.k)
        if np.any(np.abs(disp.full) == 0):
            raise ValueError("grid touches |p| = k; inverse axial wavenumber diverges")
        self.w = disp.full
        self.w_re = disp.real_part
        self.w_im = disp.imag_part
        self.w_inv = 1.0 / disp.full
        self.support = model.support_bounds()

    def free_matrix(self) -> np.ndarray:
        """H(x) outside the potential support: -i * W_im s3."""
        n = self.grid.size
        h = np.zeros((2 * n, 2 * n), dtype=complex)
        idx = np.arange(n)
        h[idx, idx] = -1j * self.w_im
        h[n + idx, n + idx] = 1j * self.w_im
        return h

    def __call__(self, x: float) -> np.ndarray:
        if self.support is None or not (self.support[0] <= x <= self.support[1]):
            return self.free_matrix()
        v = assemble_v(self.model, self.grid, x)
        g = v * self.w_inv[None, :]
        phase = np.exp(1j * x * self.w_re)
        e_minus = np.conj(phase)
        # Interaction blocks: 0.5 * E(-x) (G (x) K) E(x) with K = [[1,1],[-1,-1]].
        b11 = 0.5 * (e_minus[:, None] * g * phase[None, :])
        b12 = 0.5 * (e_minus[:, None] * g * e_minus[None, :])
        b21 = -0.5 * (phase[:, None] * g * phase[None, :])
        b22 = -0.5 * (phase[:, None] * g * e_minus[None, :])
        n = self.grid.size
        h = np.empty((2 * n, 2 * n), dtype=complex)
        h[:n, :n] = b11
        h[:n, n:] = b12
        h[n:, :n] = b21
        h[n:, n:] = b22
        idx = np.arange(n)
        h[idx, idx] -= 1j * self.w_im
        h[n + idx, n + idx] += 1j * self.w_im
        return h


def assemble_h(model: PotentialModel, grid: MomentumGrid, k: float, x: float) -> BlockOperator:
    """Evolution generator H(x) as a BlockOperator on the full grid."""
    return BlockOperator(HamiltonianFactory(model, grid, k)(x), grid=grid)


def assemble_h_1d(model, k: float, x: float) -> np.ndarray:
    """2x2 generator of the one-dimensional problem.

    H(x) = (v(x) / 2k) [[1, exp(-2ikx)], [-exp(2ikx), -1]]; traceless for
    every x, which is what keeps det of the transfer matrix equal to 1.
    """
    if isinstance(model, XOnlyPotential):
        v = complex(model.profile(x))
    elif isinstance(model, PotentialModel):
        if model.d != 0:
            raise ValueError("assemble_h_1d needs an x-only (d = 0) potential")
        v = model.transverse_fourier(x, np.zeros(0))
    else:
        v = complex(model(x))
    c = v / (2.0 * k)
    phase = np.exp(2j * k * x)
    return np.array([[c, c / phase], [-c * phase, -c]], dtype=complex)
