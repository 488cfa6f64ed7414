"""Momentum-space discretization and the dense block-operator algebra.

The scattering geometry singles out one Cartesian axis (called x); the
remaining d transverse directions are discretized in momentum space on a
uniform, parity-symmetric lattice.  Transverse momenta with |p| < k are
propagating (real axial wavenumber), the rest are evanescent.  All
operators downstream act on two-component functions over this lattice and
are realized as 2x2 blocks of dense N x N complex matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridResonanceError",
    "ScatteringConfig",
    "MomentumGrid",
    "BlockOperator",
    "DispersionDiagonals",
    "build_grid",
    "axial_wavenumber",
    "dispersion_diagonals",
]


class GridResonanceError(ValueError):
    """A lattice point falls inside the exclusion band around |p| = k."""


@dataclass(frozen=True)
class ScatteringConfig:
    """Discretization parameters for one scattering computation.

    Parameters
    ----------
    k : float
        Wavenumber of the incident wave (> 0).
    d : int
        Number of transverse dimensions (0, 1 or 2).  d = 0 is the plain
        one-dimensional problem on a single-point grid.
    p_max : float or None
        Transverse momentum cutoff per axis; defaults to 2*k.
    n_per_axis : int
        Lattice points per transverse axis (even, positive).
    grid_offset : bool
        Half-cell stagger.  True (default) places points at cell centers so
        no point sits at p = 0; False uses a node lattice that includes
        p = 0 and +/- p_max (n_per_axis + 1 points per axis).
    exclusion_band : float
        Points with ||p| - k| < exclusion_band * k are rejected, keeping
        the inverse axial wavenumber bounded.
    """

    k: float
    d: int = 0
    p_max: float | None = None
    n_per_axis: int = 16
    grid_offset: bool = True
    exclusion_band: float = 1e-6

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.d not in (0, 1, 2):
            raise ValueError(f"d must be 0, 1 or 2, got {self.d}")
        if self.p_max is None:
            object.__setattr__(self, "p_max", 2.0 * self.k)
        if self.d > 0:
            if self.p_max < self.k:
                raise ValueError(f"p_max must be >= k, got {self.p_max} < {self.k}")
            n = self.n_per_axis
            if n <= 0 or n % 2 != 0:
                raise ValueError(f"n_per_axis must be even and positive, got {n}")
        if not 0 < self.exclusion_band < 1:
            raise ValueError("exclusion_band must lie in (0, 1)")


@dataclass(frozen=True)
class MomentumGrid:
    """Parity-symmetric transverse momentum lattice.

    points[i] is the i-th d-dimensional momentum vector, weights[i] its
    quadrature weight ((dp)^d for the uniform midpoint rule), propagating
    the sorted indices with |p| < k, and parity_perm the involution with
    points[parity_perm[i]] == -points[i] exactly.
    """

    k: float
    d: int
    points: np.ndarray            # (N, d)
    weights: np.ndarray           # (N,)
    propagating: np.ndarray       # sorted index array
    parity_perm: np.ndarray       # (N,) int

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def n_propagating(self) -> int:
        return self.propagating.shape[0]

    def p_squared(self) -> np.ndarray:
        if self.d == 0:
            return np.zeros(1)
        return np.einsum("id,id->i", self.points, self.points)

    def pair_differences(self) -> np.ndarray:
        """All differences points[i] - points[j], shape (N, N, d)."""
        return self.points[:, None, :] - self.points[None, :, :]

    def parity_matrix(self, indices: np.ndarray | None = None) -> np.ndarray:
        """Permutation matrix of p -> -p, optionally restricted to a
        parity-closed index subset (in the subset's own ordering)."""
        if indices is None:
            perm = self.parity_perm
            n = self.size
            mat = np.zeros((n, n))
            mat[np.arange(n), perm] = 1.0
            return mat
        pos = {int(g): s for s, g in enumerate(indices)}
        n = len(indices)
        mat = np.zeros((n, n))
        for s, g in enumerate(indices):
            img = int(self.parity_perm[g])
            if img not in pos:
                raise ValueError("index subset is not parity-closed")
            mat[s, pos[img]] = 1.0
        return mat

    def nearest_index(self, p: np.ndarray) -> tuple[int, float]:
        """Grid index closest to transverse momentum p and its distance."""
        p = np.atleast_1d(np.asarray(p, dtype=float))
        if self.d == 0:
            return 0, 0.0
        dist = np.linalg.norm(self.points - p[None, :], axis=1)
        i = int(np.argmin(dist))
        return i, float(dist[i])


@dataclass
class BlockOperator:
    """A 2x2 block of N x N complex matrices acting on two-component
    grid functions, stored as one dense (2N, 2N) array."""

    matrix: np.ndarray
    grid: MomentumGrid = field(repr=False, default=None)

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2 != 0:
            raise ValueError(f"expected square even-dimensional matrix, got {m.shape}")
        self.matrix = m

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2

    def block(self, a: int, b: int) -> np.ndarray:
        n = self.n
        return self.matrix[a * n:(a + 1) * n, b * n:(b + 1) * n]

    @property
    def blocks(self):
        return [[self.block(0, 0), self.block(0, 1)],
                [self.block(1, 0), self.block(1, 1)]]

    @classmethod
    def from_blocks(cls, b11, b12, b21, b22, grid=None) -> "BlockOperator":
        top = np.hstack([b11, b12])
        bottom = np.hstack([b21, b22])
        return cls(np.vstack([top, bottom]), grid=grid)


def _axis_points(cfg: ScatteringConfig) -> np.ndarray:
    n = cfg.n_per_axis
    dp = 2.0 * cfg.p_max / n
    if cfg.grid_offset:
        # Cell centers: (j + 1/2 - n/2) * dp, parity-symmetric with no
        # point at p = 0 for even n.
        j = np.arange(n)
        return (j + 0.5 - n / 2) * dp
    # Node lattice including 0 and the endpoints (n + 1 points).
    j = np.arange(n + 1)
    return (j - n / 2) * dp


def build_grid(cfg: ScatteringConfig) -> MomentumGrid:
    """Build the parity-symmetric transverse momentum lattice.

    Raises GridResonanceError if any point falls within the exclusion band
    around the circle |p| = k, where the inverse axial wavenumber blows
    up; change n_per_axis or p_max to move the lattice off the circle.
    """
    if cfg.d == 0:
        return MomentumGrid(
            k=cfg.k, d=0,
            points=np.zeros((1, 0)),
            weights=np.ones(1),
            propagating=np.array([0]),
            parity_perm=np.array([0]),
        )

    axis = _axis_points(cfg)
    m = axis.shape[0]
    dp = 2.0 * cfg.p_max / cfg.n_per_axis
    if cfg.d == 1:
        points = axis[:, None]
        perm = np.arange(m)[::-1].copy()
    else:
        points = np.array(list(itertools.product(axis, axis)))
        idx = np.arange(m * m).reshape(m, m)
        perm = idx[::-1, ::-1].reshape(-1).copy()

    p_abs = np.linalg.norm(points, axis=1)
    offenders = np.abs(p_abs - cfg.k) < cfg.exclusion_band * cfg.k
    if np.any(offenders):
        bad = points[offenders][0]
        raise GridResonanceError(
            f"grid resonant with dispersion circle: point {bad} has "
            f"||p| - k| < {cfg.exclusion_band:g} * k; "
            "change n_per_axis or p_max"
        )

    weights = np.full(points.shape[0], dp ** cfg.d)
    propagating = np.flatnonzero(p_abs < cfg.k)
    return MomentumGrid(
        k=cfg.k, d=cfg.d,
        points=points, weights=weights,
        propagating=propagating, parity_perm=perm,
    )


def axial_wavenumber(p, k: float) -> complex:
    """Axial (x-direction) wavenumber for transverse momentum p.

    Returns sqrt(k^2 - p^2) when p^2 < k^2 and i*sqrt(p^2 - k^2)
    otherwise, so both the real and imaginary parts are nonnegative.
    Total function: no branch ambiguity, no poles.
    """
    p = np.asarray(p, dtype=float)
    p2 = float(np.dot(p.ravel(), p.ravel()))
    k2 = k * k
    if p2 < k2:
        return complex(np.sqrt(k2 - p2))
    return 1j * float(np.sqrt(p2 - k2))


@dataclass(frozen=True)
class DispersionDiagonals:
    """Diagonals (as 1D arrays) of the axial-wavenumber operators.

    full = real_part + 1j * imag_part entrywise; imag_part vanishes on
    propagating indices and real_part vanishes on evanescent ones.
    """

    full: np.ndarray
    real_part: np.ndarray
    imag_part: np.ndarray


def dispersion_diagonals(grid: MomentumGrid, k: float | None = None) -> DispersionDiagonals:
    """Axial wavenumber, its oscillatory part and its decay part on the grid."""
    if k is None:
        k = grid.k
    p2 = grid.p_squared()
    k2 = k * k
    prop = p2 < k2
    w_re = np.where(prop, np.sqrt(np.maximum(k2 - p2, 0.0)), 0.0)
    w_im = np.where(prop, 0.0, np.sqrt(np.maximum(p2 - k2, 0.0)))
    return DispersionDiagonals(full=w_re + 1j * w_im, real_part=w_re, imag_part=w_im)
