"""Complex short-range potential models with transverse Fourier transforms.

Every model exposes the partial Fourier transform vtilde(x, p) of
v(x, r) over the transverse coordinates r, an x-support interval outside
which v is treated as zero, and (for the analytic kinds) the full
(d+1)-dimensional Fourier transform used by the Born-level oracle.

Potentials whose transverse dependence is a delta in momentum space
(profiles of x alone embedded in d > 0) only materialize on a grid; they
override the pairwise evaluation with the on-grid delta convention
delta^d(p_i - p_j) -> [i == j] / weights[j].
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j1 as _bessel_j1

from .core import MomentumGrid

__all__ = [
    "Profile",
    "GaussianProfile",
    "RectProfile",
    "SumProfile",
    "PotentialModel",
    "ZeroPotential",
    "XOnlyPotential",
    "SeparableGaussianPotential",
    "GaussianPotential",
    "DiskPotential",
    "SumPotential",
    "SampledPotential",
    "seeded_gaussian_mixture",
    "from_config",
    "profile_from_config",
]

# Envelope values below this fraction of the peak count as zero support.
SUPPORT_CUTOFF = 1e-12


# ----------------------------------------------------------------------
# 1D profiles (x dependence)

class Profile:
    """Complex-valued function of the axial coordinate x."""

    def __call__(self, x):
        raise NotImplementedError

    def support(self) -> tuple[float, float] | None:
        raise NotImplementedError

    def fourier(self, kappa):
        """Integral of exp(-i*kappa*x) * profile(x) over the line."""
        raise NotImplementedError

    def abs_integral(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianProfile(Profile):
    g: complex
    width: float = 1.0
    center: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.g * np.exp(-((x - self.center) / self.width) ** 2)

    def support(self):
        if self.g == 0:
            return None
        half = self.width * np.sqrt(np.log(1.0 / SUPPORT_CUTOFF))
        return (self.center - half, self.center + half)

    def fourier(self, kappa):
        kappa = np.asarray(kappa, dtype=float)
        a = self.width
        return (self.g * a * np.sqrt(np.pi)
                * np.exp(-(a * kappa) ** 2 / 4.0)
                * np.exp(-1j * kappa * self.center))

    def abs_integral(self):
        return abs(self.g) * self.width * np.sqrt(np.pi)


@dataclass(frozen=True)
class RectProfile(Profile):
    g: complex
    x0: float = 0.0
    x1: float = 1.0

    def __post_init__(self):
        if not self.x1 > self.x0:
            raise ValueError("rect profile needs x1 > x0")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.x0) & (x < self.x1)
        return np.where(inside, self.g, 0.0 + 0.0j)

    def support(self):
        if self.g == 0:
            return None
        return (self.x0, self.x1)

    def fourier(self, kappa):
        kappa = np.asarray(kappa, dtype=float)
        out = np.empty(np.shape(kappa), dtype=complex)
        small = np.abs(kappa) < 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = (np.exp(-1j * kappa * self.x0) - np.exp(-1j * kappa * self.x1)) / (1j * kappa)
        out = np.where(small, self.g * (self.x1 - self.x0), self.g * vals)
        return out if out.ndim else complex(out)

    def abs_integral(self):
        return abs(self.g) * (self.x1 - self.x0)


@dataclass(frozen=True)
class SumProfile(Profile):
    terms: tuple[Profile, ...]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape, dtype=complex)
        for t in self.terms:
            total = total + t(x)
        return total

    def support(self):
        bounds = [t.support() for t in self.terms]
        bounds = [b for b in bounds if b is not None]
        if not bounds:
            return None
        return (min(b[0] for b in bounds), max(b[1] for b in bounds))

    def fourier(self, kappa):
        return sum(t.fourier(kappa) for t in self.terms)

    def abs_integral(self):
        return sum(t.abs_integral() for t in self.terms)


# ----------------------------------------------------------------------
# Potential models

class PotentialModel:
    """Base interface: transverse Fourier data of a short-range potential."""

    d: int = 0
    is_short_range: bool = True

    def transverse_fourier(self, x: float, p) -> complex:
        """vtilde(x, p) at a single transverse momentum p (shape (d,))."""
        p = np.atleast_1d(np.asarray(p, dtype=float)).reshape(-1)
        return complex(self._ft(np.asarray([x], dtype=float), p[None, :])[0])

    def _ft(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        """Vectorized vtilde over x (shape (m,)) and p (shape (m, d))."""
        raise NotImplementedError

    def support_bounds(self) -> tuple[float, float] | None:
        raise NotImplementedError

    def fourier_pairs(self, x: float, grid: MomentumGrid) -> np.ndarray:
        """Matrix vtilde(x, p_i - p_j) over all grid index pairs."""
        n = grid.size
        dp = grid.pair_differences().reshape(n * n, grid.d)
        xs = np.full(n * n, float(x))
        return self._ft(xs, dp).reshape(n, n)

    def full_fourier(self, q) -> complex:
        """Fourier transform of v over all d+1 coordinates, q = (q_x, q_t)."""
        raise NotImplementedError(f"{type(self).__name__} has no closed-form full transform")


@dataclass(frozen=True)
class ZeroPotential(PotentialModel):
    d: int = 0

    def _ft(self, x, p):
        return np.zeros(x.shape[0], dtype=complex)

    def support_bounds(self):
        return None

    def fourier_pairs(self, x, grid):
        return np.zeros((grid.size, grid.size), dtype=complex)

    def full_fourier(self, q):
        return 0.0 + 0.0j


@dataclass(frozen=True)
class XOnlyPotential(PotentialModel):
    """v(x, r) = u(x): constant across the transverse plane.

    For d = 0 this is the plain one-dimensional potential.  For d > 0 the
    transverse transform is u(x) * (2*pi)^d * delta^d(p), which only makes
    sense on a grid; fourier_pairs realizes the delta as the identity
    matrix scaled by (2*pi)^d / weights.
    """

    profile: Profile
    d: int = 0

    def __call__(self, x):
        return self.profile(x)

    def _ft(self, x, p):
        if self.d > 0:
            raise ValueError(
                "x-only potential in d > 0 has a distributional transverse "
                "transform; use fourier_pairs on a grid"
            )
        return np.asarray(self.profile(x), dtype=complex)

    def support_bounds(self):
        return self.profile.support()

    def fourier_pairs(self, x, grid):
        vals = complex(self.profile(x))
        if self.d == 0:
            return np.array([[vals]], dtype=complex)
        # On-grid delta: (2*pi)^d * [i == j] / weights[j].
        scale = (2.0 * np.pi) ** self.d / grid.weights
        return np.diag(vals * scale).astype(complex)


@dataclass(frozen=True)
class SeparableGaussianPotential(PotentialModel):
    """v(x, r) = profile(x) * prod_t exp(-((r_t - c_t)/b_t)^2)."""

    profile: Profile
    t_widths: tuple[float, ...]
    t_centers: tuple[float, ...] = None
    d: int = field(init=False, default=0)

    def __post_init__(self):
        widths = tuple(float(b) for b in self.t_widths)
        object.__setattr__(self, "t_widths", widths)
        centers = self.t_centers or tuple(0.0 for _ in widths)
        object.__setattr__(self, "t_centers", tuple(float(c) for c in centers))
        if len(self.t_centers) != len(widths):
            raise ValueError("t_centers and t_widths lengths differ")
        object.__setattr__(self, "d", len(widths))
        object.__setattr__(self, "_pair_cache", {})

    def transverse_factor(self, p: np.ndarray) -> np.ndarray:
        """Fourier transform of the transverse Gaussian, p shape (m, d)."""
        out = np.ones(p.shape[0], dtype=complex)
        for t, (b, c) in enumerate(zip(self.t_widths, self.t_centers)):
            pt = p[:, t]
            out = out * (b * np.sqrt(np.pi) * np.exp(-(b * pt) ** 2 / 4.0)
                         * np.exp(-1j * pt * c))
        return out

    def _ft(self, x, p):
        return np.asarray(self.profile(x), dtype=complex) * self.transverse_factor(p)

    def support_bounds(self):
        return self.profile.support()

    def fourier_pairs(self, x, grid):
        cache = self._pair_cache
        key = id(grid)
        if key not in cache:
            n = grid.size
            dp = grid.pair_differences().reshape(n * n, self.d)
            cache.clear()
            cache[key] = self.transverse_factor(dp).reshape(n, n)
        return complex(self.profile(x)) * cache[key]

    def full_fourier(self, q):
        q = np.asarray(q, dtype=float)
        return complex(self.profile.fourier(q[0]) * self.transverse_factor(q[None, 1:])[0])


def GaussianPotential(g, x_width=1.0, x_center=0.0, t_widths=(1.0,), t_centers=None):
    """Gaussian bump in all d+1 coordinates (d = len(t_widths))."""
    return SeparableGaussianPotential(
        profile=GaussianProfile(complex(g), x_width, x_center),
        t_widths=tuple(t_widths), t_centers=t_centers,
    )


@dataclass(frozen=True)
class DiskPotential(PotentialModel):
    """Constant coupling g inside a ball of the full d+1 space.

    d = 1: disk in the (x, y) plane; d = 2: ball in (x, y, z).
    """

    g: complex
    radius: float = 1.0
    center: tuple[float, ...] = None   # length d+1, axial first
    d: int = 1

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("disk potential defined for d in {1, 2}")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        c = self.center or tuple(0.0 for _ in range(self.d + 1))
        if len(c) != self.d + 1:
            raise ValueError(f"center must have {self.d + 1} components")
        object.__setattr__(self, "center", tuple(float(v) for v in c))
        object.__setattr__(self, "g", complex(self.g))

    def chord_halfwidth(self, x):
        """Transverse radius of the slice at axial position x."""
        dx = np.asarray(x, dtype=float) - self.center[0]
        return np.sqrt(np.maximum(self.radius ** 2 - dx ** 2, 0.0))

    def _ft(self, x, p):
        h = self.chord_halfwidth(x)
        out = np.zeros(x.shape[0], dtype=complex)
        inside = h > 0
        if not np.any(inside):
            return out
        hi = h[inside]
        pi = p[inside]
        if self.d == 1:
            pt = pi[:, 0]
            small = np.abs(pt) * hi < 1e-10
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = 2.0 * np.sin(pt * hi) / pt
            vals = np.where(small, 2.0 * hi, vals)
            phase = np.exp(-1j * pt * self.center[1])
        else:
            pabs = np.linalg.norm(pi, axis=1)
            z = pabs * hi
            small = z < 1e-10
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = 2.0 * np.pi * hi * _bessel_j1(z) / pabs
            vals = np.where(small, np.pi * hi ** 2, vals)
            phase = np.exp(-1j * (pi @ np.asarray(self.center[1:])))
        out[inside] = self.g * vals * phase
        return out

    def support_bounds(self):
        if self.g == 0:
            return None
        return (self.center[0] - self.radius, self.center[0] + self.radius)

    def full_fourier(self, q):
        q = np.asarray(q, dtype=float)
        qabs = float(np.linalg.norm(q))
        R = self.radius
        phase = np.exp(-1j * float(q @ np.asarray(self.center)))
        if self.d == 1:
            # 2D disk transform.
            if qabs * R < 1e-10:
                base = np.pi * R ** 2
            else:
                base = 2.0 * np.pi * R * _bessel_j1(qabs * R) / qabs
        else:
            # 3D ball transform.
            if qabs * R < 1e-8:
                base = 4.0 * np.pi * R ** 3 / 3.0
            else:
                z = qabs * R
                base = 4.0 * np.pi * (np.sin(z) - z * np.cos(z)) / qabs ** 3
        return self.g * base * phase


@dataclass(frozen=True)
class SumPotential(PotentialModel):
    terms: tuple[PotentialModel, ...]

    def __post_init__(self):
        ds = {t.d for t in self.terms}
        if len(ds) != 1:
            raise ValueError("all summands must share the transverse dimension")
        object.__setattr__(self, "d", ds.pop())

    def _ft(self, x, p):
        total = np.zeros(x.shape[0], dtype=complex)
        for t in self.terms:
            total = total + t._ft(x, p)
        return total

    def support_bounds(self):
        bounds = [t.support_bounds() for t in self.terms]
        bounds = [b for b in bounds if b is not None]
        if not bounds:
            return None
        return (min(b[0] for b in bounds), max(b[1] for b in bounds))

    def fourier_pairs(self, x, grid):
        total = np.zeros((grid.size, grid.size), dtype=complex)
        for t in self.terms:
            total = total + t.fourier_pairs(x, grid)
        return total

    def full_fourier(self, q):
        return sum(t.full_fourier(q) for t in self.terms)


class SampledPotential(PotentialModel):
    """Potential given by samples on a rectangular (x, r) lattice.

    The transverse transform is the plain quadrature
    vtilde(x, p) = sum_r exp(-i p . r) v(x, r) * (dr)^d, with linear
    interpolation between the x nodes and zero outside the window.
    Samples should decay at the transverse window edges; otherwise the
    transform is aliased and the model is flagged.
    """

    def __init__(self, x_nodes, r_axes, values):
        self.x_nodes = np.asarray(x_nodes, dtype=float)
        self.r_axes = [np.asarray(a, dtype=float) for a in r_axes]
        self.values = np.asarray(values, dtype=complex)
        self.d = len(self.r_axes)
        if self.d not in (1, 2):
            raise ValueError("sampled potentials need 1 or 2 transverse axes")
        expected = (self.x_nodes.size,) + tuple(a.size for a in self.r_axes)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != lattice {expected}")
        if self.x_nodes.size < 2 or any(a.size < 2 for a in self.r_axes):
            raise ValueError("need at least two nodes per axis")
        for a in [self.x_nodes] + self.r_axes:
            steps = np.diff(a)
            if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9):
                raise ValueError("axes must be uniform and increasing")
        self.dr = [float(a[1] - a[0]) for a in self.r_axes]
        self.dx = float(self.x_nodes[1] - self.x_nodes[0])

        peak = float(np.max(np.abs(self.values)))
        edge = 0.0
        if self.d == 1:
            edge = max(np.max(np.abs(self.values[:, 0])), np.max(np.abs(self.values[:, -1])))
        else:
            for sl in (np.s_[:, 0, :], np.s_[:, -1, :], np.s_[:, :, 0], np.s_[:, :, -1]):
                edge = max(edge, float(np.max(np.abs(self.values[sl]))))
        self.aliasing_risk = peak > 0 and edge > 1e-6 * peak
        if self.aliasing_risk:
            warnings.warn(
                "aliasing risk: sampled potential does not vanish at the "
                "transverse window edges", stacklevel=2)

        # Short-range admissibility, checked numerically on the window.
        self.abs_integral = float(np.sum(np.abs(self.values)) * self.dx * np.prod(self.dr))
        self.is_short_range = np.isfinite(self.abs_integral)

        # Cache of per-node transverse transforms at requested momenta.
        self._slab_cache: dict = {}

    @classmethod
    def from_file(cls, path) -> "SampledPotential":
        path = str(path)
        if path.endswith(".json"):
            with open(path, encoding="utf-8") as fh:
                payload = json.load(fh)
            values = np.asarray(payload["re"], dtype=float) + 1j * np.asarray(payload["im"], dtype=float)
            return cls(payload["x"], payload["r_axes"], values)
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append([float(c) for c in row])
                except ValueError:
                    continue  # header row
        if not rows:
            raise ValueError(f"no data rows in {path}")
        ncol = len(rows[0])
        d = ncol - 3
        if d not in (1, 2) or any(len(r) != ncol for r in rows):
            raise ValueError("rows must be (x, r..., re_v, im_v) with 1 or 2 r columns")
        arr = np.asarray(rows)
        x_nodes = np.unique(arr[:, 0])
        r_axes = [np.unique(arr[:, 1 + t]) for t in range(d)]
        shape = (x_nodes.size,) + tuple(a.size for a in r_axes)
        if np.prod(shape) != arr.shape[0]:
            raise ValueError("samples do not fill a rectangular lattice")
        values = np.full(shape, np.nan, dtype=complex)
        ix = np.searchsorted(x_nodes, arr[:, 0])
        idx = [np.searchsorted(r_axes[t], arr[:, 1 + t]) for t in range(d)]
        values[(ix, *idx)] = arr[:, -2] + 1j * arr[:, -1]
        if np.any(np.isnan(values)):
            raise ValueError("samples do not fill a rectangular lattice")
        return cls(x_nodes, r_axes, values)

    def _slab_ft(self, p: np.ndarray) -> np.ndarray:
        """Transverse transform at each x node; p shape (m, d) -> (nx, m)."""
        key = p.tobytes()
        hit = self._slab_cache.get(key)
        if hit is not None:
            return hit
        nyquist = [np.pi / dr for dr in self.dr]
        if any(np.max(np.abs(p[:, t])) > nyquist[t] * (1 + 1e-12) for t in range(self.d)):
            warnings.warn("aliasing risk: momentum beyond the sample Nyquist band",
                          stacklevel=2)
        if self.d == 1:
            phases = np.exp(-1j * np.outer(self.r_axes[0], p[:, 0]))  # (m1, m)
            out = (self.values @ phases) * self.dr[0]
        else:
            ph1 = np.exp(-1j * np.outer(self.r_axes[0], p[:, 0]))
            ph2 = np.exp(-1j * np.outer(self.r_axes[1], p[:, 1]))
            out = np.einsum("xab,am,bm->xm", self.values, ph1, ph2, optimize=True)
            out = out * self.dr[0] * self.dr[1]
        if len(self._slab_cache) > 8:
            self._slab_cache.clear()
        self._slab_cache[key] = out
        return out

    def _ft(self, x, p):
        slabs = self._slab_ft(p)  # (nx, m); column m belongs to momentum p[m]
        out = np.zeros(x.shape[0], dtype=complex)
        inside = (x >= self.x_nodes[0]) & (x <= self.x_nodes[-1])
        if np.any(inside):
            cols = np.flatnonzero(inside)
            xi = x[cols]
            j = np.clip(np.searchsorted(self.x_nodes, xi) - 1, 0, self.x_nodes.size - 2)
            t = (xi - self.x_nodes[j]) / self.dx
            out[cols] = (1 - t) * slabs[j, cols] + t * slabs[j + 1, cols]
        return out

    def support_bounds(self):
        return (float(self.x_nodes[0]), float(self.x_nodes[-1]))

    def full_fourier(self, q):
        q = np.asarray(q, dtype=float)
        slabs = self._slab_ft(q[None, 1:])[:, 0]
        phases = np.exp(-1j * q[0] * self.x_nodes)
        return complex(np.sum(slabs * phases) * self.dx)


def seeded_gaussian_mixture(seed: int, d: int = 1, n_terms: int = 3,
                            coupling_scale: float = 0.25,
                            complex_couplings: bool = True) -> PotentialModel:
    """Deterministic smooth test potential: a sum of Gaussian bumps.

    Couplings, widths and centers are drawn from a seeded generator, so a
    given (seed, d, n_terms) always describes the same potential.
    """
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(n_terms):
        g = coupling_scale * (rng.uniform(0.5, 1.0) * np.exp(2j * np.pi * rng.uniform())
                              if complex_couplings else rng.uniform(0.5, 1.0))
        x_width = rng.uniform(0.8, 1.5)
        x_center = rng.uniform(-1.0, 1.0)
        if d == 0:
            terms.append(XOnlyPotential(GaussianProfile(g, x_width, x_center), d=0))
        else:
            t_widths = tuple(rng.uniform(0.8, 1.5) for _ in range(d))
            t_centers = tuple(rng.uniform(-0.5, 0.5) for _ in range(d))
            terms.append(GaussianPotential(g, x_width, x_center, t_widths, t_centers))
    return SumPotential(tuple(terms))


# ----------------------------------------------------------------------
# Config-dict factories (shared by the CLI and tests)

def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def profile_from_config(cfg: dict) -> Profile:
    shape = cfg.get("shape", "gaussian")
    if shape == "gaussian":
        return GaussianProfile(_as_complex(cfg["g"]),
                               float(cfg.get("width", 1.0)),
                               float(cfg.get("center", 0.0)))
    if shape == "rect":
        return RectProfile(_as_complex(cfg["g"]),
                           float(cfg.get("x0", 0.0)), float(cfg.get("x1", 1.0)))
    if shape == "sum":
        return SumProfile(tuple(profile_from_config(t) for t in cfg["terms"]))
    raise ValueError(f"unknown profile shape {shape!r}")


def from_config(cfg: dict) -> PotentialModel:
    kind = cfg.get("kind", "zero")
    if kind == "zero":
        return ZeroPotential(d=int(cfg.get("d", 0)))
    if kind == "x_only":
        return XOnlyPotential(profile_from_config(cfg["profile"]), d=int(cfg.get("d", 0)))
    if kind == "gaussian":
        return GaussianPotential(
            _as_complex(cfg["g"]),
            float(cfg.get("x_width", 1.0)), float(cfg.get("x_center", 0.0)),
            tuple(cfg.get("t_widths", [1.0])),
            tuple(cfg["t_centers"]) if "t_centers" in cfg else None,
        )
    if kind == "separable_product":
        return SeparableGaussianPotential(
            profile=profile_from_config(cfg["profile"]),
            t_widths=tuple(cfg.get("t_widths", [1.0])),
            t_centers=tuple(cfg["t_centers"]) if "t_centers" in cfg else None,
        )
    if kind in ("disk", "circular_well"):
        return DiskPotential(_as_complex(cfg["g"]), float(cfg.get("radius", 1.0)),
                             tuple(cfg["center"]) if "center" in cfg else None,
                             d=int(cfg.get("d", 1)))
    if kind == "sampled":
        return SampledPotential.from_file(cfg["path"])
    if kind == "sum":
        return SumPotential(tuple(from_config(t) for t in cfg["terms"]))
    if kind == "gaussian_mixture":
        return seeded_gaussian_mixture(
            int(cfg["seed"]), d=int(cfg.get("d", 1)),
            n_terms=int(cfg.get("n_terms", 3)),
            coupling_scale=float(cfg.get("coupling_scale", 0.25)),
            complex_couplings=bool(cfg.get("complex_couplings", True)),
        )
    raise ValueError(f"unknown potential kind {kind!r}")
