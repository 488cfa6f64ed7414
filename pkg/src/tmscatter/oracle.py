"""Independent brute-force solvers used to validate the transfer pipeline.

Everything here works in position space (plane-wave matching, direct
second-order ODE integration, radial partial waves) and shares no
machinery with the momentum-space pipeline beyond the asymptotic
amplitude convention

    psi ~ (2*pi)^-((d+1)/2) * [ exp(i k0 . r) + f * exp(i k r) / r^(d/2) ],

which fixes the normalization of every oracle output.  The derivations of
the partial-wave and Born constants are written out in
docs/NORMALIZATION.md and locked by regression tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import h1vp, h2vp, hankel1, hankel2, jv, jvp

__all__ = [
    "Oracle1DResult",
    "PartialWaveResult",
    "match_piecewise_1d",
    "integrate_schrodinger_1d",
    "partial_wave_2d",
    "born_amplitude",
    "amplitude_normalization",
]


def amplitude_normalization(k: float, d: int) -> complex:
    """Constant c_d relating outgoing-wave coefficients to the amplitude f."""
    return complex((2j * np.pi) ** (d / 2.0) * k ** (1.0 - d / 2.0))


@dataclass
class Oracle1DResult:
    """1D reference solution: transfer matrix and scattering amplitudes."""

    m: np.ndarray
    r_left: complex
    t_left: complex
    r_right: complex
    t_right: complex
    wronskian_drift: float

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.m))


def _rt_from_m(m: np.ndarray) -> tuple[complex, complex, complex, complex]:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    m22 = m[1, 1]
    return (-m[1, 0] / m22, det / m22, m[0, 1] / m22, 1.0 / m22)


def _segment_wavenumber(v0: complex, k: float) -> complex:
    kappa = np.lib.scimath.sqrt(k * k - v0)
    if kappa.imag < 0:
        kappa = -kappa
    if kappa == 0:
        raise ValueError(f"segment with v = {v0} is grazing at k = {k}; perturb k")
    return complex(kappa)


def _plane_wave_frame(kappa: complex, x: float) -> np.ndarray:
    """Columns are (psi, psi') of exp(+i kappa x) and exp(-i kappa x)."""
    ep = np.exp(1j * kappa * x)
    em = 1.0 / ep
    return np.array([[ep, em], [1j * kappa * ep, -1j * kappa * em]])


def match_piecewise_1d(segments, k: float) -> Oracle1DResult:
    """Exact 1D transfer matrix of a piecewise-constant potential.

    segments: iterable of ((x0, x1), v0) with non-overlapping intervals.
    Plane-wave solutions are matched (continuity of psi and psi') at every
    interface; the coefficients always refer to the global exp(+/- i k x)
    basis, so the interface factors compose into the transfer matrix
    directly.
    """
    segs = sorted(((float(a), float(b), complex(v)) for (a, b), v in segments),
                  key=lambda s: s[0])
    for (a0, b0, _), (a1, _, _) in zip(segs, segs[1:]):
        if a1 < b0 - 1e-15:
            raise ValueError("segments overlap")

    # Medium sequence and interface positions, with explicit vacuum gaps.
    media = [complex(k)]
    cuts = []
    pos = None
    for a, b, v in segs:
        if v == 0:
            continue
        if pos is not None and a > pos + 1e-15:
            media.append(complex(k))
            cuts.append(pos)
        elif pos is not None:
            pass  # segments touch: single interface between the two media
        cuts.append(a)
        media.append(_segment_wavenumber(v, k))
        pos = b
    if pos is not None:
        cuts.append(pos)
        media.append(complex(k))

    m = np.eye(2, dtype=complex)
    for i, x in enumerate(cuts):
        left, right = media[i], media[i + 1]
        step = np.linalg.solve(_plane_wave_frame(right, x), _plane_wave_frame(left, x))
        m = step @ m
    rl, tl, rr, tr = _rt_from_m(m)
    return Oracle1DResult(m=m, r_left=rl, t_left=tl, r_right=rr, t_right=tr,
                          wronskian_drift=abs(np.linalg.det(m) - 1.0))


def integrate_schrodinger_1d(v, k: float, x_span=None, rtol: float = 1e-12,
                             atol: float = 1e-12) -> Oracle1DResult:
    """Direct integration of -psi'' + v psi = k^2 psi.

    Two solutions seeded as exp(+/- i k x) at the left edge are carried
    across the support; the transfer matrix follows from reading off the
    plane-wave coefficients at the right edge.  The Wronskian of the two
    solutions is monitored along the way; it must stay at its initial
    value -2ik, which is the classic route to the equality of the two
    transmission amplitudes.
    """
    profile, span = _as_profile(v, x_span)
    if span is None:
        eye = np.eye(2, dtype=complex)
        return Oracle1DResult(eye, 0.0, 1.0, 0.0, 1.0, 0.0)
    a, b = span

    def rhs(x, y):
        psi1, dpsi1, psi2, dpsi2 = y
        vv = complex(profile(x))
        return [dpsi1, (vv - k * k) * psi1, dpsi2, (vv - k * k) * psi2]

    y0 = [np.exp(1j * k * a), 1j * k * np.exp(1j * k * a),
          np.exp(-1j * k * a), -1j * k * np.exp(-1j * k * a)]
    checks = np.linspace(a, b, 33)
    sol = solve_ivp(rhs, (a, b), np.asarray(y0, dtype=complex), method="DOP853",
                    rtol=rtol, atol=atol, t_eval=checks)
    if not sol.success:
        raise RuntimeError(f"reference integration failed: {sol.message}")
    psi1, dpsi1, psi2, dpsi2 = sol.y
    wr = psi1 * dpsi2 - psi2 * dpsi1
    drift = float(np.max(np.abs(wr - (-2j * k))) / (2 * k))

    def coeffs(psi, dpsi, x):
        a_co = 0.5 * (psi + dpsi / (1j * k)) * np.exp(-1j * k * x)
        b_co = 0.5 * (psi - dpsi / (1j * k)) * np.exp(1j * k * x)
        return a_co, b_co

    a1, b1 = coeffs(psi1[-1], dpsi1[-1], b)
    a2, b2 = coeffs(psi2[-1], dpsi2[-1], b)
    m = np.array([[a1, a2], [b1, b2]], dtype=complex)
    rl, tl, rr, tr = _rt_from_m(m)
    return Oracle1DResult(m=m, r_left=rl, t_left=tl, r_right=rr, t_right=tr,
                          wronskian_drift=drift)


def _as_profile(v, x_span):
    """Accept a profile object, an x-only potential, or a bare callable."""
    if hasattr(v, "profile"):
        profile = v.profile
        span = x_span or v.support_bounds()
    elif hasattr(v, "support"):
        profile = v
        span = x_span or v.support()
    else:
        if x_span is None:
            raise ValueError("bare callables need an explicit x_span")
        profile, span = v, x_span
    return profile, span


@dataclass
class PartialWaveResult:
    """Angular-channel solution of a radially symmetric 2D potential."""

    k: float
    s_coefficients: np.ndarray   # S_m for m = 0..m_max
    tail_bound: float
    flagged: bool

    def amplitude(self, theta) -> np.ndarray:
        """Scattering amplitude f(theta) in the exp(ikr)/sqrt(r) convention.

        f(theta) = exp(-i pi/4) / sqrt(2 pi k)
                   * sum_m (S_m - 1) exp(i m theta),
        with the m and -m channels identical by symmetry.
        """
        theta = np.asarray(theta, dtype=float)
        s = self.s_coefficients
        total = np.full(theta.shape, s[0] - 1.0, dtype=complex)
        for m in range(1, s.size):
            total += 2.0 * (s[m] - 1.0) * np.cos(m * theta)
        return np.exp(-1j * np.pi / 4) / np.sqrt(2 * np.pi * self.k) * total


def partial_wave_2d(v_radial, k: float, m_max: int = 12, radius: float = 1.0,
                    rtol: float = 1e-11, tail_threshold: float = 1e-8) -> PartialWaveResult:
    """Channel-by-channel radial solution of a 2D radial potential.

    v_radial: callable r -> complex, negligible beyond `radius`.  Each
    channel m solves R'' + R'/r + (k^2 - v - m^2/r^2) R = 0 outward from
    a small r0 (seeded with the regular Bessel behavior of the locally
    constant potential) and is matched at `radius` to a combination of
    outgoing and incoming cylinder waves; S_m is their ratio fixed so the
    incoming part matches the plane-wave channel content.
    """
    r0 = max(1e-3 * radius, 1e-8)
    v0 = complex(v_radial(0.5 * r0))
    kappa0 = np.lib.scimath.sqrt(k * k - v0)
    s = np.empty(m_max + 1, dtype=complex)
    for m in range(m_max + 1):
        jr = jv(m, kappa0 * r0)
        djr = kappa0 * jvp(m, kappa0 * r0)
        y0 = np.array([1.0, complex(djr / jr)], dtype=complex)

        def rhs(r, y, m=m):
            big_r, dr = y
            return [dr, -(dr / r) - (k * k - complex(v_radial(r)) - m * m / (r * r)) * big_r]

        sol = solve_ivp(rhs, (r0, radius), y0, method="DOP853", rtol=rtol, atol=1e-14)
        if not sol.success:
            raise RuntimeError(f"radial integration failed in channel m={m}: {sol.message}")
        big_r, dr = sol.y[0, -1], sol.y[1, -1]
        gamma = dr / big_r
        z = k * radius
        num = k * h2vp(m, z) - gamma * hankel2(m, z)
        den = k * h1vp(m, z) - gamma * hankel1(m, z)
        s[m] = -num / den
    tail = float(np.abs(s[-1] - 1.0))
    return PartialWaveResult(k=k, s_coefficients=s, tail_bound=tail,
                             flagged=tail > tail_threshold)


def born_amplitude(model, k: float, n0, n) -> complex:
    """First-order scattering amplitude.

    Expanding the windowed axial evolution to first order in the
    potential and inserting it into the amplitude extraction formula
    leaves f = -i/(2 c_d) * vhat(k (n - n0)), with vhat the full
    (d+1)-dimensional Fourier transform of v; see docs/NORMALIZATION.md.
    """
    n0 = np.asarray(getattr(n0, "vector", n0), dtype=float)
    n = np.asarray(getattr(n, "vector", n), dtype=float)
    q = k * (n - n0)
    c = amplitude_normalization(k, model.d)
    return complex(-1j / (2.0 * c) * model.full_fourier(q))
