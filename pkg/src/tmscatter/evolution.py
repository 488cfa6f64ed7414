"""Axial integration of i dU/dx = H(x) U and transfer-matrix extraction.

The solution operator over the potential's support window, restricted to
the propagating momenta, is the transfer matrix: it maps the right-moving
and left-moving amplitude pairs at the left asymptote to those at the
right asymptote.

Restriction modes
-----------------
"physical" (default): amplitudes of evanescent channels that would grow
away from the support must vanish for bounded solutions; eliminating them
(a Schur complement on the grown second-component evanescent rows and
columns) yields the transfer matrix of the actual scattering solutions.
"plain": the bare propagating submatrix of the window solution operator,
kept for cross-checks; it retains endpoint couplings into evanescent
channels and satisfies the reciprocity identities only approximately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import MomentumGrid, dispersion_diagonals
from .hamiltonian import HamiltonianFactory, assemble_h_1d
from .potential import PotentialModel, XOnlyPotential

__all__ = [
    "Stepper",
    "TransferMatrix",
    "GrowthBudgetError",
    "IntegrationError",
    "integrate_transfer",
    "transfer_1d",
    "restrict_to_propagating",
]


class GrowthBudgetError(ValueError):
    """Evanescent growth over the support window exceeds the budget."""


class IntegrationError(RuntimeError):
    """The integration produced non-finite values or underflowed the step."""


@dataclass(frozen=True)
class Stepper:
    """Integrator controls.

    method "rk4" is a fixed-step classical Runge-Kutta scheme whose step
    is chosen from rtol and the sampled operator norm of H, which makes
    runs deterministic and gives a known fourth-order refinement law.
    "dop853" and "rk45" dispatch to scipy's adaptive solvers.
    """

    method: str = "rk4"
    rtol: float = 1e-8
    atol: float = 1e-12
    max_step: float = np.inf
    min_steps: int = 16
    growth_budget: float = 40.0

    def __post_init__(self):
        if self.method not in ("rk4", "rk45", "dop853"):
            raise ValueError(f"unknown method {self.method!r}")
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be positive")


@dataclass
class TransferMatrix:
    """Blocks of the propagating-sector transfer operator.

    m11 maps right-moving to right-moving amplitudes, m22 left-moving to
    left-moving; m12/m21 couple the two.  All blocks are square on the
    propagating index set of `grid`, in the order grid.propagating.
    """

    m11: np.ndarray
    m12: np.ndarray
    m21: np.ndarray
    m22: np.ndarray
    grid: MomentumGrid = field(repr=False)
    k: float = 0.0
    integrator_report: dict = field(default_factory=dict)
    restriction: str = "physical"

    @property
    def n(self) -> int:
        return self.m11.shape[0]

    def full(self) -> np.ndarray:
        return np.block([[self.m11, self.m12], [self.m21, self.m22]])

    def m22_singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.m22, compute_uv=False)

    def m22_cond(self) -> float:
        s = self.m22_singular_values()
        if s[-1] == 0:
            return np.inf
        return float(s[0] / s[-1])


def _norm2_upper_bound(h: np.ndarray) -> float:
    """Cheap spectral-norm bound: sqrt(norm1 * norm_inf)."""
    a = np.abs(h)
    return float(np.sqrt(a.sum(axis=0).max() * a.sum(axis=1).max()))


def _plan_steps(stepper: Stepper, length: float, hnorm: float) -> int:
    """Fixed-step count giving a global RK4 error ~ rtol.

    Per-step truncation scales like (h * |H|)^5 / 120; summed over
    length/h steps the global error is length * |H|^5 * h^4 / 120.
    """
    hnorm = max(hnorm, 1e-12)
    h = (120.0 * stepper.rtol / (length * hnorm ** 5)) ** 0.25
    h = min(h, stepper.max_step, length / stepper.min_steps, 0.5 / hnorm)
    return max(int(np.ceil(length / h)), stepper.min_steps)


def _check_finite(u: np.ndarray, x: float):
    if not np.all(np.isfinite(u)):
        raise IntegrationError(f"non-finite evolution entries at x = {x:.6g}")


def _rk4_matrix(rhs, u0: np.ndarray, a: float, b: float, n_steps: int) -> np.ndarray:
    u = u0
    h = (b - a) / n_steps
    for m in range(n_steps):
        x = a + m * h
        k1 = rhs(x, u)
        k2 = rhs(x + 0.5 * h, u + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h, u + 0.5 * h * k2)
        k4 = rhs(x + h, u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_finite(u, x + h)
    return u


def _scipy_matrix(rhs, u0: np.ndarray, a: float, b: float, stepper: Stepper):
    from scipy.integrate import solve_ivp

    shape = u0.shape

    def flat_rhs(x, y):
        return rhs(x, y.reshape(shape)).reshape(-1)

    method = {"rk45": "RK45", "dop853": "DOP853"}[stepper.method]
    sol = solve_ivp(flat_rhs, (a, b), u0.reshape(-1).astype(complex),
                    method=method, rtol=stepper.rtol, atol=stepper.atol,
                    max_step=stepper.max_step, dense_output=False)
    if not sol.success:
        raise IntegrationError(f"adaptive integration failed: {sol.message}")
    u = sol.y[:, -1].reshape(shape)
    _check_finite(u, b)
    return u, int(sol.t.size)


def _check_growth_budget(grid: MomentumGrid, k: float, window: float, budget: float):
    disp = dispersion_diagonals(grid, k)
    rates = disp.imag_part * window
    worst = int(np.argmax(rates))
    if rates[worst] > budget:
        p_abs = float(np.linalg.norm(grid.points[worst]))
        raise GrowthBudgetError(
            f"evanescent shell |p| = {p_abs:.6g} grows by exp({rates[worst]:.1f}) "
            f"over the support window (budget exp({budget:g})); shrink p_max, "
            "the window, or raise the budget"
        )


def evolve_window(model: PotentialModel, grid: MomentumGrid, k: float,
                  stepper: Stepper, a: float, b: float) -> tuple[np.ndarray, dict]:
    """Solution operator U(b, a) of i dU/dx = H(x) U on the full grid."""
    factory = HamiltonianFactory(model, grid, k)
    n2 = 2 * grid.size
    u0 = np.eye(n2, dtype=complex)
    if b <= a:
        return u0, {"method": stepper.method, "n_steps": 0, "rtol": stepper.rtol}

    def rhs(x, u):
        return -1j * (factory(x) @ u)

    if stepper.method == "rk4":
        xs = np.linspace(a, b, 9)
        hnorm = max(_norm2_upper_bound(factory(x)) for x in xs)
        n_steps = _plan_steps(stepper, b - a, hnorm)
        u = _rk4_matrix(rhs, u0, a, b, n_steps)
        report = {"method": "rk4", "n_steps": n_steps, "h": (b - a) / n_steps,
                  "hnorm": hnorm, "rtol": stepper.rtol}
    else:
        u, n_eval = _scipy_matrix(rhs, u0, a, b, stepper)
        report = {"method": stepper.method, "n_steps": n_eval, "rtol": stepper.rtol}
    return u, report


def restrict_to_propagating(u: np.ndarray, grid: MomentumGrid, k: float,
                            mode: str = "physical") -> tuple[np.ndarray, ...]:
    """Blocks (m11, m12, m21, m22) of the propagating-sector transfer matrix.

    mode "physical" eliminates the second-component evanescent channels:
    their amplitudes grow away from the support on both sides, so bounded
    solutions carry none at the right edge and a uniquely determined
    amount at the left edge.  Solving that constraint folds the window
    operator onto the propagating sector as a Schur complement.
    mode "plain" slices the propagating rows and columns directly.
    """
    n = grid.size
    prop = grid.propagating
    evan = np.setdiff1d(np.arange(n), prop)
    rows_p = np.concatenate([prop, n + prop])
    if mode not in ("physical", "plain"):
        raise ValueError(f"unknown restriction mode {mode!r}")
    if mode == "plain" or evan.size == 0:
        m = u[np.ix_(rows_p, rows_p)]
    else:
        rows_e2 = n + evan
        upp = u[np.ix_(rows_p, rows_p)]
        upe = u[np.ix_(rows_p, rows_e2)]
        uep = u[np.ix_(rows_e2, rows_p)]
        uee = u[np.ix_(rows_e2, rows_e2)]
        m = upp - upe @ np.linalg.solve(uee, uep)
    np_ = prop.size
    return m[:np_, :np_], m[:np_, np_:], m[np_:, :np_], m[np_:, np_:]


def integrate_transfer(model: PotentialModel, grid: MomentumGrid, k: float | None = None,
                       stepper: Stepper | None = None,
                       restriction: str = "physical") -> tuple[np.ndarray, TransferMatrix]:
    """Integrate across the potential support and restrict.

    Returns the full-grid window operator U together with the
    TransferMatrix on the propagating subset.  A potential with empty
    support short-circuits to the identity.
    """
    k = grid.k if k is None else float(k)
    stepper = stepper or Stepper()
    support = model.support_bounds()
    n = grid.size
    np_ = grid.n_propagating
    if support is None:
        u = np.eye(2 * n, dtype=complex)
        eye = np.eye(np_, dtype=complex)
        zero = np.zeros((np_, np_), dtype=complex)
        report = {"method": stepper.method, "n_steps": 0, "rtol": stepper.rtol,
                  "trivial": True}
        return u, TransferMatrix(eye, zero, zero.copy(), eye.copy(), grid=grid, k=k,
                                 integrator_report=report, restriction=restriction)

    a, b = support
    _check_growth_budget(grid, k, b - a, stepper.growth_budget)
    u, report = evolve_window(model, grid, k, stepper, a, b)
    m11, m12, m21, m22 = restrict_to_propagating(u, grid, k, mode=restriction)
    tm = TransferMatrix(m11, m12, m21, m22, grid=grid, k=k,
                        integrator_report=report, restriction=restriction)
    return u, tm


def transfer_1d(model, k: float, stepper: Stepper | None = None) -> np.ndarray:
    """2x2 transfer matrix of an x-only potential at wavenumber k.

    Accepts an XOnlyPotential, a d = 0 PotentialModel, or a bare profile
    callable with a support() method.
    """
    stepper = stepper or Stepper()
    if isinstance(model, PotentialModel):
        support = model.support_bounds()
    else:
        support = model.support()
        model = XOnlyPotential(model, d=0)
    if support is None:
        return np.eye(2, dtype=complex)
    a, b = support

    def rhs(x, u):
        return -1j * (assemble_h_1d(model, k, x) @ u)

    u0 = np.eye(2, dtype=complex)
    if stepper.method == "rk4":
        xs = np.linspace(a, b, 33)
        hnorm = max(_norm2_upper_bound(assemble_h_1d(model, k, x)) for x in xs)
        n_steps = _plan_steps(stepper, b - a, hnorm)
        return _rk4_matrix(rhs, u0, a, b, n_steps)
    u, _ = _scipy_matrix(rhs, u0, a, b, stepper)
    return u
