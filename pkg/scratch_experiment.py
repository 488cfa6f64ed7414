"""Dev experiment: plain vs physical restriction, identity residuals."""
import numpy as np

from tmscatter.core import ScatteringConfig, build_grid, dispersion_diagonals
from tmscatter.potential import seeded_gaussian_mixture
from tmscatter.evolution import Stepper, evolve_window, restrict_to_propagating
from tmscatter.hamiltonian import HamiltonianFactory


def blockdiag(q):
    n = q.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=q.dtype)
    out[:n, :n] = q
    out[n:, n:] = q
    return out


def omega_block(n):
    out = np.zeros((2 * n, 2 * n))
    out[:n, n:] = np.eye(n)
    out[n:, :n] = -np.eye(n)
    return out


cfg = ScatteringConfig(k=1.0, d=1, p_max=2.0, n_per_axis=16)
grid = build_grid(cfg)
model = seeded_gaussian_mixture(7, d=1, n_terms=3, coupling_scale=0.4)
print("support:", model.support_bounds())
disp = dispersion_diagonals(grid)
print("n prop:", grid.n_propagating, "of", grid.size)
print("budget used:", disp.imag_part.max() * (model.support_bounds()[1] - model.support_bounds()[0]))

# 1) H identity: A' H A'^-1 = -H^T with A' = Omega (x) (Dinv P) on the FULL grid
fac = HamiltonianFactory(model, grid, 1.0)
P = grid.parity_matrix()
Dinv = np.diag(1.0 / disp.full)
Aprime = omega_block(grid.size) @ blockdiag(Dinv @ P)
for x in (0.0, 0.37, -1.2):
    H = fac(x)
    lhs = Aprime @ H @ np.linalg.inv(Aprime)
    res = np.linalg.norm(lhs + H.T) / np.linalg.norm(H)
    print(f"H identity residual at x={x}: {res:.3e}")

for rtol in (1e-6, 1e-8, 1e-10):
    st = Stepper(rtol=rtol)
    a, b = model.support_bounds()
    u, report = evolve_window(model, grid, 1.0, st, a, b)
    # full-grid U identity: U^T A' U = A'
    resU = np.linalg.norm(u.T @ Aprime @ u - Aprime) / np.linalg.norm(Aprime)

    # restricted identities
    prop = grid.propagating
    w = disp.full[prop].real
    Pp = grid.parity_matrix(prop)
    Ap = omega_block(prop.size) @ blockdiag(np.diag(1.0 / w) @ Pp)
    out = {}
    for mode in ("plain", "physical"):
        m11, m12, m21, m22 = restrict_to_propagating(u, grid, 1.0, mode=mode)
        M = np.block([[m11, m12], [m21, m22]])
        G = np.linalg.solve(Ap, M.T @ Ap @ M)
        res = np.linalg.norm(G - np.eye(G.shape[0])) / np.linalg.norm(M)
        # swapped variant (A <-> A^-1), to see if it also holds
        G2 = Ap @ M.T @ np.linalg.solve(Ap, M)
        res2 = np.linalg.norm(G2 - np.eye(G.shape[0])) / np.linalg.norm(M)
        out[mode] = (res, res2)
    print(f"rtol={rtol:.0e}  U-full={resU:.3e}  "
          f"plain: faithful={out['plain'][0]:.3e} swapped={out['plain'][1]:.3e}  "
          f"physical: faithful={out['physical'][0]:.3e} swapped={out['physical'][1]:.3e}  steps={report['n_steps']}")
