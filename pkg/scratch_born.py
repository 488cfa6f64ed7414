"""Dev experiment: pipeline amplitude vs first Born term, plain vs physical."""
import numpy as np

from tmscatter.core import ScatteringConfig, build_grid, dispersion_diagonals
from tmscatter.potential import GaussianPotential
from tmscatter.evolution import Stepper, evolve_window, restrict_to_propagating


def c_d(k, d):
    return (2j * np.pi) ** (d / 2.0) * k ** (1.0 - d / 2.0)


k = 1.0
d = 1
cfg = ScatteringConfig(k=k, d=d, p_max=2.0, n_per_axis=32)
grid = build_grid(cfg)
disp = dispersion_diagonals(grid)
prop = grid.propagating
w = disp.full[prop].real
weights = grid.weights

for g in (1e-3, 3e-2):
    model = GaussianPotential(g * (0.8 + 0.6j), 1.0, 0.1, (1.2,), (0.3,))
    a, b = model.support_bounds()
    u, _ = evolve_window(model, grid, k, Stepper(rtol=1e-10), a, b)
    for mode in ("plain", "physical"):
        m11, m12, m21, m22 = restrict_to_propagating(u, grid, k, mode=mode)
        # quadrant n0x>0, nx<0: f = -pre * (M22^-1 M21)[j, j0] / w_j0
        errs = []
        for j0 in (2, 5, 9):
            for j in (1, 6, 12):
                p0 = grid.points[prop[j0]]
                p1 = grid.points[prop[j]]
                w0 = w[j0]
                wj = w[j]
                pre = (2 * np.pi) ** d * w0 / c_d(k, d)
                z = np.linalg.solve(m22, m21[:, j0])
                f = -pre * z[j] / weights[prop[j0]]
                # Born: -i/(2 c_d) vhat(k(n - n0)); n=( -w_j/k, p1/k ), n0=( w0/k, p0/k )
                q = np.array([-wj - w0, *(p1 - p0)])
                fb = -1j / (2 * c_d(k, d)) * model.full_fourier(q)
                errs.append(abs(f - fb) / abs(fb))
        print(f"g={g:g} mode={mode}: max rel err vs Born = {max(errs):.3e}")
