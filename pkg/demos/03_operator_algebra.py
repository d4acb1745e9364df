# Checking C*C = 1 on a quadrature grid
#
# Operators are stored as identity + parity + a smooth kernel sampled on
# Gauss-Legendre nodes. Composition integrates kernel products; the kernels
# have jumps, so the plain Gauss sum is corrected at each break.

import numpy as np

from ptwell import opalg
from ptwell.model import make_grid

grid = make_grid(128)

for corrected in (False, True):
    print("corrected" if corrected else "plain Gauss")
    prev = None
    for eps in (0.2, 0.1, 0.05):
        C = opalg.build_C(eps, grid)
        R = opalg.compose(C, C, corrected=corrected) - opalg.identity_op(grid)
        r = float(np.max(np.abs(opalg.smeared(R))))
        ratio = "" if prev is None else f"  ratio {prev / r:.2f}"
        print(f"  eps={eps:<5} residual {r:.3e}{ratio}")
        prev = r

# With the jump corrections the residual falls by a steady factor of 16 per
# halving. The plain sum already drifts below that at this grid size and
# keeps losing order as eps shrinks.

# C also leaves the perturbative eigenfunctions alone up to a sign.
from ptwell import perturb
from ptwell.model import HALF_PI

u = opalg.symmetric_nodes(grid)
C = opalg.build_C(0.1, grid)
for n in range(4):
    mode = lambda t, n=n: perturb.phi(n, 0.1, t + HALF_PI)
    d = opalg.apply_to_function(C, mode) - (-1) ** n * mode(u)
    print(f"n={n}: |C phi - (-1)^n phi| = {np.sqrt(np.sum(grid.weights * abs(d) ** 2)):.2e}")
