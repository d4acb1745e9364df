# From C to Q to a Hermitian partner Hamiltonian
#
# Writing C = exp(Q) P, the log of C P gives Q. Conjugating H with exp(-Q/2)
# produces a Hermitian operator h with the same spectrum.

import numpy as np

from ptwell import exact, opalg
from ptwell.model import make_grid

grid = make_grid(128)
eps = 0.1

Q = opalg.extract_Q(opalg.build_C(eps, grid))
closed = opalg.q_op(eps, grid)
print("max |Q extracted - Q closed form|:", np.max(np.abs(Q.kernel_values() - closed.kernel_values())))

h = opalg.hermitize(eps, grid, 40)
print("relative hermiticity residual:",
      opalg.hermiticity_residual(h) / np.max(np.abs(opalg.smeared(h))))

# h is built from 40 modes, so the rest of its grid spectrum sits at zero
ev = np.linalg.eigvals(h.matrix)
ev = np.sort(ev[np.abs(ev) > 0.5].real)
for n in range(4):
    E = exact.solve_eigenvalue(n, eps).energy
    print(f"n={n}: exact {E.real:.10f}   from h {ev[n]:.10f}")
