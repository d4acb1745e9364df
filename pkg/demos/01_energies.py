# Energies of the imaginary-step well
#
# The well has walls at 0 and pi and a potential that is +i*eps on the left
# half and -i*eps on the right half. The levels stay real for small eps.
# Here we compare the Newton roots of the matching condition with the
# fourth-order perturbative formula.

import numpy as np

from ptwell import exact, perturb

eps = 0.1
print(" n   exact E               perturbative E        |diff|")
for n in range(6):
    E = exact.solve_eigenvalue(n, eps).energy
    P = complex(perturb.energy(n, eps))
    print(f"{n:2d}   {E.real:.15f}   {P.real:.15f}   {abs(E - P):.2e}")

# The gap closes like eps**4, so halving eps should cut it by about 16.

for n in range(3):
    d = [abs(exact.solve_eigenvalue(n, e).energy - perturb.energy(n, e)) for e in (0.2, 0.1, 0.05)]
    print(f"n={n}: ratios {d[0] / d[1]:.2f}, {d[1] / d[2]:.2f}")

# Larger eps pushes the two lowest levels toward each other. Far enough out,
# Newton started from the unperturbed level lands on a different root, and
# the solver says so instead of returning the wrong mode.

for e in (0.5, 1.0, 2.0):
    try:
        E0 = exact.solve_eigenvalue(0, e).energy
        E1 = exact.solve_eigenvalue(1, e).energy
    except exact.ModeMismatchError as err:
        print(f"eps={e}: {err}")
        continue
    print(f"eps={e}: E0={E0.real:.6f}  E1={E1.real:.6f}  gap={abs(E1 - E0):.4f}")
