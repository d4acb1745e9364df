# The first two kernels of the C operator
#
# C = P + eps*C1 + eps**2*C2 + ..., where P is parity. C1 is purely imaginary
# and jumps across the anti-diagonal x + y = 0; C2 is real and continuous.
# Both vanish on the walls of the square.

import numpy as np

from ptwell import perturb

u = np.linspace(-np.pi / 2, np.pi / 2, 7)
x, y = np.meshgrid(u, u, indexing="ij")

np.set_printoptions(precision=4, suppress=True, linewidth=110)
print("Im C1 on a 7x7 lattice:")
print(perturb.c1_kernel(x, y).imag)
print("C2 on the same lattice:")
print(perturb.c2_kernel(x, y).real)

# Jump of C1 across the anti-diagonal, just off the corner points
s = np.linspace(-1.4, 1.4, 5)
h = 1e-9
jump = perturb.c1_kernel(s + h, -s + h) - perturb.c1_kernel(s - h, -s - h)
print("jump of C1 across x + y = 0:", np.round(jump.imag, 6))

# First-order cancellation: C1(-x, y) + C1(x, -y) = 0 everywhere
print("cancellation residual:", np.max(np.abs(perturb.c1_kernel(-x, y) + perturb.c1_kernel(x, -y))))
