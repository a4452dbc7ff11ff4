"""Prolate basis at c = 1: eigenvalues, parity and the double orthogonality."""

# %%
import math

import numpy as np

from prolatoscope import build_basis, eval_phi, eval_psi
from prolatoscope.prolate import phi_table
from prolatoscope.special import gauss_legendre

basis = build_basis(1.0, 18)  # 256-bit Jacobi, a couple of seconds
print("Legendre truncation N =", basis.matrix_order)

# %% eigenvalues fall by roughly three decades per mode
for m in basis.modes:
    print(f"{m.index:2d}  {m.lambda_mantissa:.6f}e{m.lambda_exponent:+d}")

# %% the trace of the sinc kernel is 2c/pi
print("sum lambda - 2/pi =", math.fsum(basis.lambdas) - 2 / math.pi)

# %% core orthonormality by 200-node Gauss-Legendre
x, w = gauss_legendre(200)
P = phi_table(basis, x, 9)
print("max |G - I| on the core:", np.abs((P * w) @ P.T - np.eye(9)).max())

# %% psi is sqrt(lambda) phi inside the core and decays like 1/x outside
s = np.array([0.0, 0.4, 0.9])
print(eval_psi(basis, 2, s) / eval_phi(basis, 2, s), math.sqrt(basis.lambdas[2]))
print("psi_0 at x = 10, 100:", eval_psi(basis, 0, np.array([10.0, 100.0])))
