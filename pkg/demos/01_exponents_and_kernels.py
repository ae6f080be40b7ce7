"""Critical powers and the one-dimensional kernels.

Run with ``python demos/01_exponents_and_kernels.py``.
"""
# %%
import numpy as np

from epdt_lab.kernel import E_values, kernel_K0, kernel_K1
from epdt_lab.model import ModelParams, spectral_constants

# %% [markdown]
# Damping and mass enter the critical power only through a shift of the
# dimension.  Increasing the damping lowers the Strauss-type power.

# %%
for mu in (0.0, 1.0, 2.0, 4.0):
    sc = spectral_constants(ModelParams(ell=0.5, mu=mu, nu2=0.0, n=2))
    print(f"mu={mu:3.1f}  delta={sc.delta:5.2f}  r1={sc.r1:5.2f}  r2={sc.r2:5.2f}  "
          f"p_strauss={sc.p_strauss_shifted:.5f}  p_fujita={sc.p_fujita_shifted:.5f}")

# %% [markdown]
# The undamped, massless wave recovers the d'Alembert kernel 1/2.

# %%
wave = ModelParams(0, 0, 0, 1)
t = np.array([2.0, 3.0])
print("E for the classical wave:", E_values(t, 0.0, 1.5, 0.3, wave))
print("K0 for the classical wave:", kernel_K0(t, 0.0, 0.2, wave))

# %% [markdown]
# With damping the kernels decay in time and are largest on the cone edge.

# %%
p = ModelParams(0.0, 2.0, 0.1, 1)
for y in (0.0, 0.5, 0.9):
    print(f"K1(t=2, x=0, y={y}) = {float(kernel_K1(2.0, 0.0, y, p)):.5f}")
