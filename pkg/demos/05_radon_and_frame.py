"""Radial Radon transform and the lower-bound frame along a radial run."""
# %%
import math

import numpy as np

from epdt_lab.model import ModelParams
from epdt_lab.radon import RadialFunction, radon_hyperplane_oracle, radon_radial
from epdt_lab.semilinear import SemilinearProblem, iteration_frame_check, solve_semilinear

# %%
ball = RadialFunction(lambda r: (np.asarray(r) <= 1.0).astype(float), 1.0, 3)
for rho in (0.0, 0.5, 0.9):
    print(f"rho={rho}: formula {radon_radial(ball, rho):.8f}  slice {radon_hyperplane_oracle(ball, rho):.8f}  "
          f"disc area {math.pi * (1 - rho * rho):.8f}")

# %% [markdown]
# Along a two-dimensional radial run the ratio of ``||u||_p**p`` to the
# frame's right-hand side stays bounded below.  Its minimum is the largest
# admissible constant for this run.

# %%
params = ModelParams(0.0, 1.5, 0.0, 2)
run = solve_semilinear(SemilinearProblem(params, 2.0, 0.5), 8.0, 0.05)
rep = iteration_frame_check(run, n_times=15)
print(f"K_max = {rep.K_max:.4g} attained at t = {rep.t_critical:.3f}; doubling it fails: {rep.doubled_fails}")
