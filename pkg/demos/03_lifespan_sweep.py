"""Blow-up times across data sizes at the critical power.

The predicted lifespan grows like ``exp(E eps**-(p(p-1)))`` for small data.
At desk scale only moderate ``eps`` blow up before ``t = 1000``, so the sweep
checks monotonicity and the sign of the fitted slope rather than the rate.
"""
# %%
import math

import numpy as np

from epdt_lab.model import ModelParams, strauss_exponent_shifted
from epdt_lab.semilinear import lifespan_sweep

# %%
eps = np.linspace(0.4, 1.6, 8)
for mu in (2.0, 1.0):
    params = ModelParams(ell=0.0, mu=mu, nu2=0.0, n=1)
    p = strauss_exponent_shifted(params)
    sw = lifespan_sweep(params, p, eps, 1000.0, 0.1)
    print(f"mu={mu}: critical p={p:.4f}, fitted slope {sw.slope:.4f}, monotone={sw.monotone}, "
          f"incomplete={list(sw.incomplete)}")
    for r in sw.records:
        print(f"   eps={r.eps:.3f}  T={r.T_numeric:9.3f}")

# %% [markdown]
# A subcritical power blows up sooner while the data stay below unit size.
# For larger data ``|u|**p`` grows faster with ``p`` and the order flips.

# %%
params = ModelParams(0.0, 2.0, 0.0, 1)
crit = lifespan_sweep(params, 1 + math.sqrt(2), [0.4, 0.8, 1.2], 1000.0, 0.1)
sub = lifespan_sweep(params, 2.0, [0.4, 0.8, 1.2], 1000.0, 0.1)
for a, b in zip(sub.records, crit.records):
    print(f"eps={a.eps}: T(p=2)={a.T_numeric:.3f}  T(p=1+sqrt2)={b.T_numeric:.3f}")
