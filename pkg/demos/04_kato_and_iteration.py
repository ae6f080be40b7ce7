"""The ODE blow-up lemma by Monte-Carlo and the iteration sequences."""
# %%
from collections import Counter

from epdt_lab.iteration import IterationConfig, K_j_log, L_value, T0, find_J, find_j0, lifespan_bound, states
from epdt_lab.kato import monte_carlo
from epdt_lab.model import ModelParams

# %% [markdown]
# Random admissible problems: whenever the lower-bound premise holds with
# ``K >= K0`` the simulated blow-up happens no later than ``2 T1``.

# %%
res = monte_carlo(120, seed=3)
print(Counter(r.status for _, _, r in res))
worst = max(r.blowup_time / (2 * r.thresholds.T1) for _, _, r in res if r.status == "verified")
print(f"largest blow-up time / 2 T1 among verified problems: {worst:.3f}")

# %% [markdown]
# ``ln K_j`` is driven by ``p**(j+1) L(t, eps)``: it falls off to minus
# infinity while ``L < 0`` and grows without bound once ``t >= T0(eps)``,
# where ``L >= 1``.

# %%
cfg = IterationConfig(ModelParams(0, 0, 0, 3))
for s in states(cfg, 4):
    print(f"j={s.j}  a_j={s.a_j:.0f}  alpha_j={s.alpha_j:.0f}  ln B_j={s.log_B_j:.3f}")
print("j0 =", find_j0(cfg), " J =", find_J(cfg))
t_star = T0(1.0, cfg)
for t in (1.5, t_star, t_star * 1.5):
    print(f"t={t:.4g}  L={L_value(t, 1.0, cfg):+.3f}  ln K_j for j=0..6 ->", [round(K_j_log(j, t, 1.0, cfg), 2) for j in range(7)])
for e in (2.0, 1.5, 1.0):
    print(f"lifespan bound at eps={e}: {lifespan_bound(e, cfg):.4g}")
