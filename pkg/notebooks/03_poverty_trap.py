# %% [markdown]
# Capital dynamics with a subsistence threshold
#
# With a constant saving rate there is one positive steady state. Letting
# saving switch on around K_F produces a trap: two stable states with an
# unstable one between them.

# %%
from complexitytrap.panel import SolowParams
from complexitytrap.solow import (constant_saving_steady_state, find_equilibria,
                                  net_investment, simulate)

const = SolowParams(A=1.0, alpha=0.5, L=1.0, delta=0.1, s_max=0.2)
print("closed form", constant_saving_steady_state(const))
print(find_equilibria(const, 200.0).positive())

# %%
trap = SolowParams(A=1.0, alpha=0.5, L=1.0, delta=0.05, s_max=0.4, K_F=10.0,
                   saving_mode="sigmoid")
eqs = find_equilibria(trap, 200.0)
for e in eqs.positive():
    print(f"K* = {e.k_star:10.6g}  {e.stability}")

# %% sign of net investment between the equilibria
for k in (0.01, 1.0, 9.0, 10.0, 30.0, 100.0):
    print(f"g({k:g}) = {net_investment(trap, k):+.4f}")

# %% two starting points either side of the unstable state
for k0 in (5.0, 12.0):
    path = simulate(trap, k0, 400)
    print(f"K0 = {k0:g} -> K(400) = {path[-1].k:.4f}")

# %% lowering the threshold frees the poorer economy
for kf in (10.0, 6.0, 4.0):
    p = SolowParams(A=1.0, alpha=0.5, L=1.0, delta=0.05, s_max=0.4, K_F=kf,
                    saving_mode="sigmoid")
    print(f"K_F = {kf:g}: K(400) from 5 = {simulate(p, 5.0, 400)[-1].k:.3f}")
