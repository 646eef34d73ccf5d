# %% [markdown]
# # Volume-preserving three-flow hierarchy
# The vacuum triple L = lam, M = p, N = q + t1 + sum n^2 t_n lam^{n-1} p^{n-1}
# solves every flow and the unit-volume constraint {L, M, N} = 1.

# %%
from nambuvp.forms import krichever_closedness, omega3_check
from nambuvp.hierarchy import VpTriple, vacuum_solution, volume_constraint_residual, vp_flow_residual

tr = vacuum_solution(3)
print("N =", tr.N)
print("flows exact:", all(r.is_zero_in_window() for n in (1, 2, 3) for r in vp_flow_residual(tr, n)))
print("volume residual:", volume_constraint_residual(tr))
closed, square, identity = omega3_check(tr)
print("d Omega, Omega^Omega, Omega - dL^dM^dN zero:", closed.is_zero(), square.is_zero(), identity.is_zero())
print("closedness zero:", krichever_closedness(tr).is_zero())

# %% [markdown]
# Adding q^2 to N breaks the identity; the witness sits on dlam^dp^dq.

# %%
bad = VpTriple(tr.L, tr.M, tr.N + tr.table.var("q") ** 2, 3)
print("witness:", omega3_check(bad)[2].component(("lam", "p", "q")))
