# %% [markdown]
# # Dispersionless KP in jet variables
# L = lam + sum u_{n+1} lam^{-n}, truncated at depth K. Flows come from
# B_n = (L^n)_+ and are kept only where every coefficient is exact.

# %%
from nambuvp.hierarchy import DkpState, dkp_flow, lax_projection, zero_curvature_residual

state = DkpState.generic(4)
print("B_2 =", lax_projection(state, 2))
for m, f in sorted(dkp_flow(state, 3).items()):
    print(f"du{m}/dt3 =", f)

# %% [markdown]
# Zero curvature between flows holds exactly on every representable coefficient.

# %%
deep = DkpState.generic(6)
for n, m in ((1, 2), (1, 3), (2, 3)):
    print((n, m), zero_curvature_residual(deep, n, m).is_zero_in_window())
