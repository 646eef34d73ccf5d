# %% [markdown]
# # Hydrodynamic-type compatibility
# u_t = A(u) u_x and u_t = B(u)_x style checks. Burgers-Hopf u_t + u u_x = 0
# has the exact solution u = x/(1 + t), which corresponds to flux B = -u^2/2.

# %%
import numpy as np

from nambuvp.forms import hydro_compat_residual
from nambuvp.symalg import VariableTable

H = VariableTable.of("u x t")
u = H.var("u")
xs, ts = np.linspace(-1, 1, 200), np.linspace(0, 0.1, 200)
exact = lambda X, T: X / (1 + T)
print("solution:", hydro_compat_residual([[u]], [[-u * u / 2]], exact, grid=(xs, ts)).flux_residual)
print("control: ", hydro_compat_residual([[u]], [[u * u / 2]], exact, grid=(xs, ts)).flux_residual)
