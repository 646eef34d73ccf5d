# %% [markdown]
# # Nambu brackets and the fundamental identity
# The 3-bracket on R^3 is the Jacobian determinant. It is antisymmetric,
# obeys Leibniz in each slot, and satisfies the fundamental identity.

# %%
import random

from nambuvp.nambu import BracketSpace, fundamental_identity_residual, nambu_bracket
from nambuvp.symalg import VariableTable, random_poly

T = VariableTable.of("x y z")
space = BracketSpace(T, ("x", "y", "z"))
x, y, z = T.vars("x y z")
print("{x, y, z} =", nambu_bracket([x, y, z], space))
print("{x^2, y, x*z} =", nambu_bracket([x ** 2, y, x * z], space))

# %% [markdown]
# Random quintuples give an exactly zero fundamental-identity residual.

# %%
r = random.Random(0)
residuals = [fundamental_identity_residual([random_poly(T, r, 2) for _ in range(5)], space) for _ in range(10)]
print("all zero:", all(R == 0 for R in residuals))
