# %% [markdown]
# # Heavenly equation and two-form pencils
# W = x*xt + y*yt + g(x, y) solves the first heavenly equation. The pencil
# Omega(lam) is closed and squares to zero exactly on solutions.

# %%
import random

from nambuvp.forms import gindikin_check, plebanski_pencil, plebanski_residual, plebanski_two_form
from nambuvp.symalg import VariableTable, random_poly

P = VariableTable.of("x y xt yt")
W = P.poly("x*xt + y*yt") + random_poly(P, random.Random(1), 4, names=["x", "y"])
closed, square = plebanski_pencil(W)
print("residual:", plebanski_residual(W), "closed:", closed.is_zero(), "square zero:", square.is_zero())
print("Gindikin rank-one check:", gindikin_check(plebanski_two_form(W), 1).passed)

# %% [markdown]
# Scaling the flat solution breaks the equation; the square has a single
# nonzero member at lam^2 equal to -2 times the residual.

# %%
bad = P.poly("2*x*xt + y*yt")
print("residual:", plebanski_residual(bad))
print("nonzero members:", [(m, str(f)) for m, f in plebanski_pencil(bad)[1].nonzero_members()])
