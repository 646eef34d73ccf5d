# %% [markdown]
# # Decomposability of constant Nambu tensors
# For order n >= 3 the algebraic constraint vanishes exactly when the tensor
# is a wedge of n vectors. The Pluecker-relation oracle confirms this.

# %%
import random

from nambuvp.nambu import (NambuTensor, algebraic_constraint_residual, is_decomposable_oracle,
                           random_constant_tensor)
from nambuvp.symalg import VariableTable

T = VariableTable.of([f"x{i}" for i in range(1, 7)])
canonical = NambuTensor.basis(T, T.names, (1, 2, 3), (4, 5, 6))
print("e123 + e456 residual entries:", len(algebraic_constraint_residual(canonical)))
print("oracle says decomposable:", is_decomposable_oracle(canonical))

# %%
r = random.Random(0)
tensors = [random_constant_tensor(r, table=T) for _ in range(200)]
agree = sum((not algebraic_constraint_residual(e)) == is_decomposable_oracle(e) for e in tensors)
print(f"agreement {agree}/200, decomposable {sum(map(is_decomposable_oracle, tensors))}")
