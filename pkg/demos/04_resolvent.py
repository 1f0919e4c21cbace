"""
Applying the continued resolvent
================================

For mu away from the resonances the outgoing solution of (A/(2 sqrt q) - z) u = f
is unique. On the tree it must agree with the closed-form kernel.
"""

# %%
import numpy as np

from ggres import fixture
from ggres.core import load_file, tree_model
from ggres.engine import apply_resolvent, resolvent_residual
from ggres.kernels import TreeKernelParams, tree_kernel

mu = 0.8 + 0.3j  # inside the unit disk: the physical resolvent would not exist here
ext = apply_resolvent(tree_model(2), [1.0], mu, depth=8)
exact = [tree_kernel(TreeKernelParams(2, mu), d) for d in range(9)]
print("distance  computed                 closed form")
for d, (a, b) in enumerate(zip(ext.funnels[0], exact)):
    print(f"{d:8d}  {a:.10f}  {b:.10f}")

# %%
g = load_file(fixture("elliptic_f3.json"))
f = np.zeros(g.n)
f[0] = 1.0
for mu in (1.5, 0.9 + 0.2j, 0.5j + 0.3):
    ext = apply_resolvent(g, f, mu, depth=12)
    print(f"mu = {mu}: u(o) = {ext.core[0]:.6f}, residual {resolvent_residual(g, ext, f):.1e}")
