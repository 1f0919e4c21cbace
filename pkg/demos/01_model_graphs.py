"""
Resonances of the basic model graphs
====================================

Each model is small enough that its resonance polynomial can be read off by
hand, so this is a good place to see what the library returns.
"""

# %%
import math

import numpy as np

from ggres import find_resonances, resonance_polynomial
from ggres.core import hyperbolic_cylinder, modular_curve, parabolic_cylinder, tree_model


def show(name, g):
    k, p = resonance_polynomial(g)
    print(f"{name}: lambda^{k} * ({' '.join(str(c) for c in reversed(p.coeffs))})")
    for r in find_resonances(g):
        print(f"    mu = {r.mu:.6f}   root mult {r.root_multiplicity}   kernel dim {r.kernel_dim}")


# %%
# A single vertex with q+1 funnels is the regular tree itself. The resonances
# sit at +-1/sqrt(q), the edge of the continuation region.
for q in (2, 3, 5):
    show(f"tree q={q}", tree_model(q))

# %%
# One cusp and one funnel glued at a vertex: resonances at +-1 for every q.
show("parabolic q=2", parabolic_cylinder(2))

# %%
# The modular curve has a single cusp. Its resonances +-sqrt(q) lie outside
# the unit disk, so the states there are genuine l2 eigenfunctions.
for q in (2, 3, 4):
    show(f"modular q={q}", modular_curve(q))

# %%
# A cycle of N vertices, each carrying q-1 funnels. The determinant factors
# over the characters of Z/N; every root comes out double because the
# characters j and N-j give the same quadratic.
q = 2
for n in (3, 6, 12):
    res = find_resonances(hyperbolic_cylinder(q, n))
    angles = np.sort(np.angle([r.mu for r in res]) % (2 * math.pi))
    print(f"N={n:2d}: |mu| = {abs(res[0].mu):.6f}, angular gaps {np.round(np.diff(angles), 6)}")
