"""
Elliptic fixtures and the zeta numerator
========================================

The two elliptic graphs have resonance polynomials that contain the zeta
numerator of an elliptic curve as a factor. The rest of the polynomial comes
from the trivial and topological resonances.
"""

# %%
from ggres import fixture, find_resonances, resonance_polynomial, resonant_states
from ggres.core import load_file
from ggres.engine import classify_l2
from ggres.zeta import check_resonance_link, count_points, load_curve, zeta_numerator

pairs = [("elliptic_f2.json", "curve_f2.json"), ("elliptic_f3.json", "curve_f3.json")]

# %%
for graph_name, curve_name in pairs:
    g = load_file(fixture(graph_name))
    curve = load_curve(fixture(curve_name))
    k, p = resonance_polynomial(g)
    z = zeta_numerator(curve)
    print(f"{graph_name}: {g.n} core vertices, degree {p.degree} (+{k} zero roots)")
    print(f"    N_1..N_3 = {[count_points(curve, r) for r in (1, 2, 3)]}")
    print(f"    P(T) = {z}, roots on |T| = q^-1/2: {z.rh_holds()}")
    link = check_resonance_link(g, curve)
    print(f"    P(mu^2) divides the resonance polynomial: {link.divides}")
    for mu, m in link.cofactor_mu_roots:
        print(f"        cofactor root {mu:.6f} x{m}")

# %%
# Which resonant states are honest l2 eigenfunctions?
for graph_name, mus in (("elliptic_f2.json", ["i", "-i"]), ("elliptic_f3.json", ["1", "-1"])):
    g = load_file(fixture(graph_name))
    for label in mus:
        mu = complex(label.replace("i", "j") if label != "i" else "1j")
        verdicts = [classify_l2(g, st).is_l2 for st in resonant_states(g, mu)]
        print(f"{graph_name} mu={label}: l2 = {verdicts}")

# %%
# All resonances, for reference.
for graph_name, _ in pairs:
    g = load_file(fixture(graph_name))
    print(graph_name, [f"{r.mu:.4f}" for r in find_resonances(g)])
