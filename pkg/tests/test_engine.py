import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import ALL_GRAPH_FIXTURES, load_fixture
from ggres.algebra import LambdaPoly, LaurentPoly, lambda_poly_from_mu_roots, same_up_to_unit
from ggres.core import (GeomFiniteGraph, StabilizerGraph, hyperbolic_cylinder, modular_curve,
                        parabolic_cylinder, symmetrized, tree_model, validate)
from ggres.engine import (InvalidGraphError, NotAResonance, SingularResolvent, absorb_end,
                          apply_resolvent, build_H, check_bounds, classify_l2, extend_outgoing,
                          find_resonances, multiplicity_bound, resolvent_residual,
                          resonance_polynomial, resonant_states, verify_eigen_equation, z_of)
from ggres.random_graphs import generate_regular, surgery


def mus(res):
    return sorted(((r.mu.real, r.mu.imag) for r in res))


def test_build_H_tree():
    h = build_H(tree_model(2)).entries[0][0]
    assert h == LaurentPoly({-1: Fraction(3, 4) - Fraction(1, 2), 1: Fraction(-1, 2)}, 2)


def test_build_H_parabolic_sign():
    # direct evaluation gives -(mu - 1/mu)/2
    h = build_H(parabolic_cylinder(2)).entries[0][0]
    assert h == LaurentPoly({1: Fraction(-1, 2), -1: Fraction(1, 2)}, 2)


def test_build_H_hyperbolic_circulant():
    q, n = 3, 6
    rm = build_H(hyperbolic_cylinder(q, n))
    mu = 0.7 + 0.2j
    h = rm(mu)
    first = np.zeros(n, dtype=complex)
    first[0] = (q - 1) / (2 * q * mu) - z_of(mu)
    first[1] = first[-1] = 1 / (2 * math.sqrt(q))
    for i in range(n):
        assert np.allclose(h[i], np.roll(first, i))


@pytest.mark.parametrize("name", ALL_GRAPH_FIXTURES)
def test_entry_shapes(name):
    rm = build_H(load_fixture(name))
    for i, row in enumerate(rm.entries):
        for j, e in enumerate(row):
            if e.is_zero():
                continue
            if i != j:
                assert set(e.coeffs) == {0}
            else:
                assert set(e.coeffs) <= {-1, 0, 1}


@pytest.mark.parametrize("name", ALL_GRAPH_FIXTURES)
def test_numeric_H_matches_laurent(name):
    rm = build_H(load_fixture(name))
    mu = 0.83 - 0.41j
    ref = np.array([[e(mu) for e in row] for row in rm.entries])
    assert np.allclose(rm(mu), ref, atol=1e-13)


def test_invalid_graph_rejected():
    with pytest.raises(InvalidGraphError):
        build_H(GeomFiniteGraph(2, StabilizerGraph.build({0: 1})))


@pytest.mark.parametrize("q", [2, 3, 4])
def test_modular_polynomial(q):
    _, p = resonance_polynomial(modular_curve(q))
    assert p == LambdaPoly.from_ints([-q * q, 0, 1])


def test_elliptic_polynomials_match_printed(f2_graph, f3_graph):
    _, p = resonance_polynomial(f2_graph)
    ref = lambda_poly_from_mu_roots([[1, 0, 1], [1, 0, 1], [-2, 0, 1], [1, 0, -2, 0, 2]], 2)
    assert same_up_to_unit(p, ref)
    _, p = resonance_polynomial(f3_graph)
    ref = lambda_poly_from_mu_roots([[1, 0, 1], [1, 0, 1], [-1, 1], [-1, 1], [1, 1], [1, 1],
                                     [-3, 0, 1], [1, 0, 0, 0, 3]], 3)
    assert same_up_to_unit(p, ref)


@pytest.mark.parametrize("name", ALL_GRAPH_FIXTURES)
def test_routes_agree(name):
    g = load_fixture(name)
    assert resonance_polynomial(g, "laurent") == resonance_polynomial(g, "modular")


def test_routes_agree_random():
    for seed in range(6):
        g = surgery(generate_regular(8, 3, seed), 3, 2, 3, seed)
        assert resonance_polynomial(g, "laurent") == resonance_polynomial(g, "modular")


def test_degree_bound():
    for name in ALL_GRAPH_FIXTURES:
        g = load_fixture(name)
        k, p = resonance_polynomial(g)
        assert p.degree + k == 2 * g.n


def test_tree_resonances():
    for q in (2, 3, 5):
        res = find_resonances(tree_model(q))
        assert len(res) == 2
        for r, s in zip(sorted(r.mu.real for r in res), (-1, 1)):
            assert abs(r - s / math.sqrt(q)) < 1e-12


def test_compact_oracle_small():
    g = GeomFiniteGraph(2, StabilizerGraph.build({i: 1 for i in range(4)},
                                                 [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]))
    res = find_resonances(g)
    eig = np.linalg.eigvalsh(symmetrized(g))
    expected = []
    for e in eig:
        expected += list(np.roots([1, -e / math.sqrt(2), 1]))
    got = [r.mu for r in res for _ in range(r.root_multiplicity)]
    assert len(got) == len(expected)
    for e in expected:
        assert min(abs(e - x) for x in got) < 1e-8


def test_kernel_and_singular_value_consistency(f2_graph):
    rm = build_H(f2_graph)
    for r in find_resonances(f2_graph):
        assert r.kernel_dim >= 1 and r.residual < 1e-10
    rng = random.Random(1)
    res = find_resonances(f2_graph)
    for _ in range(100):
        mu = cmath.rect(rng.uniform(0.3, 2), rng.uniform(0, 2 * math.pi))
        if min(abs(mu - r.mu) for r in res) < 1e-3:
            continue
        smin = np.linalg.svd(rm(mu), compute_uv=False)[-1]
        assert smin > 10 * 1e-8


def test_states_parabolic():
    for q in (2, 3):
        g = parabolic_cylinder(q)
        (st,) = resonant_states(g, 1)
        assert abs(st.core_values[0] - 1) < 1e-12
        ext = extend_outgoing(g, st, depth=12)
        k = np.arange(13)
        assert np.allclose(ext.cusps[0], q ** (k / 2), rtol=1e-10)
        assert np.allclose(ext.funnels[0], q ** (-k / 2), rtol=1e-10)
        (st,) = resonant_states(g, -1)
        ext = extend_outgoing(g, st, depth=12)
        assert np.allclose(ext.cusps[0] / ext.cusps[0][0], (-1.0) ** k * q ** (k / 2), rtol=1e-10)


def test_states_modular_constant():
    g = modular_curve(3)
    (st,) = resonant_states(g, math.sqrt(3))
    assert abs(abs(st.core_values[0]) - 1) < 1e-12
    ext = extend_outgoing(g, st, depth=20)
    assert np.allclose(ext.cusps[0], ext.cusps[0][0])
    assert verify_eigen_equation(g, ext) <= 1e-10


def test_f2_kernel_two_dimensional(f2_graph):
    assert len(resonant_states(f2_graph, 1j)) == 2


def test_not_a_resonance():
    with pytest.raises(NotAResonance, match="1.414"):
        resonant_states(modular_curve(2), 2.0)


def test_extension_zero_attachment():
    g = parabolic_cylinder(2)
    st = resonant_states(g, 1)[0]
    zero = type(st)(np.zeros(1, dtype=complex), st.mu, st.ids, st.cusp_ratio, st.funnel_ratio)
    ext = extend_outgoing(g, zero, depth=5)
    assert not ext.cusps[0].any() and not ext.funnels[0].any()


def test_eigen_equation_hyperbolic():
    g = hyperbolic_cylinder(2, 4)
    mu0 = 1j / math.sqrt(2)
    for st in resonant_states(g, mu0):
        ext = extend_outgoing(g, st, depth=20)
        assert verify_eigen_equation(g, ext) <= 1e-9 * ext.sup_norm()


def test_eigen_equation_detects_non_resonance():
    g = modular_curve(2)
    st = resonant_states(g, math.sqrt(2))[0]
    ext = extend_outgoing(g, st, mu0=math.sqrt(2) * 1.1, depth=20)
    assert verify_eigen_equation(g, ext) > 1e-3 * ext.sup_norm()


@pytest.mark.parametrize("name", ALL_GRAPH_FIXTURES)
def test_all_fixture_states_extend(name):
    g = load_fixture(name)
    for r in find_resonances(g):
        for st in resonant_states(g, r.mu):
            ext = extend_outgoing(g, st, depth=8)
            assert verify_eigen_equation(g, ext) <= 1e-9 * max(1.0, ext.sup_norm())


def _partial_sum_l2(g, st, levels=200):
    """Direct level sums of |u|^2 nu over every end."""
    mu = st.mu
    sq = math.sqrt(g.q)
    mass = np.zeros(levels + 1)
    for v, w in g.cusp_weight.items():
        base = float(w) / float(g.core.stab(v)) * abs(st.value(v)) ** 2
        for k in range(1, levels + 1):
            mass[k] += base * abs(sq / mu) ** (2 * k) * g.q ** -k
    for v, w in g.funnel_weight.items():
        base = float(w) / float(g.core.stab(v)) * abs(st.value(v)) ** 2
        for k in range(1, levels + 1):
            mass[k] += base * g.q ** (k - 1) * abs(1 / (sq * mu)) ** (2 * k)
    if mass[levels] <= 1e-20 * max(1.0, mass[1]):
        return True
    return mass[levels] / mass[levels - 1] < 1 - 1e-12


@pytest.mark.parametrize("name", ALL_GRAPH_FIXTURES)
def test_l2_agrees_with_partial_sums(name):
    g = load_fixture(name)
    for r in find_resonances(g):
        for st in resonant_states(g, r.mu):
            assert classify_l2(g, st).is_l2 == _partial_sum_l2(g, st)


def test_l2_examples(f2_graph, f3_graph):
    assert classify_l2(modular_curve(2), resonant_states(modular_curve(2), math.sqrt(2))[0]).is_l2
    assert not any(classify_l2(f3_graph, s).is_l2 for s in resonant_states(f3_graph, 1))
    assert all(classify_l2(f2_graph, s).is_l2 for s in resonant_states(f2_graph, 1j))


def test_resolvent_tree_matches_kernel():
    from ggres.kernels import TreeKernelParams, tree_kernel
    g = tree_model(3)
    for mu in (2.0, 0.7 + 0.4j, -0.9j):
        ext = apply_resolvent(g, [1.0], mu, depth=10)
        p = TreeKernelParams(3, mu)
        for d in range(11):
            assert abs(ext.funnels[0][d] - tree_kernel(p, d)) <= 1e-10 * abs(tree_kernel(p, 0))


def test_resolvent_parabolic_value():
    from ggres.kernels import CuspKernelParams, cusp_kernel
    g = parabolic_cylinder(2)
    mu = 1.3 + 0.4j
    ext = apply_resolvent(g, [1.0], mu, depth=6)
    assert abs(ext.core[0] - (-2 / (mu - 1 / mu))) < 1e-12
    assert abs(ext.core[0] - cusp_kernel(CuspKernelParams(2, mu), 0, 0)) < 1e-12


@pytest.mark.parametrize("name", ALL_GRAPH_FIXTURES)
def test_resolvent_residual(name):
    g = load_fixture(name)
    rng = np.random.default_rng(5)
    f = rng.standard_normal(g.n) + 1j * rng.standard_normal(g.n)
    ext = apply_resolvent(g, f, 0.9 + 0.35j, depth=12)
    assert resolvent_residual(g, ext, f) <= 1e-9 * max(1.0, ext.sup_norm())


def test_resolvent_zero_input():
    ext = apply_resolvent(hyperbolic_cylinder(2, 5), np.zeros(5), 0.5 + 0.5j, depth=4)
    assert not ext.core.any()


def test_resolvent_at_resonance_names_it():
    with pytest.raises(SingularResolvent) as info:
        apply_resolvent(parabolic_cylinder(2), [1.0], 1.0 + 1e-12)
    assert abs(info.value.nearest - 1) < 1e-9


def test_bounds_examples(f2_graph):
    for g in (tree_model(2), f2_graph, hyperbolic_cylinder(2, 7)):
        rep = check_bounds(g, find_resonances(g))
        assert rep["distinct"] <= 2 * g.n
    assert multiplicity_bound(tree_model(2)) == 3 * (1 + 0 + 3 * 3) ** 2


@pytest.mark.parametrize("kind", ["cusp", "funnel"])
def test_absorbing_an_end_keeps_resonances(kind, f3_graph):
    graphs = [parabolic_cylinder(2), parabolic_cylinder(3), f3_graph, hyperbolic_cylinder(3, 3)]
    for g in graphs:
        weights = g.cusp_weight if kind == "cusp" else g.funnel_weight
        for v in weights:
            h = absorb_end(g, v, kind, levels=2)
            assert validate(h) == []
            a = [(round(r.mu.real, 9), round(r.mu.imag, 9), r.root_multiplicity) for r in find_resonances(g)]
            b = [(round(r.mu.real, 9), round(r.mu.imag, 9), r.root_multiplicity) for r in find_resonances(h)]
            assert sorted(a) == sorted(b)
            break


def test_absorb_then_resolve_end_supported_input():
    g = tree_model(2)
    h = absorb_end(g, 0, "funnel", levels=1)
    mu = 1.1 + 0.3j
    f = np.zeros(h.n, dtype=complex)
    f[1] = 1.0
    ext = apply_resolvent(h, f, mu, depth=8)
    assert resolvent_residual(h, ext, f) < 1e-10 * max(1.0, ext.sup_norm())
