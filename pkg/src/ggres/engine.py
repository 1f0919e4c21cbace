"""Resonances of the adjacency operator on a geometrically finite graph.

The resonance matrix on the compact core is

    H(mu) = (A_L + B(mu)) / (2 sqrt q) - z(mu) I,   z(mu) = (mu + 1/mu) / 2,
    B(mu)_vv = c_v sqrt(q)/mu + f_v / (sqrt(q) mu).

Multiplying by 2 q mu and writing lam = sqrt(q) mu gives the polynomial
matrix  X(lam) = lam M + diag(q c_v + f_v - q) - lam^2 I  with rational
coefficients.  Its determinant, stripped of the lam = 0 roots, is the
resonance polynomial; resonances are mu = lam / sqrt(q) for its roots.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import (LambdaPoly, LaurentPoly, SqrtQScalar, laurent_det,
                      poly_roots, to_lambda)
from .core import (Edge, GeomFiniteGraph, StabilizerGraph, Vertex,
                   operator_matrix, validate)

RANK_TOL = 1e-10


class InvalidGraphError(ValueError):
    pass


class NotAResonance(ValueError):
    def __init__(self, mu, nearest):
        self.mu, self.nearest = mu, nearest
        near = "none" if nearest is None else f"{nearest.real:.12e}{nearest.imag:+.12e}j"
        super().__init__(f"mu = {mu} is not a resonance; nearest resonance is {near}")


class SingularResolvent(ValueError):
    def __init__(self, mu, nearest):
        self.mu, self.nearest = mu, nearest
        super().__init__(f"H(mu) is singular at mu = {mu}; resonance at "
                         f"{nearest.real:.12e}{nearest.imag:+.12e}j")


def _require_valid(g: GeomFiniteGraph):
    bad = validate(g)
    if bad:
        raise InvalidGraphError("; ".join(str(v) for v in bad))


def z_of(mu: complex) -> complex:
    return (mu + 1 / mu) / 2


# --------------------------------------------------------------------------
# the resonance matrix


@dataclass(frozen=True)
class ResonanceMatrix:
    q: int
    ids: tuple
    entries: tuple       # H(mu) as LaurentPoly rows
    scaled: tuple        # 2 q mu H(mu) as LaurentPoly rows
    lam_coeffs: tuple    # (C0, C1, C2) rational matrices: X(lam) = C0 + C1 lam + C2 lam^2
    _m: np.ndarray = field(repr=False, compare=False)
    _shift: np.ndarray = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.ids)

    def __call__(self, mu: complex) -> np.ndarray:
        """Numeric H(mu)."""
        sq = math.sqrt(self.q)
        mu = complex(mu)
        h = self._m / (2 * sq)
        h = h + np.diag(self._shift / (2 * self.q * mu))
        return h - z_of(mu) * np.eye(self.n)

    def lam_matrix(self, lam: complex) -> np.ndarray:
        c0, c1, c2 = (np.array(c, dtype=float) for c in self.lam_coeffs)
        return c0 + c1 * lam + c2 * lam * lam


def build_H(g: GeomFiniteGraph) -> ResonanceMatrix:
    _require_valid(g)
    q = g.q
    m = operator_matrix(g)
    n = len(m)
    ids = tuple(g.core.ids)
    cf = [q * g.c(v) + g.f(v) for v in ids]
    rows, srows = [], []
    root = SqrtQScalar.sqrt_q(q)
    for i in range(n):
        row, srow = [], []
        for j in range(n):
            a = m[i][j]
            # a/(2 sqrt q) = a sqrt(q) / (2q)
            h = LaurentPoly.const(root * Fraction(a, 2 * q), q)
            s = LaurentPoly.monomial(root * a, 1, q)
            if i == j:
                inv = (g.c(ids[i]) + g.f(ids[i]) / q - 1) / 2
                h = h + LaurentPoly({-1: inv, 1: Fraction(-1, 2)}, q)
                s = s + LaurentPoly({0: cf[i] - q, 2: -q}, q)
            row.append(h)
            srow.append(s)
        rows.append(tuple(row))
        srows.append(tuple(srow))
    zero = Fraction(0)
    c0 = tuple(tuple(cf[i] - q if i == j else zero for j in range(n)) for i in range(n))
    c1 = tuple(tuple(m[i]) for i in range(n))
    c2 = tuple(tuple(Fraction(-1) if i == j else zero for j in range(n)) for i in range(n))
    shift = np.array([float(x) for x in cf])
    return ResonanceMatrix(q, ids, tuple(rows), tuple(srows), (c0, c1, c2),
                           np.array(m, dtype=float), shift)


# --------------------------------------------------------------------------
# exact determinant by evaluation at many points modulo word-size primes


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in (2, 3, 5, 7, 11, 13):
        if n % d == 0:
            return n == d
    d = 17
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _primes_below(start: int):
    p = start
    while True:
        p -= 1
        if _is_prime(p):
            yield p


def _det_mod_batch(a: np.ndarray, p: int) -> np.ndarray:
    """Determinants of a stack of square int64 matrices modulo p < 2**31."""
    a = a.copy() % p
    nb, n, _ = a.shape
    det = np.ones(nb, dtype=np.int64)
    alive = np.ones(nb, dtype=bool)
    rows = np.arange(nb)
    for k in range(n):
        nz = a[:, k:, k] != 0
        has = nz.any(axis=1)
        alive &= has
        piv = np.argmax(nz, axis=1) + k
        swap = alive & (piv != k)
        if swap.any():
            b = rows[swap]
            pk = a[b, k, :].copy()
            a[b, k, :] = a[b, piv[swap], :]
            a[b, piv[swap], :] = pk
            det[b] = (p - det[b]) % p
        pivots = a[:, k, k]
        inv = np.array([pow(int(x), p - 2, p) if x else 0 for x in pivots], dtype=np.int64)
        det = det * pivots % p
        if k + 1 < n:
            factor = a[:, k + 1:, k] * inv[:, None] % p
            a[:, k + 1:, k:] = (a[:, k + 1:, k:] - factor[:, :, None] * a[:, k, None, k:] % p) % p
    det[~alive] = 0
    return det


def _interp_mod(xs: Sequence[int], ys: Sequence[int], p: int) -> list[int]:
    """Coefficients (low to high) of the interpolating polynomial modulo p."""
    n = len(xs)
    coef = [int(y) % p for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            den = (xs[i] - xs[i - j]) % p
            coef[i] = (coef[i] - coef[i - 1]) * pow(den, p - 2, p) % p
    out = [0] * n
    for i in range(n - 1, -1, -1):
        # out = out * (x - xs[i]) + coef[i]
        new = [0] * n
        for k in range(n - 1):
            new[k + 1] = out[k]
        for k in range(n):
            new[k] = (new[k] - xs[i] * out[k]) % p
        new[0] = (new[0] + coef[i]) % p
        out = new
    return out


def _det_multimodular(rm: ResonanceMatrix) -> LambdaPoly:
    c0, c1, c2 = rm.lam_coeffs
    n = rm.n
    den = 1
    for mat in (c0, c1, c2):
        for row in mat:
            for x in row:
                den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [[[int(x * den) for x in row] for row in mat] for mat in (c0, c1, c2)]
    bound = 1
    for i in range(n):
        bound *= sum(abs(ints[d][i][j]) for d in range(3) for j in range(n))
    deg = 2 * n
    xs = list(range(deg + 1))
    residues, modulus = [0] * (deg + 1), 1
    for p in _primes_below(2 ** 31 - 1):
        if modulus > 2 * bound:
            break
        mats = [np.array(m, dtype=object) for m in ints]
        cm = [np.array((m % p).tolist(), dtype=np.int64) for m in mats]
        t = np.array(xs, dtype=np.int64)[:, None, None]
        stack = (cm[0][None] + cm[1][None] * t % p + cm[2][None] * (t * t % p) % p) % p
        vals = _det_mod_batch(stack, p)
        coeffs = _interp_mod(xs, [int(v) for v in vals], p)
        # CRT
        inv = pow(modulus, -1, p)
        for i in range(deg + 1):
            r = residues[i]
            residues[i] = r + modulus * ((coeffs[i] - r) * inv % p)
        modulus *= p
    half = modulus // 2
    lifted = [r - modulus if r > half else r for r in residues]
    scale = Fraction(1, den ** n)
    return LambdaPoly(tuple(Fraction(c) * scale for c in lifted))


def resonance_polynomial(g: GeomFiniteGraph, method: str = "auto") -> tuple[int, LambdaPoly]:
    """``(k, P)`` with det(2 q mu H(mu)) = unit * lam**k * P(lam).

    ``method`` is ``"laurent"`` (exact Laurent determinant then to_lambda),
    ``"modular"`` (evaluation modulo primes with a coefficient bound) or
    ``"auto"`` (Laurent for cores of at most 8 vertices).
    """
    rm = build_H(g)
    if method == "auto":
        method = "laurent" if rm.n <= 8 else "modular"
    if method == "laurent":
        k, p = to_lambda(laurent_det([list(r) for r in rm.scaled]))
    elif method == "modular":
        full = _det_multimodular(rm)
        k, p = full.strip_zero_roots()
        p = p.primitive()
    else:
        raise ValueError(f"unknown method {method!r}")
    assert p.degree + k == 2 * rm.n, "determinant degree bookkeeping failed"
    return k, p


# --------------------------------------------------------------------------
# resonances


@dataclass(frozen=True)
class Resonance:
    mu: complex
    root_multiplicity: int
    kernel_dim: int
    residual: float

    def __repr__(self):
        return (f"Resonance(mu={self.mu:.10g}, root_multiplicity={self.root_multiplicity}, "
                f"kernel_dim={self.kernel_dim})")


def _kernel(rm: ResonanceMatrix, mu: complex, rank_tol: float = RANK_TOL):
    """Numeric kernel of H(mu) with singular values measured against the size of its terms.

    Relative to sigma_max alone a 1x1 matrix never looks singular, so the
    reference scale is ||A/(2 sqrt q)|| + ||B(mu)/(2 sqrt q)|| + |z(mu)|.
    """
    h = rm(mu)
    _, s, vh = np.linalg.svd(h)
    sq = math.sqrt(rm.q)
    scale = (np.linalg.norm(rm._m, 2) / (2 * sq)
             + float(np.max(np.abs(rm._shift))) / (2 * rm.q * abs(mu))
             + abs(z_of(mu)) + 1.0)
    null = s <= rank_tol * scale
    return s, vh[null].conj(), float(s[-1] / scale)


def _guesses(rm: ResonanceMatrix) -> np.ndarray:
    """Eigenvalues of the linearization of lam^2 I - lam M - D."""
    n = rm.n
    c0 = np.array(rm.lam_coeffs[0], dtype=float)
    c1 = np.array(rm.lam_coeffs[1], dtype=float)
    lin = np.zeros((2 * n, 2 * n))
    lin[:n, n:] = np.eye(n)
    lin[n:, :n] = c0
    lin[n:, n:] = c1
    ev = np.linalg.eigvals(lin)
    return ev[np.abs(ev) > 1e-9]


def find_resonances(g: GeomFiniteGraph, tol: float = 1e-8, method: str = "auto",
                    rank_tol: float = RANK_TOL, poly: LambdaPoly | None = None) -> list[Resonance]:
    """Nonzero roots of the resonance polynomial with kernel dimensions of H.

    ``poly`` may pass in an already computed resonance polynomial.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rm = build_H(g)
    p = resonance_polynomial(g, method)[1] if poly is None else poly
    if p.degree < 1:
        return []
    roots = poly_roots(p, tol, guesses=_guesses(rm))
    sq = math.sqrt(g.q)
    out = []
    for r in roots:
        mu = r.value / sq
        _, basis, res = _kernel(rm, mu, rank_tol)
        out.append(Resonance(mu, r.multiplicity, len(basis), res))
    assert len(out) <= 2 * rm.n, "more distinct resonances than 2|core|"
    return out


@functools.lru_cache(maxsize=64)
def _cached_resonances(g: GeomFiniteGraph) -> tuple:
    return tuple(find_resonances(g))


def nearest_resonance(resonances: Sequence[Resonance], mu: complex):
    if not resonances:
        return None
    return min(resonances, key=lambda r: abs(r.mu - mu))


# --------------------------------------------------------------------------
# resonant states and outgoing extension


@dataclass(frozen=True)
class ResonantState:
    core_values: np.ndarray
    mu: complex
    ids: tuple
    cusp_ratio: complex
    funnel_ratio: complex

    def value(self, vid: int) -> complex:
        return complex(self.core_values[self.ids.index(vid)])


def end_ratios(q: int, mu: complex) -> tuple[complex, complex]:
    sq = math.sqrt(q)
    return sq / mu, 1 / (sq * mu)


def _phase_fix(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    w = v * (abs(v[k]) / v[k])
    small = 1e-14 * abs(w[k])
    w.real[np.abs(w.real) < small] = 0.0
    w.imag[np.abs(w.imag) < small] = 0.0
    return w + 0.0


def _canonical_basis(basis) -> list[np.ndarray]:
    """Orthonormal basis that depends only on the subspace, not on the SVD.

    Projects e_0, e_1, ... onto the span and runs Gram-Schmidt in vertex order,
    skipping vectors that lose more than half their length.
    """
    b = np.array(basis, dtype=complex).T
    proj = b @ b.conj().T
    out = []
    for i in range(proj.shape[0]):
        v = proj[:, i].copy()
        for w in out:
            v -= (w.conj() @ v) * w
        if np.linalg.norm(v) > 0.5 * np.sqrt(abs(proj[i, i])) and np.linalg.norm(v) > 1e-6:
            out.append(v / np.linalg.norm(v))
        if len(out) == b.shape[1]:
            break
    return [_phase_fix(v) for v in out]


def resonant_states(g: GeomFiniteGraph, mu0: complex, tol: float = 1e-6,
                    rank_tol: float = RANK_TOL) -> list[ResonantState]:
    """Orthonormal basis of ker H(mu0), after snapping mu0 to the nearest resonance."""
    mu0 = complex(mu0)
    res = _cached_resonances(g)
    near = nearest_resonance(res, mu0)
    if near is None or abs(near.mu - mu0) > tol * max(1.0, abs(near.mu)):
        raise NotAResonance(mu0, None if near is None else near.mu)
    rm = build_H(g)
    _, basis, _ = _kernel(rm, near.mu, rank_tol)
    cr, fr = end_ratios(g.q, near.mu)
    basis = _canonical_basis(basis)
    return [ResonantState(np.asarray(b, dtype=complex), near.mu, rm.ids, cr, fr) for b in basis]


@dataclass(frozen=True)
class OutgoingExtension:
    """A function on the core plus constant-per-level values on each end.

    ``cusps[v]`` and ``funnels[v]`` hold levels 0..depth, where level 0 is the
    attachment vertex itself.
    """

    depth: int
    mu: complex
    ids: tuple
    core: np.ndarray
    cusps: dict
    funnels: dict

    def sup_norm(self) -> float:
        vals = [np.max(np.abs(self.core))] if self.core.size else [0.0]
        for arr in list(self.cusps.values()) + list(self.funnels.values()):
            vals.append(float(np.max(np.abs(arr))))
        return float(max(vals))


def _extend(g: GeomFiniteGraph, values: np.ndarray, mu: complex, depth: int) -> OutgoingExtension:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    ids = tuple(g.core.ids)
    cr, fr = end_ratios(g.q, mu)
    k = np.arange(depth + 1)
    cusps = {v: values[ids.index(v)] * cr ** k for v, w in g.cusp_weight.items() if w}
    funnels = {v: values[ids.index(v)] * fr ** k for v, w in g.funnel_weight.items() if w}
    return OutgoingExtension(depth, complex(mu), ids, np.asarray(values, dtype=complex), cusps, funnels)


def extend_outgoing(g: GeomFiniteGraph, state: ResonantState, mu0: complex | None = None,
                    depth: int = 10) -> OutgoingExtension:
    mu0 = state.mu if mu0 is None else complex(mu0)
    return _extend(g, state.core_values, mu0, depth)


def eigen_residual(g: GeomFiniteGraph, ext: OutgoingExtension, mu: complex,
                   rhs: np.ndarray | None = None) -> float:
    """max |((A/(2 sqrt q) - z(mu)) u - rhs)| on the core and end levels 1..depth-1."""
    q = g.q
    sq = math.sqrt(q)
    z = z_of(complex(mu))
    m = np.array(operator_matrix(g), dtype=float)
    u = ext.core
    au = m @ u
    for i, v in enumerate(ext.ids):
        if v in ext.cusps:
            au[i] += float(g.c(v)) * ext.cusps[v][1]
        if v in ext.funnels:
            au[i] += float(g.f(v)) * ext.funnels[v][1]
    r = au / (2 * sq) - z * u
    if rhs is not None:
        r = r - np.asarray(rhs, dtype=complex)
    worst = float(np.max(np.abs(r))) if r.size else 0.0
    for arr in ext.cusps.values():
        inner = (q * arr[:-2] + arr[2:]) / (2 * sq) - z * arr[1:-1]
        if inner.size:
            worst = max(worst, float(np.max(np.abs(inner))))
    for arr in ext.funnels.values():
        inner = (arr[:-2] + q * arr[2:]) / (2 * sq) - z * arr[1:-1]
        if inner.size:
            worst = max(worst, float(np.max(np.abs(inner))))
    return worst


def verify_eigen_equation(g: GeomFiniteGraph, ext: OutgoingExtension, mu0: complex | None = None,
                          depth: int | None = None) -> float:
    if ext.depth < 2:
        raise ValueError("extension depth must be >= 2")
    return eigen_residual(g, ext, ext.mu if mu0 is None else mu0)


# --------------------------------------------------------------------------
# l2 classification


@dataclass(frozen=True)
class L2Verdict:
    is_l2: bool
    witness: dict


def classify_l2(g: GeomFiniteGraph, state: ResonantState, mu0: complex | None = None,
                levels: int = 200, zero_tol: float = 1e-8) -> L2Verdict:
    """Square-summability of the outgoing extension with respect to nu.

    Level k of an end carries mass proportional to |u(v)|^2 |mu0|^(-2k) for
    both cusps and funnels, so the state is l2 iff |mu0| > 1 or it vanishes
    at every attachment vertex.
    """
    mu0 = state.mu if mu0 is None else complex(mu0)
    scale = float(np.max(np.abs(state.core_values))) or 1.0
    ratio = abs(mu0) ** -2
    ends = {}
    all_zero = True
    for kind, weights in (("cusp", g.cusp_weight), ("funnel", g.funnel_weight)):
        for v, w in weights.items():
            if not w:
                continue
            val = abs(state.value(v))
            zero = val <= zero_tol * scale
            all_zero &= zero
            nu = 1.0 / float(g.core.stab(v))
            base = float(w) * nu * val ** 2 * (1.0 if kind == "cusp" else 1.0 / g.q)
            k = np.arange(1, levels + 1)
            mass = 0.0 if zero else base * ratio ** k
            partial = np.cumsum(np.broadcast_to(mass, k.shape))
            ends[f"{kind}@{v}"] = {
                "attachment_value": val,
                "level_ratio": 0.0 if zero else ratio,
                "partial_sum_100": float(partial[min(99, levels - 1)]),
                "partial_sum_200": float(partial[-1]),
            }
    is_l2 = abs(mu0) > 1 or all_zero
    return L2Verdict(bool(is_l2), {"mu_abs": abs(mu0), "ends": ends})


# --------------------------------------------------------------------------
# resolvent


def apply_resolvent(g: GeomFiniteGraph, f, mu: complex, depth: int = 10,
                    tol: float = 1e-8) -> OutgoingExtension:
    """Outgoing solution of (A/(2 sqrt q) - z(mu)) u = f for f supported on the core."""
    mu = complex(mu)
    rm = build_H(g)
    fv = np.zeros(rm.n, dtype=complex)
    if isinstance(f, dict):
        for v, x in f.items():
            fv[rm.ids.index(v)] = x
    else:
        fv[:] = np.asarray(f, dtype=complex)
    near = nearest_resonance(_cached_resonances(g), mu)
    if near is not None and abs(near.mu - mu) <= tol * max(1.0, abs(near.mu)):
        raise SingularResolvent(mu, near.mu)
    h = rm(mu)
    if np.linalg.cond(h) > 1e14:
        raise SingularResolvent(mu, near.mu if near else mu)
    u = np.linalg.solve(h, fv)
    return _extend(g, u, mu, depth)


def resolvent_residual(g: GeomFiniteGraph, ext: OutgoingExtension, f) -> float:
    fv = np.zeros(len(ext.ids), dtype=complex)
    if isinstance(f, dict):
        for v, x in f.items():
            fv[ext.ids.index(v)] = x
    else:
        fv[:] = np.asarray(f, dtype=complex)
    return eigen_residual(g, ext, ext.mu, rhs=fv)


# --------------------------------------------------------------------------
# bounds


def multiplicity_bound(g: GeomFiniteGraph) -> int:
    n_c = math.ceil(sum(g.cusp_weight.values(), Fraction(0)))
    n_f = math.ceil(sum(g.funnel_weight.values(), Fraction(0)))
    return 3 * (g.n + n_c + (g.q + 1) * n_f) ** 2


def check_bounds(g: GeomFiniteGraph, resonances: Sequence[Resonance]) -> dict:
    cap = multiplicity_bound(g)
    report = {
        "distinct": len(resonances),
        "distinct_cap": 2 * g.n,
        "max_kernel_dim": max((r.kernel_dim for r in resonances), default=0),
        "kernel_cap": cap,
    }
    assert report["distinct"] <= report["distinct_cap"], f"too many resonances: {report}"
    for r in resonances:
        assert 1 <= r.kernel_dim <= cap, f"kernel dimension out of range at {r.mu}: {report}"
    return report


# --------------------------------------------------------------------------
# core enlargement


def absorb_end(g: GeomFiniteGraph, vertex: int, kind: str, levels: int = 1) -> GeomFiniteGraph:
    """Turn the first ``levels`` levels of an end at ``vertex`` into core vertices.

    A cusp level sits above its parent with inward weight q and outward
    weight 1; a funnel level is one aggregated vertex with inward weight 1 and
    outward weight q, carrying the combined measure of the whole level.
    Stabilizers are chosen so that the weights come out right, which may make
    them non-integral.
    """
    if kind not in ("cusp", "funnel"):
        raise ValueError("kind must be 'cusp' or 'funnel'")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    weights = g.cusp_weight if kind == "cusp" else g.funnel_weight
    w = weights.get(vertex, Fraction(0))
    if not w:
        raise ValueError(f"no {kind} attached at vertex {vertex}")
    q = g.q
    verts = list(g.core.vertices)
    edges = list(g.core.edges)
    cusp = dict(g.cusp_weight)
    funnel = dict(g.funnel_weight)
    del (cusp if kind == "cusp" else funnel)[vertex]
    next_id = max(g.core.ids) + 1
    parent, pstab = vertex, g.core.stab(vertex)
    out_w = w
    for _ in range(levels):
        estab = pstab / out_w
        back = q if kind == "cusp" else 1
        nstab = estab * back
        verts.append(Vertex(next_id, nstab))
        edges.append(Edge(parent, next_id, estab))
        parent, pstab = next_id, nstab
        out_w = Fraction(1) if kind == "cusp" else Fraction(q)
        next_id += 1
    if kind == "cusp":
        cusp[parent] = Fraction(1)
    else:
        funnel[parent] = Fraction(q)
    return GeomFiniteGraph(q, StabilizerGraph(tuple(verts), tuple(edges)), cusp, funnel)
