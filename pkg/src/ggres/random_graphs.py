"""Seeded random regular graphs, end surgery and resonance clouds.

The generator is SplitMix64 so that streams are reproducible from their
constants alone:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

(all arithmetic mod 2^64).  Instance i of a sweep with seed s uses the
stream seeded by the first output of SplitMix64(s ^ (i * golden)).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Edge, GeomFiniteGraph, StabilizerGraph, Vertex

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


class GenerationError(RuntimeError):
    pass


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK

    def next(self) -> int:
        self.state = (self.state + GOLDEN) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection, free of modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next()
            if x < limit:
                return x % n

    def shuffle(self, items: list) -> None:
        """Fisher-Yates, in place."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def instance_stream(seed: int, index: int) -> SplitMix64:
    return SplitMix64(SplitMix64((seed ^ (index * GOLDEN)) & MASK).next())


def _pairing_attempt(n: int, d: int, rng: SplitMix64, simple: bool):
    """One pass of incremental pairing.

    Points are drawn two at a time from the pool of free half-edges; a pair
    that would create a loop or a repeated edge is redrawn a bounded number of
    times before the whole attempt is abandoned.
    """
    free = [v for v in range(n) for _ in range(d)]
    edges = []
    seen = set()
    while free:
        for _ in range(64):
            i = rng.below(len(free))
            j = rng.below(len(free))
            if i == j:
                continue
            u, v = free[i], free[j]
            key = (min(u, v), max(u, v))
            if simple and (u == v or key in seen):
                continue
            break
        else:
            return None
        for k in sorted((i, j), reverse=True):
            free[k] = free[-1]
            free.pop()
        seen.add(key)
        edges.append(key)
    return edges


def generate_regular(n: int, q: int, seed: int, restarts: int = 1000,
                     allow_multigraph: bool = False) -> StabilizerGraph:
    """A (q+1)-regular graph on n vertices, all stabilizers 1.

    Simple graphs are produced by pairing with local rejection and restarts;
    with ``allow_multigraph`` the plain configuration model is used.
    """
    d = q + 1
    if (n * d) % 2:
        raise GenerationError(f"n*(q+1) = {n * d} is odd")
    if not allow_multigraph and n < d + 1:
        raise GenerationError(f"no simple {d}-regular graph on {n} vertices")
    rng = SplitMix64(seed)
    for _ in range(restarts):
        edges = _pairing_attempt(n, d, rng, simple=not allow_multigraph)
        if edges is not None:
            edges.sort()
            return StabilizerGraph(tuple(Vertex(i, Fraction(1)) for i in range(n)),
                                   tuple(Edge(u, v, Fraction(1)) for u, v in edges))
    raise GenerationError(f"restart budget of {restarts} exhausted for n={n}, q={q}")


def surgery(gr: StabilizerGraph, q: int, c: int, f: int, seed: int) -> GeomFiniteGraph:
    """Replace c random edges by cusp pairs and f more by funnel pairs."""
    m = len(gr.edges)
    if c < 0 or f < 0 or c + f > m:
        raise GenerationError(f"cannot remove {c}+{f} edges from a graph with {m}")
    order = list(range(m))
    SplitMix64(seed).shuffle(order)
    cusp_idx, fun_idx = set(order[:c]), set(order[c:c + f])
    cw: dict[int, Fraction] = {}
    fw: dict[int, Fraction] = {}
    kept = []
    for k, e in enumerate(gr.edges):
        target = cw if k in cusp_idx else fw if k in fun_idx else None
        if target is None:
            kept.append(e)
            continue
        for v in (e.u, e.v):
            target[v] = target.get(v, Fraction(0)) + 1
    cw = {v: cw[v] for v in sorted(cw)}
    fw = {v: fw[v] for v in sorted(fw)}
    return GeomFiniteGraph(q, StabilizerGraph(gr.vertices, tuple(kept)), cw, fw)


@dataclass(frozen=True)
class SurgerySpec:
    n: int
    q: int
    c: int = 0
    f: int = 0
    seed: int = 1

    def __post_init__(self):
        if (self.n * (self.q + 1)) % 2:
            raise GenerationError("n*(q+1) must be even")
        if self.c + self.f > self.n * (self.q + 1) // 2:
            raise GenerationError("c + f exceeds the edge count")


@dataclass(frozen=True)
class CloudPoint:
    re: float
    im: float
    root_multiplicity: int


@dataclass(frozen=True)
class ResonanceCloud:
    points: tuple
    spec: SurgerySpec
    degree: int

    def reference_geometry(self) -> dict:
        q = self.spec.q
        return {"unit_circle": 1.0, "inner_circle": 1 / math.sqrt(q),
                "points_outer": (math.sqrt(q), -math.sqrt(q)),
                "points_inner": (1 / math.sqrt(q), -1 / math.sqrt(q))}


def run_instance(spec: SurgerySpec, index: int = 0) -> ResonanceCloud:
    from .engine import find_resonances, resonance_polynomial

    rng = instance_stream(spec.seed, index)
    gseed, sseed = rng.next(), rng.next()
    base = generate_regular(spec.n, spec.q, gseed)
    g = surgery(base, spec.q, spec.c, spec.f, sseed)
    _, p = resonance_polynomial(g)
    res = find_resonances(g, poly=p)
    pts = tuple(CloudPoint(r.mu.real, r.mu.imag, r.root_multiplicity) for r in res)
    assert sum(pt.root_multiplicity for pt in pts) == p.degree
    return ResonanceCloud(pts, spec, p.degree)


def sweep(specs, workers: int = 1) -> list[ResonanceCloud]:
    """One cloud per spec; instance i draws from the stream for (seed, i)."""
    jobs = list(enumerate(specs))
    if workers <= 1:
        return [run_instance(s, i) for i, s in jobs]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(workers) as ex:
        futs = [ex.submit(run_instance, s, i) for i, s in jobs]
        return [fu.result() for fu in futs]


CSV_HEADER = "re,im,multiplicity,n,q,c,f,seed"


def cloud_csv(clouds) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for cl in clouds:
        s = cl.spec
        for pt in cl.points:
            buf.write(f"{pt.re + 0.0:.12e},{pt.im + 0.0:.12e},{pt.root_multiplicity},{s.n},{s.q},{s.c},{s.f},{s.seed}\n")
    return buf.getvalue()
