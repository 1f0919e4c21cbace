"""Graphs with stabilizer weights and geometrically finite end data.

A graph is stored as its compact core plus, for every core vertex, the total
adjacency weight of attached cusps (``c_v``) and funnels (``f_v``).  The ends
themselves are standard and never stored.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

import jsonschema
import numpy as np


class GraphParseError(ValueError):
    """The document does not match the graph schema."""


class GraphValidationWarning(UserWarning):
    """The document parsed but the graph is not (q+1)-regular."""


@dataclass(frozen=True)
class Vertex:
    id: int
    stab: Fraction


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    stab: Fraction

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class StabilizerGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    @classmethod
    def build(cls, stabs: Mapping[int, object], edges=()) -> "StabilizerGraph":
        """Shorthand: ``stabs`` maps id -> stab, ``edges`` holds ``(u, v)`` or ``(u, v, stab)``."""
        vs = [Vertex(int(i), Fraction(s)) for i, s in stabs.items()]
        es = []
        for e in edges:
            u, v = e[0], e[1]
            s = Fraction(e[2]) if len(e) > 2 else Fraction(1)
            es.append(Edge(int(u), int(v), s))
        return cls(tuple(vs), tuple(es))

    @property
    def ids(self) -> list[int]:
        return [v.id for v in self.vertices]

    def index(self) -> dict[int, int]:
        return {v.id: i for i, v in enumerate(self.vertices)}

    def stab(self, vid: int) -> Fraction:
        for v in self.vertices:
            if v.id == vid:
                return v.stab
        raise KeyError(f"unknown vertex id {vid}")

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class GeomFiniteGraph:
    q: int
    core: StabilizerGraph
    cusp_weight: Mapping[int, Fraction] = field(default_factory=dict)
    funnel_weight: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cusp_weight",
                           {int(k): Fraction(w) for k, w in self.cusp_weight.items()})
        object.__setattr__(self, "funnel_weight",
                           {int(k): Fraction(w) for k, w in self.funnel_weight.items()})

    def c(self, vid: int) -> Fraction:
        return self.cusp_weight.get(vid, Fraction(0))

    def f(self, vid: int) -> Fraction:
        return self.funnel_weight.get(vid, Fraction(0))

    @property
    def n(self) -> int:
        return len(self.core)

    def __hash__(self):
        return hash((self.q, self.core,
                     tuple(sorted(self.cusp_weight.items())),
                     tuple(sorted(self.funnel_weight.items()))))


@dataclass(frozen=True)
class Violation:
    kind: str  # "degree", "stabilizer", "endpoint", "measure", "weight"
    where: str
    message: str

    def __str__(self):
        return f"{self.kind} at {self.where}: {self.message}"


def _incident(g: GeomFiniteGraph, vid: int):
    for e in g.core.edges:
        if e.u == vid and e.v == vid:
            yield e, 2
        elif e.u == vid or e.v == vid:
            yield e, 1


def degree(g: GeomFiniteGraph, v: int) -> Fraction:
    """Total adjacency weight at ``v``: core edges (loops twice) plus c_v and f_v."""
    s = g.core.stab(v)
    d = Fraction(0)
    for e, times in _incident(g, v):
        d += times * s / e.stab
    return d + g.c(v) + g.f(v)


def validate(g: GeomFiniteGraph) -> list[Violation]:
    out: list[Violation] = []
    if g.q < 1:
        out.append(Violation("weight", "q", f"q must be >= 1, got {g.q}"))
    ids = set()
    for v in g.core.vertices:
        if v.id in ids:
            out.append(Violation("endpoint", f"vertex {v.id}", "duplicate vertex id"))
        ids.add(v.id)
        if v.stab <= 0:
            out.append(Violation("measure", f"vertex {v.id}", f"stab {v.stab} is not positive"))
    integral = all(v.stab.denominator == 1 for v in g.core.vertices) and \
        all(e.stab.denominator == 1 for e in g.core.edges)
    bad_endpoints = False
    for k, e in enumerate(g.core.edges):
        where = f"edge {k} ({e.u},{e.v})"
        if e.u not in ids or e.v not in ids:
            out.append(Violation("endpoint", where, "endpoint is not a core vertex"))
            bad_endpoints = True
            continue
        if e.stab <= 0:
            out.append(Violation("stabilizer", where, f"edge stab {e.stab} is not positive"))
            continue
        for end in (e.u, e.v):
            ratio = g.core.stab(end) / e.stab
            if ratio <= 0:
                out.append(Violation("stabilizer", where, f"stab({end})/stab(e) = {ratio} <= 0"))
            elif integral and ratio.denominator != 1:
                out.append(Violation("stabilizer", where,
                                     f"stab(e)={e.stab} does not divide stab({end})={g.core.stab(end)}"))
    for name, weights in (("cusp", g.cusp_weight), ("funnel", g.funnel_weight)):
        for vid, w in weights.items():
            if vid not in ids:
                out.append(Violation("endpoint", f"{name} at {vid}", "attachment vertex is not a core vertex"))
            if w < 0:
                out.append(Violation("weight", f"{name} at {vid}", f"negative weight {w}"))
    if bad_endpoints:
        return out
    for v in g.core.vertices:
        if v.stab <= 0:
            continue
        d = degree(g, v.id)
        if d != g.q + 1:
            out.append(Violation("degree", f"vertex {v.id}", f"degree {d} != {g.q + 1}"))
    return out


def is_valid(g: GeomFiniteGraph) -> bool:
    return not validate(g)


def operator_matrix(g: GeomFiniteGraph) -> list[list[Fraction]]:
    """Core adjacency matrix: M[v][w] = sum of stab(v)/stab(e) over edges between v and w."""
    idx = g.core.index()
    n = len(idx)
    m = [[Fraction(0)] * n for _ in range(n)]
    for e in g.core.edges:
        i, j = idx[e.u], idx[e.v]
        if i == j:
            m[i][i] += 2 * g.core.stab(e.u) / e.stab
        else:
            m[i][j] += g.core.stab(e.u) / e.stab
            m[j][i] += g.core.stab(e.v) / e.stab
    return m


def measure(g: GeomFiniteGraph) -> np.ndarray:
    """nu(v) = 1/stab(v) in core order."""
    return np.array([1.0 / float(v.stab) for v in g.core.vertices])


def symmetrized(g: GeomFiniteGraph) -> np.ndarray:
    """D^{1/2} M D^{-1/2} with D = diag(nu); symmetric by the nu-symmetry of M."""
    m = np.array(operator_matrix(g), dtype=float)
    s = np.array([float(v.stab) for v in g.core.vertices])
    return m * np.sqrt(s[None, :] / s[:, None])


def spectral_radius(g: GeomFiniteGraph, iters: int = 2000, seed: int = 0) -> float:
    """Power iteration on the square of the symmetrized matrix."""
    s = symmetrized(g)
    n = s.shape[0]
    if not s.any():
        return 0.0
    x = np.random.default_rng(seed).standard_normal(n)
    x /= np.linalg.norm(x)
    s2 = s @ s
    rho = 0.0
    for _ in range(iters):
        y = s2 @ x
        nrm = np.linalg.norm(y)
        if nrm == 0:
            return 0.0
        x = y / nrm
        new = math.sqrt(float(x @ (s2 @ x)))
        if abs(new - rho) < 1e-14 * max(1.0, new):
            rho = new
            break
        rho = new
    return rho


# --------------------------------------------------------------------------
# serialization

_RAT = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["q", "vertices", "edges"],
    "properties": {
        "q": {"type": "integer", "minimum": 1},
        "vertices": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "additionalProperties": False,
                      "required": ["id", "stab"],
                      "properties": {"id": {"type": "integer"}, "stab": _RAT}},
        },
        "edges": {
            "type": "array",
            "items": {"type": "object", "additionalProperties": False,
                      "required": ["u", "v", "stab"],
                      "properties": {"u": {"type": "integer"}, "v": {"type": "integer"},
                                     "stab": _RAT}},
        },
        "cusps": {
            "type": "array",
            "items": {"type": "object", "additionalProperties": False,
                      "required": ["vertex", "weight"],
                      "properties": {"vertex": {"type": "integer"}, "weight": _RAT}},
        },
        "funnels": {
            "type": "array",
            "items": {"type": "object", "additionalProperties": False,
                      "required": ["vertex", "weight"],
                      "properties": {"vertex": {"type": "integer"}, "weight": _RAT}},
        },
    },
}


def parse_rational(s: str, where: str = "") -> Fraction:
    """Read a ``num/den`` string; the denominator must be positive and the fraction reduced."""
    if "/" in s:
        num, den = s.split("/")
        num, den = int(num), int(den)
        if den < 1:
            raise GraphParseError(f"{where}: denominator must be >= 1 in {s!r}")
        if math.gcd(num, den) != 1:
            raise GraphParseError(f"{where}: {s!r} is not in lowest terms")
        return Fraction(num, den)
    return Fraction(int(s))


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _path(err) -> str:
    parts = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
    return "$" + parts


def load(document) -> GeomFiniteGraph:
    """Build a graph from a parsed JSON document (a dict), a JSON string, or a path.

    Schema violations raise GraphParseError with a JSON-path style location.
    A graph that parses but fails validate() is still returned; the violations
    are emitted as GraphValidationWarning.
    """
    if isinstance(document, Path):
        document = document.read_text()
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GraphParseError(f"malformed JSON at line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path))
    if errors:
        raise GraphParseError("; ".join(f"{_path(e)}: {e.message}" for e in errors))

    verts = [Vertex(d["id"], parse_rational(d["stab"], f"$.vertices[{i}].stab"))
             for i, d in enumerate(document["vertices"])]
    edges = [Edge(d["u"], d["v"], parse_rational(d["stab"], f"$.edges[{i}].stab"))
             for i, d in enumerate(document["edges"])]
    ends = {}
    for key in ("cusps", "funnels"):
        w: dict[int, Fraction] = {}
        for i, d in enumerate(document.get(key, [])):
            where = f"$.{key}[{i}]"
            if d["vertex"] in w:
                raise GraphParseError(f"{where}: duplicate entry for vertex {d['vertex']}")
            val = parse_rational(d["weight"], where + ".weight")
            if val <= 0:
                raise GraphParseError(f"{where}.weight: weight must be positive")
            w[d["vertex"]] = val
        ends[key] = w
    g = GeomFiniteGraph(document["q"], StabilizerGraph(tuple(verts), tuple(edges)),
                        ends["cusps"], ends["funnels"])
    for v in validate(g):
        warnings.warn(str(v), GraphValidationWarning, stacklevel=2)
    return g


def load_file(path) -> GeomFiniteGraph:
    return load(Path(path))


def save(g: GeomFiniteGraph) -> dict:
    doc = {
        "q": g.q,
        "vertices": [{"id": v.id, "stab": format_rational(v.stab)} for v in g.core.vertices],
        "edges": [{"u": e.u, "v": e.v, "stab": format_rational(e.stab)} for e in g.core.edges],
    }
    cusps = [{"vertex": k, "weight": format_rational(w)} for k, w in g.cusp_weight.items() if w]
    funnels = [{"vertex": k, "weight": format_rational(w)} for k, w in g.funnel_weight.items() if w]
    if cusps:
        doc["cusps"] = cusps
    if funnels:
        doc["funnels"] = funnels
    return doc


def dumps(g: GeomFiniteGraph) -> str:
    return json.dumps(save(g), indent=2) + "\n"


# --------------------------------------------------------------------------
# standard models


def tree_model(q: int) -> GeomFiniteGraph:
    """One vertex with q+1 funnels: the (q+1)-regular tree."""
    return GeomFiniteGraph(q, StabilizerGraph.build({0: 1}), {}, {0: q + 1})


def parabolic_cylinder(q: int) -> GeomFiniteGraph:
    """One vertex with one cusp and q funnels."""
    return GeomFiniteGraph(q, StabilizerGraph.build({0: 1}), {0: 1}, {0: q})


def modular_curve(q: int) -> GeomFiniteGraph:
    """One vertex attached to a cusp with weight q+1."""
    return GeomFiniteGraph(q, StabilizerGraph.build({0: 1}), {0: q + 1}, {})


def hyperbolic_cylinder(q: int, n: int) -> GeomFiniteGraph:
    """A cycle of length n, each vertex carrying q-1 funnels.

    n = 1 is a single loop and n = 2 a double edge, so every length is
    (q+1)-regular.
    """
    if n < 1:
        raise ValueError("cycle length must be >= 1")
    edges = [(i, (i + 1) % n) for i in range(n)]
    fw = {i: q - 1 for i in range(n)} if q > 1 else {}
    return GeomFiniteGraph(q, StabilizerGraph.build({i: 1 for i in range(n)}, edges), {}, fw)
