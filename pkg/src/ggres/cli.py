"""Command-line interface.

    ggres resonances GRAPH [--tol T] [--format csv|json]
    ggres states GRAPH --mu RE,IM [--depth D]
    ggres random --n N --q Q [--c C] [--f F] [--seed S] [--csv OUT] [--svg OUT]
    ggres zeta CURVE [--link GRAPH]
    ggres kernel {tree,cusp} --q Q --mu RE,IM [--d D | --k1 K --k2 K]
    ggres validate GRAPH

Exit codes: 0 ok, 2 parse error, 3 validation or generation failure,
4 the requested mu is not a resonance.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import core, engine, kernels, random_graphs, svg, zeta

EXIT_PARSE, EXIT_INVALID, EXIT_NOT_RESONANCE = 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _e(x: float) -> str:
    return f"{x + 0.0:.12e}"  # + 0.0 turns -0.0 into 0.0


def parse_complex(text: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected RE,IM but got {text!r}") from exc


def _load_graph(path: str) -> core.GeomFiniteGraph:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", core.GraphValidationWarning)
            g = core.load(Path(path))
    except (OSError, core.GraphParseError) as exc:
        raise CliError(EXIT_PARSE, f"cannot read graph {path}: {exc}") from exc
    bad = core.validate(g)
    if bad:
        raise CliError(EXIT_INVALID, "invalid graph:\n  " + "\n  ".join(map(str, bad)))
    return g


def _load_curve(path: str) -> zeta.CurveSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"cannot read curve {path}: {exc}") from exc
    try:
        return zeta.load_curve(doc)
    except zeta.CurveError as exc:
        raise CliError(EXIT_INVALID, f"unsupported curve: {exc}") from exc


def cmd_resonances(args, out) -> None:
    g = _load_graph(args.graph)
    res = engine.find_resonances(g, tol=args.tol)
    if args.format == "json":
        rows = [{"re": _e(r.mu.real), "im": _e(r.mu.imag),
                 "root_multiplicity": r.root_multiplicity, "kernel_dim": r.kernel_dim}
                for r in res]
        out.write(json.dumps({"q": g.q, "resonances": rows}, indent=2) + "\n")
    else:
        out.write("re,im,root_multiplicity,kernel_dim\n")
        for r in res:
            out.write(f"{_e(r.mu.real)},{_e(r.mu.imag)},{r.root_multiplicity},{r.kernel_dim}\n")


def cmd_states(args, out) -> None:
    g = _load_graph(args.graph)
    try:
        states = engine.resonant_states(g, args.mu, tol=args.tol)
    except engine.NotAResonance as exc:
        raise CliError(EXIT_NOT_RESONANCE, str(exc)) from exc
    mu = states[0].mu
    out.write(f"mu = {_e(mu.real)} {_e(mu.imag)}\n")
    out.write(f"cusp ratio = {_e(states[0].cusp_ratio.real)} {_e(states[0].cusp_ratio.imag)}\n")
    out.write(f"funnel ratio = {_e(states[0].funnel_ratio.real)} {_e(states[0].funnel_ratio.imag)}\n")
    out.write(f"kernel dimension = {len(states)}\n")
    for i, st in enumerate(states):
        ext = engine.extend_outgoing(g, st, depth=args.depth)
        resid = engine.verify_eigen_equation(g, ext)
        verdict = engine.classify_l2(g, st)
        out.write(f"state {i}:\n")
        for vid, val in zip(st.ids, st.core_values):
            out.write(f"  vertex {vid}: {_e(val.real)} {_e(val.imag)}\n")
        out.write(f"  eigen residual = {_e(resid)}\n")
        out.write(f"  l2 = {str(verdict.is_l2).lower()}\n")


def cmd_random(args, out) -> None:
    try:
        spec = random_graphs.SurgerySpec(args.n, args.q, args.c, args.f, args.seed)
        clouds = random_graphs.sweep([spec])
    except random_graphs.GenerationError as exc:
        raise CliError(EXIT_INVALID, f"generation failed: {exc}") from exc
    text = random_graphs.cloud_csv(clouds)
    if args.csv:
        Path(args.csv).write_bytes(text.encode())
    else:
        out.write(text)
    if args.svg:
        pts = [(p.re, p.im, p.root_multiplicity) for p in clouds[0].points]
        title = f"n={args.n} q={args.q} c={args.c} f={args.f} seed={args.seed}"
        Path(args.svg).write_bytes(svg.cloud_svg(pts, args.q, title).encode())


def cmd_zeta(args, out) -> None:
    curve = _load_curve(args.curve)
    try:
        z = zeta.zeta_numerator(curve)
    except zeta.CurveError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc
    out.write(f"N1 = {zeta.count_points(curve, 1)}\n")
    out.write(f"P(T) = {z}\n")
    out.write(f"weil_rh = {'pass' if z.rh_holds() else 'fail'}\n")
    if args.link:
        g = _load_graph(args.link)
        link = zeta.check_resonance_link(g, curve)
        out.write(f"divides = {str(link.divides).lower()}\n")
        for mu, m in link.cofactor_mu_roots:
            out.write(f"  cofactor root {_e(mu.real)} {_e(mu.imag)} x{m}\n")


def cmd_kernel(args, out) -> None:
    try:
        if args.which == "tree":
            p = kernels.TreeKernelParams(args.q, args.mu)
            val = kernels.tree_kernel(p, args.d)
        else:
            p = kernels.CuspKernelParams(args.q, args.mu)
            val = kernels.cusp_kernel(p, args.k1, args.k2)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc
    out.write(f"{_e(val.real)} {_e(val.imag)}\n")


def cmd_validate(args, out) -> None:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", core.GraphValidationWarning)
            g = core.load(Path(args.graph))
    except (OSError, core.GraphParseError) as exc:
        raise CliError(EXIT_PARSE, f"cannot read graph {args.graph}: {exc}") from exc
    bad = core.validate(g)
    if bad:
        raise CliError(EXIT_INVALID, "invalid graph:\n  " + "\n  ".join(map(str, bad)))
    out.write(f"valid: q={g.q}, {g.n} core vertices\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ggres", description="Resonances of geometrically finite graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resonances", help="list resonances of a graph file")
    p.add_argument("graph")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("states", help="resonant states at a resonance")
    p.add_argument("graph")
    p.add_argument("--mu", type=parse_complex, required=True)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_states)

    p = sub.add_parser("random", help="random regular graph with end surgery")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--c", type=int, default=0)
    p.add_argument("--f", type=int, default=0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--csv")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("zeta", help="zeta numerator of a curve")
    p.add_argument("curve")
    p.add_argument("--link")
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("kernel", help="evaluate a model resolvent kernel")
    p.add_argument("which", choices=("tree", "cusp"))
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--mu", type=parse_complex, required=True)
    p.add_argument("--d", type=int, default=0)
    p.add_argument("--k1", type=int, default=0)
    p.add_argument("--k2", type=int, default=0)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("validate", help="check degrees and stabilizer relations")
    p.add_argument("graph")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else 0
    try:
        args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
