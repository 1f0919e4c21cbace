"""
Resonance clouds of random graphs with ends
===========================================

Start from a random 7-regular graph, cut some edges and attach cusps or
funnels at both endpoints. Funnels drag the resonances towards +-1/sqrt(q),
cusps push them out towards +-sqrt(q). Writes one SVG and one CSV per run.
"""

# %%
import sys
from pathlib import Path

from ggres.random_graphs import SurgerySpec, cloud_csv, sweep
from ggres.svg import cloud_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

n, q, seed = 50, 6, 1
edges = n * (q + 1) // 2
specs = [SurgerySpec(n, q, 0, 0, seed), SurgerySpec(n, q, 40, 0, seed),
         SurgerySpec(n, q, 0, 40, seed), SurgerySpec(n, q, 0, edges, seed)]

# %%
for spec, cloud in zip(specs, sweep(specs)):
    tag = f"n{spec.n}_q{spec.q}_c{spec.c}_f{spec.f}_s{spec.seed}"
    pts = [(p.re, p.im, p.root_multiplicity) for p in cloud.points]
    (out / f"{tag}.svg").write_text(cloud_svg(pts, q, tag))
    (out / f"{tag}.csv").write_text(cloud_csv([cloud]))
    radii = sorted(abs(complex(p.re, p.im)) for p in cloud.points)
    print(f"{tag}: {len(cloud.points)} distinct, degree {cloud.degree}, "
          f"|mu| in [{radii[0]:.3f}, {radii[-1]:.3f}]")
print(f"wrote {len(specs)} SVG/CSV pairs to {out}/")
