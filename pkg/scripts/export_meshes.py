#!/usr/bin/env python3
"""Export a gallery of OBJ meshes: catalog surfaces, representation patches,
the conjugate-family interpolation, an inversion-sampled height patch, and a
stack of foliation leaves.

Usage:
    python scripts/export_meshes.py [--out-dir meshes]
"""

import argparse
import math
import os
import sys

from zmcsurf import catalog, foliation, reps
from zmcsurf.meshio import GridSpec, sample_patch, write_obj

PI = math.pi


def run(out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def export(name, source, grid):
        path = os.path.join(out_dir, f"{name}.obj")
        write_obj(sample_patch(source, grid), path)
        written.append(path)

    for sid in ("scherk2", "scherk1", "helicoid", "scherk2max", "scherkBI"):
        surf = catalog.builtin_surface(sid)
        export(sid, surf, surf.default_grid)

    zeta_grid = GridSpec(-0.9, 0.9, -0.9, 0.9, 33, 33)
    enneper = reps.WEData.from_text("1", "w")
    for idx, theta in enumerate((0.0, PI / 6, PI / 3, PI / 2)):
        export(f"enneper_family_{idx}", reps.WESampler(enneper, theta=theta), zeta_grid)

    export("enneper_maximal",
           reps.WESampler(reps.WEData.from_text("1", "w", mode="maximal")),
           GridSpec(-0.8, 0.8, -0.8, 0.8, 33, 33))

    export("tlms", reps.TLMSSampler(reps.TLMSData.from_text("1", "1", "u", "v")),
           GridSpec(-0.8, 0.8, -0.8, 0.8, 33, 33))
    export("bc_soliton", reps.BCSampler(reps.BCData.from_text("r + r^3", "s - s^2")),
           GridSpec(-0.8, 0.8, -0.8, 0.8, 33, 33))

    export("enneper_height_by_inversion",
           reps.InvertedGraphSampler(enneper, zeta_seed=0.05 + 0.02j),
           GridSpec(-0.45, 0.45, -0.45, 0.45, 25, 25))

    leaf_grid = GridSpec(-3 * PI + 0.05, 3 * PI - 0.05, -3.0, 3.0, 97, 33)
    for idx, t in enumerate((-2.0, 0.0, 2.0)):
        export(f"foliation_leaf_{idx}", foliation.LeafSurface(t), leaf_grid)

    print("\n".join(written))
    print(f"wrote {len(written)} meshes to {out_dir}/")
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="meshes")
    sys.exit(run(ap.parse_args().out_dir))
