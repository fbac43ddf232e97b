#!/usr/bin/env python3
"""Run every decomposition-identity, PDE-residual, and foliation check and
write the JSON reports.

Usage:
    python scripts/run_verification_suite.py [--reports-dir reports]

Prints one table row per check; exits nonzero if anything fails.
"""

import argparse
import math
import os
import random
import sys

from zmcsurf import catalog, foliation, reps, zmc
from zmcsurf.meshio import GridSpec

PI = math.pi


def run(reports_dir: str) -> int:
    os.makedirs(reports_dir, exist_ok=True)
    rows = []

    def record(tag, report):
        report.write(os.path.join(reports_dir, f"{tag}.json"))
        rows.append((tag, report.max_abs_err, report.tolerance, report.passed))

    for n in (2, 3, 4, 5):
        inst = catalog.identity_terms("scherk2-decomp", n)
        record(f"scherk2-decomp-n{n}",
               catalog.verify_identity(inst, GridSpec(-1, 1, -1, 1, 41, 41)))

    for n in (2, 3):
        inst = catalog.identity_terms("helicoid-decomp", n)
        record(f"helicoid-decomp-n{n}",
               catalog.verify_identity(inst, GridSpec(0.1, 2.9, -2, 2, 41, 41)))

    for n in (2, 3):
        for beta in (PI / 6, PI / 3):
            inst = catalog.identity_terms("kamien-decomp", n, {"beta": beta})
            sb = math.sin(beta)
            grid = GridSpec(-2, 2, 0.2 / sb, (PI - 0.2) / sb, 31, 31)
            record(f"kamien-decomp-n{n}-beta{beta:.3f}",
                   catalog.verify_identity(inst, grid))

    rng = random.Random(20240815)
    probes = [(complex(rng.uniform(-1, 1), rng.uniform(-0.45, 0.45)),
               complex(rng.uniform(-1, 1), rng.uniform(-0.45, 0.45)))
              for _ in range(50)]
    for ident in ("scherk2max-decomp", "scherkBI-decomp"):
        for n in (2, 3):
            record(f"{ident}-n{n}",
                   catalog.verify_identity_at(catalog.identity_terms(ident, n), probes))

    inst = catalog.identity_terms("general-scaled", 2, {
        "surface": "scherk2", "a": [1.3, 0.8], "b": [0.1, -0.2],
        "d": [0.05, 0.3], "c": [2.0, -0.5]})
    record("general-scaled-scherk2",
           catalog.verify_identity(inst, GridSpec(-1, 1, -1, 1, 41, 41), tolerance=1e-12))

    for sid in ("scherk2", "scherk1", "helicoid", "scherk2max", "scherkBI"):
        surf = catalog.builtin_surface(sid)
        eq = catalog.kind_equation(surf.kind)
        record(f"residual-{sid}",
               zmc.residual_sweep(surf, eq, surf.default_grid, tolerance=1e-10))

    grid = GridSpec(-0.8, 0.8, -0.8, 0.8, 21, 21)
    quarter = GridSpec(0.0, 0.8, 0.0, 0.8, 21, 21)
    record("parametric-minimal",
           zmc.parametric_sweep(reps.WESampler(reps.WEData.from_text("1", "w")),
                                zmc.EUCLID3, grid, subject="parametric-zmc:we:minimal"))
    record("parametric-maximal",
           zmc.parametric_sweep(reps.WESampler(reps.WEData.from_text("1", "w", mode="maximal")),
                                zmc.LORENTZ3, grid, subject="parametric-zmc:we:maximal"))
    record("parametric-tlms",
           zmc.parametric_sweep(reps.TLMSSampler(reps.TLMSData.from_text("1", "1", "u", "v")),
                                zmc.LORENTZ3, quarter, subject="parametric-zmc:tlms"))
    record("parametric-bc",
           zmc.parametric_sweep(reps.BCSampler(reps.BCData.from_text("r", "s")),
                                zmc.LORENTZ3_PRIME, quarter, subject="parametric-zmc:bc"))

    for weights, tag in (((0.5, 0.5), "half"), ((2.0, -1.0), "signed"),
                         ((1 / 3, 1 / 3, 1 / 3), "thirds")):
        record(f"split-{tag}", reps.verify_split(reps.WEData.reduced("1"), weights))

    record("foliation",
           foliation.foliation_check(GridSpec(-3 * PI, 3 * PI, -3, 3, 41, 41),
                                     [-1.0, 0.0, 2.5]))

    width = max(len(tag) for tag, *_ in rows)
    print(f"{'check'.ljust(width)}  {'max_abs_err':>12}  {'tol':>8}  result")
    for tag, err, tol, passed in rows:
        print(f"{tag.ljust(width)}  {err:12.3e}  {tol:8.1e}  {'PASS' if passed else 'FAIL'}")
    failures = [tag for tag, _, _, passed in rows if not passed]
    print(f"\n{len(rows) - len(failures)}/{len(rows)} checks passed; "
          f"reports in {reports_dir}/")
    return 1 if failures else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reports-dir", default="reports")
    sys.exit(run(ap.parse_args().reports_dir))
