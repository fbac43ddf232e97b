"""Acceptance suite: every release criterion at its stated tolerance.

Each test prints one ``[acceptance] criterion N`` line (visible with -s or
-rA) and asserts the same condition, so the suite doubles as a scripted
sign-off checklist.
"""

import cmath
import json
import math
import random
import time

import pytest

from zmcsurf import catalog, foliation, reps, zmc
from zmcsurf.cli import main as cli_main
from zmcsurf.meshio import GridSpec

PI = math.pi


def _report_line(number: int, ok: bool, detail: str) -> None:
    print(f"[acceptance] criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_01_scherk_second_decomposition():
    worst_mult = worst_princ = 0.0
    slowest = 0.0
    for n in (2, 3, 4, 5):
        inst = catalog.identity_terms("scherk2-decomp", n)
        start = time.perf_counter()
        rep = catalog.verify_identity(inst, GridSpec(-1, 1, -1, 1, 41, 41, 0.05))
        slowest = max(slowest, time.perf_counter() - start)
        worst_mult = max(worst_mult, rep.max_abs_err)
        half = PI / (2 * n) * 0.999
        rep_p = catalog.verify_identity(inst, GridSpec(-half, half, -half, half, 41, 41),
                                        policy="principal")
        worst_princ = max(worst_princ, rep_p.max_abs_err)
    ok = worst_mult < 1e-9 and worst_princ < 1e-9 and slowest < 1.0
    _report_line(1, ok, f"multiplicative max {worst_mult:.2e}, principal max "
                        f"{worst_princ:.2e}, slowest sweep {slowest:.3f}s")


def test_criterion_02_tower_decomposition():
    worst = 0.0
    for n in (2, 3):
        for beta in (PI / 6, PI / 3):
            inst = catalog.identity_terms("kamien-decomp", n, {"beta": beta})
            sb = math.sin(beta)
            grid = GridSpec(-2.0, 2.0, 0.2 / sb, (PI - 0.2) / sb, 31, 31)
            rep = catalog.verify_identity(inst, grid)
            worst = max(worst, rep.max_abs_err)
    _report_line(2, worst < 1e-9, f"mod-pi max {worst:.2e} over n in {{2,3}}, "
                                  f"beta in {{pi/6, pi/3}}")


def test_criterion_03_helicoid_decomposition_and_series_oracle():
    worst = 0.0
    for n in (2, 3):
        inst = catalog.identity_terms("helicoid-decomp", n)
        rep = catalog.verify_identity(inst, GridSpec(0.1, 2.9, -2, 2, 41, 41))
        worst = max(worst, rep.max_abs_err)
    # Truncated arctan series vs the closed form.  The truncation tail is
    # bounded by 2ab/(pi^2 K); with K = 1e4 that stays below 1e-4 only for
    # a*b <= 4.9, so the probe window caps |y| at 1.5 (x up to 2.9).
    rng = random.Random(20240815)
    worst_series = 0.0
    for _ in range(100):
        x = rng.uniform(0.1, 2.9)
        y = rng.uniform(-1.5, 1.5)
        closed = math.atan(math.tanh(y) / math.tan(x))
        partial = catalog.er_series_partial("arctan-bilateral", y, x, 10 ** 4)
        worst_series = max(worst_series, abs(catalog.branch_error("mod-pi", closed, partial)))
    ok = worst < 1e-9 and worst_series < 1e-4
    _report_line(3, ok, f"mod-pi max {worst:.2e}; series-vs-closed-form max "
                        f"{worst_series:.2e} at K=1e4")


def test_criterion_04_complexified_decompositions():
    rng = random.Random(20240816)
    probes = [(complex(rng.uniform(-1, 1), rng.uniform(-0.45, 0.45)),
               complex(rng.uniform(-1, 1), rng.uniform(-0.45, 0.45)))
              for _ in range(50)]
    worst = 0.0
    for ident in ("scherk2max-decomp", "scherkBI-decomp"):
        for n in (2, 3):
            rep = catalog.verify_identity_at(catalog.identity_terms(ident, n), probes)
            worst = max(worst, rep.max_abs_err)
    _report_line(4, worst < 1e-9, f"mod-2pi-i max {worst:.2e} over 50 complex probes")


def test_criterion_05_graph_pde_suite():
    worst = 0.0
    for sid in ("scherk2", "scherk2max", "scherkBI", "helicoid"):
        surf = catalog.builtin_surface(sid)
        rep = zmc.residual_sweep(surf, catalog.kind_equation(surf.kind),
                                 surf.default_grid, tolerance=1e-10)
        worst = max(worst, rep.max_abs_err)
    plane = catalog.builtin_surface("plane:0.3,-0.2")
    for eq in ("minimal", "maximal", "bi-soliton"):
        rep = zmc.residual_sweep(plane, eq, plane.default_grid, tolerance=1e-10)
        worst = max(worst, rep.max_abs_err)
    paraboloid = catalog.builtin_surface("expr:x*x + y*y")
    negative = abs(zmc.graph_residual("minimal", paraboloid.exact_jet(1.0, 1.0)))
    ok = worst < 1e-10 and negative > 1.0
    _report_line(5, ok, f"exact-jet residual max {worst:.2e}; negative control {negative:.1f}")


def test_criterion_06_representation_values_and_zmc():
    enneper = reps.WEData.from_text("1", "w")
    worst_val = 0.0
    for zeta in (1, 1j, 0.4 + 0.3j):
        z = complex(zeta)
        expected = ((z - z ** 3 / 3).real, (1j * (z + z ** 3 / 3)).real, (z * z).real)
        got = reps.we_point(enneper, z)
        worst_val = max(worst_val, max(abs(a - b) for a, b in zip(got, expected)))
    maximal = reps.WEData.from_text("1", "w", mode="maximal")
    got = reps.we_point(maximal, 1)
    worst_val = max(worst_val, max(abs(a - b) for a, b in zip(got, (4 / 3, 0.0, -1.0))))

    bc = reps.BCData.from_text("r", "s")
    for (r, s), expected in (((1.0, 1.0), (2 / 3, 0.0, 1.0)),
                             ((1.0, 0.0), (1 / 3, -2 / 3, 0.5))):
        got = reps.bc_point(bc, r, s)
        worst_val = max(worst_val, max(abs(a - b) for a, b in zip(got, expected)))

    grid = GridSpec(-0.8, 0.8, -0.8, 0.8, 21, 21)
    grid_quarter = GridSpec(0.0, 0.8, 0.0, 0.8, 21, 21)
    tlms = reps.TLMSData.from_text("1", "1", "u", "v")
    sweeps = [
        zmc.parametric_sweep(reps.WESampler(enneper), zmc.EUCLID3, grid),
        zmc.parametric_sweep(reps.WESampler(maximal), zmc.LORENTZ3, grid),
        zmc.parametric_sweep(reps.TLMSSampler(tlms), zmc.LORENTZ3, grid_quarter),
        zmc.parametric_sweep(reps.BCSampler(bc), zmc.LORENTZ3_PRIME, grid_quarter),
    ]
    worst_zmc = max(rep.max_abs_err for rep in sweeps)
    ok = worst_val < 1e-10 and worst_zmc < 1e-6
    _report_line(6, ok, f"closed-form value max err {worst_val:.2e}; "
                        f"parametric ZMC max {worst_zmc:.2e} across all four representations")


def test_criterion_07_splitting_and_general_decomposition():
    red = reps.WEData.reduced("1")
    worst_split = 0.0
    for weights in ((0.5, 0.5), (2.0, -1.0), (1 / 3, 1 / 3, 1 / 3)):
        rep = reps.verify_split(red, weights, n_samples=50)
        worst_split = max(worst_split, rep.max_abs_err)

    worst_general = 0.0
    worst_component = 0.0
    cases = {
        "scherk2": "minimal",
        "scherk2max": "maximal",
        "scherkBI": "bi-soliton",
    }
    for sid, eq in cases.items():
        inst = catalog.identity_terms("general-scaled", 2, {
            "surface": sid, "a": [1.3, 0.8], "b": [0.1, -0.2],
            "d": [0.05, 0.3], "c": [2.0, -0.5]})
        rep = catalog.verify_identity(inst, GridSpec(-1, 1, -1, 1, 41, 41),
                                      tolerance=1e-12)
        worst_general = max(worst_general, rep.max_abs_err)
        for m in range(2):
            comp = catalog.rescaled_component(inst, m)
            crep = zmc.residual_sweep(comp, eq, comp.default_grid, tolerance=1e-6)
            worst_component = max(worst_component, crep.max_abs_err)
    ok = worst_split < 1e-10 and worst_general < 1e-12 and worst_component < 1e-6
    _report_line(7, ok, f"split max {worst_split:.2e}; general-scaled max "
                        f"{worst_general:.2e}; component residual max {worst_component:.2e}")


def test_criterion_08_inversion():
    data = reps.WEData.from_text("1", "w")
    rng = random.Random(20240817)
    worst_rt = 0.0
    for _ in range(100):
        zeta = 0.8 * math.sqrt(rng.random()) * cmath.exp(2j * PI * rng.random())
        x, y, _ = reps.we_point(data, zeta)
        back = reps.invert_parametrization(data, x, y, zeta + 0.05)
        worst_rt = max(worst_rt, abs(back - zeta))

    red = reps.WEData.reduced("exp(w)")
    h = 1e-5

    def eta(z):
        x, y, _ = reps.we_point(red, z)
        return complex(x, -y)

    worst_eta = 0.0
    for _ in range(20):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        d_re = (eta(z + h) - eta(z - h)) / (2 * h)
        d_im = (eta(z + 1j * h) - eta(z - 1j * h)) / (2 * h)
        worst_eta = max(worst_eta, abs(0.5 * (d_re - 1j * d_im) - cmath.exp(z)))

    vanishing = reps.WEData.reduced("w")
    with pytest.raises(reps.JacobianSingular):
        reps.invert_parametrization(vanishing, 0.0, 0.0, 1e-8)

    ok = worst_rt < 1e-10 and worst_eta < 1e-8
    _report_line(8, ok, f"round-trip max {worst_rt:.2e}; density-recovery max "
                        f"{worst_eta:.2e}; singular Jacobian raised where R vanishes")


def test_criterion_09_foliation():
    rng = random.Random(20240818)
    boundary_exact = True
    for k in range(-5, 6):
        for _ in range(200):
            y = rng.uniform(-8, 8)
            if y == 0.0:
                continue
            left = (-1.0) ** k * math.atan(y / PI)
            right = (-1.0) ** (k + 1) * math.atan(-y / PI)
            if left != right:
                boundary_exact = False

    worst_rt = 0.0
    checked = 0
    while checked < 10 ** 4:
        x = rng.uniform(-15, 15)
        y = rng.uniform(-5, 5)
        z = rng.uniform(-8, 8)
        if math.hypot(x - 2 * PI * foliation.band_index(x), y) < 1e-9:
            continue
        t = foliation.leaf_of_point(x, y, z)
        worst_rt = max(worst_rt, abs(foliation.leaf_point(x, y, t)[2] - z))
        checked += 1

    leaf = foliation.LeafSurface(0.0)
    worst_res = 0.0
    for _ in range(200):
        x = rng.uniform(0.2, 2.8) * rng.choice([-1, 1])
        y = rng.uniform(-2.5, 2.5)
        if math.hypot(x, y) < 0.2:
            continue
        worst_res = max(worst_res, abs(zmc.graph_residual("minimal", leaf.exact_jet(x, y))))

    with pytest.raises(foliation.ExcludedPoint):
        foliation.leaf_height(2 * PI, 0.0)
    with pytest.raises(foliation.ExcludedPoint):
        foliation.leaf_of_point(0.0, 0.0, 5.0)

    ok = boundary_exact and worst_rt <= 1e-12 and worst_res < 1e-10
    _report_line(9, ok, f"boundary agreement exact; round-trip max {worst_rt:.2e} "
                        f"over 1e4 points; leaf residual max {worst_res:.2e}")


def test_criterion_10_io_determinism(tmp_path):
    def strip(path):
        with open(path) as fh:
            data = json.load(fh)
        data.pop("timestamp", None)
        return data

    pairs = []
    report_argv = ["identity", "verify", "--identity", "scherk2-decomp", "--n", "3",
                   "--grid", "-1:1:21,-1:1:21"]
    for tag in ("a", "b"):
        path = tmp_path / f"report_{tag}.json"
        assert cli_main(report_argv + ["--report", str(path)]) == 0
        pairs.append(strip(path))
    reports_equal = pairs[0] == pairs[1]

    obj_paths = []
    for tag in ("a", "b"):
        path = tmp_path / f"mesh_{tag}.obj"
        assert cli_main(["we", "mesh", "--f", "1", "--g", "w",
                         "--grid", "-0.5:0.5:9,-0.5:0.5:9", "--out", str(path)]) == 0
        obj_paths.append(path.read_bytes())
    obj_equal = obj_paths[0] == obj_paths[1]

    csv_paths = []
    for tag in ("a", "b"):
        path = tmp_path / f"mesh_{tag}.csv"
        assert cli_main(["tlms", "mesh", "--grid", "0:0.5:7,0:0.5:7",
                         "--out", str(path)]) == 0
        csv_paths.append(path.read_bytes())
    csv_equal = csv_paths[0] == csv_paths[1]

    ok = reports_equal and obj_equal and csv_equal
    _report_line(10, ok, "repeated runs byte-identical (OBJ, CSV) and "
                         "identical up to timestamp (JSON)")
