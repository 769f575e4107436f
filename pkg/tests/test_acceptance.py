"""Acceptance gate: one PASS/FAIL line per criterion, exact comparisons only."""

import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

from abelcount import lattice, modular, surface, threefold
from abelcount.arith import sigma
from abelcount.series import (
    antisymmetric_w_to_u,
    q_derivative,
    sign_flip_p,
    u_coefficient_series,
)
from abelcount.verify import (
    REFERENCE_HYPERELLIPTIC_COUNTS,
    run_check,
    threefold_types,
)


def test_criterion_01_table(criterion):
    start = time.perf_counter()
    table = surface.hyp_h_table(8, 10)
    elapsed = time.perf_counter() - start
    mismatches = [(g, d) for g, row in REFERENCE_HYPERELLIPTIC_COUNTS.items()
                  for d, v in enumerate(row, start=1) if table[(g, d)] != v]
    spots = {(2, 1): 1, (3, 5): 1650, (4, 7): 23814, (5, 8): 48240, (6, 10): 191400,
             (7, 9): 1620, (8, 10): 100}
    ok = not mismatches and all(table[k] == v for k, v in spots.items()) and elapsed < 60
    criterion(1, "hyperelliptic table, 70 cells", ok, f"{elapsed:.2f}s, mismatches={mismatches}")
    assert ok


def test_criterion_02_nu_oracles(criterion):
    start = time.perf_counter()
    bad = []
    types = lattice.divisor_chains(24)
    for t in types:
        values = (lattice.nu_subgroup_formula(t), lattice.nu_isotropic(t), lattice.nu_closed(*t))
        if len(set(values)) != 1:
            bad.append((t, values))
    primitive = all(lattice.nu_subgroup_formula((1, d)) == sigma(d) for d in range(1, 25))
    elapsed = time.perf_counter() - start
    ok = not bad and lattice.nu_subgroup_formula((2, 4)) == 39 and primitive and elapsed < 120
    criterion(2, "nu: subgroup sum = Lagrangian count = closed form", ok,
              f"{len(types)} types, {elapsed:.1f}s, disagreements={bad}")
    assert ok


def test_criterion_03_recursion(criterion):
    cases = [(p, m, n) for p in (2, 3) for m in range(1, 6) for n in range(m, 6)
             if p ** (m + n) <= 32]
    bad = [c for c in cases
           if lattice.nu_recursion(*c) != lattice.nu_subgroup_formula((c[0] ** c[1], c[0] ** c[2]))]
    ok = not bad
    criterion(3, "prime-power recursion", ok, f"{len(cases)} cases, bad={bad}")
    assert ok


def test_criterion_04_bridges(criterion):
    g2_bad = [t for t in lattice.divisor_chains(24)
              if surface.n_quotient(2, t) != lattice.nu_subgroup_formula(t)]
    g3_types = threefold_types(16)
    g3_bad = [t for t in g3_types
              if threefold.n_g_imprimitive(3, t) != 2 * lattice.nu_subgroup_formula(t)]
    ok = not g2_bad and not g3_bad
    criterion(4, "genus 2 bridge N^Q = nu and genus 3 bridge N = 2 nu", ok,
              f"g3 types={len(g3_types)}, bad={g2_bad + g3_bad}")
    assert ok


def test_criterion_05_theta_representations(criterion):
    product = antisymmetric_w_to_u(modular.theta_K_pq(8), 16)
    exponential = modular.theta_K_u(8, 16)
    diff = product.first_difference(exponential)
    ok = diff is None and product.order == 8 and product[0].order == 16
    criterion(5, "K product form = K exponential form through (q^8, u^16)", ok, f"diff={diff}")
    assert ok


def test_criterion_06_dt_assembly(criterion):
    one = threefold.dt_hat_1_assembled(8).series.first_difference(threefold.dt_hat_1(8).series)
    closed = threefold.dt_hat_2_closed(8).series
    assembled = threefold.dt_hat_2_assembled(8).series
    two = closed.first_difference(assembled)
    validity = [c.validity for c in assembled.coeffs]
    ok = one is None and two is None and min(validity) >= 0
    criterion(6, "DT assembly for (1,1,d) and (1,2,d) through q^8", ok,
              f"windows={validity}, diffs={one},{two}")
    assert ok


def test_criterion_07_modular_identity(criterion):
    report = run_check("modular-identity", {"qmax": 8})
    ok = report.passed and report.region["q_order"] == 8
    criterion(7, "K^4 (3P + theta_D4/4) = (3/2) K^4 P + (3/8) K(p^2,q^2)^2", ok,
              f"windows={report.region.get('w_validity')}")
    assert ok


def test_criterion_08_fg_consistency(criterion):
    g_series = -threefold.dt_2(4, form="closed").series
    f_series = threefold.theta_K_squared(8)
    bad = []
    for d in range(5):
        expected = f_series[2 * d]
        if d % 2 == 0:
            expected = expected + f_series[d // 2].substitute_power(2).scale(F(1, 2))
        if g_series[d] != expected:
            bad.append(d)
    ok = not bad
    criterion(8, "g_d = f_2d (+ f_{d/2}(p^2)/2) for d <= 4", ok, f"bad={bad}")
    assert ok


def test_criterion_09_gw_dt(criterion):
    product = threefold.gw_11d_series(8).series
    converted = sign_flip_p(-threefold.dt_hat_1(8).series)
    gw = threefold.gw_from_dt(threefold.dt_1(8), 16)
    ok = product == converted and gw[0][2] == 1 and gw[0][4] == F(-1, 12)
    criterion(9, "GW (1,1,d) product = -K^2 at y = -p; u^2 q^0 = 1, u^4 q^0 = -1/12", ok)
    assert ok


def test_criterion_10_point_insertions(criterion):
    series = surface.fls_point_series(0, 10, 14)
    bad = [(g, d) for g in range(2, 9) for d in range(1, 11)
           if series[d][2 * g - 2] != surface.n_fls(g, (1, d))]
    ok = not bad
    criterion(10, "q d/dq S coefficients = FLS closed formula, g <= 8, d <= 10", ok,
              f"bad={bad}")
    assert ok


def test_criterion_11_multiple_cover(criterion):
    bad = [(g, d1, d2) for g in range(2, 7) for d1 in range(1, 25) for d2 in range(1, 25 // d1 + 1)
           if d1 * d2 <= 24
           and surface.multiple_cover_surface(g, (d1, d2)) != surface.n_quotient(g, (d1, d2))]
    three = threefold.mc_threefold_f(3, 2, 2)
    ok = not bad and three == 30 == threefold.n_g_imprimitive(3, (2, 2, 1))
    criterion(11, "multiple-cover rules: surfaces d1 d2 <= 24, g <= 6; threefold (3,2,2) = 30",
              ok, f"bad={bad}, f={three}")
    assert ok


def test_criterion_12_quasi_modular(criterion):
    e2_fit = modular.qmod_fit(modular.eisenstein(2, 8).scale(F(-1, 12)), 2)
    ok_e2 = e2_fit.terms == {(1, 0, 0): F(-1, 12)}
    h = surface.hyp_H_series(16, 8)
    weights = {}
    for m in (2, 3, 4):
        series = u_coefficient_series(h, 2 * m)
        fit = modular.qmod_fit(series, 2 * m)
        if not fit.terms:
            # the zero series lies in every graded piece
            weights[m] = 2 * m if all(c == 0 for c in series.coeffs) else None
        else:
            weights[m] = fit.pure_weight
    ok = ok_e2 and all(weights[m] == 2 * m for m in (2, 3, 4))
    criterion(12, "quasi-modular fits: -E2/12 and pure weight 2m for m = 2, 3, 4", ok,
              f"weights={weights} (m=2 series is identically zero)")
    assert ok


def test_criterion_13_goettsche_shende(criterion):
    diff = q_derivative(modular.s_function(10)).first_difference(
        surface.gs_stable_pairs_series(10))
    ok = diff is None
    criterion(13, "stable-pairs series = q d/dq S through q^10", ok)
    assert ok


PROPERTY_FILE = Path(__file__).with_name("test_series_properties.py")


def test_criterion_14_property_suites(criterion):
    # a separate interpreter keeps hypothesis from seeing the same test run
    # under two different pytest executors
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(PROPERTY_FILE)],
        capture_output=True, text=True)
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    ok = proc.returncode == 0
    criterion(14, "property suites, 200 randomized cases each", ok, summary)
    assert ok
