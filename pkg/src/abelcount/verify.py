"""Registry of named identity checks with machine-readable reports."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import lattice, modular, surface, threefold
from .series import (
    QSeries,
    SeriesError,
    WindowError,
    antisymmetric_w_to_u,
    format_rational,
    q_derivative,
    sign_flip_p,
    trusted_region,
)

DEFAULT_QMAX = 10
DEFAULT_UMAX = 20
DEFAULT_WINDOW = modular.DEFAULT_WINDOW

# Reference values of the hyperelliptic counts h_{g,(1,d)}, g = 2..8, d = 1..10.
REFERENCE_HYPERELLIPTIC_COUNTS = {
    2: [1, 12, 36, 112, 150, 432, 392, 960, 1053, 1800],
    3: [0, 6, 90, 456, 1650, 4320, 9996, 20640, 36774, 67500],
    4: [0, 0, 9, 192, 1425, 6732, 23814, 68352, 173907, 387900],
    5: [0, 0, 0, 4, 150, 1656, 10486, 48240, 174474, 539200],
    6: [0, 0, 0, 0, 0, 36, 735, 6720, 41310, 191400],
    7: [0, 0, 0, 0, 0, 0, 0, 96, 1620, 14700],
    8: [0, 0, 0, 0, 0, 0, 0, 0, 0, 100],
}


def env_default_qmax() -> int | None:
    raw = os.environ.get("ABELCOUNT_DEFAULT_QMAX")
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"ABELCOUNT_DEFAULT_QMAX must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("ABELCOUNT_DEFAULT_QMAX must be positive")
    return value


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


@dataclass
class VerifyReport:
    check: str
    region: dict
    verdict: str  # "pass", "fail" or "skipped"
    locator: dict | None = None
    reason: str | None = None

    def __post_init__(self):
        if self.verdict == "fail" and self.locator is None:
            raise ValueError("a failing report needs a discrepancy locator")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        out = {"check": self.check, "region": _jsonable(self.region), "verdict": self.verdict}
        if self.locator is not None:
            out["locator"] = _jsonable(self.locator)
        if self.reason is not None:
            out["reason"] = self.reason
        return out


@dataclass(frozen=True)
class CheckDescriptor:
    name: str
    anchor: str  # what the check establishes, in a sentence
    runner: Callable[..., VerifyReport]
    defaults: dict = field(default_factory=dict)


def _series_locator(expected: QSeries, got: QSeries) -> dict | None:
    diff = expected.first_difference(got)
    if diff is None:
        return None
    q_exp, inner, a, b = diff
    if inner is not None and expected.var == "pq":
        inner = Fraction(inner, 2)
    return {"q_exp": q_exp, "inner_exp": inner, "expected": a, "got": b}


def _compare_series(name: str, expected: QSeries, got: QSeries, region: dict) -> VerifyReport:
    region = dict(region)
    region.setdefault("q_order", min(expected.order, got.order))
    loc = _series_locator(expected, got)
    return VerifyReport(name, region, "pass" if loc is None else "fail", loc)


def _compare_values(name: str, pairs, region: dict) -> VerifyReport:
    """``pairs`` yields ``(key, expected, got)``; the first mismatch is reported."""
    count = 0
    for key, expected, got in pairs:
        count += 1
        if expected != got:
            return VerifyReport(name, dict(region, compared=count), "fail",
                                {"at": key, "expected": expected, "got": got})
    return VerifyReport(name, dict(region, compared=count), "pass")


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def check_k_two_representations(qmax=8, umax=16, **_):
    product = antisymmetric_w_to_u(modular.theta_K_pq(qmax), umax)
    exponential = modular.theta_K_u(qmax, umax)
    return _compare_series("k-two-representations", product, exponential,
                           {"q_order": qmax, "u_order": umax})


def check_dthat1_assembly(qmax=8, **_):
    return _compare_series("dthat1-assembly", threefold.dt_hat_1(qmax).series,
                           threefold.dt_hat_1_assembled(qmax).series, {"q_order": qmax})


def check_dthat2_assembly(qmax=8, window=DEFAULT_WINDOW, **_):
    closed = threefold.dt_hat_2_closed(qmax, window).series
    assembled = threefold.dt_hat_2_assembled(qmax, window).series
    region = {"window": window, **trusted_region(assembled)}
    return _compare_series("dthat2-assembly", closed, assembled, region)


def check_modular_identity(qmax=8, window=DEFAULT_WINDOW, **_):
    k4 = threefold.theta_K_fourth(qmax)
    wp = modular.weierstrass_p(qmax, window)
    d4 = threefold._as_pq(modular.theta_d4(qmax))
    lhs = k4 * (wp.scale(3) + d4.scale(Fraction(1, 4)))
    rhs = (k4 * wp).scale(Fraction(3, 2)) + \
        threefold.theta_K_dilated_squared(qmax).scale(Fraction(3, 8))
    region = {"window": window, **trusted_region(lhs)}
    return _compare_series("modular-identity", lhs, rhs, region)


def check_fg_consistency(qmax=8, window=DEFAULT_WINDOW, **_):
    d_max = qmax // 2
    g_series = -threefold.dt_2(d_max, window, form="closed").series
    f_series = threefold.theta_K_squared(2 * d_max)

    def pairs():
        for d in range(d_max + 1):
            expected = f_series[2 * d]
            if d % 2 == 0:
                expected = expected + f_series[d // 2].substitute_power(2).scale(Fraction(1, 2))
            yield d, expected, g_series[d]

    region = {"d_max": d_max, "window": window,
              "w_validity": [c.validity for c in g_series.coeffs]}
    return _compare_values("fg-consistency", pairs(), region)


def check_gwdt_1_1_d(qmax=8, umax=16, **_):
    name = "gwdt-1-1-d"
    product = threefold.gw_11d_series(qmax).series
    converted = sign_flip_p(threefold.dt_1(qmax).series)
    report = _compare_series(name, converted, product, {"q_order": qmax, "u_order": umax})
    if not report.passed:
        return report
    gw = threefold.gw_from_dt(threefold.dt_1(qmax), umax)
    spots = [((0, 2), Fraction(1), gw[0][2]), ((0, 4), Fraction(-1, 12), gw[0][4]),
             ((0, 0), Fraction(0), gw[0][0])]
    return _compare_values(name, spots, report.region)


def check_table1(**_):
    table = surface.hyp_h_table(8, 10)

    def pairs():
        for g, row in REFERENCE_HYPERELLIPTIC_COUNTS.items():
            for d, value in enumerate(row, start=1):
                yield (g, d), value, table[(g, d)]

    return _compare_values("table1", pairs(), {"g": [2, 8], "d": [1, 10]})


def check_hyp3_row(**_):
    table = surface.hyp_h_table(3, 10)
    pairs = (((3, d), surface.hyp3_closed(d), table[(3, d)]) for d in range(1, 11))
    return _compare_values("hyp3-row", pairs, {"g": 3, "d": [1, 10]})


def check_nonvanishing_pattern(**_):
    table = surface.hyp_h_table(8, 10)
    pairs = (((g, d), surface.hyp_nonvanishing(g, d), table[(g, d)] != 0)
             for g in table.rows for d in table.cols)
    return _compare_values("nonvanishing-pattern", pairs, {"g": [2, 8], "d": [1, 10]})


NU_MAX_PRODUCT = 24


def check_nu_oracles(**_):
    def pairs():
        for t in lattice.divisor_chains(NU_MAX_PRODUCT):
            formula = lattice.nu_subgroup_formula(t)
            yield (t, "isotropic"), formula, lattice.nu_isotropic(t)
            yield (t, "closed"), formula, lattice.nu_closed(*t)
        yield ((2, 4), "value"), 39, lattice.nu_closed(2, 4)

    return _compare_values("nu-oracles", pairs(), {"max_product": NU_MAX_PRODUCT})


def check_nu_recursion(**_):
    def pairs():
        for p in (2, 3):
            for m in range(1, 6):
                for n in range(m, 6):
                    if p ** (m + n) <= 32:
                        yield (p, m, n), lattice.nu_subgroup_formula((p ** m, p ** n)), \
                            lattice.nu_recursion(p, m, n)

    return _compare_values("nu-recursion", pairs(), {"primes": [2, 3], "max_power": 32})


def check_genus2_bridge(**_):
    pairs = ((t, lattice.nu_subgroup_formula(t), surface.n_quotient(2, t))
             for t in lattice.divisor_chains(NU_MAX_PRODUCT))
    return _compare_values("genus2-bridge", pairs, {"max_product": NU_MAX_PRODUCT})


GENUS3_MAX_PRODUCT = 16


def threefold_types(max_product: int) -> list[tuple[int, int, int]]:
    return [t for t in itertools.product(range(1, max_product + 1), repeat=3)
            if t[0] * t[1] * t[2] <= max_product]


def check_genus3_bridge(**_):
    pairs = ((t, 2 * lattice.nu_subgroup_formula(t), threefold.n_g_imprimitive(3, t))
             for t in threefold_types(GENUS3_MAX_PRODUCT))
    return _compare_values("genus3-bridge", pairs, {"max_product": GENUS3_MAX_PRODUCT})


def check_mc_coherence(**_):
    def pairs():
        for g in range(2, 7):
            for d1 in range(1, NU_MAX_PRODUCT + 1):
                for d2 in range(1, NU_MAX_PRODUCT // d1 + 1):
                    yield ("surface", g, d1, d2), surface.n_quotient(g, (d1, d2)), \
                        surface.multiple_cover_surface(g, (d1, d2))
        for g in range(2, 5):
            for dp in range(1, 5):
                for d in range(1, 5):
                    yield ("threefold", g, dp, d), threefold.n_g_imprimitive(g, (1, dp, d)), \
                        threefold.mc_threefold_f(g, dp, d)
        yield ("threefold", 3, 2, 2), Fraction(30), threefold.mc_threefold_f(3, 2, 2)
        yield ("threefold", 3, 2, 2, 1), Fraction(30), threefold.n_g_imprimitive(3, (2, 2, 1))

    return _compare_values("mc-coherence", pairs(),
                           {"surface": {"g": [2, 6], "max_product": NU_MAX_PRODUCT},
                            "threefold": {"g": [2, 4], "d": [1, 4]}})


def check_gs_equals_qdqs(qmax=10, **_):
    return _compare_series("gs-equals-qdqS", q_derivative(modular.s_function(qmax)),
                           surface.gs_stable_pairs_series(qmax), {"q_order": qmax})


REGISTRY: dict[str, CheckDescriptor] = {}


def register(name: str, anchor: str, runner, **defaults) -> None:
    if name in REGISTRY:
        raise ValueError(f"duplicate check name {name!r}")
    REGISTRY[name] = CheckDescriptor(name, anchor, runner, defaults)


register("k-two-representations",
         "product and Eisenstein-exponential forms of the theta function K agree",
         check_k_two_representations, qmax=8, umax=16)
register("dthat1-assembly",
         "K^2 equals the product of the Hilbert-scheme and partition-weight series",
         check_dthat1_assembly, qmax=8)
register("dthat2-assembly",
         "smooth, nodal and diagonal contributions sum to the closed DT series of type (1,2,d)",
         check_dthat2_assembly, qmax=8, window=DEFAULT_WINDOW)
register("modular-identity",
         "K^4 (3P + theta_D4/4) = (3/2) K^4 P + (3/8) K(p^2,q^2)^2",
         check_modular_identity, qmax=8, window=DEFAULT_WINDOW)
register("fg-consistency",
         "g_d = f_2d (+ f_{d/2}(p^2)/2 for even d) between the (1,2,d) and (1,1,d) series",
         check_fg_consistency, qmax=8, window=DEFAULT_WINDOW)
register("gwdt-1-1-d",
         "the (1,1,d) GW product equals -K^2 after y = -p, and starts 4 sin^2(u/2)",
         check_gwdt_1_1_d, qmax=8, umax=16)
register("table1", "hyperelliptic counts for g <= 8, d <= 10 match the reference values",
         check_table1)
register("hyp3-row", "closed genus 3 hyperelliptic formula matches the generating series",
         check_hyp3_row)
register("nonvanishing-pattern", "hyperelliptic counts vanish exactly where the bound fails",
         check_nonvanishing_pattern)
register("nu-oracles", "subgroup sum, Lagrangian count and closed form give the same nu",
         check_nu_oracles)
register("nu-recursion", "nu on prime-power types satisfies the degree-lowering recursion",
         check_nu_recursion)
register("genus2-bridge", "genus 2 counts up to translation equal nu",
         check_genus2_bridge)
register("genus3-bridge", "genus 3 threefold counts equal 2 nu", check_genus3_bridge)
register("mc-coherence", "multiple-cover rules agree with the direct formulas",
         check_mc_coherence)
register("gs-equals-qdqS", "the stable-pairs series is q d/dq of S", check_gs_equals_qdqs,
         qmax=10)


def run_check(name: str, overrides: dict | None = None) -> VerifyReport:
    """Run one registered check; ``overrides`` replaces declared default orders."""
    if name not in REGISTRY:
        raise KeyError(f"unknown check {name!r}")
    desc = REGISTRY[name]
    params = dict(desc.defaults)
    for key, value in (overrides or {}).items():
        if value is not None and key in params:
            params[key] = value
    try:
        return desc.runner(**params)
    except WindowError as exc:
        return VerifyReport(name, dict(params), "skipped", reason=f"window too small: {exc}")
    except SeriesError as exc:
        return VerifyReport(name, dict(params), "skipped", reason=str(exc))


def _run_pair(args):
    name, overrides = args
    return run_check(name, overrides)


def run_checks(names, overrides: dict | None = None, jobs: int = 1) -> list[VerifyReport]:
    """Run several checks, optionally in a process pool; reports sorted by name."""
    names = sorted(set(names))
    unknown = [n for n in names if n not in REGISTRY]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    work = [(n, overrides) for n in names]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_pair, work))
    else:
        reports = [_run_pair(w) for w in work]
    return sorted(reports, key=lambda r: r.check)
