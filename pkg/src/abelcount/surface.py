"""Curve counts on abelian surfaces.

Closed formulas for fixed-linear-system (FLS) and translation-quotient counts,
their multiple-cover form, generating series with point insertions, the
stable-pairs series, and the hyperelliptic counts together with the table of
their first values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .arith import divisors, sigma
from .modular import _divisor_laurent_series, s_function, theta_K_u
from .series import (
    QSeries,
    USeries,
    compose,
    q_derivative,
    revert_odd,
    sin_series,
    symmetric_p_to_u,
)


def _check_type(d1: int, d2: int) -> None:
    if d1 < 1 or d2 < 1:
        raise ValueError(f"surface class type needs d1, d2 >= 1, got ({d1}, {d2})")


def _genus_prefactor(g: int) -> Fraction:
    # 2 (-1)^g / (2g - 2)!
    return Fraction(2 * (-1) ** g, math.factorial(2 * g - 2))


def n_fls(g: int, t: tuple[int, int]) -> Fraction:
    """Count of genus ``g`` curves of type ``(d1, d2)`` in a fixed linear system."""
    d1, d2 = t
    _check_type(d1, d2)
    if g < 2:
        raise ValueError("n_fls needs g >= 2")
    n = d1 * d2
    total = sum(k ** (2 * g - 1) * m ** (2 * g - 3)
                for k in divisors(math.gcd(d1, d2))
                for m in divisors(n // (k * k)))
    return n * n * _genus_prefactor(g) * total


def n_quotient(g: int, t: tuple[int, int]) -> Fraction:
    """Count up to translation: ``n_fls / (d1 d2)^2``."""
    d1, d2 = t
    return n_fls(g, t) / (d1 * d2) ** 2


def multiple_cover_surface(g: int, t: tuple[int, int]) -> Fraction:
    """Quotient count via the multiple-cover rule from primitive classes.

    ``f_(d1,d2)(u) = sum_{k | gcd} k f_(1, d1 d2/k^2)(k u)``; the ``u^(2g-2)``
    coefficient picks up ``k * k^(2g-2)``.
    """
    d1, d2 = t
    _check_type(d1, d2)
    n = d1 * d2
    return sum((k ** (2 * g - 1) * n_quotient(g, (1, n // (k * k)))
                for k in divisors(math.gcd(d1, d2))), Fraction(0))


def genus1_degenerate(d: int) -> Fraction:
    """Genus 1 count ``sigma(d)/d``."""
    if d < 1:
        raise ValueError("d must be positive")
    return Fraction(sigma(d), d)


# ---------------------------------------------------------------------------
# generating series
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def s_function_u(q_max: int, u_max: int) -> QSeries:
    return symmetric_p_to_u(s_function(q_max), u_max)


def fls_point_series(k: int, q_max: int, u_max: int) -> QSeries:
    """``q d/dq (S^(k+1) / (k+1))`` with ``S`` moved to the u-regime."""
    if k < 0:
        raise ValueError("number of point insertions must be non-negative")
    s = s_function_u(q_max, u_max)
    return q_derivative((s ** (k + 1)).scale(Fraction(1, k + 1)))


def gs_stable_pairs_series(q_max: int) -> QSeries:
    """``-sum_d sum_{m | d} (d^2/m)(p^m - 2 + p^-m) q^d``."""
    return _divisor_laurent_series(q_max, lambda d, m: Fraction(-d * d, m))


@lru_cache(maxsize=None)
def hyp_H_series(q_max: int, u_max: int) -> QSeries:
    """``(q d/dq)^2 K^4 / 4`` with ``K`` in the u-regime."""
    k4 = theta_K_u(q_max, u_max) ** 4
    return q_derivative(q_derivative(k4)).scale(Fraction(1, 4))


# ---------------------------------------------------------------------------
# hyperelliptic counts
# ---------------------------------------------------------------------------


@dataclass
class InvariantTable:
    """Rational cells indexed by ``(row, col)`` with a provenance label per cell."""

    row_label: str
    col_label: str
    rows: list
    cols: list
    cells: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    title: str = ""

    def __post_init__(self):
        for r in self.rows:
            for c in self.cols:
                if (r, c) not in self.cells:
                    raise ValueError(f"missing cell {(r, c)}")

    def __getitem__(self, key):
        return self.cells[key]

    def row(self, r) -> list:
        return [self.cells[(r, c)] for c in self.cols]


def two_sin_half(order: int) -> USeries:
    return sin_series(order, Fraction(1, 2)).scale(2)


def hyp_h_table(g_max: int, d_max: int, margin: int = 2) -> InvariantTable:
    """Hyperelliptic counts ``h_{g,(1,d)}`` for ``2 <= g <= g_max``, ``1 <= d <= d_max``.

    The H-series is read in the variable ``r = 2 sin(u/2)``: substituting the
    reversion ``u(r)`` and reading ``r^(2g+2)``.
    """
    if g_max < 2 or d_max < 1:
        raise ValueError("need g_max >= 2 and d_max >= 1")
    u_max = 2 * g_max + 2 + margin
    h = hyp_H_series(d_max, u_max)
    u_of_r = revert_odd(two_sin_half(u_max))
    rows = list(range(2, g_max + 1))
    cols = list(range(1, d_max + 1))
    cells, prov = {}, {}
    for d in cols:
        in_r = compose(h[d], u_of_r)
        for g in rows:
            v = in_r[2 * g + 2]
            if v.denominator != 1:
                raise ArithmeticError(f"non-integral hyperelliptic count at g={g}, d={d}: {v}")
            cells[(g, d)] = int(v)
            prov[(g, d)] = "hyp_H_series"
    return InvariantTable("g", "d", rows, cols, cells, prov,
                          "hyperelliptic counts h_{g,(1,d)} from (q d/dq)^2 K^4 / 4")


def hyp3_closed(d: int) -> Fraction:
    """Genus 3 hyperelliptic count ``d^2 sum_{m | d} m (3m^2 + 1 - 4d) / 4``."""
    if d < 1:
        raise ValueError("d must be positive")
    return Fraction(d * d * sum(m * (3 * m * m + 1 - 4 * d) for m in divisors(d)), 4)


def hyp_nonvanishing(g: int, d: int) -> bool:
    """Whether the hyperelliptic count in genus ``g`` and degree ``d`` is nonzero."""
    if g < 2 or d < 1:
        raise ValueError("need g >= 2 and d >= 1")
    a = g - 1
    b = a // 4
    return a + b * (a - 2 * b - 2) <= d


def quotient_table(g: int, d_max: int) -> InvariantTable:
    """``N^Q_{g,(d1,d2)}`` on the square ``1 <= d1, d2 <= d_max``."""
    idx = list(range(1, d_max + 1))
    cells = {(a, b): n_quotient(g, (a, b)) for a in idx for b in idx}
    prov = {k: "n_quotient" for k in cells}
    return InvariantTable("d1", "d2", idx, idx, cells, prov,
                          f"genus {g} counts up to translation N^Q_(d1,d2)")
