"""Donaldson-Thomas and Gromov-Witten series of ``A x E``.

Partition functions are stored as q-series over :class:`PLaurent` together
with a sign convention: ``PLAIN_P`` when the coefficient of ``p^n`` is the
invariant itself, ``MINUS_P`` when the stored series is ``sum X_n (-p)^n`` so
that the invariant is ``(-1)^n`` times the stored coefficient.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import divisors, gcd_all, sigma
from .modular import (
    DEFAULT_WINDOW,
    p_over_one_minus_p_sq,
    theta_d4,
    theta_K_pq,
    weierstrass_p,
)
from .series import (
    Parity,
    PLaurent,
    QSeries,
    SeriesError,
    Symmetry,
    WindowError,
    dilate,
    product_form,
    sign_flip_p,
    symmetric_p_to_u,
)


class Convention(enum.Enum):
    PLAIN_P = "plain_p"
    MINUS_P = "minus_p"


@dataclass(frozen=True, eq=False)
class DTSeries:
    series: QSeries
    convention: Convention

    def invariant(self, n: int, d: int) -> Fraction:
        c = self.series[d].p_coeff(n)
        if self.convention is Convention.MINUS_P and n % 2:
            return -c
        return c

    def with_convention(self, convention: Convention) -> "DTSeries":
        if convention is self.convention:
            return self
        return DTSeries(sign_flip_p(self.series), convention)

    def invariant_series(self) -> QSeries:
        """Series whose ``p^n`` coefficient is the invariant."""
        return self.with_convention(Convention.PLAIN_P).series

    def to_json(self) -> dict:
        out = self.series.to_json()
        out["convention"] = self.convention.value
        return out


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def theta_K_squared(q_max: int) -> QSeries:
    k = theta_K_pq(q_max)
    return k * k


@lru_cache(maxsize=None)
def theta_K_fourth(q_max: int) -> QSeries:
    k2 = theta_K_squared(q_max)
    return k2 * k2


def _check_window(a: QSeries, window: int | None) -> None:
    if window is None:
        return
    for d, c in enumerate(a.coeffs):
        if c.is_finite and c.max_abs_exponent() > window:
            raise WindowError(f"q^{d} support {c.max_abs_exponent()} exceeds window {window}")


def dt_hat_1(q_max: int, window: int | None = None) -> DTSeries:
    """Euler-characteristic DT series in classes ``(1, 1, d)``: ``K^2``."""
    k2 = theta_K_squared(q_max)
    _check_window(k2, window)
    return DTSeries(k2, Convention.PLAIN_P)


def dt_1(q_max: int, window: int | None = None) -> DTSeries:
    """Behrend-weighted series ``sum DT_n (-p)^n q^d = -K^2``."""
    return DTSeries(-dt_hat_1(q_max, window).series, Convention.MINUS_P)


def nodal_factor(q_max: int, window: int = DEFAULT_WINDOW) -> QSeries:
    """``1 + p/(1-p)^2 + sum_d sum_{k | d} k (p^k + p^-k) q^d``."""
    coeffs = [p_over_one_minus_p_sq(window) + 1]
    for d in range(1, q_max + 1):
        acc = {}
        for k in divisors(d):
            acc[2 * k] = acc.get(2 * k, 0) + k
            acc[-2 * k] = acc.get(-2 * k, 0) + k
        coeffs.append(PLaurent(acc))
    return QSeries(coeffs, q_max)


def f_a_series(q_max: int) -> QSeries:
    """``prod (1 - q^m) / ((1 - p q^m)(1 - p^-1 q^m))``."""
    factors = []
    for m in range(1, q_max + 1):
        factors += [(1, 0, m, 1), (1, 2, m, -1), (1, -2, m, -1)]
    return product_form(factors, PLaurent.constant(1), q_max)


def sym_prod_euler(g: QSeries, euler: int) -> QSeries:
    """``(sum g(a) q^a)^euler`` for a series with constant term 1."""
    c0 = g[0]
    one = g.one_coeff()
    if c0 != one:
        raise SeriesError("symmetric-product generating series needs constant term 1")
    return g ** euler


def dt_hat_1_assembled(q_max: int, window: int | None = None) -> DTSeries:
    """``p^-1 (1-p)^2 (sum F(a) q^a)^-2 prod (1 - q^m)^-2``.

    The prefactor is ``(p^(1/2)/(1-p))^e`` with Euler characteristic
    ``e = -2`` of the genus 2 curve.
    """
    prefactor = PLaurent.from_p({-1: 1, 0: -2, 1: 1})
    goettsche = product_form([(1, 0, m, -2) for m in range(1, q_max + 1)],
                             prefactor, q_max)
    out = sym_prod_euler(f_a_series(q_max), -2) * goettsche
    _check_window(out, window)
    return DTSeries(out, Convention.PLAIN_P)


def _diagonal_series(q_max: int) -> QSeries:
    """``sum_d sigma(d) q^(2d)`` with PLaurent constants."""
    coeffs = [PLaurent()] * (q_max + 1)
    for d in range(1, q_max // 2 + 1):
        coeffs[2 * d] = PLaurent.constant(sigma(d))
    return QSeries(coeffs, q_max)


def dt_hat_2_closed(q_max: int, window: int = DEFAULT_WINDOW) -> DTSeries:
    """``K^4 (1/2 + 3p/(1-p)^2 + sum_d sum_{k | d} k (3(p^k + p^-k) q^d + 12 q^(2d)))``."""
    coeffs = [p_over_one_minus_p_sq(window).scale(3) + Fraction(1, 2)]
    for d in range(1, q_max + 1):
        acc: dict[int, Fraction] = {}
        for k in divisors(d):
            acc[2 * k] = acc.get(2 * k, 0) + 3 * k
            acc[-2 * k] = acc.get(-2 * k, 0) + 3 * k
        if d % 2 == 0:
            acc[0] = acc.get(0, 0) + 12 * sigma(d // 2)
        coeffs.append(PLaurent(acc))
    return DTSeries(theta_K_fourth(q_max) * QSeries(coeffs, q_max), Convention.PLAIN_P)


def dt_hat_2_assembled(q_max: int, window: int = DEFAULT_WINDOW) -> DTSeries:
    """Sum of the smooth, nodal and diagonal contributions.

    ``1/4 (-10 K^4 + 12 K^4 N) + 12 K^4 sum_d sigma(d) q^(2d)``: 12 nodal fibres
    over a base of Euler characteristic ``-10``, the factor 1/4 from the
    ``Z/2 x Z/2`` stabiliser, and isolated diagonal curves.
    """
    k4 = theta_K_fourth(q_max)
    nodal = nodal_factor(q_max, window)
    generic = (k4.scale(-10) + (k4 * nodal).scale(12)).scale(Fraction(1, 4))
    diagonal = (k4 * _diagonal_series(q_max)).scale(12)
    return DTSeries(generic + diagonal, Convention.PLAIN_P)


def theta_K_dilated_squared(q_max: int) -> QSeries:
    """``K(p^2, q^2)^2``."""
    return dilate(theta_K_squared(q_max), 2, 2)


DT2_FORMS = ("closed", "proof", "finite")


def dt_2(q_max: int, window: int = DEFAULT_WINDOW, form: str = "closed") -> DTSeries:
    """Behrend-weighted series in classes ``(1, 2, d)``, stored as ``sum DT_n (-p)^n``.

    ``closed``: ``-(3/2) K^4 P - (3/8) K(p^2, q^2)^2``;
    ``proof``: ``-K^4 (3 P + theta_D4 / 4)``;
    ``finite``: ``theta_D4 K^4 / 4 - (3/4) K(p^2, q^2)^2``, the window-free
    rewrite of ``closed``.
    """
    k4 = theta_K_fourth(q_max)
    if form == "closed":
        wp = weierstrass_p(q_max, window)
        out = -((k4 * wp).scale(Fraction(3, 2)) + theta_K_dilated_squared(q_max).scale(Fraction(3, 8)))
    elif form == "proof":
        wp = weierstrass_p(q_max, window)
        out = -(k4 * (wp.scale(3) + _as_pq(theta_d4(q_max)).scale(Fraction(1, 4))))
    elif form == "finite":
        out = (k4 * _as_pq(theta_d4(q_max))).scale(Fraction(1, 4)) \
            - theta_K_dilated_squared(q_max).scale(Fraction(3, 4))
    else:
        raise ValueError(f"unknown dt_2 form {form!r}; choose from {DT2_FORMS}")
    return DTSeries(out, Convention.MINUS_P)


def _as_pq(a: QSeries) -> QSeries:
    return QSeries([PLaurent.constant(c) for c in a.coeffs], a.order)


# ---------------------------------------------------------------------------
# GW/DT variable change
# ---------------------------------------------------------------------------


def gw_from_dt(dt: DTSeries, u_max: int) -> QSeries:
    """Apply ``y = -e^(iu)``: ``y^n + y^-n -> (-1)^n 2 cos(n u)`` on the invariants."""
    minus = dt.with_convention(Convention.MINUS_P).series
    for d, c in enumerate(minus.coeffs):
        if not c.is_finite or c.symmetry is not Symmetry.SYMMETRIC or \
                c.parity is not Parity.EVEN_IN_W:
            raise SeriesError(f"q^{d} coefficient is not a symmetric Laurent polynomial in p")
    return symmetric_p_to_u(minus, u_max)


def gw_11d_series(q_max: int, window: int | None = None) -> DTSeries:
    """``(y + 2 + y^-1) prod (1 + y q^m)^2 (1 + y^-1 q^m)^2 / (1 - q^m)^4`` in ``y``."""
    factors = []
    for m in range(1, q_max + 1):
        factors += [(-1, 2, m, 2), (-1, -2, m, 2), (1, 0, m, -4)]
    out = product_form(factors, PLaurent.from_p({1: 1, 0: 2, -1: 1}), q_max, window)
    return DTSeries(out, Convention.PLAIN_P)


@lru_cache(maxsize=None)
def _gw_primitive(q_max: int, u_max: int) -> QSeries:
    return gw_from_dt(dt_1(q_max), u_max)


def _round_up(n: int, step: int) -> int:
    return max(step, -(-n // step) * step)


def gw_primitive(g: int, n: int) -> Fraction:
    """``N_{g,(1,1,n)}``: the ``u^(2g-2) q^n`` coefficient of the GW series."""
    if g < 1 or n < 0:
        raise ValueError("need g >= 1 and n >= 0")
    series = _gw_primitive(_round_up(n, 8), _round_up(2 * g - 2, 8))
    return series[n][2 * g - 2]


# ---------------------------------------------------------------------------
# multiple-cover formulas
# ---------------------------------------------------------------------------


def mc_threefold_f(g: int, d_prime: int, d: int) -> Fraction:
    """``u^(2g-2)`` coefficient of ``sum_{k | gcd(d', d)} (1/k) f_(1,1,d'd/k^2)(k u)``."""
    if d_prime < 1 or d < 1:
        raise ValueError("need d', d >= 1")
    return sum((Fraction(k ** (2 * g - 2), k) * gw_primitive(g, d_prime * d // (k * k))
                for k in divisors(math.gcd(d_prime, d))), Fraction(0))


def _mc_gcd(d1: int, d2: int, d3: int, k: int) -> int:
    return gcd_all(k, d1, d2, d3, d1 * d2 // k, d1 * d3 // k, d2 * d3 // k,
                   d1 * d2 * d3 // (k * k))


def _check_mc_k(d1: int, d2: int, d3: int, k: int) -> None:
    if k < 1 or gcd_all(d1 * d2, d1 * d3, d2 * d3) % k or (d1 * d2 * d3) % (k * k):
        raise ValueError(f"k={k} is not admissible for type {(d1, d2, d3)}")


def n_mc_factor(d1: int, d2: int, d3: int, k: int) -> int:
    """Sum of ``delta^2`` over divisors of the eight-term gcd."""
    _check_mc_k(d1, d2, d3, k)
    return sigma(_mc_gcd(d1, d2, d3, k), 2)


def admissible_k(d1: int, d2: int, d3: int, n: int = 0) -> list[int]:
    """Divisors ``k`` of ``gcd(n, d1 d2, d1 d3, d2 d3)`` with ``k^2 | d1 d2 d3``."""
    g = gcd_all(abs(n), d1 * d2, d1 * d3, d2 * d3)
    if g == 0:
        raise ValueError("all classes vanish; no multiple-cover sum")
    prod = d1 * d2 * d3
    return [k for k in divisors(g) if prod % (k * k) == 0]


def _check_threefold_type(t) -> tuple[int, int, int]:
    d1, d2, d3 = (int(x) for x in t)
    if min(d1, d2, d3) < 0:
        raise ValueError(f"type entries must be non-negative, got {t}")
    return d1, d2, d3


def n_g_imprimitive(g: int, t) -> Fraction:
    """``N_{g,(d1,d2,d3)} = sum_k n(d1,d2,d3,k) k^(2g-3) N_{g,(1,1,d1 d2 d3/k^2)}``."""
    d1, d2, d3 = _check_threefold_type(t)
    if d1 < 1 or d2 < 1:
        raise ValueError("need d1, d2 >= 1")
    prod = d1 * d2 * d3
    return sum((n_mc_factor(d1, d2, d3, k) * Fraction(k) ** (2 * g - 3)
                * gw_primitive(g, prod // (k * k))
                for k in admissible_k(d1, d2, d3)), Fraction(0))


@lru_cache(maxsize=None)
def _dt1_series(q_max: int) -> DTSeries:
    return dt_1(q_max)


def dt_primitive(n: int, d: int) -> Fraction:
    """``DT_{n,(1,1,d)}`` read from the series ``-K^2``."""
    if d < 0:
        raise ValueError("d must be non-negative")
    dt = _dt1_series(_round_up(d, 8))
    c = dt.series[d]
    if 2 * abs(n) > c.max_abs_exponent():
        return Fraction(0)
    return dt.invariant(n, d)


def dt_mc(n: int, t) -> Fraction:
    """Multiple-cover formula for ``DT_{n,(d1,d2,d3)}``.

    ``sum_k (1/k) n(d1,d2,d3,k) (-1)^(n - n/k) DT_{n/k,(1,1,d1 d2 d3/k^2)}``
    over ``k | gcd(n, d1 d2, d1 d3, d2 d3)`` with ``k^2 | d1 d2 d3``.
    """
    d1, d2, d3 = _check_threefold_type(t)
    if n == 0 and sum(1 for x in (d1, d2, d3) if x > 0) < 2:
        raise ValueError("need n != 0 or at least two positive entries in the type")
    if d3 == 0 and (d1 == 0) != (d2 == 0):
        raise ValueError(f"classes of type {(d1, d2, d3)} are excluded")
    if d1 == d2 == d3 == 0:
        raise ValueError("the zero class has no multiple-cover formula")
    prod = d1 * d2 * d3
    total = Fraction(0)
    for k in admissible_k(d1, d2, d3, n):
        sign = (-1) ** ((n - n // k) % 2)
        total += Fraction(n_mc_factor(d1, d2, d3, k) * sign, k) * \
            dt_primitive(n // k, prod // (k * k))
    return total


def dt_degenerate(n: int, d: int) -> Fraction:
    """``DT_{n,(0,0,d)} = ((-1)^(n-1)/n) sum_{k | gcd(n, d)} k^2``."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    return Fraction((-1) ** (n - 1), n) * sigma(math.gcd(n, d), 2)


def diagonal_count(d: int) -> int:
    """Isolated diagonal curves: ``12 sigma(d/2)`` for even ``d > 0``, else 0."""
    if d < 0:
        raise ValueError("d must be non-negative")
    return 12 * sigma(d // 2) if d > 0 and d % 2 == 0 else 0
