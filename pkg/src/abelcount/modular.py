"""q-expansions of Eisenstein series, the Jacobi theta function K, the
Weierstrass function, the D4 theta series and the S-function, plus a fitter
that recognises truncated q-series as quasi-modular forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .arith import divisors, sigma
from .series import (
    PLaurent,
    QSeries,
    SeriesError,
    USeries,
    WindowError,
    format_rational,
    product_form,
)

DEFAULT_WINDOW = 24


@lru_cache(maxsize=None)
def _bernoulli_all(n: int) -> tuple[Fraction, ...]:
    # sum_{j<m} C(m+1, j) B_j = -(m+1) B_m, with B_1 = -1/2
    b = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(math.comb(m + 1, j) * b[j] for j in range(m))
        b.append(-s / (m + 1))
    return tuple(b)


def bernoulli(k: int) -> Fraction:
    """Bernoulli number ``B_k`` for even ``k >= 2``."""
    if k < 2 or k % 2:
        raise ValueError(f"bernoulli needs an even k >= 2, got {k}")
    return _bernoulli_all(k)[k]


@lru_cache(maxsize=None)
def _eisenstein(weight: int, q_max: int) -> QSeries:
    c = Fraction(-2 * weight) / bernoulli(weight)
    coeffs = [Fraction(1)] + [c * sigma(d, weight - 1) for d in range(1, q_max + 1)]
    return QSeries(coeffs, q_max)


def eisenstein(weight: int, q_max: int) -> QSeries:
    """``E_weight = 1 - (2 weight / B_weight) sum sigma_{weight-1}(d) q^d``."""
    if weight < 2 or weight % 2:
        raise ValueError(f"Eisenstein weight must be even and >= 2, got {weight}")
    return _eisenstein(weight, q_max)


def theta_factors(q_max: int, p_power: int = 1) -> list[tuple]:
    """Factors ``(1 - p q^m)(1 - p^-1 q^m)(1 - q^m)^-2`` for ``m <= q_max``."""
    e = 2 * p_power
    out = []
    for m in range(1, q_max + 1):
        out += [(1, e, m, 1), (1, -e, m, 1), (1, 0, m, -2)]
    return out


@lru_cache(maxsize=None)
def _theta_K_pq(q_max: int) -> QSeries:
    return product_form(theta_factors(q_max), PLaurent({1: 1, -1: -1}), q_max)


def theta_K_pq(q_max: int, window: int | None = None) -> QSeries:
    """Product form of ``K`` in ``w = p^(1/2)``; FINITE, antisymmetric."""
    k = _theta_K_pq(q_max)
    if window is not None:
        _check_support(k, window)
    return k


def _check_support(a: QSeries, window: int) -> None:
    for d, c in enumerate(a.coeffs):
        if c.max_abs_exponent() > window:
            raise WindowError(
                f"q^{d} coefficient needs |e| <= {c.max_abs_exponent()}, window is {window}")


@lru_cache(maxsize=None)
def _theta_K_u(q_max: int, u_max: int) -> QSeries:
    n_max = u_max - 1  # K/i = u * F(u), so F is needed through u^(u_max-1)
    zero = QSeries([0], q_max)
    a = [zero] * (n_max + 1)
    for two_k in range(2, n_max + 1, 2):
        c = bernoulli(two_k) * (-1) ** (two_k // 2) / (two_k * math.factorial(two_k))
        a[two_k] = eisenstein(two_k, q_max).scale(c)
    f = [QSeries([1], q_max)] + [zero] * n_max
    for n in range(1, n_max + 1):
        s = zero
        for k in range(2, n + 1, 2):
            s = s + a[k].scale(k) * f[n - k]
        f[n] = s.scale(Fraction(1, n))
    coeffs = []
    for d in range(q_max + 1):
        coeffs.append(USeries([0] + [f[n][d] for n in range(n_max + 1)], u_max))
    return QSeries(coeffs, q_max)


def theta_K_u(q_max: int, u_max: int) -> QSeries:
    """``K / i`` in the u-regime, via the exponential of Eisenstein series."""
    if u_max < 1:
        raise SeriesError("u_max must be at least 1")
    return _theta_K_u(q_max, u_max)


def _window_geometric(window: int, weight=lambda k: k) -> PLaurent:
    return PLaurent.windowed({2 * k: weight(k) for k in range(1, window // 2 + 1)}, window)


def p_over_one_minus_p_sq(window: int = DEFAULT_WINDOW) -> PLaurent:
    """``p/(1-p)^2 = sum_k k p^k`` expanded for ``|p| < 1``."""
    return _window_geometric(window)


def _second_difference(m: int) -> dict[int, int]:
    # p^m - 2 + p^-m in doubled exponents
    return {2 * m: 1, 0: -2, -2 * m: 1}


def weierstrass_p(q_max: int, window: int = DEFAULT_WINDOW) -> QSeries:
    """Weierstrass function expanded for ``|p| < 1`` (WINDOW at ``q^0``)."""
    q0 = p_over_one_minus_p_sq(window) + Fraction(1, 12)
    coeffs = [q0]
    for d in range(1, q_max + 1):
        acc: dict[int, int] = {}
        for m in divisors(d):
            for e, c in _second_difference(m).items():
                acc[e] = acc.get(e, 0) + m * c
        coeffs.append(PLaurent(acc))
    return QSeries(coeffs, q_max)


def theta_d4(q_max: int) -> QSeries:
    """Theta series of the D4 lattice, ``1 + 24 sum_{k | d, k odd} k q^d``."""
    coeffs = [Fraction(1)]
    for d in range(1, q_max + 1):
        coeffs.append(Fraction(24 * sum(k for k in divisors(d) if k % 2)))
    return QSeries(coeffs, q_max)


def _divisor_laurent_series(q_max: int, weight) -> QSeries:
    coeffs = [PLaurent()]
    for d in range(1, q_max + 1):
        acc: dict[int, Fraction] = {}
        for m in divisors(d):
            w = weight(d, m)
            for e, c in _second_difference(m).items():
                acc[e] = acc.get(e, 0) + w * c
        coeffs.append(PLaurent(acc))
    return QSeries(coeffs, q_max)


def s_function(q_max: int) -> QSeries:
    """``S = -sum_d sum_{m | d} (d/m)(p^m - 2 + p^-m) q^d``."""
    return _divisor_laurent_series(q_max, lambda d, m: Fraction(-d, m))


# ---------------------------------------------------------------------------
# quasi-modular fitting
# ---------------------------------------------------------------------------


class InsufficientOrderError(SeriesError):
    """The series is too short to determine a fit with the requested bound."""


class NoFitError(SeriesError):
    """No combination of ``E2^a E4^b E6^c`` matches the series."""


def qmod_monomials(weight_bound: int) -> list[tuple[int, int, int]]:
    """Exponents ``(a, b, c)`` with ``2a + 4b + 6c <= weight_bound``, graded-lex."""
    out = []
    for w in range(0, weight_bound + 1, 2):
        for a in range(w // 2, -1, -1):
            for b in range((w - 2 * a) // 4, -1, -1):
                rest = w - 2 * a - 4 * b
                if rest % 6 == 0:
                    out.append((a, b, rest // 6))
    return out


def qmod_dimension(weight_bound: int) -> int:
    return len(qmod_monomials(weight_bound))


def monomial_expansion(exps: tuple[int, int, int], q_max: int) -> QSeries:
    a, b, c = exps
    out = QSeries([1], q_max)
    for weight, e in ((2, a), (4, b), (6, c)):
        if e:
            out = out * eisenstein(weight, q_max) ** e
    return out


@dataclass(frozen=True)
class QModElement:
    weight_bound: int
    terms: dict = field(default_factory=dict)  # (a, b, c) -> Fraction
    pure_weight: int | None = None

    def __post_init__(self):
        for (a, b, c) in self.terms:
            if 2 * a + 4 * b + 6 * c > self.weight_bound:
                raise ValueError(f"monomial {(a, b, c)} exceeds weight bound {self.weight_bound}")

    def expansion(self, q_max: int) -> QSeries:
        out = QSeries([0], q_max)
        for exps, c in self.terms.items():
            out = out + monomial_expansion(exps, q_max).scale(c)
        return out

    def to_json(self) -> dict:
        terms = [{"e2": a, "e4": b, "e6": c, "coeff": format_rational(v)}
                 for (a, b, c), v in sorted(self.terms.items())]
        return {"weight_bound": self.weight_bound, "terms": terms}


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Least-structure exact solve of an overdetermined system; None if inconsistent.

    Raises :class:`InsufficientOrderError` when the columns are dependent on
    the available rows.
    """
    n = len(rows[0]) if rows else 0
    m = [list(r) + [v] for r, v in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            raise InsufficientOrderError(
                "monomial expansions are dependent at this order; raise the q-order")
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    if any(row[-1] for row in m[r:]):
        return None
    return [m[i][-1] for i in range(n)]


def qmod_fit(series: QSeries, weight_bound: int, margin: int = 2) -> QModElement:
    """Express ``series`` in the span of ``E2^a E4^b E6^c`` of weight ``<= weight_bound``."""
    if series.var != "q":
        raise SeriesError("qmod_fit needs a series with rational coefficients")
    if weight_bound < 0 or weight_bound % 2:
        raise ValueError("weight bound must be a non-negative even integer")
    basis = qmod_monomials(weight_bound)
    needed = len(basis) + margin
    if series.order + 1 < needed:
        raise InsufficientOrderError(
            f"weight bound {weight_bound} needs {needed} coefficients, "
            f"series has {series.order + 1}")
    q_max = series.order
    columns = [monomial_expansion(b, q_max).coeffs for b in basis]
    rows = [[col[d] for col in columns] for d in range(q_max + 1)]
    sol = _solve_exact(rows, list(series.coeffs))
    if sol is None:
        raise NoFitError(f"series is not quasi-modular of weight <= {weight_bound}")
    terms = {b: c for b, c in zip(basis, sol) if c}
    weights = {2 * a + 4 * b + 6 * c for (a, b, c) in terms}
    pure = weights.pop() if len(weights) == 1 else None
    if not terms:
        pure = None
    return QModElement(weight_bound, terms, pure)
