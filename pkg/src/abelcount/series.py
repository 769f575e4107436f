"""Exact truncated formal series over the rationals.

Three variable regimes are supported:

* ``q``  -- power series in ``q`` with :class:`~fractions.Fraction` coefficients,
* ``pq`` -- power series in ``q`` whose coefficients are :class:`PLaurent`
  values in ``w = p^(1/2)``,
* ``uq`` -- power series in ``q`` whose coefficients are :class:`USeries`.

Exponents of ``p`` are stored doubled (as exponents of ``w``) so that the
half-integer powers of the Jacobi theta function are exact. Every value
carries its truncation order and the min-order rule is applied on every
binary operation; nothing is padded beyond the declared order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

Rational = Fraction
Scalar = Union[int, Fraction]


class SeriesError(ValueError):
    """Base class for invalid series operations."""


class RegimeError(SeriesError, TypeError):
    """Operands live in different variable regimes."""


class WindowError(SeriesError):
    """A windowed Laurent value cannot support the requested operation."""


class NonUnitError(SeriesError, ZeroDivisionError):
    """Inversion of a series whose constant term is not a unit."""


class ParityError(SeriesError):
    """Operand violates a parity or symmetry precondition."""


class Kind(enum.Enum):
    FINITE = "finite"
    WINDOW = "window"


class Parity(enum.Enum):
    EVEN_IN_W = "even_in_w"
    ODD_IN_W = "odd_in_w"
    MIXED = "mixed"


class Symmetry(enum.Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"
    NONE = "none"


class UParity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    MIXED = "mixed"


def as_fraction(x: Scalar | str) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Laurent values in w = p^(1/2)
# ---------------------------------------------------------------------------


class PLaurent:
    """Laurent polynomial (or windowed Laurent series) in ``w = p^(1/2)``.

    ``coeffs`` maps doubled p-exponents to rationals. A ``WINDOW`` value
    stores only the coefficients it can vouch for, namely exponents with
    ``|e| <= validity``; ``window`` is the nominal bound it was created with.
    """

    __slots__ = ("_coeffs", "kind", "window", "validity", "parity", "symmetry")

    def __init__(
        self,
        coeffs: Mapping[int, Scalar] | None = None,
        kind: Kind = Kind.FINITE,
        window: int | None = None,
        validity: int | None = None,
    ):
        items = {}
        for e, c in (coeffs or {}).items():
            c = as_fraction(c)
            if c:
                items[int(e)] = c
        if kind is Kind.WINDOW:
            if window is None:
                raise WindowError("WINDOW value needs a window bound")
            if validity is None:
                validity = window
            if validity < 0:
                raise WindowError(f"validity window exhausted (validity {validity})")
            if validity > window:
                raise WindowError(f"validity {validity} exceeds window {window}")
            items = {e: c for e, c in items.items() if abs(e) <= validity}
        else:
            window = validity = None
        self._coeffs: dict[int, Fraction] = dict(sorted(items.items()))
        self.kind = kind
        self.window = window
        self.validity = validity
        self.parity = _laurent_parity(self._coeffs)
        self.symmetry = _laurent_symmetry(self._coeffs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, c: Scalar) -> "PLaurent":
        return cls({0: c})

    @classmethod
    def monomial(cls, c: Scalar, w_exp: int) -> "PLaurent":
        return cls({w_exp: c})

    @classmethod
    def from_p(cls, coeffs: Mapping[int, Scalar]) -> "PLaurent":
        """Build a FINITE value from a map of (integer) p-exponents."""
        return cls({2 * e: c for e, c in coeffs.items()})

    @classmethod
    def windowed(cls, coeffs: Mapping[int, Scalar], window: int,
                 validity: int | None = None) -> "PLaurent":
        return cls(coeffs, Kind.WINDOW, window, validity)

    # -- inspection --------------------------------------------------------

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def __getitem__(self, w_exp: int) -> Fraction:
        if self.kind is Kind.WINDOW and abs(w_exp) > self.validity:
            raise WindowError(
                f"exponent w^{w_exp} outside validity window |e| <= {self.validity}")
        return self._coeffs.get(w_exp, Fraction(0))

    def p_coeff(self, p_exp: Scalar) -> Fraction:
        doubled = as_fraction(p_exp) * 2
        if doubled.denominator != 1:
            raise ValueError(f"p-exponent must be a multiple of 1/2, got {p_exp}")
        return self[int(doubled)]

    def max_abs_exponent(self) -> int:
        return max((abs(e) for e in self._coeffs), default=0)

    @property
    def is_finite(self) -> bool:
        return self.kind is Kind.FINITE

    def trust_bound(self) -> float:
        return math.inf if self.kind is Kind.FINITE else self.validity

    def is_zero(self) -> bool:
        return not self._coeffs

    def zero_like(self) -> "PLaurent":
        return PLaurent()

    def one_like(self) -> "PLaurent":
        return PLaurent({0: 1})

    def constant_term(self) -> Fraction:
        return self[0]

    # -- arithmetic ----------------------------------------------------------

    def _combine(self, other: "PLaurent", sign: int) -> "PLaurent":
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out.get(e, 0) + sign * c
        if self.is_finite and other.is_finite:
            return PLaurent(out)
        validity = min(self.trust_bound(), other.trust_bound())
        window = max(w for w in (self.window, other.window) if w is not None)
        return PLaurent(out, Kind.WINDOW, window, int(validity))

    def __add__(self, other):
        other = _coerce_laurent(other)
        if other is None:
            return NotImplemented
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_laurent(other)
        if other is None:
            return NotImplemented
        return self._combine(other, -1)

    def __rsub__(self, other):
        other = _coerce_laurent(other)
        if other is None:
            return NotImplemented
        return other._combine(self, -1)

    def __neg__(self) -> "PLaurent":
        return self.scale(-1)

    def scale(self, c: Scalar) -> "PLaurent":
        c = as_fraction(c)
        return PLaurent({e: c * v for e, v in self._coeffs.items()},
                        self.kind, self.window, self.validity)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, PLaurent):
            return NotImplemented
        if not self.is_finite and not other.is_finite:
            raise WindowError("product of two windowed values has no finite trusted region")
        out: dict[int, Fraction] = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        if self.is_finite and other.is_finite:
            return PLaurent(out)
        win, fin = (self, other) if other.is_finite else (other, self)
        validity = win.validity - fin.max_abs_exponent()
        if validity < 0:
            raise WindowError(
                f"validity {win.validity} cannot absorb a factor of span "
                f"{fin.max_abs_exponent()}; enlarge the window")
        return PLaurent(out, Kind.WINDOW, win.window, validity)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def inverse(self) -> "PLaurent":
        if not self.is_finite or len(self._coeffs) != 1:
            raise NonUnitError(f"{self!r} is not a unit (needs a single monomial)")
        (e, c), = self._coeffs.items()
        return PLaurent({-e: 1 / c})

    def __pow__(self, n: int) -> "PLaurent":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.one_like()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def substitute_power(self, k: int) -> "PLaurent":
        """Return the value at ``p -> p^k``."""
        out = {k * e: c for e, c in self._coeffs.items()}
        if self.is_finite:
            return PLaurent(out)
        return PLaurent(out, Kind.WINDOW, k * self.window, k * self.validity)

    def sign_flip(self) -> "PLaurent":
        if any(e % 2 for e in self._coeffs):
            raise ParityError("sign flip p -> -p needs pure p-powers")
        out = {e: (-c if (e // 2) % 2 else c) for e, c in self._coeffs.items()}
        return PLaurent(out, self.kind, self.window, self.validity)

    def restrict(self, bound: int) -> "PLaurent":
        """Drop knowledge beyond ``|e| <= bound`` (returns a WINDOW value)."""
        bound = int(min(bound, self.trust_bound()))
        window = self.window if self.window is not None else bound
        return PLaurent(self._coeffs, Kind.WINDOW, max(window, bound), bound)

    # -- comparison ----------------------------------------------------------

    def first_difference(self, other: "PLaurent") -> tuple[int, Fraction, Fraction] | None:
        bound = min(self.trust_bound(), other.trust_bound())
        keys = sorted(set(self._coeffs) | set(other._coeffs), key=lambda e: (abs(e), e))
        for e in keys:
            if abs(e) > bound:
                continue
            a = self._coeffs.get(e, Fraction(0))
            b = other._coeffs.get(e, Fraction(0))
            if a != b:
                return e, a, b
        return None

    def __eq__(self, other):
        other = _coerce_laurent(other)
        if other is None:
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def __repr__(self) -> str:
        if not self._coeffs:
            body = "0"
        else:
            body = " + ".join(f"({format_rational(c)})w^{e}" for e, c in self._coeffs.items())
        if self.kind is Kind.WINDOW:
            return f"PLaurent[{body}; |e|<={self.validity}]"
        return f"PLaurent[{body}]"

    # -- serialization ---------------------------------------------------------

    def to_json(self):
        coeffs = {str(e): format_rational(c) for e, c in self._coeffs.items()}
        if self.is_finite:
            return coeffs
        return {"window": self.window, "validity": self.validity, "coeffs": coeffs}

    @classmethod
    def from_json(cls, data) -> "PLaurent":
        if "coeffs" in data and isinstance(data.get("coeffs"), dict):
            return cls({int(e): Fraction(c) for e, c in data["coeffs"].items()},
                       Kind.WINDOW, data["window"], data["validity"])
        return cls({int(e): Fraction(c) for e, c in data.items()})


def _coerce_laurent(x) -> PLaurent | None:
    if isinstance(x, PLaurent):
        return x
    if isinstance(x, (int, Fraction)):
        return PLaurent.constant(x)
    return None


def _laurent_parity(coeffs: Mapping[int, Fraction]) -> Parity:
    odd = {e % 2 for e in coeffs}
    if odd == {1}:
        return Parity.ODD_IN_W
    if odd == {0, 1}:
        return Parity.MIXED
    return Parity.EVEN_IN_W


def _laurent_symmetry(coeffs: Mapping[int, Fraction]) -> Symmetry:
    zero = Fraction(0)
    sym = all(coeffs.get(-e, zero) == c for e, c in coeffs.items())
    if sym:
        return Symmetry.SYMMETRIC
    if all(coeffs.get(-e, zero) == -c for e, c in coeffs.items()):
        return Symmetry.ANTISYMMETRIC
    return Symmetry.NONE


# ---------------------------------------------------------------------------
# power series in u
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class USeries:
    """Power series in ``u`` truncated after ``u^order``."""

    coeffs: tuple[Fraction, ...]
    order: int

    def __init__(self, coeffs: Sequence[Scalar], order: int | None = None):
        cs = [as_fraction(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise SeriesError("order must be non-negative")
        cs = (cs + [Fraction(0)] * (order + 1))[: order + 1]
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "order", order)

    @classmethod
    def from_map(cls, coeffs: Mapping[int, Scalar], order: int) -> "USeries":
        cs = [Fraction(0)] * (order + 1)
        for e, c in coeffs.items():
            if e <= order:
                cs[e] = as_fraction(c)
        return cls(cs, order)

    @classmethod
    def variable(cls, order: int) -> "USeries":
        return cls.from_map({1: 1}, order)

    @property
    def parity(self) -> UParity:
        odd = {i % 2 for i, c in enumerate(self.coeffs) if c}
        if odd == {1}:
            return UParity.ODD
        if odd == {0, 1}:
            return UParity.MIXED
        return UParity.EVEN

    def __getitem__(self, i: int) -> Fraction:
        if i < 0 or i > self.order:
            raise IndexError(f"u^{i} outside truncation order {self.order}")
        return self.coeffs[i]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def zero_like(self) -> "USeries":
        return USeries([], self.order)

    def one_like(self) -> "USeries":
        return USeries([1], self.order)

    def constant_term(self) -> Fraction:
        return self.coeffs[0]

    def truncate(self, order: int) -> "USeries":
        return USeries(self.coeffs, min(order, self.order))

    def __add__(self, other):
        other = _coerce_u(other, self.order)
        if other is None:
            return NotImplemented
        n = min(self.order, other.order)
        return USeries([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)], n)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_u(other, self.order)
        if other is None:
            return NotImplemented
        n = min(self.order, other.order)
        return USeries([a - b for a, b in zip(self.coeffs[: n + 1], other.coeffs)], n)

    def __rsub__(self, other):
        other = _coerce_u(other, self.order)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self) -> "USeries":
        return USeries([-c for c in self.coeffs], self.order)

    def scale(self, c: Scalar) -> "USeries":
        c = as_fraction(c)
        return USeries([c * a for a in self.coeffs], self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, USeries):
            return NotImplemented
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        nz = [(i, c) for i, c in enumerate(a[: n + 1]) if c]
        out = [Fraction(0)] * (n + 1)
        for j, d in enumerate(b[: n + 1]):
            if not d:
                continue
            for i, c in nz:
                if i + j > n:
                    break
                out[i + j] += c * d
        return USeries(out, n)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def inverse(self) -> "USeries":
        a0 = self.coeffs[0]
        if not a0:
            raise NonUnitError("USeries with zero constant term is not invertible")
        inv0 = 1 / a0
        b = [inv0]
        for n in range(1, self.order + 1):
            s = sum((self.coeffs[k] * b[n - k] for k in range(1, n + 1)), Fraction(0))
            b.append(-inv0 * s)
        return USeries(b, self.order)

    def __pow__(self, n: int) -> "USeries":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.one_like()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def dilate(self, k: Scalar) -> "USeries":
        """Return the series at ``u -> k u``."""
        k = as_fraction(k)
        return USeries([c * k ** i for i, c in enumerate(self.coeffs)], self.order)

    def first_difference(self, other: "USeries") -> tuple[int, Fraction, Fraction] | None:
        n = min(self.order, other.order)
        for i in range(n + 1):
            if self.coeffs[i] != other.coeffs[i]:
                return i, self.coeffs[i], other.coeffs[i]
        return None

    def __eq__(self, other):
        other = _coerce_u(other, getattr(self, "order", 0))
        if other is None:
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def __repr__(self) -> str:
        terms = [f"({format_rational(c)})u^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"USeries[{' + '.join(terms) or '0'}; O(u^{self.order + 1})]"

    def to_json(self):
        return {"order": self.order, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> "USeries":
        return cls([Fraction(c) for c in data["coeffs"]], data["order"])


def _coerce_u(x, order: int) -> USeries | None:
    if isinstance(x, USeries):
        return x
    if isinstance(x, (int, Fraction)):
        return USeries([x], order)
    return None


def sin_series(order: int, scale: Scalar = 1) -> USeries:
    """Taylor series of ``sin(scale * u)``."""
    s = as_fraction(scale)
    return USeries.from_map(
        {i: Fraction((-1) ** (i // 2)) * s ** i / math.factorial(i)
         for i in range(1, order + 1, 2)}, order)


def cos_series(order: int, scale: Scalar = 1) -> USeries:
    """Taylor series of ``cos(scale * u)``."""
    s = as_fraction(scale)
    return USeries.from_map(
        {i: Fraction((-1) ** (i // 2)) * s ** i / math.factorial(i)
         for i in range(0, order + 1, 2)}, order)


def compose(outer: USeries, inner: USeries) -> USeries:
    """Return ``outer(inner(u))``; ``inner`` must have zero constant term."""
    if inner.coeffs[0]:
        raise SeriesError("inner series of a composition must have zero constant term")
    n = min(outer.order, inner.order)
    inner = inner.truncate(n)
    result = USeries([outer.coeffs[n]], n)
    for i in range(n - 1, -1, -1):
        result = result * inner + outer.coeffs[i]
    return result


compose_even = compose


def _check_revertible(a: USeries) -> None:
    if a.coeffs[0] or (a.order >= 1 and a.coeffs[1] != 1):
        raise ParityError("reversion needs a series of the form u + O(u^2)")
    if a.parity is not UParity.ODD:
        raise ParityError("revert_odd needs an odd series")


def revert_odd(a: USeries, method: str = "lagrange") -> USeries:
    """Compositional inverse of an odd series ``a = u + a_3 u^3 + ...``.

    ``method`` is ``"lagrange"`` (Lagrange inversion) or ``"iterate"``
    (fixed-point substitution ``b <- r - (a(b) - b)``).
    """
    _check_revertible(a)
    n = a.order
    if method == "lagrange":
        # a = u * h(u) with h(0) = 1; [r^k] b = (1/k) [u^(k-1)] h(u)^(-k)
        h = USeries(a.coeffs[1:], n - 1) if n >= 1 else USeries([1], 0)
        h_inv = h.inverse()
        out = [Fraction(0)] * (n + 1)
        power = h_inv.one_like()
        for k in range(1, n + 1):
            power = power * h_inv
            out[k] = power.coeffs[k - 1] / k
        return USeries(out, n)
    if method == "iterate":
        r = USeries.variable(n)
        b = r
        for _ in range(n + 1):
            nxt = r - (compose(a, b) - b)
            if nxt == b:
                break
            b = nxt
        return b
    raise ValueError(f"unknown reversion method {method!r}")


# ---------------------------------------------------------------------------
# power series in q with pluggable coefficients
# ---------------------------------------------------------------------------

Coefficient = Union[Fraction, PLaurent, USeries]


def _regime_of(c) -> str:
    if isinstance(c, PLaurent):
        return "pq"
    if isinstance(c, USeries):
        return "uq"
    return "q"


class QSeries:
    """Power series in ``q`` truncated after ``q^order``."""

    __slots__ = ("coeffs", "order", "var")

    def __init__(self, coeffs: Sequence, order: int | None = None, var: str | None = None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise SeriesError("order must be non-negative")
        if not coeffs:
            coeffs = [Fraction(0)]
        coeffs = [as_fraction(c) if isinstance(c, int) else c for c in coeffs]
        if var is None:
            var = _regime_of(coeffs[0])
        proto = coeffs[0]
        for c in coeffs:
            if _regime_of(c) != var:
                raise RegimeError(f"mixed coefficient regimes in one series ({var})")
        zero = proto.zero_like() if var != "q" else Fraction(0)
        coeffs = (coeffs + [zero] * (order + 1))[: order + 1]
        self.coeffs: tuple = tuple(coeffs)
        self.order = order
        self.var = var

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_map(cls, coeffs: Mapping[int, Coefficient], order: int, zero) -> "QSeries":
        cs = [zero] * (order + 1)
        for d, c in coeffs.items():
            if 0 <= d <= order:
                cs[d] = c
        return cls(cs, order)

    @classmethod
    def constant(cls, c, order: int) -> "QSeries":
        zero = c.zero_like() if hasattr(c, "zero_like") else Fraction(0)
        return cls([c] + [zero] * order, order)

    def zero_coeff(self):
        c = self.coeffs[0]
        return c.zero_like() if self.var != "q" else Fraction(0)

    def one_coeff(self):
        c = self.coeffs[0]
        return c.one_like() if self.var != "q" else Fraction(1)

    # -- inspection --------------------------------------------------------

    def __getitem__(self, d: int):
        if d < 0 or d > self.order:
            raise IndexError(f"q^{d} outside truncation order {self.order}")
        return self.coeffs[d]

    def __len__(self) -> int:
        return self.order + 1

    def truncate(self, order: int) -> "QSeries":
        return QSeries(self.coeffs, min(order, self.order), self.var)

    def map(self, fn: Callable) -> "QSeries":
        return QSeries([fn(c) for c in self.coeffs], self.order)

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "QSeries") -> None:
        if self.var != other.var:
            raise RegimeError(f"regime mismatch: {self.var} vs {other.var}")

    def _lift(self, other):
        if isinstance(other, QSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) or _regime_of(other) == self.var:
            c = other if self.var != "q" or isinstance(other, Fraction) else Fraction(other)
            if self.var != "q" and isinstance(other, (int, Fraction)):
                c = self.one_coeff() * as_fraction(other)
            return QSeries.constant(c, self.order)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        n = min(self.order, other.order)
        return QSeries([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)], n)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        n = min(self.order, other.order)
        return QSeries([a - b for a, b in zip(self.coeffs[: n + 1], other.coeffs)], n)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self) -> "QSeries":
        return QSeries([-c for c in self.coeffs], self.order)

    def scale(self, c: Scalar) -> "QSeries":
        c = as_fraction(c)
        return QSeries([a * c for a in self.coeffs], self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            if _regime_of(other) == self.var and self.var != "q":
                return QSeries([a * other for a in self.coeffs], self.order)
            return NotImplemented
        self._check(other)
        n = min(self.order, other.order)
        a = [(i, c) for i, c in enumerate(self.coeffs[: n + 1]) if not _is_zero(c)]
        out = [None] * (n + 1)
        for j, d in enumerate(other.coeffs[: n + 1]):
            if _is_zero(d):
                continue
            for i, c in a:
                if i + j > n:
                    break
                t = c * d
                out[i + j] = t if out[i + j] is None else out[i + j] + t
        zero = self.zero_coeff()
        return QSeries([zero if c is None else c for c in out], n)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if _regime_of(other) == self.var and self.var != "q":
            return QSeries([other * a for a in self.coeffs], self.order)
        return NotImplemented

    def __pow__(self, n: int) -> "QSeries":
        if n < 0:
            return invert(self) ** (-n)
        result = QSeries.constant(self.one_coeff(), self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison ----------------------------------------------------------

    def first_difference(self, other: "QSeries"):
        """Locate the first coefficient where the series differ.

        Returns ``None`` on agreement through the common trusted region, else
        ``(q_exp, inner_exp, expected, got)`` with ``inner_exp`` ``None`` for
        rational coefficients.
        """
        self._check(other)
        n = min(self.order, other.order)
        for d in range(n + 1):
            a, b = self.coeffs[d], other.coeffs[d]
            if self.var == "q":
                if a != b:
                    return d, None, a, b
            else:
                diff = a.first_difference(b)
                if diff is not None:
                    return (d, *diff)
        return None

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            other = self._lift(other)
            if other is None:
                return NotImplemented
        if self.var != other.var:
            return False
        return self.first_difference(other) is None

    __hash__ = None

    def __repr__(self) -> str:
        shown = ", ".join(repr(c) for c in self.coeffs[:4])
        more = ", ..." if self.order > 3 else ""
        return f"QSeries<{self.var}>([{shown}{more}]; O(q^{self.order + 1}))"

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        if self.var == "q":
            coeffs = [format_rational(c) for c in self.coeffs]
        else:
            coeffs = [c.to_json() for c in self.coeffs]
        return {"var": self.var, "order": self.order, "coeffs": coeffs}

    @classmethod
    def from_json(cls, data: Mapping) -> "QSeries":
        var = data["var"]
        if var == "q":
            coeffs = [Fraction(c) for c in data["coeffs"]]
        elif var == "pq":
            coeffs = [PLaurent.from_json(c) for c in data["coeffs"]]
        elif var == "uq":
            coeffs = [USeries.from_json(c) for c in data["coeffs"]]
        else:
            raise RegimeError(f"unknown regime {var!r}")
        return cls(coeffs, data["order"], var)


def _is_zero(c) -> bool:
    # zero USeries and windowed zeros still carry a truncation bound, so they
    # must take part in products
    if isinstance(c, Fraction):
        return c == 0
    return isinstance(c, PLaurent) and c.is_finite and c.is_zero()


# ---------------------------------------------------------------------------
# functional API
# ---------------------------------------------------------------------------


def invert(a: QSeries) -> QSeries:
    """Multiplicative inverse through the truncation order."""
    a0 = a.coeffs[0]
    if a.var == "q":
        if not a0:
            raise NonUnitError("constant term is zero")
        inv0 = 1 / a0
    else:
        inv0 = a0.inverse()
    out = [inv0]
    for n in range(1, a.order + 1):
        s = None
        for k in range(1, n + 1):
            if _is_zero(a.coeffs[k]):
                continue
            t = a.coeffs[k] * out[n - k]
            s = t if s is None else s + t
        out.append(a.zero_coeff() if s is None else -(inv0 * s))
    return QSeries(out, a.order)


def q_derivative(a: QSeries) -> QSeries:
    """Apply ``q d/dq``."""
    return QSeries([c * d for d, c in enumerate(a.coeffs)], a.order)


def coeff(a: QSeries, q_exp: int, inner_exp: Scalar | None = None):
    """Exact coefficient of ``q^q_exp`` (and of ``p^inner_exp`` / ``u^inner_exp``)."""
    if q_exp < 0 or q_exp > a.order:
        raise IndexError(f"q^{q_exp} outside truncation order {a.order}")
    c = a.coeffs[q_exp]
    if inner_exp is None:
        return c
    if a.var == "pq":
        return c.p_coeff(inner_exp)
    if a.var == "uq":
        return c[int(inner_exp)]
    raise RegimeError("q-series coefficients have no inner variable")


def binomial(e: int, j: int) -> Fraction:
    """Generalized binomial coefficient ``C(e, j)`` for integer ``e``."""
    out = Fraction(1)
    for i in range(j):
        out = out * (e - i) / (i + 1)
    return out


Factor = tuple  # (coefficient, w_exponent, q_exponent, outer_exponent)


def product_form(
    factors: Iterable[Factor],
    leading: PLaurent,
    q_max: int,
    window: int | None = None,
) -> QSeries:
    """Expand ``leading * prod (1 - c w^i q^m)^e`` through ``q^q_max``.

    Factors with ``m > q_max`` contribute nothing and are skipped. With a
    ``window`` bound, any coefficient whose support leaves ``|e| <= window``
    raises :class:`WindowError`.
    """
    zero = PLaurent()
    result = QSeries([leading] + [zero] * q_max, q_max)
    for c, i, m, e in factors:
        if m < 1:
            raise SeriesError("product factors need a positive q-exponent")
        if m > q_max or e == 0:
            continue
        c = as_fraction(c)
        terms = {}
        for j in range(q_max // m + 1):
            b = binomial(e, j)
            if b:
                terms[j * m] = PLaurent({i * j: b * (-c) ** j})
        result = result * QSeries.from_map(terms, q_max, zero)
    if window is not None:
        for d, coef in enumerate(result.coeffs):
            if coef.max_abs_exponent() > window:
                raise WindowError(
                    f"q^{d} coefficient has support |e| = {coef.max_abs_exponent()} "
                    f"beyond window {window}")
    return result


def dilate(a: QSeries, k_p: int, k_q: int, window: int | None = None) -> QSeries:
    """Substitute ``p -> p^k_p`` and ``q -> q^k_q``; the order is kept."""
    if k_p < 1 or k_q < 1:
        raise SeriesError("dilation factors must be positive")
    zero = a.zero_coeff()
    out = [zero] * (a.order + 1)
    for d, c in enumerate(a.coeffs):
        if d * k_q > a.order:
            break
        if a.var == "pq":
            c = c.substitute_power(k_p)
            if window is not None and c.max_abs_exponent() > window:
                raise WindowError(f"dilated support exceeds window {window}")
        elif k_p != 1:
            raise RegimeError("p-dilation needs a pq-series")
        out[d * k_q] = c
    return QSeries(out, a.order)


def _check_symmetric_p(c: PLaurent, what: str) -> None:
    if not c.is_finite:
        raise ParityError(f"{what}: windowed coefficients cannot be converted")
    if c.parity is not Parity.EVEN_IN_W:
        raise ParityError(f"{what}: coefficient has half-integer p-powers")
    if c.symmetry is not Symmetry.SYMMETRIC:
        raise ParityError(f"{what}: coefficient is not symmetric under p <-> 1/p")


def _two_cos_table(n_max: int, u_max: int) -> list[USeries]:
    return [cos_series(u_max, n).scale(2) for n in range(n_max + 1)]


def symmetric_p_to_u(a: QSeries, u_max: int) -> QSeries:
    """Map ``c_0 + sum c_n (p^n + p^-n)`` to ``c_0 + sum c_n 2cos(n u)``."""
    if a.var != "pq":
        raise RegimeError("symmetric_p_to_u needs a pq-series")
    for c in a.coeffs:
        _check_symmetric_p(c, "symmetric_p_to_u")
    n_max = max((c.max_abs_exponent() // 2 for c in a.coeffs), default=0)
    table = _two_cos_table(n_max, u_max)
    out = []
    for c in a.coeffs:
        s = USeries([c[0]], u_max)
        for e, v in c.items():
            if e > 0:
                s = s + table[e // 2].scale(v)
        out.append(s)
    return QSeries(out, a.order)


def antisymmetric_w_to_u(a: QSeries, u_max: int) -> QSeries:
    """Map ``sum c_n (w^n - w^-n)`` to ``sum c_n 2 sin(n u / 2)``.

    With ``w = e^(iu/2)`` this is the value divided by ``i``; the result has
    rational coefficients.
    """
    if a.var != "pq":
        raise RegimeError("antisymmetric_w_to_u needs a pq-series")
    out = []
    for c in a.coeffs:
        if not c.is_finite or c.symmetry is not Symmetry.ANTISYMMETRIC:
            raise ParityError("antisymmetric_w_to_u needs finite antisymmetric coefficients")
        s = USeries([], u_max)
        for e, v in c.items():
            if e > 0:
                s = s + sin_series(u_max, Fraction(e, 2)).scale(2 * v)
        out.append(s)
    return QSeries(out, a.order)


def sign_flip_p(a: QSeries) -> QSeries:
    """Multiply the coefficient of ``p^n`` by ``(-1)^n``."""
    if a.var != "pq":
        raise RegimeError("sign_flip_p needs a pq-series")
    return a.map(PLaurent.sign_flip)


def u_coefficient_series(a: QSeries, u_exp: int) -> QSeries:
    """Extract the q-series of ``u^u_exp`` coefficients from a uq-series."""
    if a.var != "uq":
        raise RegimeError("needs a uq-series")
    return QSeries([c[u_exp] for c in a.coeffs], a.order)


def restrict_window(a: QSeries, bound: int) -> QSeries:
    return a.map(lambda c: c.restrict(bound))


def trusted_region(a: QSeries) -> dict:
    """Summarize the region on which ``a`` is exact."""
    region = {"q_order": a.order}
    if a.var == "pq":
        bounds = [c.trust_bound() for c in a.coeffs]
        if any(b != math.inf for b in bounds):
            region["w_validity"] = [None if b == math.inf else int(b) for b in bounds]
    if a.var == "uq":
        region["u_order"] = min(c.order for c in a.coeffs)
    return region
