"""Counting polarized isogenies ``nu(d_1, ..., d_n)``.

Two independent brute-force oracles are provided:

* :func:`nu_subgroup_formula` sums ``#Hom^sym(K, K^)`` over all subgroups
  ``K`` of ``Z/d_1 x ... x Z/d_n``;
* :func:`nu_isotropic` counts Lagrangian subgroups of ``(Z/d_1 x ... x Z/d_n)^2``
  under the standard alternating pairing.

Subgroups of ``G = Z^r / diag(n)`` are represented by lattices
``diag(n) Z^r <= L <= Z^r`` in row Hermite normal form; the HNF is the
canonical key. Closed forms and the prime-power recursion are included for
cross-checking.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .arith import divisors, gcd_all, is_prime, sigma

DEFAULT_SUBGROUP_BOUND = 4096
DEFAULT_ISOTROPIC_BOUND = 65536


class EnumerationBoundError(ValueError):
    """Brute force refused because the group exceeds the configured bound."""


# ---------------------------------------------------------------------------
# integer normal forms
# ---------------------------------------------------------------------------


def smith_diagonal(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero Smith normal form diagonal of an integer matrix, as a divisor chain."""
    a = [list(r) for r in matrix]
    if not a or not a[0]:
        return []
    rows, cols = len(a), len(a[0])
    diag = []
    t = 0
    while t < min(rows, cols):
        nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            done = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        done = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    for r in a:
                        r[j] -= q * r[t]
                    if a[t][j]:
                        for r in a:
                            r[t], r[j] = r[j], r[t]
                        done = False
            if done:
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if a[i][j] % a[t][t]), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def normalize_type(factors: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors ``d_1 | d_2 | ...`` of ``Z/a_1 x ... x Z/a_n`` (length kept)."""
    fs = [int(a) for a in factors]
    if any(a < 1 for a in fs):
        raise ValueError(f"invariant factors must be positive, got {fs}")
    n = len(fs)
    if n == 0:
        return ()
    diag = smith_diagonal([[fs[i] if i == j else 0 for j in range(n)] for i in range(n)])
    return tuple(diag)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...]

    def __init__(self, factors: Iterable[int]):
        object.__setattr__(self, "invariant_factors", normalize_type(factors))

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def nontrivial_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)

    def elements(self):
        return itertools.product(*(range(d) for d in self.invariant_factors))


def _hnf(rows: Iterable[Sequence[int]], moduli: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Row HNF of the lattice spanned by ``rows`` and ``moduli[i] e_i``.

    The result is upper triangular with positive diagonal ``h_ii | moduli[i]``
    and off-diagonal entries reduced into ``[0, h_jj)``.
    """
    r = len(moduli)
    pool = [[x % m for x, m in zip(row, moduli)] for row in rows]
    pool = [row for row in pool if any(row)]
    basis: list[list[int]] = []
    for j in range(r):
        pivot = [0] * r
        pivot[j] = moduli[j]
        rest = []
        for row in pool:
            if row[j] == 0:
                rest.append(row)
                continue
            # combine row and pivot at column j via extended gcd
            g, s, t = _ext_gcd(pivot[j], row[j])
            a, b = pivot[j] // g, row[j] // g
            new_pivot = [s * x + t * y for x, y in zip(pivot, row)]
            other = [a * y - b * x for x, y in zip(pivot, row)]
            pivot = new_pivot
            other = [x % m if k > j else 0 for k, (x, m) in enumerate(zip(other, moduli))]
            if any(other):
                rest.append(other)
        for k in range(j + 1, r):
            pivot[k] %= moduli[k]
        pool = rest
        basis.append(pivot)
    # back-reduce above the diagonal
    for j in range(r):
        h = basis[j][j]
        for i in range(j):
            q = basis[i][j] // h
            if q:
                basis[i] = [x - q * y for x, y in zip(basis[i], basis[j])]
    return tuple(tuple(row) for row in basis)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteAbelianGroup
    canonical_key: tuple[tuple[int, ...], ...]

    @property
    def generators(self) -> list[tuple[int, ...]]:
        mods = self.parent.invariant_factors
        gens = [tuple(x % m for x, m in zip(row, mods)) for row in self.canonical_key]
        return [g for g in gens if any(g)]

    @property
    def order(self) -> int:
        return self.parent.order // math.prod(row[i] for i, row in enumerate(self.canonical_key))

    def contains(self, x: Sequence[int]) -> bool:
        v = list(x)
        for j, row in enumerate(self.canonical_key):
            if v[j] % row[j]:
                return False
            q = v[j] // row[j]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return True

    def join(self, x: Sequence[int]) -> "Subgroup":
        key = _hnf(list(self.canonical_key) + [list(x)], self.parent.invariant_factors)
        return Subgroup(self.parent, key)

    def invariant_factors(self) -> tuple[int, ...]:
        """Invariant factors of the subgroup itself (trivial factors dropped)."""
        h = self.canonical_key
        r = len(h)
        mods = self.parent.invariant_factors
        coeff_rows = []
        for i in range(r):
            v = [0] * r
            v[i] = mods[i]
            c = [0] * r
            for j in range(r):
                q, rem = divmod(v[j], h[j][j])
                assert rem == 0
                c[j] = q
                v = [a - q * b for a, b in zip(v, h[j])]
            coeff_rows.append(c)
        return tuple(d for d in smith_diagonal(coeff_rows) if d > 1)


def trivial_subgroup(G: FiniteAbelianGroup) -> Subgroup:
    return Subgroup(G, _hnf([], G.invariant_factors))


def cyclic_subgroup(G: FiniteAbelianGroup, x: Sequence[int]) -> Subgroup:
    return Subgroup(G, _hnf([x], G.invariant_factors))


def _cyclic_representatives(G: FiniteAbelianGroup) -> list[tuple[tuple[int, ...], Subgroup]]:
    seen = {}
    for x in G.elements():
        c = cyclic_subgroup(G, x)
        if c.canonical_key not in seen:
            seen[c.canonical_key] = (x, c)
    return [seen[k] for k in sorted(seen)]


def _closure_bfs(G: FiniteAbelianGroup, allowed) -> list[Subgroup]:
    """All subgroups reachable from the trivial one by adding allowed cyclic generators."""
    reps = _cyclic_representatives(G)
    start = trivial_subgroup(G)
    found = {start.canonical_key: start}
    frontier = [start]
    while frontier:
        nxt = []
        for S in frontier:
            for x, _ in reps:
                if S.contains(x) or not allowed(S, x):
                    continue
                T = S.join(x)
                if T.canonical_key not in found:
                    found[T.canonical_key] = T
                    nxt.append(T)
        frontier = nxt
    return [found[k] for k in sorted(found)]


def enumerate_subgroups(G: FiniteAbelianGroup | Sequence[int],
                        bound: int = DEFAULT_SUBGROUP_BOUND) -> list[Subgroup]:
    """Every subgroup of ``G`` exactly once, sorted by canonical key."""
    if not isinstance(G, FiniteAbelianGroup):
        G = FiniteAbelianGroup(G)
    if G.order > bound:
        raise EnumerationBoundError(
            f"group of order {G.order} exceeds the subgroup enumeration bound {bound}")
    return _closure_bfs(G, lambda S, x: True)


# ---------------------------------------------------------------------------
# symmetric homomorphisms and the subgroup formula
# ---------------------------------------------------------------------------


def hom_sym_count(K: FiniteAbelianGroup | Sequence[int],
                  bound: int = DEFAULT_SUBGROUP_BOUND) -> int:
    """Number of symmetric homomorphisms ``K -> K^`` by brute force.

    With ``K = sum Z/k_i``, a homomorphism sends ``e_i`` to the character
    ``e_j -> a_ij / k_j``. It is well defined iff ``k_i a_ij / k_j`` is an
    integer and symmetric iff ``a_ij / k_j = a_ji / k_i`` mod 1.
    """
    if not isinstance(K, FiniteAbelianGroup):
        K = FiniteAbelianGroup(K)
    if K.order > bound:
        raise EnumerationBoundError(f"group of order {K.order} exceeds bound {bound}")
    return _hom_sym_count(K.nontrivial_factors())


@lru_cache(maxsize=None)
def _hom_sym_count(ks: tuple[int, ...]) -> int:
    s = len(ks)
    # images of each generator allowed by the relation k_i e_i = 0
    row_choices = []
    for i in range(s):
        opts = [a for a in itertools.product(*(range(k) for k in ks))
                if all((ks[i] * a[j]) % ks[j] == 0 for j in range(s))]
        row_choices.append(opts)

    def extend(i: int, chosen: list) -> int:
        if i == s:
            return 1
        total = 0
        for row in row_choices[i]:
            if all(Fraction(row[j], ks[j]) - Fraction(chosen[j][i], ks[i]) in _INTEGERS
                   for j in range(i)):
                total += extend(i + 1, chosen + [row])
        return total

    return extend(0, [])


class _IntegerTest:
    def __contains__(self, x: Fraction) -> bool:
        return x.denominator == 1


_INTEGERS = _IntegerTest()


def hom_sym_closed(ks: Sequence[int]) -> int:
    """``prod k_i * prod_{i<j} gcd(k_i, k_j)``; used to cross-check the brute force."""
    ks = list(ks)
    out = math.prod(ks)
    for i, j in itertools.combinations(range(len(ks)), 2):
        out *= math.gcd(ks[i], ks[j])
    return out


def nu_subgroup_formula(type_: Sequence[int], bound: int = DEFAULT_SUBGROUP_BOUND) -> int:
    """``nu = sum_K #Hom^sym(K, K^)`` over subgroups ``K`` of ``Z/d_1 x ... x Z/d_n``."""
    G = FiniteAbelianGroup(type_)
    return sum(hom_sym_count(FiniteAbelianGroup(S.invariant_factors()) if S.invariant_factors()
                             else FiniteAbelianGroup([1]))
               for S in enumerate_subgroups(G, bound))


# ---------------------------------------------------------------------------
# Lagrangian subgroups under the commutator pairing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairingGroup:
    """``(Z/d_1 x ... x Z/d_n)^2`` with ``<(a, b), (a', b')> = sum (a_k b'_k - b_k a'_k)/d_k``."""

    type_: tuple[int, ...]

    @property
    def base(self) -> FiniteAbelianGroup:
        G = FiniteAbelianGroup.__new__(FiniteAbelianGroup)
        object.__setattr__(G, "invariant_factors", self.type_ + self.type_)
        return G

    def pairing(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        n = len(self.type_)
        total = Fraction(0)
        for k, d in enumerate(self.type_):
            total += Fraction(x[k] * y[n + k] - x[n + k] * y[k], d)
        return total - math.floor(total)


def nu_isotropic(type_: Sequence[int], bound: int = DEFAULT_ISOTROPIC_BOUND) -> int:
    """Number of isotropic subgroups of order ``prod d_i`` in the pairing group."""
    t = tuple(int(d) for d in type_)
    if any(d < 1 for d in t):
        raise ValueError(f"type entries must be positive, got {t}")
    order = math.prod(t)
    if order * order > bound:
        raise EnumerationBoundError(
            f"pairing group of order {order * order} exceeds the isotropic bound {bound}")
    P = PairingGroup(t)

    def allowed(S: Subgroup, x) -> bool:
        return all(P.pairing(g, x) == 0 for g in S.canonical_key)

    return sum(1 for S in _closure_bfs(P.base, allowed) if S.order == order)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def nu_closed(d1: int, d2: int) -> int:
    """``sum_{k | gcd} k^3 sigma(d1 d2 / k^2)``."""
    if d1 < 1 or d2 < 1:
        raise ValueError("nu_closed needs positive arguments")
    return sum(k ** 3 * sigma(d1 * d2 // (k * k)) for k in divisors(math.gcd(d1, d2)))


def nu_recursion(p: int, m: int, n: int) -> int:
    """``nu(p^m, p^n) = sigma(p^(m+n)) + p^3 nu(p^(m-1), p^(n-1))``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if m < 0 or m > n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    if m == 0:
        return sigma(p ** n)
    return sigma(p ** (m + n)) + p ** 3 * nu_recursion(p, m - 1, n - 1)


def nu(type_: Sequence[int], oracle: str = "formula") -> int:
    """Dispatch to one oracle: ``formula``, ``isotropic`` or ``closed``."""
    if oracle == "formula":
        return nu_subgroup_formula(type_)
    if oracle == "isotropic":
        return nu_isotropic(type_)
    if oracle == "closed":
        t = normalize_type(type_)
        nontrivial = [d for d in t if d > 1]
        if len(nontrivial) > 2:
            raise ValueError("closed form covers at most two nontrivial factors")
        padded = [1] * (2 - len(nontrivial)) + nontrivial
        return nu_closed(*padded)
    raise ValueError(f"unknown oracle {oracle!r}")


def divisor_chains(max_product: int, length: int = 2) -> list[tuple[int, ...]]:
    """Types ``d_1 | d_2 | ... | d_length`` with product at most ``max_product``."""
    out = []

    def rec(prefix: tuple[int, ...], prod: int):
        if len(prefix) == length:
            out.append(prefix)
            return
        last = prefix[-1] if prefix else 1
        d = last
        while prod * d <= max_product:
            if d % last == 0:
                rec(prefix + (d,), prod * d)
            d += 1
    rec((), 1)
    return sorted(out)


__all__ = [
    "EnumerationBoundError", "FiniteAbelianGroup", "Subgroup", "PairingGroup",
    "enumerate_subgroups", "hom_sym_count", "hom_sym_closed", "nu_subgroup_formula",
    "nu_isotropic", "nu_closed", "nu_recursion", "nu", "normalize_type",
    "smith_diagonal", "divisor_chains", "gcd_all",
]
