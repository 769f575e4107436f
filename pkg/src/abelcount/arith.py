"""Small integer helpers shared by the counting modules."""

from __future__ import annotations

import math
from functools import lru_cache, reduce


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple[int, ...]:
    """Positive divisors of ``n`` in increasing order."""
    if n < 1:
        raise ValueError(f"divisors need a positive integer, got {n}")
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return tuple(small + large[::-1])


def sigma(n: int, k: int = 1) -> int:
    """Divisor power sum ``sum_{m | n} m^k``."""
    return sum(m ** k for m in divisors(n))


def gcd_all(*xs: int) -> int:
    return reduce(math.gcd, xs, 0)


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, math.isqrt(n) + 1))
