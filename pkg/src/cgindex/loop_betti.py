"""Betti numbers of the free loop space quotient for ``H*(M; Q) = Q[x]/(x^{n+1})``.

``x`` has degree ``d``; for odd ``d`` only ``n = 1`` occurs (rational spheres).
Everything here is exact integer/rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .exact_field import ExactScalar

__all__ = [
    "ManifoldClass",
    "resonance_constant",
    "betti_odd_d",
    "betti_sum_odd_d",
    "betti_even_d",
    "in_omega",
    "theta",
    "betti_sum_even_d",
    "betti",
    "betti_sum",
    "BettiTable",
    "betti_table",
    "ResonanceResult",
    "resonance_check",
]


def _frac(q: Fraction) -> Fraction:
    return q - math.floor(q)


@dataclass(frozen=True)
class ManifoldClass:
    d: int
    n: int

    def __post_init__(self) -> None:
        if self.d < 2 or self.n < 1:
            raise ValueError(f"need d >= 2 and n >= 1, got d={self.d}, n={self.n}")
        if self.d % 2 == 1 and self.n != 1:
            raise ValueError(f"odd d={self.d} forces n=1, got n={self.n}")

    @property
    def period(self) -> int:
        """``d(n+1) - 2``."""
        return self.d * (self.n + 1) - 2

    @property
    def dim(self) -> int:
        return self.d * self.n

    @property
    def even(self) -> bool:
        return self.d % 2 == 0

    @property
    def expected_geodesics(self) -> int:
        if self.even:
            return self.d * self.n * (self.n + 1) // 2
        return self.d + 1


def resonance_constant(mc: ManifoldClass) -> Fraction:
    d, n = mc.d, mc.n
    if mc.even:
        return Fraction(-n * (n + 1) * d, 2 * d * (n + 1) - 4)
    return Fraction(d + 1, 2 * d - 2)


# -- odd d ---------------------------------------------------------------

def betti_odd_d(mc: ManifoldClass, i: int) -> int:
    if mc.even:
        raise ValueError("betti_odd_d needs odd d")
    step = mc.d - 1
    if i < step or i % 2 == 1:
        return 0
    if i % step == 0 and i // step >= 2:
        return 2
    return 1


def betti_sum_odd_d(mc: ManifoldClass, k: int) -> int:
    """Closed form of ``sum_{i<=k} b_i`` for ``k >= d-1``."""
    if mc.even:
        raise ValueError("betti_sum_odd_d needs odd d")
    if k < mc.d - 1:
        raise ValueError(f"closed form needs k >= d-1 = {mc.d - 1}")
    return k // (mc.d - 1) + k // 2 - (mc.d - 1) // 2


# -- even d --------------------------------------------------------------

def in_omega(mc: ManifoldClass, i: int, literal: bool = False) -> bool:
    """Membership in the exceptional degree set carrying ``n+1``.

    ``i - (d-1) = k1*D + k2*d`` with ``k1 >= 1``; ``k2`` ranges over
    ``[0, n-1]``, or ``[1, n-1]`` when ``literal`` is set.
    """
    if i % 2 == 0:
        return False
    rest = i - (mc.d - 1)
    D = mc.period
    if rest < D:
        return False
    k2_lo = 1 if literal else 0
    k1 = rest // D
    # k2*d = rest - k1*D must be a multiple of d with k2 in range; since
    # (n-1)*d < D, only k1 = rest // D can work
    r = rest - k1 * D
    return r % mc.d == 0 and k2_lo <= r // mc.d <= mc.n - 1


def betti_even_d(mc: ManifoldClass, i: int, literal_omega: bool = False) -> int:
    if not mc.even:
        raise ValueError("betti_even_d needs even d")
    d, n = mc.d, mc.n
    if i % 2 == 0 or i <= d - 2:
        return 0
    if i < d - 1 + (n - 1) * d:
        return (i - (d - 1)) // d + 1
    if in_omega(mc, i, literal_omega):
        return n + 1
    return n


def theta(mc: ManifoldClass, k: int) -> Fraction:
    """Bounded periodic correction of the even-d partial-sum closed form."""
    d, n, D = mc.d, mc.n, mc.period
    f = _frac(Fraction(k - (d - 1), D))
    return (_frac(Fraction(D, d * n) * f)
            - (Fraction(2, d) + Fraction(d - 2, d * n)) * f
            - n * _frac(Fraction(D, 2) * f)
            - _frac(Fraction(D, d) * f))


def betti_sum_even_d(mc: ManifoldClass, k: int) -> Fraction:
    """Closed form of ``sum_{i<=k} b_i`` for ``k >= dn-1`` (returned as a Fraction)."""
    if not mc.even:
        raise ValueError("betti_sum_even_d needs even d")
    d, n, D = mc.d, mc.n, mc.period
    if k < d * n - 1:
        raise ValueError(f"closed form needs k >= dn-1 = {d * n - 1}")
    return (Fraction(n * (n + 1) * d, 2 * D) * (k - (d - 1))
            - Fraction(n * (n - 1) * d, 4) + 1 + theta(mc, k))


def betti(mc: ManifoldClass, i: int, literal_omega: bool = False) -> int:
    if mc.even:
        return betti_even_d(mc, i, literal_omega)
    return betti_odd_d(mc, i)


def betti_sum(mc: ManifoldClass, k: int) -> Fraction:
    """Closed-form partial sum (either parity of d)."""
    if mc.even:
        return betti_sum_even_d(mc, k)
    return Fraction(betti_sum_odd_d(mc, k))


@dataclass
class BettiTable:
    manifold: ManifoldClass
    values: list[int]
    literal_omega: bool = False

    @property
    def max_degree(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, i: int) -> int:
        if i < 0:
            return 0
        if i > self.max_degree:
            raise IndexError(f"degree {i} beyond table cutoff {self.max_degree}")
        return self.values[i]

    def partial_sums(self) -> list[int]:
        out, s = [], 0
        for b in self.values:
            s += b
            out.append(s)
        return out

    def rows(self) -> list[tuple[int, int]]:
        return [(i, b) for i, b in enumerate(self.values) if b]


def betti_table(mc: ManifoldClass, max_k: int, literal_omega: bool = False) -> BettiTable:
    return BettiTable(mc, [betti(mc, i, literal_omega) for i in range(max_k + 1)], literal_omega)


@dataclass
class ResonanceResult:
    passed: bool
    total: Optional[ExactScalar]
    expected: Fraction
    residual: Optional[ExactScalar]
    error: Optional[str] = None

    @property
    def residual_float(self) -> Optional[float]:
        return None if self.residual is None else float(self.residual)


def resonance_check(records: Iterable, mc: ManifoldClass) -> ResonanceResult:
    """Exact test of ``sum gamma_k / mean_k == B(d, n)``."""
    expected = resonance_constant(mc)
    total = ExactScalar(0)
    for rec in records:
        mean = rec.mean_index
        if mean <= 0:
            return ResonanceResult(False, None, expected, None,
                                   f"{rec.name}: mean index {mean} is not positive")
        total = total + ExactScalar(rec.gamma) / mean
    residual = total - expected
    return ResonanceResult(residual == 0, total, expected, residual)
