"""Morse indices of iterated closed geodesics from their normal forms.

Two independent routes are provided: the closed-form iteration formula
(:func:`iterate_index_general`, with its bumpy elliptic specialization
:func:`iterate_index_elliptic`) and the Bott-type sum over roots of unity
driven by splitting numbers (:func:`iterate_index_bott`).  They must agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .exact_field import ExactScalar
from .normal_form import (
    PoincareDecomposition,
    SplittingProfile,
    nullity_of_iterate,
    splitting_profile,
    validate,
)

__all__ = [
    "GeodesicRecord",
    "InvalidDecomposition",
    "ModeError",
    "iterate_index_general",
    "iterate_index_elliptic",
    "iterate_index_bott",
    "omega_index",
    "mean_index",
    "parity_check",
    "gamma_invariant",
    "mbar_threshold",
    "index_bounds",
    "growth_lower_bound",
]


class InvalidDecomposition(ValueError):
    def __init__(self, name: str, violations) -> None:
        self.violations = list(violations)
        super().__init__(f"{name}: " + "; ".join(str(v) for v in self.violations))


class ModeError(ValueError):
    """A bumpy elliptic formula was applied to a decomposition that is not."""


@dataclass(frozen=True)
class GeodesicRecord:
    name: str
    initial_index: int
    decomp: PoincareDecomposition

    @cached_property
    def structural_violations(self):
        return validate(self.decomp, None, "general")

    @cached_property
    def is_bumpy_elliptic(self) -> bool:
        return not validate(self.decomp, None, "bumpy_elliptic")

    @cached_property
    def mean_index(self) -> ExactScalar:
        return mean_index(self)

    @cached_property
    def gamma(self) -> Fraction:
        return gamma_invariant(self)

    @cached_property
    def profile(self) -> SplittingProfile:
        return splitting_profile(self.decomp)

    def index(self, m: int) -> int:
        return iterate_index_general(self, m)

    def nullity(self, m: int) -> int:
        return nullity_of_iterate(self.decomp, m)


def _require_valid(rec: GeodesicRecord) -> None:
    if rec.structural_violations:
        raise InvalidDecomposition(rec.name, rec.structural_violations)


def _ceil_multiple(x: ExactScalar, m: int) -> int:
    f = x.floor_of_multiple(m)
    return f if (x * m).is_integer else f + 1


def iterate_index_general(rec: GeodesicRecord, m: int) -> int:
    """Closed-form iteration formula for ``i(c^m)`` over an arbitrary normal form."""
    if m < 1:
        raise ValueError("iterate must be positive")
    _require_valid(rec)
    d = rec.decomp
    rbar = d.rotations
    value = m * (rec.initial_index + d.p_minus + d.p_zero - rbar)
    value += 2 * sum(_ceil_multiple(x, m) for x in d.rotation_angles) - rbar
    value -= d.p_minus + d.p_zero
    if m % 2 == 0:
        value -= d.q_zero + d.q_plus
    value += 2 * sum(0 if (a * m).is_integer else 1 for a in d.nontrivial_n2_angles)
    value -= 2 * d.nontrivial_n2
    return value


def iterate_index_elliptic(rec: GeodesicRecord, m: int) -> int:
    """``m(i - r) + 2 sum floor(m x_j) + r`` for bumpy elliptic normal forms."""
    if m < 1:
        raise ValueError("iterate must be positive")
    if not rec.is_bumpy_elliptic:
        raise ModeError(f"{rec.name}: decomposition is not bumpy elliptic")
    angles = rec.decomp.rotation_angles
    r = len(angles)
    return m * (rec.initial_index - r) + 2 * sum(x.floor_of_multiple(m) for x in angles) + r


def omega_index(profile: SplittingProfile, base_index: int, t: Fraction) -> int:
    """Index at ``exp(2 pi i t)``, ``0 <= t < 1``, walking the circle from 1.

    Uses ``S+-(w) = i_{w exp(+-i eps)} - i_w``: crossing a location lowers
    the index by S- on arrival and raises it by S+ on departure.
    """
    t = Fraction(t)
    if t == 0:
        return base_index
    plus1, _ = profile.at(ExactScalar(0))
    value = base_index + plus1
    for loc in profile.locations():
        if loc == 0:
            continue
        if loc > t:
            break
        sp, sm = profile.at(loc)
        value -= sm
        if loc == t:
            return value
        value += sp
    return value


def iterate_index_bott(rec: GeodesicRecord, m: int) -> int:
    """Bott-type formula: sum of omega-indices over the m-th roots of unity."""
    if m < 1:
        raise ValueError("iterate must be positive")
    _require_valid(rec)
    prof = rec.profile
    return sum(omega_index(prof, rec.initial_index, Fraction(k, m)) for k in range(m))


def mean_index(rec: GeodesicRecord) -> ExactScalar:
    """Growth rate of ``i(c^m)``: ``i + p_- + p_0 - rbar + 2 * sum(rotation angles)``."""
    d = rec.decomp
    total = ExactScalar(rec.initial_index + d.p_minus + d.p_zero - d.rotations)
    for x in d.rotation_angles:
        total = total + 2 * x
    return total


def index_bounds(decomp: PoincareDecomposition) -> tuple[int, int]:
    """Constants ``(low, high)`` with ``m*mean - low <= i(c^m) <= m*mean + high``."""
    low = (decomp.rotations + decomp.p_minus + decomp.p_zero + decomp.q_zero
           + decomp.q_plus + 2 * decomp.nontrivial_n2)
    return low, decomp.rotations


def parity_check(rec: GeodesicRecord, dn_minus_1: int, m_max: int) -> Optional[int]:
    """First ``m <= m_max`` with ``i(c^m) != dn-1 (mod 2)``, or ``None``."""
    target = dn_minus_1 % 2
    for m in range(1, m_max + 1):
        if iterate_index_general(rec, m) % 2 != target:
            return m
    return None


def gamma_invariant(rec: GeodesicRecord) -> Fraction:
    i1 = rec.initial_index
    i2 = iterate_index_general(rec, 2)
    mag = Fraction(1) if (i2 - i1) % 2 == 0 else Fraction(1, 2)
    return mag if i1 % 2 == 0 else -mag


def growth_lower_bound(rec: GeodesicRecord, m: int) -> int:
    """A lower bound for ``i(c^{m+l}) - i(c^l)`` valid for every ``l >= 1``."""
    d = rec.decomp
    return (m * (rec.initial_index + d.p_minus + d.p_zero - d.rotations)
            + 2 * sum(x.floor_of_multiple(m) for x in d.rotation_angles)
            - d.q_zero - d.q_plus - 2 * d.nontrivial_n2)


def _threshold_one(rec: GeodesicRecord) -> int:
    mean = rec.mean_index
    if mean <= 0:
        raise ValueError(f"{rec.name}: mean index {mean} is not positive")
    d = rec.decomp
    slack = 2 * d.rotations + d.q_zero + d.q_plus + 2 * d.nontrivial_n2
    # m * mean - slack > 0 certifies growth_lower_bound(m) >= 0 for the tail
    tail = (ExactScalar(slack) / mean).floor() + 1
    last_bad = 0
    for m in range(1, tail):
        if growth_lower_bound(rec, m) < 0:
            last_bad = m
    return max(1, last_bad + 1)


def mbar_threshold(records: Iterable[GeodesicRecord]) -> int:
    """Over-approximation of the smallest m after which iterates never lose index.

    For every record and every ``m >= result``: ``i(c^{m+l}) >= i(c^l)`` for
    all ``l >= 1``.
    """
    return max((_threshold_one(rec) for rec in records), default=1)


def lcm_all(values: Sequence[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out
