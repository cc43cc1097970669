"""Search for common index jump tuples ``(N, m_1, ..., m_q)``.

A candidate ``N`` (a multiple of the divisor ``M0``) is admissible when every
``N / (Mbar * mean_k)`` lies within ``epsilon`` of an integer; then
``m_k = (floor(N / (Mbar * mean_k)) + chi_k) * Mbar``.  Admissible candidates
are verified by evaluating the iterated indices directly, and the jump
corrections ``Delta_k`` are read off from ``i(c_k^{2 m_k})``.

Fractional parts are always decided exactly.  The bulk scan uses a float64
prefilter (numpy) that only discards candidates whose distance exceeds
``epsilon`` by more than a rigorous rounding margin.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .config import GeodesicConfig
from .exact_field import ExactScalar
from .index_iteration import GeodesicRecord, lcm_all, mbar_threshold
from .loop_betti import ResonanceResult, resonance_constant

__all__ = [
    "SearchParameters",
    "CijTuple",
    "SearchExhausted",
    "VerificationFailure",
    "Claim3PreconditionError",
    "search_parameters",
    "claim3_threshold",
    "admissible_chi",
    "first_admissible_cf",
    "verify_tuple",
    "find_tuple",
    "find_paired_tuple",
    "Claim3Result",
    "claim3_check",
]

WORKERS_ENV = "CGINDEX_WORKERS"
_CHUNK = 1 << 16


class SearchExhausted(RuntimeError):
    def __init__(self, message: str, checked: int = 0, rejected: Optional[list] = None) -> None:
        super().__init__(message)
        self.checked = checked
        self.rejected = rejected or []


class VerificationFailure(RuntimeError):
    def __init__(self, N: int, failures: list[str]) -> None:
        self.N = N
        self.failures = failures
        super().__init__(f"N={N}: " + "; ".join(failures[:5]))


class Claim3PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SearchParameters:
    growth_threshold: int    # mbar: iterates past it never lose index
    n_divisor: int           # M0: every N is a multiple of it
    rational_period: int     # Mbar: clears denominators of rational theta/pi

    def as_dict(self) -> dict:
        return {"mbar": self.growth_threshold, "M0": self.n_divisor, "Mbar": self.rational_period}


def _rational_period(records: Sequence[GeodesicRecord]) -> int:
    dens = []
    for rec in records:
        for x in rec.decomp.angles:
            if x.is_rational:
                dens.append((2 * x.a).denominator)
    return lcm_all(dens)


def search_parameters(cfg: GeodesicConfig, m0: Optional[int] = None) -> SearchParameters:
    """``(mbar, M0, Mbar)``; ``M0`` defaults to ``D`` (even d) or ``d-1`` (odd d)."""
    mc = cfg.manifold
    if m0 is None:
        m0 = mc.period if mc.even else mc.d - 1
    if m0 < 1:
        raise ValueError("M0 must be positive")
    return SearchParameters(mbar_threshold(cfg.geodesics), m0, _rational_period(cfg.geodesics))


def claim3_threshold(records: Sequence[GeodesicRecord], rational_period: int) -> Fraction:
    return 1 / (1 + 2 * rational_period * sum(abs(r.gamma) for r in records))


@dataclass
class CijTuple:
    N: int
    m: tuple[int, ...]
    chi: tuple[int, ...]
    epsilon: Fraction
    params: SearchParameters
    names: tuple[str, ...]
    fracs: tuple[ExactScalar, ...]
    deltas: tuple[int, ...] = ()
    jump_constants: tuple[int, ...] = ()      # C(M_k)
    index_at_2m: tuple[int, ...] = ()         # i(c_k^{2 m_k})
    relations: list[dict] = field(default_factory=list)
    rejected: int = 0

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "epsilon": str(self.epsilon),
            **self.params.as_dict(),
            "geodesics": [
                {
                    "name": name,
                    "m": m,
                    "chi": chi,
                    "frac": str(f),
                    "frac_approx": round(float(f), 12),
                    "delta": delta,
                    "C": c,
                    "index_at_2m": i2m,
                }
                for name, m, chi, f, delta, c, i2m in zip(
                    self.names, self.m, self.chi, self.fracs, self.deltas,
                    self.jump_constants, self.index_at_2m)
            ],
            "relations": self.relations,
            "rejected_candidates": self.rejected,
        }


def _inverse_scaled_means(records: Sequence[GeodesicRecord], Mbar: int) -> list[ExactScalar]:
    out = []
    for rec in records:
        mean = rec.mean_index
        if mean <= 0:
            raise ValueError(f"{rec.name}: mean index {mean} is not positive")
        out.append((mean * Mbar).reciprocal())
    return out


def admissible_chi(N: int, inv: Sequence[ExactScalar], eps: Fraction):
    """Exact test of the fractional-part condition; ``(chi, fracs)`` or ``None``.

    ``chi_k = 0`` is preferred when both 0 and 1 are within ``eps``.
    """
    chis, fracs = [], []
    for v in inv:
        f = v.frac_of_multiple(N)
        if f < eps:
            chis.append(0)
        elif 1 - f < eps:
            chis.append(1)
        else:
            return None
        fracs.append(f)
    return tuple(chis), tuple(fracs)


def _float_margin(inv: Sequence[ExactScalar], n_max: int) -> float:
    scale = max(abs(float(v.a)) + abs(float(v.b)) * math.sqrt(v.radicand or 0) for v in inv)
    return 1e-9 + 64 * np.finfo(float).eps * scale * max(n_max, 1)


def _chunk_candidates(args) -> np.ndarray:
    lo, hi, step, vf, thr = args
    ns = np.arange(lo, hi + 1, step, dtype=np.float64)
    keep = np.ones(ns.shape, dtype=bool)
    for v in vf:
        prod = ns * v
        fr = prod - np.floor(prod)
        keep &= np.minimum(fr, 1.0 - fr) < thr
        if not keep.any():
            break
    return ns[keep].astype(np.int64)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _scan(inv: Sequence[ExactScalar], eps: Fraction, m0: int, start: int,
          n_max: int) -> Iterator[tuple[int, tuple, tuple]]:
    """Admissible ``N`` in increasing order, ``start <= N <= n_max``, ``m0 | N``."""
    if n_max >= 2 ** 52:
        raise ValueError("n_max too large for the float prefilter")
    first = max(m0, -(-start // m0) * m0)
    if eps > Fraction(1, 2):
        # every fractional part is within 1/2 of 0 or 1
        for N in range(first, n_max + 1, m0):
            hit = admissible_chi(N, inv, eps)
            if hit:
                yield (N, *hit)
        return
    vf = [float(v) for v in inv]
    thr = float(eps) + _float_margin(inv, n_max)
    span = _CHUNK * m0
    starts = list(range(first, n_max + 1, span))
    workers = _workers()
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for b in range(0, len(starts), workers):
            batch = [(lo, min(lo + span - m0, n_max), m0, vf, thr) for lo in starts[b:b + workers]]
            results = pool.map(_chunk_candidates, batch) if pool else map(_chunk_candidates, batch)
            for cands in results:
                for N in cands.tolist():
                    hit = admissible_chi(N, inv, eps)
                    if hit:
                        yield (N, *hit)
    finally:
        if pool:
            pool.shutdown()


def first_admissible_cf(alpha: ExactScalar, eps: Fraction, limit: int) -> Optional[int]:
    """Smallest ``t >= 1`` with ``||t * alpha|| < eps`` via continued fractions.

    The successive minima of the distance to the nearest integer are attained
    exactly at convergent denominators, so the first convergent denominator
    below ``eps`` is the minimal one.
    """
    x = alpha.frac()
    q_prev, q = 0, 1
    while q <= limit:
        f = alpha.frac_of_multiple(q)
        if f < eps or 1 - f < eps:
            return q
        if x == 0:
            return None
        x = x.reciprocal()
        a = x.floor()
        x = x - a
        q_prev, q = q, a * q + q_prev
    return None


def verify_tuple(records: Sequence[GeodesicRecord], N: int, m: Sequence[int],
                 mbar: int) -> tuple[list[str], dict]:
    """Check the common index jump relations by direct index evaluation.

    Returns ``(failures, info)``; ``info`` carries ``deltas``, ``C``,
    ``index_at_2m`` and per-geodesic relation records.
    """
    failures: list[str] = []
    deltas, consts, at2m, relations = [], [], [], []
    if mbar + 2 > 2 * min(m):
        failures.append(f"mbar+2={mbar + 2} exceeds 2*min(m_k)={2 * min(m)}")
    for rec, mk in zip(records, m):
        if mk < 1 or 2 * mk - mbar < 1:
            failures.append(f"{rec.name}: m_k={mk} too small for mbar={mbar}")
            deltas.append(None)
            consts.append(rec.profile.total_minus)
            at2m.append(None)
            continue
        prof = rec.profile
        s_plus = prof.s_plus_at_one
        c_k = prof.total_minus
        ups, downs = [], []
        for j in range(1, mbar + 1):
            base = rec.index(j)
            nu = rec.nullity(j)
            if not (rec.nullity(2 * mk - j) == rec.nullity(2 * mk + j) == nu):
                failures.append(f"{rec.name}: nullity mismatch at m={j}")
            up = rec.index(2 * mk + j)
            if up != 2 * N + base:
                failures.append(f"{rec.name}: i(c^{2 * mk + j})={up} != 2N+i(c^{j})={2 * N + base}")
            q_km = sum(sm for t, (_, sm) in prof.values.items()
                       if t != 0 and (t * (2 * mk)).is_integer and (t * j).is_integer)
            down = rec.index(2 * mk - j)
            expect = 2 * N - base - 2 * (s_plus + q_km)
            if down != expect:
                failures.append(f"{rec.name}: i(c^{2 * mk - j})={down} != {expect}")
            ups.append({"m": j, "index": up, "expected": 2 * N + base, "margin": up - 2 * N - base})
            downs.append({"m": j, "index": down, "expected": expect, "margin": down - expect})
        i2m = rec.index(2 * mk)
        twice = i2m - 2 * N + s_plus + c_k
        delta = None
        if twice % 2:
            failures.append(f"{rec.name}: jump correction not integral (i(c^2m)={i2m})")
        elif not 0 <= twice // 2 <= c_k:
            failures.append(f"{rec.name}: jump correction {twice // 2} outside [0, {c_k}]")
        else:
            delta = twice // 2
        deltas.append(delta)
        consts.append(c_k)
        at2m.append(i2m)
        relations.append({"name": rec.name, "plus": ups, "minus": downs,
                          "at_2m": {"index": i2m, "two_N": 2 * N, "delta": delta, "C": c_k}})
    return failures, {"deltas": deltas, "C": consts, "index_at_2m": at2m, "relations": relations}


def _candidates(cfg: GeodesicConfig, params: SearchParameters, eps: Fraction,
                n_max: int, strategy: str, start: int = 1):
    inv = _inverse_scaled_means(cfg.geodesics, params.rational_period)
    m0 = params.n_divisor
    if strategy not in ("auto", "scan", "cf"):
        raise ValueError(f"unknown strategy {strategy!r}")
    use_cf = strategy == "cf" or (strategy == "auto" and len(inv) == 1)
    if use_cf and len(inv) != 1:
        raise ValueError("continued-fraction search needs a single geodesic")
    if use_cf and start <= m0:
        t = first_admissible_cf(inv[0] * m0, eps, n_max // m0)
        if t is None:
            return
        N = t * m0
        hit = admissible_chi(N, inv, eps)
        yield (N, *hit)
        start = N + 1
    yield from _scan(inv, eps, m0, start, n_max)


def _build(cfg, params, eps, N, chi, fracs, info, rejected) -> CijTuple:
    m = _m_values(cfg, params, N, chi)
    return CijTuple(N, m, chi, eps, params, tuple(cfg.names), fracs,
                    tuple(info["deltas"]), tuple(info["C"]), tuple(info["index_at_2m"]),
                    info["relations"], rejected)


def _m_values(cfg, params, N, chi):
    Mbar = params.rational_period
    return tuple(((N / (rec.mean_index * Mbar)).floor() + c) * Mbar
                 for rec, c in zip(cfg.geodesics, chi))


def find_tuple(cfg: GeodesicConfig, epsilon: Fraction, n_max: int, m0: Optional[int] = None,
               strict: bool = False, strategy: str = "auto",
               params: Optional[SearchParameters] = None) -> CijTuple:
    """Smallest admissible ``N <= n_max`` whose tuple passes verification.

    With ``strict`` the first admissible ``N`` must verify, else
    :class:`VerificationFailure` is raised; otherwise candidates failing
    verification are skipped and counted in ``rejected``.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not cfg.geodesics:
        raise ValueError("configuration has no geodesics")
    params = params or search_parameters(cfg, m0)
    rejected = 0
    first_failure = None
    for N, chi, fracs in _candidates(cfg, params, epsilon, n_max, strategy):
        m = _m_values(cfg, params, N, chi)
        failures, info = verify_tuple(cfg.geodesics, N, m, params.growth_threshold)
        if not failures:
            return _build(cfg, params, epsilon, N, chi, fracs, info, rejected)
        if strict:
            raise VerificationFailure(N, failures)
        rejected += 1
        if first_failure is None:
            first_failure = (N, failures)
    detail = f" ({rejected} admissible candidates failed verification, first N={first_failure[0]}: " \
             f"{first_failure[1][0]})" if first_failure else ""
    raise SearchExhausted(f"no admissible N <= {n_max} with M0={params.n_divisor}{detail}",
                          rejected=[first_failure] if first_failure else [])


def find_paired_tuple(cfg: GeodesicConfig, first: CijTuple, epsilon: Fraction, n_max: int,
                      strategy: str = "scan") -> CijTuple:
    """A second verified tuple whose jump corrections complement the first."""
    epsilon = Fraction(epsilon)
    params = first.params
    want = tuple(c - d for c, d in zip(first.jump_constants, first.deltas))
    rejected = 0
    for N, chi, fracs in _candidates(cfg, params, epsilon, n_max,
                                     "scan" if strategy == "auto" else strategy):
        if N == first.N:
            continue
        m = _m_values(cfg, params, N, chi)
        failures, info = verify_tuple(cfg.geodesics, N, m, params.growth_threshold)
        if failures:
            rejected += 1
            continue
        if tuple(info["deltas"]) == want:
            return _build(cfg, params, epsilon, N, chi, fracs, info, rejected)
    raise SearchExhausted(f"no complementary tuple with N' <= {n_max} "
                          f"(wanted deltas {list(want)})")


@dataclass
class Claim3Result:
    passed: bool
    lhs: Fraction
    rhs: Fraction
    threshold: Fraction

    def as_dict(self) -> dict:
        return {"passed": self.passed, "sum_2m_gamma": str(self.lhs), "two_N_B": str(self.rhs),
                "epsilon_threshold": str(self.threshold)}


def claim3_check(cfg: GeodesicConfig, tup: CijTuple,
                 resonance: Optional[ResonanceResult] = None) -> Claim3Result:
    """Exact ``sum_k 2 m_k gamma_k == 2 N B(d, n)``.

    Raises :class:`Claim3PreconditionError` when the hypotheses fail:
    resonance, ``epsilon`` below threshold, ``2 N B`` an even integer.
    """
    if resonance is not None and not resonance.passed:
        raise Claim3PreconditionError("resonance identity does not hold")
    thr = claim3_threshold(cfg.geodesics, tup.params.rational_period)
    if not tup.epsilon < thr:
        raise Claim3PreconditionError(f"epsilon={tup.epsilon} not below threshold {thr}")
    rhs = 2 * tup.N * resonance_constant(cfg.manifold)
    if rhs.denominator != 1 or rhs.numerator % 2:
        raise Claim3PreconditionError(f"2NB = {rhs} is not an even integer")
    lhs = sum((2 * mk * rec.gamma for rec, mk in zip(cfg.geodesics, tup.m)), Fraction(0))
    return Claim3Result(lhs == rhs, lhs, rhs, thr)
