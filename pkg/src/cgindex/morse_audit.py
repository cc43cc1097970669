"""Morse-type numbers, Morse identities and the multiplicity audit.

The audit replays the counting argument for a finite configuration of
elliptic closed geodesics on a bumpy manifold of type ``T_{d,n+1}``: index
parity, the index lower bound, resonance, Morse identities in a finite window,
a verified common index jump tuple and its complementary partner, the
integer identity ``sum 2 m_k gamma_k = 2 N B``, and the bucket counts that pin
the number of geodesics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .cij_search import (
    Claim3PreconditionError,
    CijTuple,
    SearchExhausted,
    claim3_check,
    claim3_threshold,
    find_paired_tuple,
    find_tuple,
    search_parameters,
)
from .config import GeodesicConfig
from .exact_field import ExactScalar
from .index_iteration import GeodesicRecord, index_bounds, parity_check
from .loop_betti import BettiTable, betti_table, resonance_check
from .normal_form import validate

__all__ = [
    "MorseTable",
    "morse_numbers",
    "MorseIdentityResult",
    "morse_identity_check",
    "Claim2Result",
    "claim2_check",
    "BucketCounts",
    "classify_counts",
    "alternating_gamma_sum",
    "Check",
    "AuditReport",
    "audit",
    "EXIT_OK",
    "EXIT_STRUCTURAL",
    "EXIT_INVALID",
    "EXIT_EXHAUSTED",
]

EXIT_OK = 0
EXIT_STRUCTURAL = 2
EXIT_INVALID = 3
EXIT_EXHAUSTED = 4


@dataclass
class MorseTable:
    cutoff: int
    values: list[int]
    per_geodesic: dict[str, list[int]]
    contributors: dict[int, list[tuple[str, int]]]

    def __getitem__(self, p: int) -> int:
        if p < 0:
            return 0
        return self.values[p]

    def rows(self) -> list[tuple[int, int]]:
        return [(p, v) for p, v in enumerate(self.values) if v]


def _max_iterate(rec: GeodesicRecord, p: int) -> int:
    """Largest m that can have ``i(c^m) <= p``."""
    mean = rec.mean_index
    if mean <= 0:
        raise ValueError(f"{rec.name}: mean index {mean} is not positive")
    low, _ = index_bounds(rec.decomp)
    return (ExactScalar(p + low) / mean).floor()


def morse_numbers(cfg: GeodesicConfig, cutoff: int) -> MorseTable:
    """Count contributing iterates in every degree ``0..cutoff``.

    An iterate ``c^m`` contributes to degree ``i(c^m)`` iff ``i(c^m) - i(c)``
    is even.
    """
    values = [0] * (cutoff + 1)
    per: dict[str, list[int]] = {}
    contrib: dict[int, list[tuple[str, int]]] = {}
    for rec in cfg.geodesics:
        row = [0] * (cutoff + 1)
        base = rec.initial_index
        for m in range(1, _max_iterate(rec, cutoff) + 1):
            p = rec.index(m)
            if 0 <= p <= cutoff and (p - base) % 2 == 0:
                row[p] += 1
                values[p] += 1
                contrib.setdefault(p, []).append((rec.name, m))
        per[rec.name] = row
    return MorseTable(cutoff, values, per, contrib)


@dataclass
class MorseIdentityResult:
    passed: bool
    cutoff: int
    first_failure: Optional[int] = None
    failure_kind: Optional[str] = None
    morse: list[int] = field(default_factory=list)
    betti: list[int] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "cutoff": self.cutoff,
                "first_failure": self.first_failure, "failure_kind": self.failure_kind}


def morse_identity_check(cfg: GeodesicConfig, cutoff: int,
                         table: Optional[MorseTable] = None,
                         betti: Optional[BettiTable] = None) -> MorseIdentityResult:
    """Morse inequalities, then the bumpy-case equalities ``M_p = b_p``, for ``p <= cutoff``.

    Reports the smallest failing degree; inequality failures take precedence
    at equal degree.
    """
    table = table or morse_numbers(cfg, cutoff)
    betti = betti or betti_table(cfg.manifold, cutoff)
    mv = [table[p] for p in range(cutoff + 1)]
    bv = [betti[p] for p in range(cutoff + 1)]
    alt_m = alt_b = 0
    eq_fail = None
    for p in range(cutoff + 1):
        alt_m = mv[p] - alt_m
        alt_b = bv[p] - alt_b
        if mv[p] < bv[p]:
            return MorseIdentityResult(False, cutoff, p, "M_p < b_p", mv, bv)
        if alt_m < alt_b:
            return MorseIdentityResult(False, cutoff, p, "alternating sum inequality", mv, bv)
        if eq_fail is None and mv[p] != bv[p]:
            eq_fail = p
    if eq_fail is not None:
        return MorseIdentityResult(False, cutoff, eq_fail, "M_p != b_p", mv, bv)
    return MorseIdentityResult(True, cutoff, None, None, mv, bv)


@dataclass
class Claim2Result:
    passed: bool
    violations: list[str]

    def as_dict(self) -> dict:
        return {"passed": self.passed, "violations": self.violations}


def claim2_check(cfg: GeodesicConfig) -> Claim2Result:
    """Index lower bound ``i(c_k) >= d-1``, positive mean indices, unique ``d-1`` iterate."""
    d = cfg.manifold.d
    out = []
    for rec in cfg.geodesics:
        if rec.initial_index < d - 1:
            out.append(f"{rec.name}: i(c)={rec.initial_index} < d-1={d - 1}")
        if rec.mean_index <= 0:
            out.append(f"{rec.name}: mean index {rec.mean_index} is not positive")
    if out:
        return Claim2Result(False, out)
    table = morse_numbers(cfg, d - 1)
    hits = table.contributors.get(d - 1, [])
    if len(hits) != 1:
        out.append(f"M_(d-1) = {len(hits)} contributing iterates in degree {d - 1}, expected 1"
                   + (f": {hits}" if hits else ""))
    elif hits[0][1] != 1:
        out.append(f"the degree-{d - 1} iterate is {hits[0][0]}^{hits[0][1]}, expected m=1")
    return Claim2Result(not out, out)


@dataclass
class BucketCounts:
    plus: list[str]
    minus: list[str]
    at_2n: list[str]
    odd_d: bool

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.plus), len(self.minus), len(self.at_2n)

    def as_dict(self) -> dict:
        key = "hat_N" if self.odd_d else "N"
        return {f"{key}_plus": len(self.plus), f"{key}_minus": len(self.minus),
                "at_2N": list(self.at_2n), "plus": list(self.plus), "minus": list(self.minus)}


def classify_counts(cfg: GeodesicConfig, tup: CijTuple) -> BucketCounts:
    """Bucket each geodesic by ``i(c_k^{2 m_k})`` against ``2N``.

    Even d: ``>= 2N+1`` / ``<= 2N-1``.  Odd d: ``>= 2N+2`` / ``<= 2N-2`` and
    the exact ``2N`` list.  Values in the remaining gap (parity violations)
    land in no bucket.
    """
    odd = not cfg.manifold.even
    gap = 2 if odd else 1
    plus, minus, at = [], [], []
    for rec, mk in zip(cfg.geodesics, tup.m):
        v = rec.index(2 * mk)
        if v >= 2 * tup.N + gap:
            plus.append(rec.name)
        elif v <= 2 * tup.N - gap:
            minus.append(rec.name)
        elif v == 2 * tup.N:
            at.append(rec.name)
    return BucketCounts(plus, minus, at, odd)


def alternating_gamma_sum(rec: GeodesicRecord, mk: int) -> int:
    """Signed count of contributing iterates ``m <= 2 m_k``; equals ``2 m_k gamma`` under parity."""
    total = 0
    base = rec.initial_index
    for m in range(1, 2 * mk + 1):
        v = rec.index(m)
        if (v - base) % 2 == 0:
            total += -1 if v % 2 else 1
    return total


@dataclass
class Check:
    name: str
    status: str   # "pass" | "fail" | "skip"
    detail: dict = field(default_factory=dict)
    structural: bool = True

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


@dataclass
class AuditReport:
    manifold: tuple[int, int]
    q: int
    q_expected: int
    checks: list[Check] = field(default_factory=list)
    tuple_: Optional[CijTuple] = None
    paired: Optional[CijTuple] = None
    buckets: Optional[BucketCounts] = None
    paired_buckets: Optional[BucketCounts] = None
    morse_precheck: Optional[bool] = None
    exit_code: int = EXIT_OK
    aborted: Optional[str] = None

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def verdict(self) -> str:
        if self.exit_code == EXIT_INVALID:
            return "invalid"
        if self.exit_code == EXIT_EXHAUSTED:
            return "exhausted"
        return "pass" if all(c.status != "fail" for c in self.checks) else "fail"

    def as_dict(self) -> dict:
        out = {
            "schema": "cgindex.audit/1",
            "manifold": {"d": self.manifold[0], "n": self.manifold[1]},
            "q": self.q,
            "q_expected": self.q_expected,
            "verdict": self.verdict,
            "exit_code": self.exit_code,
            "morse_precheck": self.morse_precheck,
            "checks": [c.as_dict() for c in self.checks],
            "tuple": self.tuple_.as_dict() if self.tuple_ else None,
            "paired_tuple": self.paired.as_dict() if self.paired else None,
            "buckets": self.buckets.as_dict() if self.buckets else None,
            "paired_buckets": self.paired_buckets.as_dict() if self.paired_buckets else None,
        }
        if self.aborted:
            out["aborted"] = self.aborted
        return out


def _add(report: AuditReport, name: str, ok: Optional[bool], detail: Optional[dict] = None,
         structural: bool = True) -> Check:
    status = "skip" if ok is None else ("pass" if ok else "fail")
    c = Check(name, status, detail or {}, structural)
    report.checks.append(c)
    return c


def audit(cfg: GeodesicConfig, epsilon: Fraction, n_max: int, cutoff: Optional[int] = None,
          m0: Optional[int] = None, window: int = 200, strategy: str = "auto") -> AuditReport:
    """Run the full counting audit and collect per-check verdicts.

    ``cutoff`` bounds the Morse identity window (default ``2N+1``);
    ``window`` bounds the iterate ranges of the parity and monotonicity checks.
    """
    epsilon = Fraction(epsilon)
    mc = cfg.manifold
    q = len(cfg.geodesics)
    report = AuditReport((mc.d, mc.n), q, mc.expected_geodesics)

    # validation
    bad = {}
    for rec in cfg.geodesics:
        v = validate(rec.decomp, cfg.dn_minus_1, "bumpy_elliptic")
        if v:
            bad[rec.name] = [str(x) for x in v]
    _add(report, "validation", not bad and q > 0,
         {"violations": bad} if bad else ({"error": "no geodesics"} if q == 0 else {}))
    if bad or q == 0:
        report.exit_code = EXIT_INVALID
        report.aborted = "configuration is not a bumpy elliptic configuration"
        return report

    # parity of every iterate
    parity = {}
    for rec in cfg.geodesics:
        m = parity_check(rec, cfg.dn_minus_1, window)
        if m is not None:
            parity[rec.name] = {"m": m, "index": rec.index(m)}
    _add(report, "claim1_parity", not parity, {"window": window, "counterexamples": parity})

    c2 = claim2_check(cfg)
    _add(report, "claim2_index_bound", c2.passed, c2.as_dict())

    nonmono = {}
    for rec in cfg.geodesics:
        for m in range(2, window + 1):
            if rec.index(m) < rec.initial_index:
                nonmono[rec.name] = m
                break
    _add(report, "iterate_index_lower_bound", not nonmono,
         {"window": window, "first_violation": nonmono})

    res = resonance_check(cfg.geodesics, mc)
    _add(report, "resonance", res.passed,
         {"sum": str(res.total) if res.total is not None else None,
          "expected": str(res.expected),
          "residual": str(res.residual) if res.residual is not None else None,
          "residual_approx": res.residual_float, "error": res.error})
    if res.error:
        report.exit_code = EXIT_INVALID
        report.aborted = res.error
        return report

    params = search_parameters(cfg, m0)
    thr = claim3_threshold(cfg.geodesics, params.rational_period)
    try:
        tup = find_tuple(cfg, epsilon, n_max, params=params, strategy=strategy)
    except SearchExhausted as exc:
        _add(report, "cij_tuple", None, {"error": str(exc)})
        report.exit_code = EXIT_EXHAUSTED
        if cutoff is not None:
            _morse(report, cfg, cutoff)
        else:
            _add(report, "morse_identity", None, {"reason": "no tuple, so no default cutoff 2N+1"})
        return report
    report.tuple_ = tup
    _add(report, "cij_tuple", True, {"N": tup.N, "m": list(tup.m), "chi": list(tup.chi),
                                     "delta": list(tup.deltas), **params.as_dict()})

    P = cutoff if cutoff is not None else 2 * tup.N + 1
    table = _morse(report, cfg, max(P, 2 * tup.N + 1), report_cutoff=P)

    _window_bounds(report, cfg, tup, window)

    try:
        paired = find_paired_tuple(cfg, tup, epsilon, n_max, strategy="scan")
        report.paired = paired
        _add(report, "paired_tuple", True,
             {"N": paired.N, "m": list(paired.m), "delta": list(paired.deltas),
              "complementary": all(a + b == c for a, b, c in
                                   zip(tup.deltas, paired.deltas, tup.jump_constants))})
    except SearchExhausted as exc:
        _add(report, "paired_tuple", None, {"error": str(exc)})
        report.exit_code = EXIT_EXHAUSTED

    try:
        c3 = claim3_check(cfg, tup, res)
        c = _add(report, "claim3", c3.passed, c3.as_dict())
        if not c3.passed:
            c.detail["internal_inconsistency"] = True
    except Claim3PreconditionError as exc:
        _add(report, "claim3", None, {"precondition": str(exc), "epsilon_threshold": str(thr)})

    gam = {}
    for rec, mk in zip(cfg.geodesics, tup.m):
        got = alternating_gamma_sum(rec, mk)
        if got != 2 * mk * rec.gamma:
            gam[rec.name] = {"signed_count": got, "two_m_gamma": str(2 * mk * rec.gamma)}
    _add(report, "gamma_alternating_sum", not gam, {"mismatches": gam})

    buckets = classify_counts(cfg, tup)
    report.buckets = buckets
    plus, minus, at = buckets.counts
    partition_ok = plus + minus + at == q and (at == 0 or not mc.even)
    _add(report, "bucket_partition", partition_ok,
         {"plus": plus, "minus": minus, "at_2N": at, "q": q})
    if report.paired is not None:
        pb = classify_counts(cfg, report.paired)
        report.paired_buckets = pb
        swapped = set(pb.plus) == set(buckets.minus) and set(pb.minus) == set(buckets.plus)
        _add(report, "paired_bucket_swap", swapped, pb.as_dict())

    _alternating_identity(report, cfg, tup, table, buckets)

    # predicted counts, binding only when the Morse identities hold
    precheck = report.morse_precheck
    if mc.even:
        half = mc.dim * (mc.n + 1) // 4
        pred = {"N_plus": half, "N_minus": half, "q": mc.expected_geodesics}
        got = {"N_plus": plus, "N_minus": minus, "q": q}
    else:
        half = (mc.d - 1) // 2
        pred = {"hat_N_plus": half, "hat_N_minus": half, "at_2N": 2, "q": mc.expected_geodesics}
        got = {"hat_N_plus": plus, "hat_N_minus": minus, "at_2N": at, "q": q}
    match = all(got[k] == v for k, v in pred.items() if k in got)
    _add(report, "theorem_counts", match if precheck else None,
         {"predicted": pred, "observed": got,
          "conditional_on": "morse_identity",
          "note": None if precheck else "Morse identities fail: configuration is not realizable, "
                                        "counts reported but not asserted"},
         structural=bool(precheck))

    if any(c.status == "fail" for c in report.checks) and report.exit_code == EXIT_OK:
        report.exit_code = EXIT_STRUCTURAL
    return report


def _morse(report: AuditReport, cfg: GeodesicConfig, cutoff: int,
           report_cutoff: Optional[int] = None) -> MorseTable:
    table = morse_numbers(cfg, cutoff)
    rc = cutoff if report_cutoff is None else report_cutoff
    mi = morse_identity_check(cfg, rc, table=table)
    report.morse_precheck = mi.passed
    _add(report, "morse_identity", mi.passed, mi.as_dict())
    return table


def _window_bounds(report: AuditReport, cfg: GeodesicConfig, tup: CijTuple, window: int) -> None:
    bad = {}
    N = tup.N
    for rec, mk in zip(cfg.geodesics, tup.m):
        i1 = rec.initial_index
        for m in range(1, 2 * mk):
            if rec.index(2 * mk - m) > 2 * N - i1:
                bad[rec.name] = f"i(c^{2 * mk - m}) > 2N - i(c)"
                break
        else:
            for m in range(1, window + 1):
                if rec.index(2 * mk + m) < 2 * N + i1:
                    bad[rec.name] = f"i(c^{2 * mk + m}) < 2N + i(c)"
                    break
    _add(report, "window_bounds", not bad, {"violations": bad, "window": window})


def _alternating_identity(report: AuditReport, cfg: GeodesicConfig, tup: CijTuple,
                          table: MorseTable, buckets: BucketCounts) -> None:
    """``sum_{p<=top} (-1)^p M_p`` against ``sum 2 m_k gamma_k`` minus the iterates above the window."""
    top = 2 * tup.N + (0 if cfg.manifold.even else 1)
    lhs = sum((-1) ** p * table[p] for p in range(top + 1))
    rhs = sum(2 * mk * rec.gamma for rec, mk in zip(cfg.geodesics, tup.m))
    for rec, mk in zip(cfg.geodesics, tup.m):
        v = rec.index(2 * mk)
        if v > top and (v - rec.initial_index) % 2 == 0:
            rhs -= (-1) ** v
    _add(report, "morse_alternating_sum", lhs == rhs,
         {"window_top": top, "morse_side": lhs, "tuple_side": str(rhs)})
