"""Serialization of results as text, JSON or CSV.

Every report carries a JSON body (versioned by ``schema``), an optional main
table used for CSV, and text lines.  Output is a pure function of the report,
so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .config import GeodesicConfig
from .loop_betti import BettiTable, ResonanceResult
from .morse_audit import AuditReport, MorseIdentityResult, MorseTable
from .normal_form import classify, validate

__all__ = [
    "SCHEMA_VERSION",
    "Table",
    "Report",
    "emit_report",
    "betti_report",
    "iterate_report",
    "classify_report",
    "resonance_report",
    "morse_report",
    "cij_report",
    "audit_report",
    "synthesis_report",
]

SCHEMA_VERSION = 1
FORMATS = ("text", "json", "csv")


@dataclass
class Table:
    columns: list[str]
    rows: list[Sequence] = field(default_factory=list)


@dataclass
class Report:
    kind: str
    data: dict
    table: Optional[Table] = None
    lines: list[str] = field(default_factory=list)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


def emit_report(report: Report, fmt: str = "text") -> bytes:
    if fmt == "json":
        body = {"schema": f"cgindex.{report.kind}/{SCHEMA_VERSION}", **report.data}
        return (json.dumps(_jsonable(body), indent=2, ensure_ascii=False) + "\n").encode()
    if fmt == "csv":
        table = report.table or Table(["key", "value"],
                                      [(k, json.dumps(_jsonable(v), ensure_ascii=False)
                                        if isinstance(v, (dict, list)) else v)
                                       for k, v in report.data.items()])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_jsonable(v) for v in row])
        return buf.getvalue().encode()
    if fmt == "text":
        lines = list(report.lines)
        if report.table is not None and report.table.rows:
            lines.append("  ".join(report.table.columns))
            lines += ["  ".join(str(v) for v in row) for row in report.table.rows]
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}, expected one of {FORMATS}")


def betti_report(table: BettiTable) -> Report:
    mc = table.manifold
    rows = table.rows()
    data = {"manifold": {"d": mc.d, "n": mc.n}, "max_k": table.max_degree,
            "literal_omega": table.literal_omega,
            "betti": [{"degree": i, "b": b} for i, b in rows],
            "partial_sum": table.partial_sums()[-1] if table.values else 0}
    lines = [f"Betti numbers of the loop space quotient, d={mc.d} n={mc.n}, degrees <= {table.max_degree}"
             + (" (literal exceptional set)" if table.literal_omega else "")]
    return Report("betti", data, Table(["degree", "betti"], rows), lines)


def iterate_report(cfg: GeodesicConfig, max_m: int, names: Optional[list[str]] = None) -> Report:
    rows = []
    per = {}
    for rec in cfg.geodesics:
        if names and rec.name not in names:
            continue
        seq = [(m, rec.index(m), rec.nullity(m)) for m in range(1, max_m + 1)]
        per[rec.name] = [{"m": m, "index": i, "nullity": v} for m, i, v in seq]
        rows += [(rec.name, m, i, v) for m, i, v in seq]
    if names:
        missing = sorted(set(names) - set(per))
        if missing:
            raise KeyError(f"unknown geodesic(s): {', '.join(missing)}")
    return Report("iterate", {"max_m": max_m, "geodesics": per},
                  Table(["geodesic", "m", "index", "nullity"], rows),
                  [f"iterated indices i(c^m), nu(c^m) for m <= {max_m}"])


def classify_report(cfg: GeodesicConfig) -> Report:
    rows, per, lines = [], [], []
    for rec in cfg.geodesics:
        c = classify(rec.decomp)
        bumpy = [str(v) for v in validate(rec.decomp, cfg.dn_minus_1, "bumpy_elliptic")]
        parity = rec.initial_index % 2 == cfg.dn_minus_1 % 2
        entry = {"name": rec.name, "initial_index": rec.initial_index,
                 "elliptic_height": c.elliptic_height, "elliptic": c.elliptic,
                 "hyperbolic": c.hyperbolic, "nondegenerate": c.nondegenerate,
                 "irrationally_elliptic": c.irrationally_elliptic,
                 "bumpy_elliptic": not bumpy, "parity_ok": parity,
                 "mean_index": str(rec.mean_index), "gamma": str(rec.gamma),
                 "violations": bumpy}
        per.append(entry)
        rows.append((rec.name, rec.initial_index, c.elliptic_height, c.elliptic,
                     c.irrationally_elliptic, not bumpy, parity, str(rec.mean_index), str(rec.gamma)))
        lines += [f"  {rec.name}: {v}" for v in bumpy]
    head = [f"{len(per)} geodesic(s), d={cfg.manifold.d} n={cfg.manifold.n}"]
    return Report("classify", {"geodesics": per},
                  Table(["name", "initial_index", "elliptic_height", "elliptic",
                         "irrationally_elliptic", "bumpy_elliptic", "parity_ok",
                         "mean_index", "gamma"], rows), head + lines)


def resonance_report(cfg: GeodesicConfig, res: ResonanceResult) -> Report:
    terms = [(rec.name, str(rec.gamma), str(rec.mean_index)) for rec in cfg.geodesics]
    data = {"passed": res.passed, "sum": res.total, "expected": res.expected,
            "residual": res.residual, "residual_approx": res.residual_float, "error": res.error,
            "terms": [{"name": n, "gamma": g, "mean_index": m} for n, g, m in terms]}
    verdict = "pass" if res.passed else "fail"
    lines = [f"resonance {verdict}: sum gamma/mean = {res.total}, expected {res.expected}"]
    if res.error:
        lines.append(f"error: {res.error}")
    elif not res.passed:
        lines.append(f"residual {res.residual} (~{res.residual_float:.3e})")
    return Report("resonance", data, Table(["name", "gamma", "mean_index"], terms), lines)


def morse_report(cfg: GeodesicConfig, table: MorseTable, identity: MorseIdentityResult) -> Report:
    rows = [(p, name, m) for p in sorted(table.contributors) for name, m in table.contributors[p]]
    data = {"cutoff": table.cutoff, "M": table.values, "b": identity.betti,
            "identity": identity.as_dict(),
            "contributors": [{"degree": p, "geodesic": n, "m": m} for p, n, m in rows]}
    lines = [f"Morse identity up to p={table.cutoff}: "
             + ("pass" if identity.passed
                else f"fail at p={identity.first_failure} ({identity.failure_kind})")]
    lines += [f"  p={p}: M={table[p]} b={identity.betti[p]}"
              for p in range(table.cutoff + 1) if table[p] or identity.betti[p]]
    return Report("morse", data, Table(["degree", "geodesic", "m"], rows), lines)


def cij_report(tup, paired=None, paired_error: Optional[str] = None) -> Report:
    data = {"tuple": tup.as_dict()}
    if paired is not None or paired_error is not None:
        data["paired_tuple"] = paired.as_dict() if paired is not None else None
        data["paired_error"] = paired_error
    rows = []
    for label, t in (("first", tup), ("paired", paired)):
        if t is None:
            continue
        for name, mk, chi, delta, c, i2 in zip(t.names, t.m, t.chi, t.deltas,
                                               t.jump_constants, t.index_at_2m):
            rows.append((label, t.N, name, mk, chi, delta, c, i2))
    lines = [f"N={tup.N} (M0={tup.params.n_divisor}, epsilon={tup.epsilon})"]
    if paired is not None:
        lines.append(f"paired N'={paired.N}")
    if paired_error:
        lines.append(f"paired search: {paired_error}")
    return Report("cij", data, Table(["tuple", "N", "geodesic", "m", "chi", "delta", "C",
                                      "index_at_2m"], rows), lines)


def audit_report(rep: AuditReport) -> Report:
    data = rep.as_dict()
    data.pop("schema", None)
    rows = [(c.name, c.status) for c in rep.checks]
    lines = [f"audit d={rep.manifold[0]} n={rep.manifold[1]}: q={rep.q} (expected {rep.q_expected}), "
             f"verdict {rep.verdict}, exit {rep.exit_code}"]
    if rep.aborted:
        lines.append(f"aborted: {rep.aborted}")
    if rep.buckets is not None:
        b = rep.buckets
        lines.append(f"buckets plus={len(b.plus)} minus={len(b.minus)} at 2N={len(b.at_2n)}")
    return Report("audit", data, Table(["check", "status"], rows), lines)


def synthesis_report(result) -> Report:
    from .config import emit_config
    data = {"result": result.as_dict(), "config": emit_config(result.config)}
    lines = [f"morse window {result.window}: " + ("pass" if result.morse_passed
                                                  else f"first failure at p={result.morse_first_failure}"),
             f"attempts used: {result.attempts_used}"]
    return Report("synthesis", data, None, lines)
