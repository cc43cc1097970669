"""Geodesic configuration files: parsing, validation and byte-stable emission.

A configuration is a TOML document::

    [manifold]
    d = 2
    n = 1

    [field]
    radicand = 2

    [[geodesic]]
    name = "c1"
    initial_index = 1
    blocks = [{ type = "R", angle = { a = "0", b = "1/2" } }]

Scalars are exact strings (``"1/2"``, ``"3/14√2"``) or ``{a, b}`` tables over
the declared radicand.  Floating literals are rejected everywhere.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Optional

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .exact_field import ExactScalar, ScalarParseError, is_squarefree
from .index_iteration import GeodesicRecord
from .loop_betti import ManifoldClass
from .normal_form import (
    Block,
    HBlock,
    N1Block,
    N2Block,
    PoincareDecomposition,
    RotationBlock,
    validate,
)

__all__ = [
    "GeodesicConfig",
    "ConfigIssue",
    "ConfigError",
    "parse_config",
    "load_config",
    "emit_config",
]


@dataclass(frozen=True)
class ConfigIssue:
    path: str
    message: str
    line: Optional[int] = None
    column: Optional[int] = None

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}, column {self.column}: {self.message}"
        return f"{self.path}: {self.message}"


class ConfigError(ValueError):
    def __init__(self, issues: list[ConfigIssue]) -> None:
        self.issues = issues
        super().__init__("; ".join(str(i) for i in issues))


@dataclass(frozen=True)
class GeodesicConfig:
    manifold: ManifoldClass
    radicand: Optional[int]
    geodesics: tuple[GeodesicRecord, ...]
    description: str = ""
    source: str = ""

    @property
    def dn_minus_1(self) -> int:
        return self.manifold.dim - 1

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.geodesics]

    def record(self, name: str) -> GeodesicRecord:
        for g in self.geodesics:
            if g.name == name:
                return g
        raise KeyError(name)

    def with_geodesics(self, geodesics) -> GeodesicConfig:
        return GeodesicConfig(self.manifold, self.radicand, tuple(geodesics),
                              self.description, self.source)


_LINECOL = re.compile(r"\(at line (\d+), column (\d+)\)")


class _Collector:
    def __init__(self) -> None:
        self.issues: list[ConfigIssue] = []

    def err(self, path: str, msg: str) -> None:
        self.issues.append(ConfigIssue(path, msg))


def _find_floats(node: Any, path: str, col: _Collector) -> None:
    if isinstance(node, float):
        col.err(path, "floating literal forbidden; write exact values as strings like \"1/2\"")
    elif isinstance(node, dict):
        for k, v in node.items():
            _find_floats(v, f"{path}.{k}" if path else k, col)
    elif isinstance(node, list):
        for i, v in enumerate(node):
            _find_floats(v, f"{path}[{i}]", col)


def _int(node: dict, key: str, path: str, col: _Collector, required: bool = True) -> Optional[int]:
    if key not in node:
        if required:
            col.err(f"{path}.{key}", "missing")
        return None
    v = node[key]
    if isinstance(v, bool) or not isinstance(v, int):
        if not isinstance(v, float):
            col.err(f"{path}.{key}", f"expected an integer, got {v!r}")
        return None
    return v


def _scalar(node: Any, path: str, radicand: Optional[int], col: _Collector) -> Optional[ExactScalar]:
    try:
        if isinstance(node, str):
            x = ExactScalar.parse(node)
        elif isinstance(node, dict):
            unknown = set(node) - {"a", "b"}
            if unknown:
                col.err(path, f"unknown keys {sorted(unknown)}")
                return None
            parts = []
            for key in ("a", "b"):
                v = node.get(key, "0")
                if isinstance(v, bool) or not isinstance(v, (str, int)):
                    if not isinstance(v, float):
                        col.err(f"{path}.{key}", f"expected an exact string, got {v!r}")
                    return None
                parts.append(ExactScalar.parse(str(v)))
            if not (parts[0].is_rational and parts[1].is_rational):
                col.err(path, "table components a and b must be rational")
                return None
            if parts[1].a != 0 and radicand is None:
                col.err(path, "irrational part given but [field] radicand is not declared")
                return None
            x = ExactScalar(parts[0].a, parts[1].a, radicand)
        elif isinstance(node, int) and not isinstance(node, bool):
            x = ExactScalar(node)
        else:
            if not isinstance(node, float):
                col.err(path, f"expected an exact scalar, got {node!r}")
            return None
    except (ScalarParseError, ValueError) as exc:
        col.err(path, str(exc))
        return None
    if x.radicand is not None and x.radicand != radicand:
        col.err(path, f"scalar uses √{x.radicand} but the configuration field is "
                      + (f"Q(√{radicand})" if radicand else "Q (no radicand declared)"))
        return None
    return x


def _block(node: Any, path: str, radicand: Optional[int], col: _Collector) -> Optional[Block]:
    if not isinstance(node, dict):
        col.err(path, "block must be a table")
        return None
    kind = node.get("type")
    allowed = {"N1": {"type", "eigenvalue", "a"}, "H": {"type", "sign"},
               "R": {"type", "angle"}, "N2": {"type", "angle", "kind"}}
    if kind not in allowed:
        col.err(f"{path}.type", f"block type must be one of N1, H, R, N2, got {kind!r}")
        return None
    unknown = set(node) - allowed[kind]
    if unknown:
        col.err(path, f"unknown keys {sorted(unknown)} for {kind} block")
    if kind == "N1":
        lam = _int(node, "eigenvalue", path, col)
        a = _int(node, "a", path, col)
        if lam is None or a is None:
            return None
        return N1Block(lam, a)
    if kind == "H":
        s = node.get("sign")
        sign = {"+": 1, "-": -1, 1: 1, -1: -1}.get(s) if not isinstance(s, bool) else None
        if sign is None:
            col.err(f"{path}.sign", f"sign must be \"+\" or \"-\", got {s!r}")
            return None
        return HBlock(sign)
    if "angle" not in node:
        col.err(f"{path}.angle", "missing")
        return None
    x = _scalar(node["angle"], f"{path}.angle", radicand, col)
    if x is None:
        return None
    if kind == "R":
        return RotationBlock(x)
    flavor = node.get("kind")
    if flavor not in ("trivial", "nontrivial"):
        col.err(f"{path}.kind", f"N2 kind must be \"trivial\" or \"nontrivial\", got {flavor!r}")
        return None
    return N2Block(x, flavor == "nontrivial")


def parse_config(text: str) -> GeodesicConfig:
    """Parse and validate configuration text; raises :class:`ConfigError`."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _LINECOL.search(str(exc))
        line, column = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise ConfigError([ConfigIssue("", f"syntax error: {exc}", line, column)]) from None
    col = _Collector()
    _find_floats(doc, "", col)

    unknown = set(doc) - {"manifold", "field", "meta", "geodesic"}
    if unknown:
        col.err("", f"unknown sections {sorted(unknown)}")

    man = doc.get("manifold")
    manifold = None
    if not isinstance(man, dict):
        col.err("manifold", "missing [manifold] section")
    else:
        d = _int(man, "d", "manifold", col)
        n = _int(man, "n", "manifold", col)
        if d is not None and n is not None:
            try:
                manifold = ManifoldClass(d, n)
            except ValueError as exc:
                col.err("manifold", str(exc))

    radicand = None
    fld = doc.get("field", {})
    if not isinstance(fld, dict):
        col.err("field", "[field] must be a table")
    elif "radicand" in fld:
        radicand = _int(fld, "radicand", "field", col)
        if radicand is not None and (radicand < 2 or not is_squarefree(radicand)):
            col.err("field.radicand", f"radicand must be square-free and >= 2, got {radicand}")
            radicand = None

    meta = doc.get("meta", {})
    description = source = ""
    if isinstance(meta, dict):
        description = str(meta.get("description", ""))
        source = str(meta.get("source", ""))

    records: list[GeodesicRecord] = []
    seen: set[str] = set()
    geos = doc.get("geodesic", [])
    if not isinstance(geos, list):
        col.err("geodesic", "use [[geodesic]] array-of-tables")
        geos = []
    for gi, g in enumerate(geos):
        path = f"geodesic[{gi}]"
        if not isinstance(g, dict):
            col.err(path, "must be a table")
            continue
        name = g.get("name")
        if not isinstance(name, str) or not name:
            col.err(f"{path}.name", "missing or empty name")
            continue
        if name in seen:
            col.err(f"{path}.name", f"duplicate geodesic name {name!r}")
        seen.add(name)
        idx = _int(g, "initial_index", path, col)
        if idx is not None and idx < 0:
            col.err(f"{path}.initial_index", "must be non-negative")
        raw_blocks = g.get("blocks", [])
        if not isinstance(raw_blocks, list):
            col.err(f"{path}.blocks", "must be an array of block tables")
            continue
        blocks = []
        for bi, b in enumerate(raw_blocks):
            blk = _block(b, f"{path}.blocks[{bi}]", radicand, col)
            if blk is not None:
                blocks.append(blk)
        if len(blocks) != len(raw_blocks) or idx is None:
            continue
        decomp = PoincareDecomposition(blocks)
        target = manifold.dim - 1 if manifold is not None else None
        for v in validate(decomp, target, "general"):
            where = f"{path}.blocks[{v.block}]" if v.block is not None else f"{path}.blocks"
            col.err(where, v.message)
        records.append(GeodesicRecord(name, idx, decomp))

    if col.issues:
        raise ConfigError(col.issues)
    return GeodesicConfig(manifold, radicand, tuple(records), description, source)


def load_config(path: str) -> GeodesicConfig:
    if path == "-":
        import sys
        return parse_config(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _q(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _emit_scalar(x: ExactScalar) -> str:
    def frac(q):
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    if x.is_rational:
        return _q(frac(x.a))
    return "{ a = %s, b = %s }" % (_q(frac(x.a)), _q(frac(x.b)))


def _emit_block(b: Block) -> str:
    if isinstance(b, N1Block):
        return f'{{ type = "N1", eigenvalue = {b.eigenvalue}, a = {b.a} }}'
    if isinstance(b, HBlock):
        return '{ type = "H", sign = "%s" }' % ("+" if b.sign > 0 else "-")
    if isinstance(b, RotationBlock):
        return '{ type = "R", angle = %s }' % _emit_scalar(b.angle)
    return '{ type = "N2", angle = %s, kind = "%s" }' % (
        _emit_scalar(b.angle), "nontrivial" if b.nontrivial else "trivial")


def emit_config(cfg: GeodesicConfig) -> str:
    lines = []
    if cfg.description or cfg.source:
        lines += ["[meta]", f"description = {_q(cfg.description)}", f"source = {_q(cfg.source)}", ""]
    lines += ["[manifold]", f"d = {cfg.manifold.d}", f"n = {cfg.manifold.n}", ""]
    if cfg.radicand is not None:
        lines += ["[field]", f"radicand = {cfg.radicand}", ""]
    for g in cfg.geodesics:
        lines += ["[[geodesic]]", f"name = {_q(g.name)}", f"initial_index = {g.initial_index}",
                  "blocks = ["]
        lines += [f"  {_emit_block(b)}," for b in g.decomp.blocks]
        lines += ["]", ""]
    return "\n".join(lines)
