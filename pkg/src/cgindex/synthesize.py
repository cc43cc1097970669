"""Random generator of resonance-exact geodesic configurations.

Candidates come from a rotation model: a round metric perturbed by a
torus of rotations (Katok-type).  Each prime closed geodesic lies on a
projective line ``KP^1 = S^d`` spanned by two coordinates and is traversed in
one of two directions; its normal rotation numbers are ratios of the rotation
weights.  The mean indices satisfy the resonance identity exactly for any
admissible weights.  For spheres and complex projective spaces the
resulting index sequences also satisfy the Morse identities; for the other
classes the model is a heuristic and the Morse window is best-effort.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .config import GeodesicConfig, emit_config, parse_config
from .exact_field import ExactScalar
from .index_iteration import GeodesicRecord
from .loop_betti import ManifoldClass, resonance_check
from .morse_audit import claim2_check, morse_identity_check
from .normal_form import PoincareDecomposition, RotationBlock, validate

__all__ = ["SynthesisExhausted", "SynthesisResult", "synthesize_config", "rotation_model"]

RADICANDS = (2, 3, 5, 6, 7, 10, 11, 13)


class SynthesisExhausted(RuntimeError):
    """No structurally valid candidate within the attempt budget."""


@dataclass
class SynthesisResult:
    config: GeodesicConfig
    morse_passed: bool
    morse_first_failure: Optional[int]
    window: int
    attempts_used: int
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"morse_passed": self.morse_passed, "morse_first_failure": self.morse_first_failure,
                "window": self.window, "attempts_used": self.attempts_used, **self.diagnostics}


def _frac(x: ExactScalar) -> ExactScalar:
    return x - x.floor()


def _geodesic(name: str, d: int, n: int, den: ExactScalar, line_rotations: list,
              twists: list) -> GeodesicRecord:
    # rotation numbers of the normal directions inside the projective line
    turns = []
    for b in line_rotations:
        turns += [(1 + b) / den, (1 - b) / den]
    if d % 2 == 0:
        turns.append(ExactScalar(1) / den)
    angles = [_frac(t) for t in turns]
    # directions transverse to the line: twisted pairs around a half turn
    base = ExactScalar(1) / (2 * den) + Fraction(1, 2)
    for tau in twists:
        angles += [_frac(base + tau / (2 * den)), _frac(base - tau / (2 * den))]
    mean = sum((2 * t for t in turns), ExactScalar(0)) + ExactScalar(d * (n - 1)) / den
    index = mean + len(angles) - 2 * sum(angles, ExactScalar(0))
    if not index.is_integer:
        raise ArithmeticError(f"{name}: non-integral initial index {index}")
    return GeodesicRecord(name, int(index.a), PoincareDecomposition([RotationBlock(x) for x in angles]))


def rotation_model(mc: ManifoldClass, weights: list[list[ExactScalar]], radicand: int,
                   signs: Optional[tuple[int, ...]] = None) -> GeodesicConfig:
    """Geodesic configuration of the rotation model.

    For ``n = 1`` ``weights[0]`` holds the plane weights of the sphere
    (``(d+1)//2`` of them).  For ``n > 1`` ``weights[j]`` holds ``d//2``
    weights of coordinate ``j``.
    """
    d, n = mc.d, mc.n
    records: list[GeodesicRecord] = []
    if n == 1:
        lines = [(weights[0], {})]
    else:
        k = d // 2
        signs = signs or tuple(1 if c % 2 == 0 else -1 for c in range(k))
        lines = []
        for j, l in itertools.combinations(range(n + 1), 2):
            rot = [(weights[j][c] - weights[l][c]) / 2 for c in range(k)]
            tw = {p: [s * (weights[p][c] - (weights[j][c] + weights[l][c]) / 2)
                      for c, s in zip(range(k), signs)]
                  for p in range(n + 1) if p not in (j, l)}
            lines.append((rot, tw))
    for rot, tw in lines:
        twists = [t for p in sorted(tw) for t in tw[p]]
        for c, b in enumerate(rot):
            others = [x for i, x in enumerate(rot) if i != c]
            for s in (1, -1):
                name = f"c{len(records) + 1}"
                records.append(_geodesic(name, d, n, 1 + s * b, others, twists))
    return GeodesicConfig(mc, radicand, tuple(records))


def _random_weight(rng: random.Random, radicand: int, bound: float) -> ExactScalar:
    while True:
        w = ExactScalar(0, Fraction(rng.randint(1, 60), rng.randint(61, 200)), radicand)
        if float(w) < bound:
            return w


def _draw(mc: ManifoldClass, rng: random.Random) -> tuple[list, int]:
    D = rng.choice(RADICANDS)
    if mc.n == 1:
        k = (mc.d + 1) // 2
        return [[_random_weight(rng, D, 0.9) for _ in range(k)]], D
    return [[_random_weight(rng, D, 0.45) for _ in range(mc.d // 2)] for _ in range(mc.n + 1)], D


def synthesize_config(d: int, n: int, seed: int = 0, attempts: int = 50,
                      window: int = 60) -> SynthesisResult:
    """Search the rotation model for a config with exact resonance and the index lower bound.

    Returns the first candidate passing the Morse identities up to ``window``,
    else the candidate whose first Morse failure is highest.
    """
    mc = ManifoldClass(d, n)
    rng = random.Random(seed)
    best: Optional[SynthesisResult] = None
    rejected = 0
    for attempt in range(1, attempts + 1):
        weights, D = _draw(mc, rng)
        try:
            cfg = rotation_model(mc, weights, D)
        except (ArithmeticError, ZeroDivisionError):
            rejected += 1
            continue
        if any(validate(g.decomp, cfg.dn_minus_1, "bumpy_elliptic") for g in cfg.geodesics):
            rejected += 1
            continue
        if not resonance_check(cfg.geodesics, mc).passed or not claim2_check(cfg).passed:
            rejected += 1
            continue
        cfg = GeodesicConfig(mc, D, cfg.geodesics,
                             f"rotation model on the ({d},{n}) class",
                             f"synthesize seed={seed} attempt={attempt}")
        # normalize through the text format so the result is exactly what a file holds
        cfg = parse_config(emit_config(cfg))
        mi = morse_identity_check(cfg, window)
        result = SynthesisResult(cfg, mi.passed, mi.first_failure, window, attempt,
                                 {"radicand": D, "q": len(cfg.geodesics),
                                  "q_expected": mc.expected_geodesics,
                                  "weights": [[str(w) for w in row] for row in weights],
                                  "rejected_candidates": rejected})
        if mi.passed:
            return result
        if best is None or (mi.first_failure or 0) > (best.morse_first_failure or 0):
            best = result
    if best is None:
        raise SynthesisExhausted(f"no valid ({d},{n}) candidate in {attempts} attempts")
    best.attempts_used = attempts
    return best
