"""Basic normal-form decompositions of linearized Poincare maps.

A decomposition is an ordered list of blocks, each one of

* ``N1Block(eigenvalue, a)``: the 2x2 Jordan-type block ``[[l, a], [0, l]]``
  with ``l = +-1`` and ``a`` in ``{-1, 0, 1}`` (``a = 0`` is ``+-I_2``);
* ``HBlock(sign)``: hyperbolic ``diag(b, 1/b)``, only the sign of ``b`` kept;
* ``RotationBlock(angle)``: ``R(2*pi*angle)`` with ``0 < angle < 1``,
  ``angle != 1/2``;
* ``N2Block(angle, nontrivial)``: the 4x4 block over ``R(2*pi*angle)``; the
  off-diagonal matrix is reduced to its trivial/nontrivial flag.

Angles are normalized (``theta / 2pi``) exact scalars.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Union

from .exact_field import ExactScalar

__all__ = [
    "N1Block",
    "HBlock",
    "RotationBlock",
    "N2Block",
    "Block",
    "PoincareDecomposition",
    "Violation",
    "validate",
    "Classification",
    "classify",
    "elliptic_height",
    "SplittingProfile",
    "splitting_profile",
    "nullity_of_iterate",
    "SPLITTING_TABLE_VERSION",
    "MODES",
]

MODES = ("general", "bumpy", "bumpy_elliptic")


@dataclass(frozen=True)
class N1Block:
    eigenvalue: int
    a: int
    kind = "N1"
    dim = 1


@dataclass(frozen=True)
class HBlock:
    sign: int
    kind = "H"
    dim = 1


@dataclass(frozen=True)
class RotationBlock:
    angle: ExactScalar
    kind = "R"
    dim = 1


@dataclass(frozen=True)
class N2Block:
    angle: ExactScalar
    nontrivial: bool
    kind = "N2"
    dim = 2


Block = Union[N1Block, HBlock, RotationBlock, N2Block]


@dataclass(frozen=True)
class PoincareDecomposition:
    blocks: tuple[Block, ...] = ()

    def __init__(self, blocks: Iterable[Block] = ()) -> None:
        object.__setattr__(self, "blocks", tuple(blocks))

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @cached_property
    def dimension(self) -> int:
        """Half the symplectic dimension: N2 blocks count 2, all others 1."""
        return sum(b.dim for b in self.blocks)

    def _count_n1(self, lam: int, a: int) -> int:
        return sum(1 for b in self.blocks if isinstance(b, N1Block)
                   and b.eigenvalue == lam and b.a == a)

    # block counts entering the closed-form iteration formula
    @cached_property
    def p_minus(self) -> int:
        return self._count_n1(1, 1)

    @cached_property
    def p_zero(self) -> int:
        return self._count_n1(1, 0)

    @cached_property
    def p_plus(self) -> int:
        return self._count_n1(1, -1)

    @cached_property
    def q_minus(self) -> int:
        return self._count_n1(-1, 1)

    @cached_property
    def q_zero(self) -> int:
        return self._count_n1(-1, 0)

    @cached_property
    def q_plus(self) -> int:
        return self._count_n1(-1, -1)

    @cached_property
    def rotation_angles(self) -> tuple[ExactScalar, ...]:
        return tuple(b.angle for b in self.blocks if isinstance(b, RotationBlock))

    @cached_property
    def nontrivial_n2_angles(self) -> tuple[ExactScalar, ...]:
        return tuple(b.angle for b in self.blocks if isinstance(b, N2Block) and b.nontrivial)

    @property
    def rotations(self) -> int:
        return len(self.rotation_angles)

    @property
    def irrational_rotations(self) -> int:
        return sum(1 for x in self.rotation_angles if not x.is_rational)

    @property
    def nontrivial_n2(self) -> int:
        return len(self.nontrivial_n2_angles)

    @property
    def trivial_n2(self) -> int:
        return sum(1 for b in self.blocks if isinstance(b, N2Block) and not b.nontrivial)

    @property
    def hyperbolic(self) -> int:
        return sum(1 for b in self.blocks if isinstance(b, HBlock))

    @cached_property
    def angles(self) -> tuple[ExactScalar, ...]:
        return tuple(b.angle for b in self.blocks if isinstance(b, (RotationBlock, N2Block)))

    @cached_property
    def radicands(self) -> frozenset[int]:
        return frozenset(x.radicand for x in self.angles if x.radicand is not None)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    block: Optional[int] = None

    def __str__(self) -> str:
        where = "" if self.block is None else f"block {self.block}: "
        return f"{where}{self.message}"


def validate(decomp: PoincareDecomposition, dn_minus_1: Optional[int] = None,
             mode: str = "general") -> list[Violation]:
    """Structural check of a decomposition; an empty list means valid.

    ``dn_minus_1`` is the expected half-dimension (skipped when ``None``).
    ``bumpy`` forbids N1 blocks and rational angles; ``bumpy_elliptic``
    additionally forbids hyperbolic blocks.
    """
    if mode not in MODES:
        raise ValueError(f"unknown validation mode {mode!r}")
    out: list[Violation] = []
    if dn_minus_1 is not None and decomp.dimension != dn_minus_1:
        out.append(Violation("dimension", f"block dimensions sum to {decomp.dimension}, "
                                          f"expected {dn_minus_1}"))
    if len(decomp.radicands) > 1:
        out.append(Violation("radicand", "angles mix radicands "
                             + ", ".join(str(d) for d in sorted(decomp.radicands))))
    bumpy = mode in ("bumpy", "bumpy_elliptic")
    for i, b in enumerate(decomp.blocks):
        if isinstance(b, N1Block):
            if b.eigenvalue not in (1, -1):
                out.append(Violation("n1_eigenvalue", f"N1 eigenvalue must be +-1, got {b.eigenvalue}", i))
            if b.a not in (-1, 0, 1):
                out.append(Violation("n1_entry", f"N1 off-diagonal entry must be -1, 0 or 1, got {b.a}", i))
            if bumpy:
                out.append(Violation("degenerate", "N1 block forbidden (eigenvalue +-1 makes an iterate degenerate)", i))
        elif isinstance(b, HBlock):
            if b.sign not in (1, -1):
                out.append(Violation("h_sign", f"H sign must be +-1, got {b.sign}", i))
            if mode == "bumpy_elliptic":
                out.append(Violation("hyperbolic", "H block forbidden (eigenvalues off the unit circle)", i))
        elif isinstance(b, (RotationBlock, N2Block)):
            x = b.angle
            if not isinstance(x, ExactScalar):
                out.append(Violation("angle_type", "angle must be an exact scalar", i))
                continue
            if not (0 < x < 1):
                out.append(Violation("angle_range", f"angle {x} outside (0, 1)", i))
            elif x == Fraction(1, 2):
                out.append(Violation("angle_half", "angle 1/2 (rotation by pi) excluded", i))
            if bumpy and x.is_rational:
                out.append(Violation("rational_angle", f"rational angle {x} forbidden in bumpy mode", i))
        else:
            out.append(Violation("block_type", f"unknown block {b!r}", i))
    return out


@dataclass(frozen=True)
class Classification:
    elliptic_height: int
    elliptic: bool
    hyperbolic: bool
    nondegenerate: bool
    irrationally_elliptic: bool


def elliptic_height(decomp: PoincareDecomposition) -> int:
    """Total algebraic multiplicity of unit-circle eigenvalues."""
    total = 0
    for b in decomp.blocks:
        if isinstance(b, (N1Block, RotationBlock)):
            total += 2
        elif isinstance(b, N2Block):
            total += 4
    return total


def classify(decomp: PoincareDecomposition) -> Classification:
    e = elliptic_height(decomp)
    blocks = decomp.blocks
    return Classification(
        elliptic_height=e,
        elliptic=e == 2 * decomp.dimension,
        hyperbolic=e == 0,
        nondegenerate=not any(isinstance(b, N1Block) and b.eigenvalue == 1 for b in blocks),
        irrationally_elliptic=bool(blocks) and all(
            isinstance(b, RotationBlock) and not b.angle.is_rational for b in blocks),
    )


# Splitting numbers (S+, S-) of the N1 blocks at their eigenvalue, keyed by
# (eigenvalue, a), as tabulated for the basic normal forms in the index
# theory literature. Each entry is checked against the iteration formula by
# the Bott-sum tests.
SPLITTING_TABLE_VERSION = "basic-forms/1"
N1_SPLITTING: dict[tuple[int, int], tuple[int, int]] = {
    (1, 1): (1, 1),
    (1, 0): (1, 1),
    (1, -1): (0, 0),
    (-1, 1): (0, 0),
    (-1, 0): (1, 1),
    (-1, -1): (1, 1),
}

_ZERO = ExactScalar(0)
_HALF = ExactScalar(Fraction(1, 2))


@dataclass
class SplittingProfile:
    """Splitting numbers by eigenvalue location.

    Keys are exact normalized angles ``t`` in ``[0, 1)``; ``t`` stands for
    ``exp(2*pi*i*t)``, so ``0`` is the eigenvalue 1.
    """

    values: dict[ExactScalar, tuple[int, int]] = field(default_factory=dict)

    def add(self, t: ExactScalar, plus: int, minus: int) -> None:
        sp, sm = self.values.get(t, (0, 0))
        self.values[t] = (sp + plus, sm + minus)

    def at(self, t: ExactScalar) -> tuple[int, int]:
        return self.values.get(t, (0, 0))

    @property
    def s_plus_at_one(self) -> int:
        return self.at(_ZERO)[0]

    @property
    def total_minus(self) -> int:
        """Sum of S- over eigenvalues other than 1 (the jump constant C(M))."""
        return sum(sm for t, (_, sm) in self.values.items() if t != 0)

    def locations(self) -> list[ExactScalar]:
        return sorted(t for t, v in self.values.items() if v != (0, 0))

    def is_conjugation_symmetric(self) -> bool:
        for t, (sp, sm) in self.values.items():
            conj = _ZERO if t == 0 else 1 - t
            if self.at(conj) != (sm, sp):
                return False
        return True

    def merged(self, other: SplittingProfile) -> SplittingProfile:
        out = SplittingProfile(dict(self.values))
        for t, (sp, sm) in other.values.items():
            out.add(t, sp, sm)
        return out


def splitting_profile(decomp: PoincareDecomposition) -> SplittingProfile:
    prof = SplittingProfile()
    for b in decomp.blocks:
        if isinstance(b, N1Block):
            sp, sm = N1_SPLITTING[(b.eigenvalue, b.a)]
            prof.add(_ZERO if b.eigenvalue == 1 else _HALF, sp, sm)
        elif isinstance(b, RotationBlock):
            prof.add(b.angle, 0, 1)
            prof.add(1 - b.angle, 1, 0)
        elif isinstance(b, N2Block):
            if b.nontrivial:
                prof.add(b.angle, 1, 1)
                prof.add(1 - b.angle, 1, 1)
    return prof


def nullity_of_iterate(decomp: PoincareDecomposition, m: int) -> int:
    """Real dimension of the 1-eigenspace of the m-th power of the normal form."""
    if m < 1:
        raise ValueError("iterate must be positive")
    nu = 0
    for b in decomp.blocks:
        if isinstance(b, N1Block):
            if b.eigenvalue == 1 or m % 2 == 0:
                nu += 2 if b.a == 0 else 1
        elif isinstance(b, (RotationBlock, N2Block)):
            if (b.angle * m).is_integer:
                nu += 2
    return nu
