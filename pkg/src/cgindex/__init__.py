"""Exact Morse-index bookkeeping for closed geodesics on compact simply connected manifolds.

Exact arithmetic in real quadratic fields, symplectic normal forms and the
index iteration formula, loop-space Betti numbers, common index jump search,
and an audit of the multiplicity counting argument.
"""

from .cij_search import CijTuple, find_paired_tuple, find_tuple
from .config import GeodesicConfig, emit_config, load_config, parse_config
from .exact_field import ExactScalar
from .index_iteration import GeodesicRecord
from .loop_betti import ManifoldClass, betti, betti_table, resonance_check
from .morse_audit import AuditReport, audit, morse_identity_check, morse_numbers
from .normal_form import HBlock, N1Block, N2Block, PoincareDecomposition, RotationBlock

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "CijTuple",
    "ExactScalar",
    "GeodesicConfig",
    "GeodesicRecord",
    "HBlock",
    "ManifoldClass",
    "N1Block",
    "N2Block",
    "PoincareDecomposition",
    "RotationBlock",
    "audit",
    "betti",
    "betti_table",
    "emit_config",
    "find_paired_tuple",
    "find_tuple",
    "load_config",
    "morse_identity_check",
    "morse_numbers",
    "parse_config",
    "resonance_check",
]
