"""Command-line interface: ``cgindex <subcommand> ...``.

Exit codes: 0 success, 2 a structural check failed (or an internal
inconsistency was detected), 3 invalid configuration or input, 4 a search
exhausted its budget.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional

from .cij_search import (
    SearchExhausted,
    VerificationFailure,
    find_paired_tuple,
    find_tuple,
)
from .config import ConfigError, emit_config, load_config
from .index_iteration import InvalidDecomposition
from .loop_betti import ManifoldClass, betti_table, resonance_check
from .morse_audit import (
    EXIT_EXHAUSTED,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_STRUCTURAL,
    audit,
    morse_identity_check,
    morse_numbers,
)
from .normal_form import validate
from .report import (
    audit_report,
    betti_report,
    cij_report,
    classify_report,
    emit_report,
    iterate_report,
    morse_report,
    resonance_report,
    synthesis_report,
)
from .synthesize import SynthesisExhausted, synthesize_config


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected an exact rational like 3/100, got {text!r}")


def _m0(text: str) -> Optional[int]:
    if text == "auto":
        return None
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--m0 takes 'auto' or a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("--m0 must be positive")
    return v


def _positive(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cgindex",
                                description="Index iteration, loop-space Betti numbers and "
                                            "closed-geodesic counting audits.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, config=True, formats=("text", "json", "csv")):
        sp = sub.add_parser(name, help=help_)
        if config:
            sp.add_argument("config", help="configuration file, or - for standard input")
        sp.add_argument("--output", choices=formats, default=formats[0])
        return sp

    sp = add("betti", "Betti numbers of the loop space quotient", config=False)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--max-k", type=int, required=True)
    sp.add_argument("--literal-omega", action="store_true",
                    help="use the exceptional degree set with k2 >= 1")

    add("classify", "classify the normal form of every geodesic")

    sp = add("iterate", "table of i(c^m) and nu(c^m)")
    sp.add_argument("--max-m", type=_positive, default=20)
    sp.add_argument("--geodesic", action="append", help="restrict to this geodesic (repeatable)")

    add("resonance", "exact resonance identity check")

    sp = add("morse", "Morse-type numbers and the Morse identities")
    sp.add_argument("--max-p", type=int, default=41)

    sp = add("cij", "search a common index jump tuple")
    sp.add_argument("--epsilon", type=_fraction, default=Fraction(3, 100))
    sp.add_argument("--max-N", type=_positive, default=10**6)
    sp.add_argument("--m0", type=_m0, default=None)
    sp.add_argument("--pair", action="store_true", help="also search a complementary tuple")
    sp.add_argument("--strategy", choices=("auto", "scan", "cf"), default="auto")
    sp.add_argument("--strict", action="store_true",
                    help="fail if the first admissible N does not verify")

    sp = add("audit", "full counting audit", formats=("text", "json", "csv"))
    sp.add_argument("--epsilon", type=_fraction, default=Fraction(3, 100))
    sp.add_argument("--max-N", type=_positive, default=10**6)
    sp.add_argument("--max-p", type=int, default=None, help="Morse window (default 2N+1)")
    sp.add_argument("--m0", type=_m0, default=None)
    sp.add_argument("--window", type=_positive, default=200,
                    help="iterate range for parity and window-bound checks")

    sp = add("synthesize", "generate a resonance-exact configuration", config=False,
             formats=("config", "text", "json"))
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--attempts", type=int, default=50)
    sp.add_argument("--window", type=int, default=60)
    return p


def _write(data: bytes) -> None:
    sys.stdout.buffer.write(data)
    sys.stdout.flush()


def _run(args) -> int:
    cmd = args.command
    if cmd == "betti":
        try:
            mc = ManifoldClass(args.d, args.n)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        if args.max_k < 0:
            print("error: --max-k must be non-negative", file=sys.stderr)
            return EXIT_INVALID
        _write(emit_report(betti_report(betti_table(mc, args.max_k, args.literal_omega)), args.output))
        return EXIT_OK

    if cmd == "synthesize":
        try:
            result = synthesize_config(args.d, args.n, args.seed, args.attempts, args.window)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        except SynthesisExhausted as exc:
            print(f"exhausted: {exc}", file=sys.stderr)
            return EXIT_EXHAUSTED
        if args.output == "config":
            _write(emit_config(result.config).encode())
        else:
            _write(emit_report(synthesis_report(result), args.output))
        return EXIT_OK

    cfg = load_config(args.config)
    if cmd == "classify":
        _write(emit_report(classify_report(cfg), args.output))
        return EXIT_OK
    if cmd == "iterate":
        try:
            rep = iterate_report(cfg, args.max_m, args.geodesic)
        except KeyError as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return EXIT_INVALID
        _write(emit_report(rep, args.output))
        return EXIT_OK
    if cmd == "resonance":
        res = resonance_check(cfg.geodesics, cfg.manifold)
        _write(emit_report(resonance_report(cfg, res), args.output))
        if res.error:
            return EXIT_INVALID
        return EXIT_OK if res.passed else EXIT_STRUCTURAL
    if cmd == "morse":
        table = morse_numbers(cfg, args.max_p)
        ident = morse_identity_check(cfg, args.max_p, table=table)
        _write(emit_report(morse_report(cfg, table, ident), args.output))
        return EXIT_OK if ident.passed else EXIT_STRUCTURAL
    if cmd == "cij":
        bad = {g.name: validate(g.decomp, cfg.dn_minus_1, "bumpy_elliptic") for g in cfg.geodesics}
        bad = {k: v for k, v in bad.items() if v}
        if bad:
            for name, vs in bad.items():
                for v in vs:
                    print(f"error: {name}: {v}", file=sys.stderr)
            return EXIT_INVALID
        tup = find_tuple(cfg, args.epsilon, args.max_N, m0=args.m0,
                         strict=args.strict, strategy=args.strategy)
        paired = err = None
        if args.pair:
            try:
                paired = find_paired_tuple(cfg, tup, args.epsilon, args.max_N)
            except SearchExhausted as exc:
                err = str(exc)
        _write(emit_report(cij_report(tup, paired, err), args.output))
        return EXIT_EXHAUSTED if err else EXIT_OK
    if cmd == "audit":
        rep = audit(cfg, args.epsilon, args.max_N, cutoff=args.max_p, m0=args.m0, window=args.window)
        _write(emit_report(audit_report(rep), args.output))
        return rep.exit_code
    raise AssertionError(cmd)


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ConfigError as exc:
        for issue in exc.issues:
            print(f"error: {issue}", file=sys.stderr)
        return EXIT_INVALID
    except (InvalidDecomposition, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    except SearchExhausted as exc:
        print(f"exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
