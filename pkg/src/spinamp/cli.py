"""Command-line interface.

    spinamp operators --j 2
    spinamp table --j 2 --from 90d 0 --to 0 0 --convention paper
    spinamp verify --samples 1000
    spinamp simulate chain.json --samples 1000000

Exit codes: 0 success, 1 a check fired (suspected typo, z-score flag),
2 bad input.  Nothing is written to stdout on exit 2.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .amplitude_engine import CONVENTIONS, ConventionError, general_table, probabilities
from .formatting import (
    aligned,
    complex_json,
    csv_text,
    fmt_complex,
    fmt_real,
    json_number,
    matrix_json,
)
from .paper_oracle import CONFIRMED, DEFAULT_SEED, DEFAULT_TOLERANCE, verify_all
from .sg_simulator import ChainError, MeasurementChain, compare, format_m, outcome_key, run_chain
from .spin_algebra import Direction, Spin, SpinError, spin_components

FORMATS = ("json", "csv", "pretty")
UNITARITY_TOL = 1e-12
EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_angle(text: str, degrees: bool = False) -> float:
    """Radians by default; a trailing ``d`` (or ``degrees=True``) means degrees."""
    raw = text.strip().lower()
    as_deg = degrees
    if raw.endswith("d"):
        raw, as_deg = raw[:-1], True
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"invalid angle {text!r}") from None
    if not math.isfinite(value):
        raise UsageError(f"invalid angle {text!r}")
    return math.radians(value) if as_deg else value


def _direction(pair: Sequence[str], degrees: bool, flag: str) -> Direction:
    try:
        return Direction(parse_angle(pair[0], degrees), parse_angle(pair[1], degrees))
    except UsageError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _spin(value: str) -> Spin:
    try:
        return Spin(value)
    except SpinError as exc:
        raise UsageError(f"--j: {exc}") from None


def _m_labels(spin: Spin) -> list[str]:
    return [str(m) for m in spin.projections()]


# ---------------------------------------------------------------- operators

def cmd_operators(args) -> tuple[int, str]:
    spin = _spin(args.j)
    mats = dict(zip(("S_x", "S_y", "S_z"), spin_components(spin)))
    labels = _m_labels(spin)
    if args.format == "json":
        doc = {"j": format_m(spin.j), "dim": spin.dim, "m": [format_m(m) for m in spin.projections()],
               "units": "hbar"}
        doc.update({name: matrix_json(mat) for name, mat in mats.items()})
        return EXIT_OK, json.dumps(doc, indent=2)
    if args.format == "csv":
        rows = [
            (name, labels[r], labels[c], fmt_real(mat[r, c].real), fmt_real(mat[r, c].imag))
            for name, mat in mats.items()
            for r in range(spin.dim)
            for c in range(spin.dim)
        ]
        return EXIT_OK, csv_text(("operator", "row_m", "col_m", "re", "im"), rows)
    blocks = []
    for name, mat in mats.items():
        rows = [[labels[r]] + [fmt_complex(complex(v)) for v in mat[r]] for r in range(spin.dim)]
        blocks.append(f"{name} (units of hbar), j = {spin.j}\n" + aligned(["m"] + labels, rows))
    return EXIT_OK, "\n\n".join(blocks)


# -------------------------------------------------------------------- table

def cmd_table(args) -> tuple[int, str]:
    spin = _spin(args.j)
    source = _direction(args.source, args.degrees, "--from")
    target = _direction(args.target, args.degrees, "--to")
    try:
        table = general_table(spin, source, target, args.convention)
    except ConventionError as exc:
        raise UsageError(f"--convention: {exc}") from None
    probs = probabilities(table)
    err = table.unitarity_error()
    unitary = err < UNITARITY_TOL
    ms = spin.projections()
    labels = _m_labels(spin)

    if args.format == "json":
        doc = {
            "j": format_m(spin.j),
            "convention": args.convention,
            "source": {"theta": source.theta, "phi": source.phi},
            "target": {"theta": target.theta, "phi": target.phi},
            "m": [format_m(m) for m in ms],
            "layout": "rows m_f (target), columns m_i (source), both j..-j",
            "amplitudes": matrix_json(table.entries),
            "probabilities": [[json_number(p) for p in row] for row in probs.entries],
            "checks": {"unitarity_error": err, "unitary": unitary, "tolerance": UNITARITY_TOL},
        }
        return EXIT_OK, json.dumps(doc, indent=2)
    if args.format == "csv":
        rows = [
            (labels[ci], labels[ri], fmt_real(table.entries[ri, ci].real),
             fmt_real(table.entries[ri, ci].imag), fmt_real(probs.entries[ri, ci]))
            for ci in range(spin.dim)
            for ri in range(spin.dim)
        ]
        return EXIT_OK, csv_text(("m_i", "m_f", "re", "im", "prob"), rows)
    head = (
        f"j = {spin.j}, convention = {args.convention}\n"
        f"from (theta', phi') = ({fmt_real(source.theta)}, {fmt_real(source.phi)}) rad"
        f" to (theta, phi) = ({fmt_real(target.theta)}, {fmt_real(target.phi)}) rad"
    )
    header = ["m_f \\ m_i"] + labels
    amp = [[labels[r]] + [fmt_complex(complex(v)) for v in table.entries[r]] for r in range(spin.dim)]
    prob = [[labels[r]] + [fmt_real(v) for v in probs.entries[r]] for r in range(spin.dim)]
    check = f"unitarity: max|U^dagger U - I| = {err:.3e} ({'ok' if unitary else 'FAIL'}, tol {UNITARITY_TOL:g})"
    return EXIT_OK, "\n\n".join([head, "amplitudes", aligned(header, amp), "probabilities",
                                  aligned(header, prob), check])


# ------------------------------------------------------------------- verify

def cmd_verify(args) -> tuple[int, str]:
    if args.samples < 1:
        raise UsageError(f"--samples must be >= 1, got {args.samples}")
    if not args.tolerance > 0:
        raise UsageError(f"--tolerance must be positive, got {args.tolerance}")
    records = verify_all(args.tolerance, args.samples, args.seed)
    code = EXIT_OK if all(r.verdict == CONFIRMED for r in records) else EXIT_CHECK
    if args.format == "json":
        return code, json.dumps([r.to_json() for r in records], indent=2, ensure_ascii=False)
    if args.format == "csv":
        rows = [
            (r.equation_id, r.m_i, r.m_f, f"{r.max_abs_deviation:.6e}", r.verdict, r.suggested_correction or "")
            for r in records
        ]
        return code, csv_text(("equation_id", "m_i", "m_f", "max_abs_deviation", "verdict",
                               "suggested_correction"), rows)
    rows = [(r.equation_id, r.m_i, r.m_f, f"{r.max_abs_deviation:.3e}", r.verdict) for r in records]
    text = aligned(("equation", "m_i", "m_f", "max |dev|", "verdict"), rows)
    notes = [f"{r.equation_id}: {r.suggested_correction}" for r in records if r.suggested_correction]
    bad = sum(r.verdict != CONFIRMED for r in records)
    summary = (f"{len(records) - bad} confirmed, {bad} suspected typo(s); "
               f"{records[0].sample_count} angle tuples per form, seed {args.seed:#x}, tolerance {args.tolerance:g}")
    return code, "\n\n".join([text] + (["\n".join(notes)] if notes else []) + [summary])


# ----------------------------------------------------------------- simulate

def cmd_simulate(args) -> tuple[int, str]:
    if args.samples < 1:
        raise UsageError(f"--samples must be >= 1, got {args.samples}")
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")
    try:
        with open(args.chain_file, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read chain file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"chain file is not valid JSON: {exc}") from None
    try:
        chain = MeasurementChain.from_dict(doc, degrees=args.degrees)
    except ChainError as exc:
        raise UsageError(f"invalid chain file, field {exc}") from None
    result = run_chain(chain, args.samples, args.seed, workers=args.workers)
    report = compare(result)
    code = EXIT_OK if report.ok else EXIT_CHECK

    def label(row):
        return "discarded" if row.outcome is None else outcome_key(row.outcome)

    if args.format == "json":
        doc = {
            "chain": chain.to_dict(),
            "samples": result.samples,
            "seed": result.seed,
            "rng": result.rng,
            "discarded": result.discarded,
            "acceptance_probability": json_number(result.acceptance_probability),
            "outcomes": [
                {
                    "outcome": None if r.outcome is None else [format_m(m) for m in r.outcome],
                    "count": r.count,
                    "frequency": json_number(r.frequency),
                    "probability": json_number(r.probability),
                    "conditional": None if r.outcome is None else json_number(result.conditional.get(r.outcome, 0.0)),
                    "z": json_number(r.z),
                    "flagged": r.flagged,
                }
                for r in report.rows
            ],
            "max_deviation": json_number(report.max_deviation),
            "flags": len(report.flags),
        }
        return code, json.dumps(doc, indent=2)
    rows = [(label(r), r.count, fmt_real(r.frequency), fmt_real(r.probability), f"{r.z:.3f}",
             "FLAG" if r.flagged else "") for r in report.rows]
    if args.format == "csv":
        return code, csv_text(("outcome", "count", "frequency", "probability", "z", "flagged"),
                              [r[:5] + (str(bool(r[5])).lower(),) for r in rows])
    head = (f"j = {chain.spin.j}, {len(chain.stages)} stage(s), {result.samples} samples, "
            f"seed {result.seed:#x} [{result.rng}]")
    tail = (f"discarded by select: {result.discarded}; max |freq - p| = {report.max_deviation:.3e}; "
            f"{len(report.flags)} flag(s) at |z| > 5")
    return code, "\n\n".join([head, aligned(("outcome", "count", "frequency", "p", "z", ""), rows), tail])


# ------------------------------------------------------------------ parsing

def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinamp", description="Spin measurement amplitudes and probabilities.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", metavar="FILE",
                        help="JSON file of defaults, e.g. {\"format\": \"csv\", \"verify\": {\"samples\": 200}}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="pretty")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("operators", parents=[common], help="print S_x, S_y, S_z")
    p.add_argument("--j", required=True, help="spin quantum number, e.g. 2, 0.5, 3/2")
    p.set_defaults(func=cmd_operators)

    p = sub.add_parser("table", parents=[common], help="amplitude and probability table between two directions")
    p.add_argument("--j", required=True)
    p.add_argument("--from", dest="source", nargs=2, metavar=("THETA", "PHI"), default=["0", "0"],
                   help="initial quantization direction (default z)")
    p.add_argument("--to", dest="target", nargs=2, metavar=("THETA", "PHI"), default=["0", "0"],
                   help="measurement direction (default z)")
    p.add_argument("--convention", choices=CONVENTIONS, default="canonical")
    p.add_argument("--degrees", action="store_true", help="read bare angles as degrees")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", parents=[common], help="check the published spin-2 closed forms")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo of a Stern-Gerlach chain")
    p.add_argument("chain_file", help="JSON: {spin, prepare: {theta, phi, m}, stages: [{theta, phi, select?}]}")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--degrees", action="store_true", help="chain angles are in degrees")
    p.set_defaults(func=cmd_simulate)
    return parser


def _apply_config(parser: argparse.ArgumentParser, path: str) -> None:
    """Install config values as parser defaults so explicit flags still win."""
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config: {exc}") from None
    if not isinstance(config, dict):
        raise UsageError("--config: top level must be an object")
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices
    shared = {k: v for k, v in config.items() if k not in subparsers}
    for name, sp in subparsers.items():
        known = {a.dest for a in sp._actions}
        section = config.get(name, {})
        if not isinstance(section, dict):
            raise UsageError(f"--config: section {name!r} must be an object")
        values = {k: v for k, v in shared.items() if k in known}
        values.update(section)
        unknown = set(section) - known
        if unknown:
            raise UsageError(f"--config: unknown key(s) for {name}: {', '.join(sorted(unknown))}")
        if "seed" in values and isinstance(values["seed"], str):
            values["seed"] = int(values["seed"], 0)
        sp.set_defaults(**values)
    stray = set(shared) - {"format"}
    if stray:
        raise UsageError(f"--config: unknown key(s): {', '.join(sorted(stray))}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, known.config)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"spinamp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "format", None) not in FORMATS:
        print(f"spinamp: error: --format must be one of {FORMATS}", file=sys.stderr)
        return EXIT_USAGE
    try:
        code, text = args.func(args)
    except UsageError as exc:
        print(f"spinamp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
