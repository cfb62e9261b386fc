"""Command-line front end.

Exit codes: 0 success, 1 not correctable, 2 parse failure, 3 dimension
mismatch, 4 theorem violation or internal inconsistency, 5 unwritable output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import channels, errcorr, infotheory
from .errors import ConsistencyError, DimensionError
from .specs import SpecError, parse_channel, parse_state, write_matrices, write_matrix
from .states import random_density

EXIT_OK = 0
EXIT_NOT_CORRECTABLE = 1
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_VIOLATION = 4
EXIT_UNWRITABLE = 5


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def fmt(x: float | None) -> str:
    """Six-decimal fixed point with negative zero suppressed."""
    if x is None:
        return "n/a"
    s = f"{x:.6f}"
    return s[1:] if s.startswith("-") and float(s) == 0.0 else s


def _emit_kv(fields: dict, out) -> None:
    for key, value in fields.items():
        if value is None or isinstance(value, float):
            value = fmt(value)
        print(f"{key}={value}", file=out)


def _state(args):
    if not args.state:
        raise _Exit(EXIT_PARSE, "missing --state")
    return parse_state(args.state)


def _channel(spec: str | None, flag: str = "--channel"):
    if not spec:
        raise _Exit(EXIT_PARSE, f"missing {flag}")
    return parse_channel(spec)


def _check_dims(rho, *chs) -> None:
    for ch in chs:
        if ch.dim != rho.dim:
            raise DimensionError(f"channel acts on dimension {ch.dim} but the state has dimension {rho.dim}")


def cmd_analyze(args, out) -> int:
    rho, ch = _state(args), _channel(args.channel)
    _check_dims(rho, ch)
    rep = infotheory.report(rho, ch)
    if args.format == "json":
        print(json.dumps(rep.to_dict()), file=out)
    else:
        _emit_kv(rep.to_dict(), out)
    if not rep.fano_margin >= -infotheory.INEQUALITY_SLACK:
        print(f"quantum Fano inequality violated (margin {rep.fano_margin:.3g})", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _parse_random(text: str) -> int:
    key, _, val = text.partition("=")
    if key.strip() != "d":
        raise SpecError(f"bad --random {text!r}: expected d=<dim>")
    try:
        d = int(val)
    except ValueError:
        raise SpecError(f"bad --random {text!r}: {val!r} is not an integer") from None
    if d < 1:
        raise SpecError(f"bad --random {text!r}: dimension must be >= 1")
    return d


def cmd_dpi(args, out) -> int:
    if args.random:
        d = _parse_random(args.random)
        rng = np.random.default_rng(args.seed)
        rho = random_density(d, d, rng)
        ch1 = channels.random_channel(d, int(rng.integers(1, 5)), rng)
        ch2 = channels.random_channel(d, int(rng.integers(1, 5)), rng)
    else:
        rho, ch1, ch2 = _state(args), _channel(args.channel), _channel(args.channel2, "--channel2")
    _check_dims(rho, ch1, ch2)
    rep = infotheory.dpi_report(rho, ch1, ch2)
    verdict = "PASS" if rep.holds else "FAIL"
    if args.format == "json":
        print(json.dumps({**rep.to_dict(), "verdict": verdict}), file=out)
    else:
        _emit_kv(rep.to_dict(), out)
        print(
            f"S(rho) = {fmt(rep.input_entropy)} >= I_e1 = {fmt(rep.ie_stage1)} "
            f">= I_e12 = {fmt(rep.ie_both)}  {verdict}",
            file=out,
        )
    if not rep.holds:
        print("data-processing inequality violated", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _write_corrector(directory: str, corrector) -> None:
    path = Path(directory)
    try:
        path.mkdir(parents=True, exist_ok=True)
        for i, a in enumerate(corrector.operators):
            write_matrix(path / f"A_{i}.json", a)
        write_matrices(path / "corrector.json", corrector.operators)
    except OSError as exc:
        raise _Exit(EXIT_UNWRITABLE, f"cannot write corrector to {directory}: {exc.strerror}") from None


def cmd_correct(args, out) -> int:
    rho, ch = _state(args), _channel(args.channel)
    _check_dims(rho, ch)
    res = errcorr.construct_corrector(rho, ch, tol=args.tol)
    if res.correctable and args.out:
        _write_corrector(args.out, res.corrector)
    if args.format == "json":
        print(json.dumps(res.to_dict()), file=out)
    else:
        _emit_kv(
            {
                "deficit": res.deficit,
                "verdict": "CORRECTABLE" if res.correctable else "NOT CORRECTABLE",
                "verified_fidelity": res.verified_fidelity,
                "product_defect": res.product_defect,
            },
            out,
        )
        if res.correctable:
            print(f"corrector_operators={len(res.corrector)}", file=out)
    return EXIT_OK if res.correctable else EXIT_NOT_CORRECTABLE


def _parse_range(text: str | None) -> np.ndarray:
    if not text:
        raise SpecError("missing --range start,stop,steps")
    parts = text.split(",")
    if len(parts) != 3:
        raise SpecError(f"bad --range {text!r}: expected start,stop,steps")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise SpecError(f"bad --range {text!r}: non-numeric field") from None
    if steps < 2:
        raise SpecError(f"bad --range {text!r}: steps must be >= 2")
    if not start <= stop:
        raise SpecError(f"bad --range {text!r}: start must not exceed stop")
    return np.linspace(start, stop, steps)


SWEEP_HEADER = ["p", "F_e", "S_e", "I_e", "S_in", "S_out", "deficit"]


def cmd_sweep(args, out) -> int:
    rho = _state(args)
    family = args.channel or ""
    if "<p>" not in family:
        raise SpecError(f"bad --channel {family!r}: sweep needs a <p> placeholder")
    grid = _parse_range(args.range)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for p in grid:
        ch = parse_channel(family.replace("<p>", repr(float(p))))
        _check_dims(rho, ch)
        rep = infotheory.report(rho, ch)
        deficit = max(rep.input_entropy - rep.coherent_information, 0.0)
        writer.writerow(
            [fmt(float(p))]
            + [
                fmt(v)
                for v in (
                    rep.entanglement_fidelity,
                    rep.entropy_exchange,
                    rep.coherent_information,
                    rep.input_entropy,
                    rep.output_entropy,
                    deficit,
                )
            ]
        )
    if args.out:
        try:
            Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
        except OSError as exc:
            raise _Exit(EXIT_UNWRITABLE, f"cannot write {args.out}: {exc.strerror}") from None
    else:
        out.write(buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohinfo",
        description="Entanglement fidelity, coherent information and perfect error correction for quantum channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, channel2=False, out_help=None):
        p.add_argument("--state", help="maxmixed:<d> | pure:@f | density:@f | codespace:@f")
        p.add_argument("--channel", help="identity:<d> | dephasing:<p> | bitflip:<p> | depolarizing:<p> | "
                       "amplitude-damping:<g> | unitary:@f | kraus:@f")
        if channel2:
            p.add_argument("--channel2", help="second-stage channel")
        p.add_argument("--format", choices=["text", "json"], default="text")
        if out_help:
            p.add_argument("--out", help=out_help)

    common(sub.add_parser("analyze", help="report F_e, S_e, I_e and the Fano bound"))
    p = sub.add_parser("dpi", help="check S(rho) >= I_e1 >= I_e12")
    common(p, channel2=True)
    p.add_argument("--random", help="d=<dim>: random state and channels instead of specs")
    p.add_argument("--seed", type=int, default=None)
    p = sub.add_parser("correct", help="decide perfect correctability and build the recovery")
    common(p, out_help="directory for A_<i>.json corrector files")
    p.add_argument("--tol", type=float, default=errcorr.DEFAULT_TOL, help="deficit tolerance in bits")
    p = sub.add_parser("sweep", help="tabulate a channel family over a parameter grid")
    common(p, out_help="CSV output path (default stdout)")
    p.add_argument("--range", help="start,stop,steps")
    return parser


COMMANDS = {"analyze": cmd_analyze, "dpi": cmd_dpi, "correct": cmd_correct, "sweep": cmd_sweep}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except ConsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
