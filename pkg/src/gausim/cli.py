"""Command-line front end.

stdout carries machine-readable JSON only; human diagnostics go to stderr.
Exit codes: 0 success, 1 runtime failure, 2 circuit parse/validation error,
3 reserved for the non-Gaussian boundary (conditioning on photodetector
absorption), so scripts can tell "the simulator cannot represent this
branch" apart from bugs.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench, channels, compare, dsl, engine, jsonio
from .errors import CircuitError, GausimError, NonGaussianOutcomeError
from .phasespace import PSD_TOL

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_BOUNDARY = 3


def _emit(obj: dict) -> None:
    print(jsonio.dumps(obj))


def _load_circuit(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return dsl.parse(fh.read())


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _boundary_payload(exc: NonGaussianOutcomeError) -> dict:
    return {
        "schema": jsonio.RESULT_SCHEMA,
        "error": "non-gaussian-outcome",
        "absorption_probability": exc.absorption_probability,
        "instruction_index": getattr(exc, "instruction_index", None),
    }


def _cmd_run(args) -> int:
    circuit = _load_circuit(args.circuit)
    outcomes = _load_json(args.outcomes) if args.outcomes else {}
    try:
        result = engine.run(circuit, outcomes=outcomes)
    except NonGaussianOutcomeError as exc:
        print(
            "boundary reached: conditioning on the absorption outcome of a "
            "photodetector is not a Gaussian map, so a means-and-covariance "
            "simulator cannot represent the conditioned state. Probability of "
            f"the rejected branch: {exc.absorption_probability:.6g}.",
            file=sys.stderr,
        )
        _emit(_boundary_payload(exc))
        return EXIT_BOUNDARY
    payload = jsonio.result_to_dict(result)
    if args.psd_tol != PSD_TOL:
        payload["tolerances"] = {"psd_tol": args.psd_tol}
    _emit(payload)
    return EXIT_OK


def _cmd_sample(args) -> int:
    circuit = _load_circuit(args.circuit)
    try:
        results = engine.run_shots(
            circuit, args.shots, args.seed, parallel=args.parallel
        )
    except NonGaussianOutcomeError as exc:
        print("boundary reached during sampling; see run --help.", file=sys.stderr)
        _emit(_boundary_payload(exc))
        return EXIT_BOUNDARY
    lines = [jsonio.dumps(jsonio.result_to_dict(r)) for r in results]
    out = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    channel = jsonio.channel_from_dict(_load_json(args.channel))
    diag = channels.validate_cp(channel, tol=args.psd_tol)
    square = channel.n_in == channel.n_out
    report = {
        "cp": {"passed": diag.passed, "min_eigenvalue": diag.min_eigenvalue},
        "symplectic": bool(
            square
            and channels.is_symplectic(channel.a_matrix)
            and not channel.g_matrix.any()
        ),
        "tolerances": {"psd_tol": args.psd_tol},
    }
    _emit(report)
    return EXIT_OK


def _cmd_bench(args) -> int:
    mode_counts = [int(x) for x in args.modes.split(",")]
    report = bench.run_bench(mode_counts, args.depth, args.seed)
    _emit(report)
    return EXIT_OK


def _cmd_compare(args) -> int:
    circuit = _load_circuit(args.circuit)
    outcomes = _load_json(args.outcomes) if args.outcomes else {}
    report = compare.compare_circuit(
        circuit, args.cutoff, outcomes=outcomes, tol=args.tol
    )
    _emit(report)
    return EXIT_OK if report["passed"] else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gausim",
        description="Phase-space simulator for Gaussian optical circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a circuit with fixed outcomes")
    p_run.add_argument("circuit", help="path to a .gcirc file")
    p_run.add_argument("--outcomes", help="JSON file mapping register names to values")
    p_run.add_argument("--psd-tol", type=float, default=PSD_TOL)
    p_run.set_defaults(func=_cmd_run)

    p_sample = sub.add_parser("sample", help="draw measurement outcomes over shots")
    p_sample.add_argument("circuit")
    p_sample.add_argument("--shots", type=int, default=1)
    p_sample.add_argument("--seed", type=int, required=True)
    p_sample.add_argument("--parallel", action="store_true")
    p_sample.add_argument("--out", help="write JSON lines here instead of stdout")
    p_sample.set_defaults(func=_cmd_sample)

    p_val = sub.add_parser("validate", help="CP/symplectic report for a channel JSON")
    p_val.add_argument("channel")
    p_val.add_argument("--psd-tol", type=float, default=PSD_TOL)
    p_val.set_defaults(func=_cmd_validate)

    p_bench = sub.add_parser("bench", help="time random symplectic+noise layers")
    p_bench.add_argument("--modes", default="8,16,32,64,128,256,512")
    p_bench.add_argument("--depth", type=int, default=100)
    p_bench.add_argument("--seed", type=int, required=True)
    p_bench.set_defaults(func=_cmd_bench)

    p_cmp = sub.add_parser("compare", help="diff engine moments against the Fock oracle")
    p_cmp.add_argument("circuit")
    p_cmp.add_argument("--cutoff", type=int, default=30)
    p_cmp.add_argument("--outcomes", help="JSON outcomes for fixed measurements")
    p_cmp.add_argument("--tol", type=float, default=compare.DEFAULT_COMPARE_TOL)
    p_cmp.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CircuitError as exc:
        print(f"circuit error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (GausimError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
