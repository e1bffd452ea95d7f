"""Command line front end: scheme runs, flip-probability sweeps, retry walk.

Output is deterministic byte for byte: floats are printed with 17
significant digits (lossless double round trip), JSON key order follows
construction order, and CSV uses LF endings.  Exit codes: 0 success,
2 usage or parameter error, 3 internal contract violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import iomodel, schemes
from .errors import CavnetError, ParameterError
from .iomodel import format_float
from .verify import Graph

SCHEME_NAMES = (
    "ghz-atoms",
    "w",
    "w3-prob",
    "w3-det",
    "cluster",
    "ghz-fields",
    "field-cz",
    "graph",
)


def dump_json(value, indent: int = 0) -> str:
    """Render JSON with full-precision floats and stable ordering."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            raise ParameterError(f"non-finite value {x} cannot be serialized")
        return format_float(x)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [
            f"{inner}{json.dumps(str(k))}: {dump_json(v, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        rows = [f"{inner}{dump_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    raise ParameterError(f"cannot serialize {type(value).__name__}")


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def _parse_float_list(raw: str, flag: str) -> list[float]:
    try:
        values = [float(tok) for tok in raw.split(",") if tok != ""]
    except ValueError:
        raise ParameterError(f"{flag} expects comma-separated numbers, got {raw!r}")
    if not values:
        raise ParameterError(f"{flag} got an empty list")
    return values


def _parse_tau_range(raw: str) -> list[float]:
    parts = raw.split(":")
    if len(parts) != 3:
        raise ParameterError(f"--tau-range expects start:stop:count, got {raw!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise ParameterError(f"--tau-range expects start:stop:count, got {raw!r}")
    if start <= 0 or stop <= 0 or count < 1:
        raise ParameterError("--tau-range needs positive start/stop and count >= 1")
    if count == 1:
        return [start]
    return [float(t) for t in np.geomspace(start, stop, count)]


def _load_graph(path: str) -> Graph:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read graph file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ParameterError(f"graph file {path} is not valid JSON: {exc}")
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise ParameterError(
            'graph file must be {"vertices": int, "edges": [[u,v], ...]}'
        )
    vertices = obj["vertices"]
    edges = obj["edges"]
    if not isinstance(vertices, int) or not isinstance(edges, list):
        raise ParameterError("graph file fields have wrong types")
    pairs = []
    for entry in edges:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ParameterError(f"edge entries must be [u, v] pairs, got {entry!r}")
        pairs.append((int(entry[0]), int(entry[1])))
    return Graph(vertices, pairs)


def _build_scheme(args) -> schemes.Scheme:
    name = args.scheme
    needs_n = {"ghz-atoms", "w", "cluster", "ghz-fields"}
    if name in needs_n:
        if args.n is None:
            raise ParameterError(f"scheme {name} requires --n")
        builder = {
            "ghz-atoms": schemes.build_ghz_atoms,
            "w": schemes.build_w_pow2,
            "cluster": schemes.build_cluster_atoms,
            "ghz-fields": schemes.build_ghz_fields,
        }[name]
        return builder(args.n)
    if name == "w3-prob":
        return schemes.build_w3_probabilistic()
    if name == "w3-det":
        return schemes.build_w3_deterministic()
    if name == "field-cz":
        return schemes.build_field_cz_pair()
    if name == "graph":
        if args.graph is not None:
            if args.kind is not None or args.n is not None:
                raise ParameterError("--graph excludes --kind/--n")
            return schemes.build_field_graph(graph=_load_graph(args.graph))
        if args.kind is None or args.n is None:
            raise ParameterError("scheme graph needs --kind and --n, or --graph FILE")
        return schemes.build_field_graph(kind=args.kind, n=args.n)
    raise ParameterError(f"unknown scheme {name!r}")


def cmd_run_scheme(args) -> int:
    report = schemes.run_report(_build_scheme(args))
    _emit(dump_json(report) + "\n", args.out)
    return 0


def cmd_flip_sweep(args) -> int:
    gs = _parse_float_list(args.g, "--g")
    if (args.tau is None) == (args.tau_range is None):
        raise ParameterError("pass exactly one of --tau or --tau-range")
    taus = (
        _parse_float_list(args.tau, "--tau")
        if args.tau is not None
        else _parse_tau_range(args.tau_range)
    )
    rows = iomodel.flip_probability_sweep(gs, taus, step=args.step)
    _emit(iomodel.sweep_csv_text(rows), args.out)
    return 0


def cmd_retry_walk(args) -> int:
    params = schemes.RetryWalkParams(
        p_flip=args.p, n_cavities=args.n, max_steps=args.max_steps
    )
    result = schemes.retry_walk(params)
    payload = {
        "p_flip": params.p_flip,
        "n_cavities": params.n_cavities,
        "max_steps": params.max_steps,
        "success_prob": result.success_prob,
        "expected_steps": result.expected_steps,
        "conditional_fidelity": result.conditional_fidelity,
    }
    if args.mc_trajectories is not None:
        payload["mc_trajectories"] = args.mc_trajectories
        payload["seed"] = args.seed
        payload["mc_success_prob"] = schemes.retry_walk_mc(
            params, args.mc_trajectories, args.seed
        )
    _emit(dump_json(payload) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavnet",
        description="Simulate cavity-mediated entanglement-generation networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run-scheme", help="run a scheme, print outcome JSON")
    run_p.add_argument("scheme", choices=SCHEME_NAMES)
    run_p.add_argument("--n", type=int, default=None, help="register size")
    run_p.add_argument(
        "--kind",
        choices=("star", "linear", "ring"),
        default=None,
        help="named graph family for the graph scheme",
    )
    run_p.add_argument(
        "--graph", default=None, metavar="FILE", help="JSON graph description"
    )
    run_p.add_argument("--out", default=None, help="write output to a file")
    run_p.set_defaults(func=cmd_run_scheme)

    sweep_p = sub.add_parser("flip-sweep", help="flip probability sweep to CSV")
    sweep_p.add_argument("--g", required=True, help="comma list of g/kappa values")
    sweep_p.add_argument("--tau", default=None, help="comma list of kappa*tau values")
    sweep_p.add_argument(
        "--tau-range",
        default=None,
        metavar="START:STOP:COUNT",
        help="log-spaced kappa*tau values",
    )
    sweep_p.add_argument(
        "--step", type=float, default=None, help="override the integrator step"
    )
    sweep_p.add_argument("--out", default=None, help="write CSV to a file")
    sweep_p.set_defaults(func=cmd_flip_sweep)

    walk_p = sub.add_parser("retry-walk", help="repeat-until-success walk statistics")
    walk_p.add_argument("--p", type=float, required=True, help="per-block flip probability")
    walk_p.add_argument("--n", type=int, required=True, help="number of chained cavities")
    walk_p.add_argument("--max-steps", type=int, default=10_000)
    walk_p.add_argument(
        "--mc-trajectories", type=int, default=None, help="Monte-Carlo cross-check size"
    )
    walk_p.add_argument("--seed", type=int, default=0)
    walk_p.add_argument("--out", default=None, help="write output to a file")
    walk_p.set_defaults(func=cmd_retry_walk)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CavnetError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
