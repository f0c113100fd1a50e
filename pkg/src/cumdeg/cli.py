"""Command-line entry point: ``cumdeg {centrality,consensus,compare,benchmark,gas}``.

Exit codes: 0 success, 1 unreadable/unparseable input, 2 invalid parameters,
3 computation error. Data goes to ``--out`` or standard output; diagnostics
go to standard error. Each run also writes a manifest (``<out>.manifest.json``,
or standard error when writing data to standard output).
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from importlib import resources
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import compare, consensus, cumulative, gas, graph
from .classic import (
    CentralityError,
    Measure,
    _jsonable,
    betweenness_centrality,
    closeness_centrality,
    degree_centrality,
    eigenvector_centrality,
)

PARSE_ERROR, PARAM_ERROR, COMPUTE_ERROR = 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


# ---------------------------------------------------------------------------
# graph resolution

_BUILTIN_HELP = (
    "edge-list path, or a builtin: bucky, sample, er:N:P, ws:N:K:BETA, "
    "path:N, cycle:N, complete:N, star:N, cliques:ARMS:SIZE"
)


def resolve_graph(spec: str, seed: int) -> graph.Graph:
    name, *args = spec.split(":")
    try:
        if spec == "bucky":
            return graph.gen_bucky()
        if spec == "sample":
            text = resources.files("cumdeg.data").joinpath("sample_sparse.txt").read_text()
            return graph.load_edge_list(text)
        if name == "er" and len(args) == 2:
            return graph.gen_random(int(args[0]), float(args[1]), seed)
        if name == "ws" and len(args) == 3:
            return graph.gen_small_world(int(args[0]), int(args[1]), float(args[2]), seed)
        simple = {
            "path": graph.gen_path,
            "cycle": graph.gen_cycle,
            "complete": graph.gen_complete,
            "star": graph.gen_star,
        }
        if name in simple and len(args) == 1:
            return simple[name](int(args[0]))
        if name == "cliques" and len(args) == 2:
            return graph.gen_star_of_cliques(int(args[0]), int(args[1]))
    except (ValueError, graph.GraphError) as exc:
        raise CliError(PARAM_ERROR, f"bad graph spec {spec!r}: {exc}") from None
    path = Path(spec)
    try:
        with path.open("rb") as fh:
            return graph.load_edge_list(fh)
    except OSError as exc:
        raise CliError(PARSE_ERROR, f"cannot read graph {spec!r}: {exc.strerror}") from None
    except graph.GraphError as exc:
        raise CliError(PARSE_ERROR, f"{spec}: {exc}") from None


# ---------------------------------------------------------------------------
# output


class Output:
    """Collects data files for one run and writes them plus the manifest."""

    def __init__(self, args: argparse.Namespace, inputs: dict):
        self.args = args
        self.inputs = inputs
        self.written: list[str] = []

    def emit(self, data_csv: str, meta: dict) -> None:
        meta = _jsonable(meta)
        if self.args.format == "json":
            body = json.dumps({"data": _csv_records(data_csv), "meta": meta}, indent=2, sort_keys=True) + "\n"
        else:
            body = data_csv
        if self.args.out:
            out = Path(self.args.out)
            out.write_text(body)
            self.written.append(str(out))
            if self.args.format == "csv":
                side = out.with_name(out.name + ".meta.json")
                side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
                self.written.append(str(side))
        else:
            sys.stdout.write(body)
        self._manifest()

    def _manifest(self) -> None:
        manifest = {
            "command": self.args.command,
            "inputs": _jsonable(self.inputs),
            "seed": self.args.seed,
            "outputs": list(self.written),
            "tool_version": _tool_version(),
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        if self.args.out:
            path = Path(self.args.out)
            path = path.with_name(path.name + ".manifest.json")
            manifest["outputs"].append(str(path))
            path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        else:
            manifest["outputs"].append("<stdout>")
            print("manifest: " + json.dumps(manifest, sort_keys=True), file=sys.stderr)


def _csv_records(text: str) -> list[dict]:
    import csv
    import io

    return list(csv.DictReader(io.StringIO(text)))


def _inputs(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "out", "format")}


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise CliError(PARAM_ERROR, f"{what} must be a list of numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_centrality(args: argparse.Namespace) -> None:
    g = resolve_graph(args.graph, args.seed)
    measure = Measure(args.measure)
    try:
        params = cumulative.CumulativeParams(
            layer_n=args.n,
            mode=args.mode,
            lazy=args.lazy,
            discounts=tuple(_floats(args.discounts, "--discounts")) if args.discounts else (),
            include_self=args.include_self,
        )
        if measure in (Measure.CDN, Measure.D2CD) and params.layer_n < 1:
            raise graph.GraphError("--n must be >= 1")
        if measure is Measure.D2CD and len(params.discounts) != params.layer_n:
            raise graph.GraphError("--discounts must have exactly --n entries")
        if measure is Measure.DCD and params.mode is cumulative.Mode.WALK:
            raise graph.GraphError("dcd is only defined in tree mode (walk sum diverges)")
    except graph.GraphError as exc:
        raise CliError(PARAM_ERROR, str(exc)) from None

    try:
        if measure is Measure.DEGREE:
            vec = degree_centrality(g)
        elif measure is Measure.BETWEENNESS:
            vec = betweenness_centrality(g, ordered=args.ordered, exact=not args.fast)
        elif measure is Measure.CLOSENESS:
            vec = closeness_centrality(g, inverse=args.inverse)
        elif measure is Measure.EIGENVECTOR:
            vec = eigenvector_centrality(g, tol=args.tol, max_iter=args.max_iter)
        else:
            vec = cumulative.cd_vector_all(g, params, measure)
    except (CentralityError, graph.GraphError) as exc:
        raise CliError(COMPUTE_ERROR, str(exc)) from None
    meta = {"measure": vec.measure.value, "params": vec.params, "graph_hash": compare.graph_hash(g)}
    Output(args, _inputs(args)).emit(vec.to_csv(), meta)


def _initial_state(args: argparse.Namespace, n: int) -> np.ndarray:
    if args.x0:
        x0 = np.array(_floats(args.x0, "--x0"))
    elif args.x0_file:
        try:
            x0 = np.array(_floats(Path(args.x0_file).read_text(), "--x0-file"))
        except OSError as exc:
            raise CliError(PARSE_ERROR, f"cannot read {args.x0_file}: {exc.strerror}") from None
    else:
        x0 = np.random.default_rng(args.seed).uniform(0.0, 1.0, size=n)
    if len(x0) != n:
        raise CliError(PARAM_ERROR, f"initial state has {len(x0)} entries, graph has {n} nodes")
    return x0


def _dc_scores(g: graph.Graph, n: int):
    return cumulative.cd_vector_all(g, cumulative.CumulativeParams(n, cumulative.Mode.WALK, lazy=True))


def cmd_consensus(args: argparse.Namespace) -> None:
    g = resolve_graph(args.graph, args.seed)
    x0 = _initial_state(args, g.n)
    if args.base_period <= 0 or args.tol <= 0 or args.max_iter < 0 or args.dc_n < 1:
        raise CliError(PARAM_ERROR, "tolerances, periods and --dc-n must be positive")
    try:
        scheme = consensus.Scheme(args.scheme)
        scores = _dc_scores(g, args.dc_n) if scheme is consensus.Scheme.DIRECTED else None
        w = consensus.build_weights(g, scheme, scores)
        if args.schedule:
            sched = consensus.schedule_from_weights(w, args.base_period)
            trace = consensus.run_scheduled_consensus(g, w, sched, x0, args.tol, args.max_iter, thin=args.thin)
        else:
            trace = consensus.run_consensus(w, x0, args.tol, args.max_iter, thin=args.thin)
    except consensus.ConsensusError as exc:
        raise CliError(COMPUTE_ERROR, str(exc)) from None
    summary = {
        "iterations": trace.iterations,
        "converged": trace.converged,
        "limit": trace.limit,
        "initial_average": trace.initial_average,
        "average_preserving": consensus.check_average_preservation(w),
        "scheme": scheme.value,
    }
    line = (
        f"iterations={trace.iterations} converged={trace.converged} "
        f"limit={trace.limit!r} average_preserved={summary['average_preserving']}"
    )
    print(line, file=sys.stdout if args.out else sys.stderr)
    Output(args, _inputs(args)).emit(trace.to_csv(), {"summary": summary, "graph_hash": compare.graph_hash(g)})


def cmd_compare(args: argparse.Namespace) -> None:
    if args.max_n < 1:
        raise CliError(PARAM_ERROR, "--max-n must be >= 1")
    g = resolve_graph(args.graph, args.seed)
    try:
        profile = compare.convergence_profile(
            g,
            args.max_n,
            mode=args.mode,
            lazy=not args.no_lazy,
            norm=args.norm,
            thresholds=tuple(args.threshold or [0.01]),
            graph_id=args.graph,
        )
    except (CentralityError, graph.GraphError) as exc:
        raise CliError(COMPUTE_ERROR, str(exc)) from None
    meta = json.loads(profile.metadata_json())
    meta["seed"] = args.seed
    Output(args, _inputs(args)).emit(profile.to_csv(), meta)


def cmd_benchmark(args: argparse.Namespace) -> None:
    g = resolve_graph(args.graph, args.seed)
    x0 = _initial_state(args, g.n)
    try:
        rows = compare.benchmark_consensus(
            g,
            args.schemes,
            x0,
            args.tol,
            args.max_iter,
            cumulative.CumulativeParams(args.dc_n, cumulative.Mode.WALK, lazy=True),
        )
    except (CentralityError, consensus.ConsensusError, graph.GraphError) as exc:
        raise CliError(COMPUTE_ERROR, str(exc)) from None
    meta = {"graph_hash": compare.graph_hash(g), "seed": args.seed, "tol": args.tol}
    Output(args, _inputs(args)).emit(compare.benchmark_csv(rows), meta)


def cmd_gas(args: argparse.Namespace) -> None:
    try:
        scenario = gas.load_scenario(args.scenario)
    except OSError as exc:
        raise CliError(PARSE_ERROR, f"cannot read scenario: {exc.strerror}") from None
    except (gas.ScenarioError, KeyError, TypeError, ValueError) as exc:
        raise CliError(PARSE_ERROR, f"bad scenario: {exc}") from None
    net = scenario.network
    try:
        for spec in args.fault or []:
            net = gas.inject_fault(net, *gas.parse_fault(spec))
    except gas.ScenarioError as exc:
        raise CliError(PARAM_ERROR, str(exc)) from None
    seed = scenario.seed if args.seed is None else args.seed
    args.seed = seed
    beta = scenario.beta if args.beta is None else args.beta
    try:
        result = gas.run_coordination(
            gas.Scenario(net, scenario.desired, beta, seed), tol=args.tol, max_iter=args.max_iter
        )
    except (gas.CoordinationError, consensus.ConsensusError) as exc:
        raise CliError(COMPUTE_ERROR, str(exc)) from None
    meta = {**result.metadata, "gap": result.gap, "faults": args.fault or []}
    Output(args, _inputs(args)).emit(result.to_csv(), meta)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="RNG seed (default 0; gas: the scenario's seed)")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    parser = argparse.ArgumentParser(prog="cumdeg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("centrality", parents=[common], help="score every node")
    p.add_argument("--graph", required=True, help=_BUILTIN_HELP)
    p.add_argument("--measure", required=True, choices=[m.value for m in Measure])
    p.add_argument("--n", type=int, default=1, help="layer count for cdn/d2cd")
    p.add_argument("--mode", choices=["walk", "tree"], default="walk")
    p.add_argument("--lazy", action="store_true", help="walk with A + I")
    p.add_argument("--discounts", help="comma-separated d2cd coefficients")
    p.add_argument("--include-self", action="store_true")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--ordered", action="store_true", help="betweenness over ordered pairs")
    p.add_argument("--fast", action="store_true", help="float betweenness accumulation")
    p.add_argument("--inverse", action="store_true", help="also report 1/closeness")
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("consensus", parents=[common], help="run a consensus iteration")
    p.add_argument("--graph", required=True, help=_BUILTIN_HELP)
    p.add_argument("--scheme", required=True, choices=[s.value for s in consensus.Scheme])
    p.add_argument("--x0", help="comma-separated initial state")
    p.add_argument("--x0-file", help="file with whitespace-separated initial state")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--schedule", action="store_true", help="edge activation periods ~ 1/w")
    p.add_argument("--base-period", type=float, default=1.0)
    p.add_argument("--dc-n", type=int, default=3, help="CD^n layers for the directed scheme")
    p.add_argument("--thin", type=int, default=1, help="keep every k-th state")
    p.set_defaults(func=cmd_consensus)

    p = sub.add_parser("compare", parents=[common], help="CD^n vs eigenvector profile")
    p.add_argument("--graph", required=True, help=_BUILTIN_HELP)
    p.add_argument("--max-n", type=int, default=50)
    p.add_argument("--mode", choices=["walk", "tree"], default="walk")
    p.add_argument("--no-lazy", action="store_true")
    p.add_argument("--norm", choices=["linf", "l2"], default="linf")
    p.add_argument("--threshold", type=float, action="append")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("benchmark", parents=[common], help="tabulate weight schemes")
    p.add_argument("--graph", required=True, help=_BUILTIN_HELP)
    p.add_argument(
        "--schemes",
        nargs="+",
        choices=[s.value for s in consensus.Scheme],
        default=["vicsek", "metropolis", "max_degree", "directed"],
    )
    p.add_argument("--x0", help="comma-separated initial state")
    p.add_argument("--x0-file")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--dc-n", type=int, default=3)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("gas", parents=[common], help="gas network coordination")
    p.add_argument("--scenario", help="scenario JSON (default: bundled network)")
    p.add_argument("--fault", action="append", help="e.g. pipe:station1-station4=break")
    p.add_argument("--beta", type=float)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.set_defaults(func=cmd_gas)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.seed is None and args.command != "gas":
        args.seed = 0
    try:
        args.func(args)
    except CliError as exc:
        print(f"cumdeg {args.command}: {exc}", file=sys.stderr)
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
