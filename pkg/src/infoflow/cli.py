"""Command-line front end: simulation, estimation, inference, benchmarks.

Every run embeds its full parameter record (the RunConfig) in the output,
as a top-level JSON field or a leading ``#`` comment line in CSVs, so any
artifact can be regenerated byte-identically from its own header.

Exit codes: 0 success, 1 usage error, 2 input-data error, 3 verification
or numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .bench import run_lorenz_sweep, run_series_sweep, run_table1_bench
from .dynamics import (
    CtmlConfig,
    DependencyGraph,
    LorenzParams,
    ctml_generate,
    enumerate_topologies,
    lorenz_generate,
)
from .errors import DivergedTrajectory, InfoflowError, InputDataError
from .estimation import (
    estimate_network,
    read_series_csv,
    read_symbols_csv,
    write_series_csv,
    write_symbols_csv,
    symbolize_median,
    symbolize_quantile,
)
from .flows import CERTIFIED_CHECKS, Conditioning, verify_network_theorems
from .lattice import (
    VerificationReport,
    random_system,
    verify_chain_rule_lemma2,
    verify_entropy_chain_rule,
    verify_identity_lemma1,
    verify_information_chain_rule,
    verify_joint_entropy_decomposition,
    verify_partial_expansion,
)
from .significance import infer_details

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3


@dataclass(frozen=True)
class RunConfig:
    """Resolved parameters of one CLI run, embedded in every output."""

    command: str
    parameters: dict

    def to_dict(self) -> dict:
        return {"command": self.command, "parameters": dict(self.parameters)}

    def as_comment(self) -> str:
        return "run_config " + json.dumps(
            self.to_dict(), sort_keys=True, separators=(",", ":")
        )


class _Parser(argparse.ArgumentParser):
    """argparse with the usage exit code pinned to 1."""

    def error(self, message: str) -> None:  # noqa: D102 - argparse override
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _resolve(args: argparse.Namespace, defaults: dict[str, Any]) -> dict[str, Any]:
    """defaults <- JSON config file <- explicit flags, in that order."""
    params = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path is not None:
        try:
            payload = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputDataError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputDataError(f"{config_path}: invalid JSON ({exc})") from exc
        if not isinstance(payload, dict):
            raise InputDataError(f"{config_path}: config must be a JSON object")
        unknown = sorted(set(payload) - set(defaults))
        if unknown:
            raise InputDataError(
                f"{config_path}: unknown config keys {', '.join(unknown)}"
            )
        params.update(payload)
    for key in defaults:
        if hasattr(args, key):
            params[key] = getattr(args, key)
    return params


def _require(params: dict, key: str, parser: argparse.ArgumentParser) -> Any:
    value = params.get(key)
    if value is None:
        parser.error(f"--{key.replace('_', '-')} is required")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _edge_list(text: str) -> list[tuple[int, int]]:
    edges = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            src, dst = tok.split(":")
            edges.append((int(src), int(dst)))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(
                f"bad edge {tok!r}; expected source:target"
            ) from exc
    return edges


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _write_report_csv(path: str, rows: Sequence, run_config: RunConfig) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {run_config.as_comment()}\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["lag", "from", "to", "statistic_bits", "p_value", "significant"]
        )
        for row in rows:
            writer.writerow(
                [
                    format(row.lag, ".17g"),
                    row.source,
                    row.target,
                    format(row.statistic, ".17g"),
                    format(row.p_value, ".17g"),
                    "true" if row.significant else "false",
                ]
            )


def _load_series(params: dict, parser: argparse.ArgumentParser):
    path = _require(params, "input", parser)
    if params.get("symbolic"):
        return read_symbols_csv(path)[0]
    return read_series_csv(path)[0]


# -- subcommand handlers -----------------------------------------------------


_LORENZ_DEFAULTS = {
    "sigma": 10.0,
    "rho": 28.0,
    "beta": 8.0 / 3.0,
    "initial": [1.0, 0.5, 0.0],
    "t0": 50.0,
    "t1": 2050.0,
    "dt_integrate": 1e-3,
    "resample_dt": 0.02,
    "samples": 100_000,
    "seed": 0,
    "output": None,
}


def _cmd_simulate_lorenz(args, parser) -> int:
    params = _resolve(args, _LORENZ_DEFAULTS)
    out = _require(params, "output", parser)
    initial = [float(v) for v in params["initial"]]
    if len(initial) != 3:
        parser.error("--initial needs exactly three numbers")
    lorenz = LorenzParams(
        sigma=float(params["sigma"]),
        rho=float(params["rho"]),
        beta=float(params["beta"]),
        initial=tuple(initial),
        t0=float(params["t0"]),
        t1=float(params["t1"]),
        dt_integrate=float(params["dt_integrate"]),
    )
    series = lorenz_generate(
        lorenz, float(params["resample_dt"]), int(params["samples"]), int(params["seed"])
    )
    run = RunConfig("simulate lorenz", params)
    write_series_csv(out, series, names=("x", "y", "z"), comments=[run.as_comment()])
    return EXIT_OK


_CTML_DEFAULTS = {
    "n_vars": 3,
    "edges": [],
    "topology": None,
    "epsilon": 0.2,
    "noise": 0.0,
    "steps": 100_000,
    "burn_in": 1000,
    "seed": 0,
    "output": None,
}


def _cmd_simulate_ctml(args, parser) -> int:
    params = _resolve(args, _CTML_DEFAULTS)
    out = _require(params, "output", parser)
    if params["topology"] is not None:
        try:
            payload = json.loads(Path(params["topology"]).read_text(encoding="utf-8"))
            graph = DependencyGraph.from_dict(payload)
        except OSError as exc:
            raise InputDataError(f"cannot read topology: {exc}") from exc
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputDataError(f"{params['topology']}: bad graph JSON ({exc})") from exc
    else:
        edges = [(int(s), int(t)) for s, t in params["edges"]]
        graph = DependencyGraph.from_edges(int(params["n_vars"]), edges)
    config = CtmlConfig(
        topology=graph,
        epsilon=float(params["epsilon"]),
        noise_amplitude=float(params["noise"]),
        steps=int(params["steps"]),
        burn_in=int(params["burn_in"]),
        seed=int(params["seed"]),
    )
    series = ctml_generate(config)
    record = dict(params, edges=[list(e) for e in graph.edges], n_vars=graph.n_vars)
    run = RunConfig("simulate ctml", record)
    write_series_csv(out, series, comments=[run.as_comment()])
    return EXIT_OK


_SYMBOLIZE_DEFAULTS = {"input": None, "bins": 2, "output": None}


def _cmd_symbolize(args, parser) -> int:
    params = _resolve(args, _SYMBOLIZE_DEFAULTS)
    out = _require(params, "output", parser)
    series, names = read_series_csv(_require(params, "input", parser))
    bins = int(params["bins"])
    symbols = symbolize_median(series) if bins == 2 else symbolize_quantile(series, bins)
    run = RunConfig("symbolize", params)
    write_symbols_csv(out, symbols, names=names, comments=[run.as_comment()])
    return EXIT_OK


_NETWORK_DEFAULTS = {
    "input": None,
    "symbolic": False,
    "order": 3,
    "lag": 1,
    "bins": 2,
    "mode": "mte",
    "output": None,
}


def _cmd_network(args, parser) -> int:
    params = _resolve(args, _NETWORK_DEFAULTS)
    out = _require(params, "output", parser)
    data = _load_series(params, parser)
    network = estimate_network(
        data,
        order=int(params["order"]),
        lag=int(params["lag"]),
        bins=int(params["bins"]),
        mode=Conditioning.parse(params["mode"]),
    )
    run = RunConfig("network", params)
    _write_json(out, {"run_config": run.to_dict(), **network.to_dict()})
    return EXIT_OK


_INFER_DEFAULTS = {
    "input": None,
    "symbolic": False,
    "order": 3,
    "lag": 1,
    "mode": "mte",
    "alpha": 0.01,
    "surrogates": 200,
    "seed": 0,
    "output": None,
}


def _cmd_infer(args, parser) -> int:
    params = _resolve(args, _INFER_DEFAULTS)
    out = _require(params, "output", parser)
    data = _load_series(params, parser)
    graph, tests = infer_details(
        data,
        order=int(params["order"]),
        lag=int(params["lag"]),
        mode=Conditioning.parse(params["mode"]),
        alpha=float(params["alpha"]),
        n_surrogates=int(params["surrogates"]),
        seed=int(params["seed"]),
    )
    run = RunConfig("infer", params)
    _write_json(
        out,
        {
            "run_config": run.to_dict(),
            "graph": graph.to_dict(),
            "tests": [t.to_dict() for t in tests],
        },
    )
    return EXIT_OK


_SWEEP_DEFAULTS = {
    "input": None,
    "lorenz": False,
    "lags": None,
    "order": 1,
    "mode": "mte",
    "alpha": 0.01,
    "surrogates": 200,
    "seed": 0,
    "output": None,
}


def _cmd_lag_sweep(args, parser) -> int:
    params = _resolve(args, _SWEEP_DEFAULTS)
    out = _require(params, "output", parser)
    lags = params["lags"]
    if not lags:
        parser.error("--lags needs at least one value")
    mode = Conditioning.parse(params["mode"])
    common = dict(
        order=int(params["order"]),
        mode=mode,
        alpha=float(params["alpha"]),
        n_surrogates=int(params["surrogates"]),
        seed=int(params["seed"]),
    )
    if params["lorenz"] and params["input"]:
        parser.error("--lorenz and --input are mutually exclusive")
    if params["lorenz"]:
        result = run_lorenz_sweep([float(v) for v in lags], **common)
    elif params["input"]:
        step_lags = []
        for v in lags:
            if float(v) != int(float(v)) or int(float(v)) < 1:
                parser.error("--lags must be positive integers for CSV input")
            step_lags.append(int(float(v)))
        series = read_series_csv(params["input"])[0]
        result = run_series_sweep(series, step_lags, **common)
    else:
        parser.error("one of --lorenz or --input is required")
    run = RunConfig("lag-sweep", params)
    _write_report_csv(out, result.rows, run)
    return EXIT_OK


_BENCH_DEFAULTS = {
    "n_vars": 3,
    "epsilon": 0.2,
    "noise": 0.0,
    "steps": 100_000,
    "order": 3,
    "lag": 1,
    "alpha": 0.01,
    "surrogates": 200,
    "seed": 0,
    "case_limit": None,
    "output": None,
    "cases_output": None,
}


def _edges_cell(graph: DependencyGraph) -> str:
    return ";".join(f"{s}:{t}" for s, t in sorted(graph.edges)) or "-"


def _cmd_bench_table1(args, parser) -> int:
    params = _resolve(args, _BENCH_DEFAULTS)
    out = _require(params, "output", parser)
    n_vars = int(params["n_vars"])
    if not 3 <= n_vars <= 5:
        parser.error("--n-vars must be 3, 4, or 5")
    limit = params["case_limit"]
    result = run_table1_bench(
        n_vars,
        epsilon=float(params["epsilon"]),
        noise_amplitude=float(params["noise"]),
        steps=int(params["steps"]),
        order=int(params["order"]),
        lag=int(params["lag"]),
        alpha=float(params["alpha"]),
        n_surrogates=int(params["surrogates"]),
        seed=int(params["seed"]),
        case_limit=None if limit is None else int(limit),
    )
    run = RunConfig("bench-table1", params)
    _write_json(
        out,
        {
            "run_config": run.to_dict(),
            "n_vars": result.n_vars,
            "case_indices": list(result.case_indices),
            "scores": {m: s.to_dict() for m, s in result.scores.items()},
        },
    )
    if params["cases_output"]:
        with open(params["cases_output"], "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# {run.as_comment()}\n")
            writer = csv.writer(fh)
            writer.writerow(
                ["case_index", "class_size", "mode", "truth", "estimated", "exact"]
            )
            for case in result.cases:
                for mode_name, estimate in case.estimates.items():
                    writer.writerow(
                        [
                            case.case_index,
                            case.class_size,
                            mode_name,
                            _edges_cell(case.truth),
                            _edges_cell(estimate),
                            "true" if estimate == case.truth else "false",
                        ]
                    )
    return EXIT_OK


_VERIFY_DEFAULTS = {
    "suite": None,
    "trials": 200,
    "n_vars": 3,
    "t_steps": 2,
    "seed": 0,
    "output": None,
}


def _lemma_reports(
    system, n_vars: int, rng: np.random.Generator
) -> list[VerificationReport]:
    n_axes = system.n_axes
    positions = list(rng.permutation(n_axes))
    reports = [
        verify_entropy_chain_rule(system, positions),
        verify_joint_entropy_decomposition(system),
    ]
    if n_axes >= 3:
        cut_a = 1 + int(rng.integers(0, n_axes - 2))
        head, tail = positions[:cut_a], positions[cut_a:]
        cut_b = 1 + int(rng.integers(0, len(tail)))
        parts = [tail[:cut_b]] + ([tail[cut_b:]] if tail[cut_b:] else [])
        reports.append(verify_information_chain_rule(system, head, parts))
        reports.append(
            verify_identity_lemma1(system, [head, tail[:cut_b]], tail[cut_b:])
        )
    reports.append(verify_chain_rule_lemma2(system, _random_composition(n_vars, rng)))
    for k in sorted({1, min(2, n_vars), n_vars}):
        reports.append(verify_partial_expansion(system, k))
    return reports


def _random_composition(n: int, rng: np.random.Generator) -> list[int]:
    sizes = []
    left = n
    while left > 0:
        take = int(rng.integers(1, left + 1))
        sizes.append(take)
        left -= take
    return sizes


def _cmd_verify(args, parser) -> int:
    params = _resolve(args, _VERIFY_DEFAULTS)
    suite = _require(params, "suite", parser)
    trials = int(params["trials"])
    n_vars = int(params["n_vars"])
    t_steps = int(params["t_steps"])
    master = int(params["seed"])
    rng = np.random.default_rng(np.random.SeedSequence(master, spawn_key=(0xF0,)))

    summaries: dict[str, dict] = {}
    failures: list[dict] = []
    hard_failures = 0
    for trial in range(trials):
        system = random_system(n_vars, t_steps, seed=master + trial)
        if suite == "lemmas":
            reports = _lemma_reports(system, n_vars, rng)
        else:
            reports = verify_network_theorems(system)
        for report in reports:
            name = report.identity_name
            asserted = (
                suite == "lemmas" or name.split("[")[0] in CERTIFIED_CHECKS
            )
            entry = summaries.setdefault(
                name,
                {"count": 0, "min_gap": np.inf, "max_gap": -np.inf, "sum_gap": 0.0,
                 "passed_all": True, "asserted": asserted},
            )
            entry["count"] += 1
            entry["min_gap"] = min(entry["min_gap"], report.gap)
            entry["max_gap"] = max(entry["max_gap"], report.gap)
            entry["sum_gap"] += report.gap
            if not report.passed:
                entry["passed_all"] = False
                if entry["asserted"]:
                    hard_failures += 1
                    failures.append({"trial": trial, **report.to_dict()})

    for entry in summaries.values():
        entry["mean_gap"] = entry.pop("sum_gap") / entry["count"]
    run = RunConfig("verify", params)
    payload = {
        "run_config": run.to_dict(),
        "suite": suite,
        "trials": trials,
        "hard_failures": hard_failures,
        "summaries": summaries,
        "failures": failures,
    }
    if params["output"]:
        _write_json(params["output"], payload)
    else:
        json.dump(payload, sys.stdout, indent=2)
        print()
    for name in sorted(summaries):
        s = summaries[name]
        status = "ok" if s["passed_all"] else ("FAIL" if s["asserted"] else "reported")
        print(
            f"{name}: {status} over {s['count']} checks, gap "
            f"[{s['min_gap']:.3g}, {s['max_gap']:.3g}] mean {s['mean_gap']:.3g}",
            file=sys.stderr,
        )
    return EXIT_VERIFY if hard_failures else EXIT_OK


_TOPOLOGIES_DEFAULTS = {"n_vars": 3, "output": None}


def _cmd_topologies(args, parser) -> int:
    params = _resolve(args, _TOPOLOGIES_DEFAULTS)
    out = _require(params, "output", parser)
    classes = enumerate_topologies(int(params["n_vars"]))
    run = RunConfig("topologies", params)
    _write_json(
        out,
        {
            "run_config": run.to_dict(),
            "n_vars": int(params["n_vars"]),
            "n_classes": len(classes),
            "total": sum(c.size for c in classes),
            "classes": [
                {"edges": [list(e) for e in sorted(c.graph.edges)], "size": c.size}
                for c in classes
            ],
        },
    )
    return EXIT_OK


# -- parser assembly ---------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser, *flags: str) -> None:
    spec: dict[str, dict] = {
        "config": dict(help="JSON file with parameter defaults; flags override"),
        "input": dict(help="input CSV path"),
        "symbolic": dict(action="store_true", help="input holds integer symbols"),
        "order": dict(type=int, help="Markov order (past points per variable)"),
        "lag": dict(type=int, help="spacing between past points, in samples"),
        "bins": dict(type=int, help="symbol levels (2 = median split)"),
        "mode": dict(choices=("mte", "pte"), help="conditioning mode"),
        "alpha": dict(type=float, help="significance level"),
        "surrogates": dict(type=int, help="surrogate count for the null"),
        "seed": dict(type=int, help="master seed"),
        "output": dict(help="output file path"),
    }
    for flag in flags:
        sub.add_argument(f"--{flag.replace('_', '-')}", dest=flag, **spec[flag])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="infoflow", description=__doc__, argument_default=argparse.SUPPRESS)
    subs = parser.add_subparsers(dest="command", metavar="command")

    sim = subs.add_parser("simulate", help="generate model time series", argument_default=argparse.SUPPRESS)
    sim_subs = sim.add_subparsers(dest="model", metavar="model")

    lor = sim_subs.add_parser("lorenz", help="chaotic three-variable flow", argument_default=argparse.SUPPRESS)
    for flag in ("sigma", "rho", "beta", "t0", "t1"):
        lor.add_argument(f"--{flag}", dest=flag, type=float)
    lor.add_argument("--dt-integrate", dest="dt_integrate", type=float)
    lor.add_argument("--resample-dt", dest="resample_dt", type=float)
    lor.add_argument("--samples", dest="samples", type=int)
    lor.add_argument("--initial", dest="initial", type=_float_list,
                     help="comma-separated starting point, three numbers")
    _add_common(lor, "seed", "output", "config")
    lor.set_defaults(func=_cmd_simulate_lorenz, _parser=lor)

    ctml = sim_subs.add_parser("ctml", help="coupled tent map lattice", argument_default=argparse.SUPPRESS)
    ctml.add_argument("--n-vars", dest="n_vars", type=int)
    ctml.add_argument("--edges", dest="edges", type=_edge_list,
                      help="comma-separated source:target pairs")
    ctml.add_argument("--topology", dest="topology", help="graph JSON path")
    ctml.add_argument("--epsilon", dest="epsilon", type=float, help="coupling strength")
    ctml.add_argument("--noise", dest="noise", type=float, help="noise amplitude")
    ctml.add_argument("--steps", dest="steps", type=int)
    ctml.add_argument("--burn-in", dest="burn_in", type=int)
    _add_common(ctml, "seed", "output", "config")
    ctml.set_defaults(func=_cmd_simulate_ctml, _parser=ctml)

    sym = subs.add_parser("symbolize", help="discretize a recording", argument_default=argparse.SUPPRESS)
    _add_common(sym, "input", "bins", "output", "config")
    sym.set_defaults(func=_cmd_symbolize, _parser=sym)

    net = subs.add_parser("network", help="full information-flow decomposition", argument_default=argparse.SUPPRESS)
    _add_common(net, "input", "symbolic", "order", "lag", "bins", "mode", "output", "config")
    net.set_defaults(func=_cmd_network, _parser=net)

    inf = subs.add_parser("infer", help="significance-tested dependency graph", argument_default=argparse.SUPPRESS)
    _add_common(inf, "input", "symbolic", "order", "lag", "mode", "alpha",
                "surrogates", "seed", "output", "config")
    inf.set_defaults(func=_cmd_infer, _parser=inf)

    sweep = subs.add_parser("lag-sweep", help="directed statistics across lags", argument_default=argparse.SUPPRESS)
    sweep.add_argument("--lorenz", dest="lorenz", action="store_true",
                       help="integrate the chaotic flow per lag instead of reading a CSV")
    sweep.add_argument("--lags", dest="lags", type=_float_list,
                       help="comma-separated lag values")
    _add_common(sweep, "input", "order", "mode", "alpha", "surrogates", "seed",
                "output", "config")
    sweep.set_defaults(func=_cmd_lag_sweep, _parser=sweep)

    bench = subs.add_parser("bench-table1", help="topology recovery benchmark", argument_default=argparse.SUPPRESS)
    bench.add_argument("--n-vars", dest="n_vars", type=int)
    bench.add_argument("--epsilon", dest="epsilon", type=float)
    bench.add_argument("--noise", dest="noise", type=float)
    bench.add_argument("--steps", dest="steps", type=int)
    bench.add_argument("--case-limit", dest="case_limit", type=int,
                       help="seeded random subset size (full enumeration otherwise)")
    bench.add_argument("--cases-output", dest="cases_output",
                       help="optional per-case CSV path")
    _add_common(bench, "order", "lag", "alpha", "surrogates", "seed", "output", "config")
    bench.set_defaults(func=_cmd_bench_table1, _parser=bench)

    ver = subs.add_parser("verify", help="run identity and balance suites", argument_default=argparse.SUPPRESS)
    ver.add_argument("--suite", dest="suite", choices=("lemmas", "network"))
    ver.add_argument("--trials", dest="trials", type=int)
    ver.add_argument("--n-vars", dest="n_vars", type=int)
    ver.add_argument("--t-steps", dest="t_steps", type=int)
    _add_common(ver, "seed", "output", "config")
    ver.set_defaults(func=_cmd_verify, _parser=ver)

    topo = subs.add_parser("topologies", help="canonical dependency classes", argument_default=argparse.SUPPRESS)
    topo.add_argument("--n-vars", dest="n_vars", type=int)
    _add_common(topo, "output", "config")
    topo.set_defaults(func=_cmd_topologies, _parser=topo)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func: Callable | None = getattr(args, "func", None)
    if func is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return func(args, getattr(args, "_parser", parser))
    except SystemExit as exc:
        return int(exc.code or 0)
    except InputDataError as exc:
        print(f"infoflow: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DivergedTrajectory as exc:
        print(f"infoflow: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except InfoflowError as exc:
        print(f"infoflow: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"infoflow: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
