"""Command-line front end writing CSV/JSON artifacts for every experiment.

Every command writes its outputs plus a manifest (same path with a
``.manifest.json`` suffix) recording the command, resolved parameters, and
produced artifacts; re-running the recorded argv reproduces the artifacts
bit-identically.  Exit codes: 0 success, 1 usage or input error, 2
numerical-validation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptional import exceptional_report_dict, survival_operator, survival_spectrum
from .experiments import (
    NoiseConfig,
    noise_run,
    non_monitored_profile,
    sk_sweep,
    write_noise_csv,
    write_profile_csv,
    write_sweep_csv,
)
from .graphs import (
    HermitianGraph,
    build_crawl,
    build_funnel,
    build_sk,
    check_search_conditions,
    default_tau,
    diagonalize,
    load_graph,
    node_state,
    save_graph,
    write_spectrum_csv,
)
from .monitored import (
    Protocol,
    detection_summary,
    first_detection_series,
    write_detection_csv,
)
from .qbasis import build_qbasis
from .topology import (
    StrategyDisagreementError,
    generating_function,
    winding_summary,
    write_theta_csv,
)

OUTDIR_ENV = "QWSEARCH_OUTDIR"


class ValidationFailure(Exception):
    """Numerical validation failed; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the scripting contract
    # reserves 2 for validation failures, so remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _out_path(raw: str) -> Path:
    path = Path(raw)
    if not path.is_absolute():
        path = Path(os.environ.get(OUTDIR_ENV, ".")) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(anchor: Path, command: str, args: argparse.Namespace,
                    seed: int, artifacts: list[Path]) -> None:
    params = {
        k: v for k, v in sorted(vars(args).items())
        if k not in ("func", "command") and not k.startswith("_")
    }
    manifest = {
        "command": command,
        "parameters": params,
        "seed": seed,
        "artifact_paths": [str(p) for p in artifacts],
        "tool_version": __version__,
        "argv": _reconstruct_argv(command, params),
    }
    _write_json(Path(str(anchor) + ".manifest.json"), manifest)


def _reconstruct_argv(command: str, params: dict) -> list[str]:
    argv = [command]
    for key, value in params.items():
        if value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    return argv


def _load_graph_arg(args: argparse.Namespace) -> HermitianGraph:
    if getattr(args, "graph", None):
        return load_graph(args.graph)
    family = getattr(args, "family", None) or "crawl"
    n = getattr(args, "n", None)
    if n is None:
        raise ValueError("provide --graph or --family/--n")
    return _build_family(family, n, args)


def _build_family(family: str, n: int, args: argparse.Namespace) -> HermitianGraph:
    gamma = getattr(args, "gamma", 1.0)
    if family == "crawl":
        return build_crawl(n, gamma, reverse=getattr(args, "reverse", False))
    if family == "funnel":
        return build_funnel(n, gamma)
    if family == "sk":
        return build_sk(n, getattr(args, "seed", 0), coupling_scale=gamma)
    raise ValueError(f"unknown family {family!r}")


def _parse_state(spec: str, graph: HermitianGraph, tau: float, target: np.ndarray) -> np.ndarray:
    """Parse ``node:<i>``, ``qk:<k>``, or a JSON vector file path."""
    if spec.startswith("node:"):
        return node_state(graph.n, int(spec[5:]))
    if spec.startswith("qk:"):
        basis = build_qbasis(graph, target, tau, warn=False)
        k = int(spec[3:])
        if not 0 <= k < graph.n:
            raise ValueError(f"shift-basis index {k} out of range")
        return basis[k]
    path = Path(spec)
    if not path.exists():
        raise ValueError(f"state spec {spec!r} is not node:<i>, qk:<k>, or a file")
    with open(path) as fh:
        data = json.load(fh)
    vec = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data.get("im", 0), dtype=float)
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("state vector has zero norm")
    return vec / norm


def _target_state(args: argparse.Namespace, graph: HermitianGraph) -> np.ndarray:
    spec = getattr(args, "target", None) or "node:0"
    if spec.startswith("qk:"):
        raise ValueError("target must be node:<i> or a vector file")
    return _parse_state(spec, graph, 0.0, None)


def _tau_for(args: argparse.Namespace, graph: HermitianGraph) -> float:
    tau = getattr(args, "tau", None)
    return float(tau) if tau is not None else default_tau(graph)


def cmd_build(args) -> int:
    graph = _build_family(args.family, args.n, args)
    out = _out_path(args.out)
    save_graph(graph, out)
    artifacts = [out]
    if args.spectrum_csv:
        spec_path = _out_path(args.spectrum_csv)
        write_spectrum_csv(diagonalize(graph, node_state(graph.n, 0)), spec_path)
        artifacts.append(spec_path)
    if graph.family in ("crawl", "funnel"):
        report = check_search_conditions(graph, node_state(graph.n, 0), default_tau(graph))
        print(
            f"conditions: {report.verdict.upper()} "
            f"(overlap dev {report.overlap_deviation:.3e}, "
            f"phase dev {report.phase_deviation:.3e})"
        )
    _write_manifest(out, "build", args, getattr(args, "seed", 0), artifacts)
    return 0


def cmd_check(args) -> int:
    graph = _load_graph_arg(args)
    target = _target_state(args, graph)
    tau = _tau_for(args, graph)
    report = check_search_conditions(graph, target, tau, tol=args.tol)
    payload = {
        "verdict": report.verdict,
        "overlaps_uniform": report.overlaps_uniform,
        "overlap_deviation": report.overlap_deviation,
        "phases_equispaced": report.phases_equispaced,
        "phase_deviation": report.phase_deviation,
        "degenerate_phases": report.degenerate_phases,
        "global_phase": report.global_phase,
        "tau": report.tau,
        "tol": report.tol,
    }
    out = _out_path(args.out)
    _write_json(out, payload)
    _write_manifest(out, "check", args, 0, [out])
    print(f"conditions: {report.verdict.upper()}")
    if not report.passed:
        raise ValidationFailure("search conditions not satisfied")
    return 0


def cmd_detect(args) -> int:
    graph = _load_graph_arg(args)
    target = _target_state(args, graph)
    tau = _tau_for(args, graph)
    n_max = args.n_max or 2 * graph.n
    psi0 = _parse_state(args.psi0, graph, tau, target)
    series = first_detection_series(graph, Protocol(tau=tau, target=target, n_max=n_max), psi0)
    out = _out_path(args.out)
    csv_path = Path(str(out) + ".csv")
    json_path = Path(str(out) + ".json")
    write_detection_csv(series, csv_path)
    _write_json(json_path, detection_summary(series))
    _write_manifest(out, "detect", args, 0, [csv_path, json_path])
    return 0


def cmd_winding(args) -> int:
    graph = _load_graph_arg(args)
    target = _target_state(args, graph)
    tau = _tau_for(args, graph)
    psi0 = _parse_state(args.psi0, graph, tau, target)
    protocol = Protocol(tau=tau, target=target, n_max=max(graph.n, 1))
    series = generating_function(
        graph, protocol, psi0, m_samples=args.m_samples, epsilon=args.epsilon
    )
    out = _out_path(args.out)
    csv_path = Path(str(out) + ".csv")
    json_path = Path(str(out) + ".json")
    write_theta_csv(series, csv_path)
    summary = winding_summary(series, tau)
    _write_json(json_path, summary)
    _write_manifest(out, "winding", args, 0, [csv_path, json_path])
    print(json.dumps({"winding": summary["winding"]}))
    return 0


def cmd_noise(args) -> int:
    graph = build_funnel(args.n, args.gamma)
    start = args.start_node if args.start_node is not None else graph.n - 1
    psi0 = node_state(graph.n, start)
    config = NoiseConfig(
        magnitude_a=args.a,
        realizations=args.realizations,
        seed=args.seed,
        n_detect_window=args.window,
        n_record=args.n_record,
        per_step=not args.per_realization,
    )
    result = noise_run(graph, psi0, config)
    out = _out_path(args.out)
    csv_path = Path(str(out) + ".csv")
    json_path = Path(str(out) + ".json")
    write_noise_csv(result, csv_path)
    _write_json(
        json_path,
        {
            "a": result.magnitude_a,
            "mean_p_det": result.mean_p_det,
            "std_p_det": result.std_p_det,
            "n_detect_window": result.n_detect_window,
            "realizations": args.realizations,
        },
    )
    _write_manifest(out, "noise", args, args.seed, [csv_path, json_path])
    print(f"mean P_det = {result.mean_p_det:.6f} (std {result.std_p_det:.6f})")
    return 0


def cmd_sweep(args) -> int:
    taus = None
    if args.taus:
        taus = np.array([float(v) for v in args.taus.split(",")])
    result = sk_sweep(args.n, taus=taus, seed=args.seed, n_max=args.n_max)
    out = _out_path(args.out)
    csv_path = Path(str(out) + ".csv")
    write_sweep_csv(result, csv_path)
    _write_manifest(out, "sweep", args, args.seed, [csv_path])
    flagged = int(result.heavy_truncation.sum())
    print(f"swept {len(result.taus)} intervals; {flagged} heavily truncated")
    return 0


def cmd_evolve(args) -> int:
    graph = _load_graph_arg(args)
    target = _target_state(args, graph)
    tau = _tau_for(args, graph)
    psi0 = _parse_state(args.psi0, graph, tau, target)
    intervals = args.intervals or graph.n
    step = tau / args.samples_per_interval
    t_grid = step * np.arange(args.samples_per_interval * intervals + 1)
    profile = non_monitored_profile(graph, psi0, t_grid, tau=tau)
    out = _out_path(args.out)
    csv_path = Path(str(out) + ".csv")
    json_path = Path(str(out) + ".json")
    write_profile_csv(profile, csv_path)
    _write_json(
        json_path,
        {
            "revival_overlap": profile.revival_overlap,
            "strobe_peaks": profile.strobe_peaks.tolist(),
            "tau": tau,
        },
    )
    _write_manifest(out, "evolve", args, 0, [csv_path, json_path])
    return 0


def cmd_exceptional(args) -> int:
    graph = _load_graph_arg(args)
    target = _target_state(args, graph)
    tau = _tau_for(args, graph)
    report = survival_spectrum(survival_operator(graph, target, tau))
    out = _out_path(args.out)
    _write_json(out, exceptional_report_dict(report))
    _write_manifest(out, "exceptional", args, 0, [out])
    print(
        f"nilpotency norm {report.nilpotency_norm:.3e}; "
        f"exceptional: {report.is_exceptional}"
    )
    return 0


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="path to a graph JSON file")
    p.add_argument("--family", choices=["crawl", "funnel", "sk"], help="build in place of --graph")
    p.add_argument("--n", type=int, help="node count when building in place")
    p.add_argument("--gamma", type=float, default=1.0, help="energy scale (default 1.0)")
    p.add_argument("--seed", type=int, default=0, help="seed for family sk")
    p.add_argument("--reverse", action="store_true", help="reverse the crawl direction")
    p.add_argument("--tau", type=float, help="sampling interval (default 2*pi/(n*gamma))")
    p.add_argument("--target", default="node:0", help="detection target, node:<i> or vector file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwsearch", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[], help="build a graph and write it as JSON")
    p.add_argument("--family", required=True, choices=["crawl", "funnel", "sk"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reverse", action="store_true")
    p.add_argument("--spectrum-csv", help="also write k,energy,p_k for target node 0")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("check", help="check the guaranteed-search conditions")
    _add_graph_source(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("detect", help="run the monitored first-detection protocol")
    _add_graph_source(p)
    p.add_argument("--psi0", required=True, help="node:<i>, qk:<k>, or vector file")
    p.add_argument("--n-max", type=int, help="attempt budget (default 2n)")
    p.add_argument("--out", required=True, help="output prefix (.csv/.json appended)")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("winding", help="sample the generating function and wind it")
    _add_graph_source(p)
    p.add_argument("--psi0", required=True)
    p.add_argument("--m-samples", type=int, help="theta samples (default max(1024, 64n))")
    p.add_argument("--epsilon", type=float, default=1e-9, help="convergence regulator")
    p.add_argument("--out", required=True, help="output prefix (.csv/.json appended)")
    p.set_defaults(func=cmd_winding)

    p = sub.add_parser("noise", help="noisy-interval Monte Carlo on the funnel graph")
    p.add_argument("--a", type=float, required=True, help="relative noise magnitude")
    p.add_argument("--realizations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--start-node", type=int, help="initial node (default n-1)")
    p.add_argument("--window", type=int, help="detection window (default n)")
    p.add_argument("--n-record", type=int, help="recorded attempts (default 2n)")
    p.add_argument("--per-realization", action="store_true",
                   help="draw one interval per realization instead of per step")
    p.add_argument("--out", required=True, help="output prefix (.csv/.json appended)")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("sweep", help="mean attempt count vs tau on a random SK graph")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-max", type=int, default=100_000)
    p.add_argument("--taus", help="comma-separated intervals (default log grid)")
    p.add_argument("--out", required=True, help="output prefix (.csv appended)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("evolve", help="non-monitored node-probability profile")
    _add_graph_source(p)
    p.add_argument("--psi0", required=True)
    p.add_argument("--intervals", type=int, help="number of tau intervals (default n)")
    p.add_argument("--samples-per-interval", type=int, default=10)
    p.add_argument("--out", required=True, help="output prefix (.csv/.json appended)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("exceptional", help="survival-operator spectrum report")
    _add_graph_source(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_exceptional)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValidationFailure as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 2
    except StrategyDisagreementError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
