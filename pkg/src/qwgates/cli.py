"""Command-line front end: ``qwgates <command> [options]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from typing import Any, Sequence

import numpy as np

from . import __version__
from .config import (
    Config,
    dumps,
    graph_to_document,
    load_config,
    pair,
    parse_document,
    pulse_to_document,
)
from .errors import ConfigError, QWGatesError
from .gates import GateSpec, synthesize_cz, synthesize_hadamard, synthesize_z, verify_gate
from .drive import effective_time
from .graph import adjacency_from_drive, compute_edge_classes
from .library import lambda_system, two_qutrit_graph
from .linalg import expm_hermitian
from .propagate import (
    EXACT,
    MODES,
    RESONANT,
    approximation_report,
    exact_propagator,
    line_walk_demo,
    simulate,
)
from .reduction import LocalRotation, apply_move, apply_rotation_generic, graph_from_report

log = logging.getLogger("qwgates")


# output helpers ---------------------------------------------------------------


def _write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _matrix_doc(u: np.ndarray) -> list[list[list[float]]]:
    return [[pair(z) for z in row] for row in np.asarray(u)]


def write_trajectory_csv(path: str, traj) -> None:
    header = ["t", "tau"] + [f"P_{lab}" for lab in traj.labels] + ["norm", "leakage"]
    lines = [",".join(header)]
    for k in range(len(traj.t)):
        row = [traj.t[k], traj.tau[k], *traj.probabilities[k], traj.norm[k], traj.leakage[k]]
        lines.append(",".join("%.17g" % float(x) for x in row))
    _write(path, "\n".join(lines) + "\n")


def _state_doc(state) -> dict[str, Any]:
    return {lab: pair(a) for lab, a in zip(state.labels, state.amplitudes)}


# commands ---------------------------------------------------------------------


def _settings(cfg: Config, args) -> dict[str, Any]:
    sim = cfg.simulation
    mode = args.mode or sim.mode
    dt = args.dt if args.dt is not None else sim.dt
    if mode != RESONANT and dt is None:
        raise ConfigError("$.simulation.dt", f"required in {mode} mode")
    return {
        "mode": mode,
        "dt": dt,
        "M": args.coin_levels if args.coin_levels is not None else sim.coin_levels,
        "tol_res": sim.resonance_tol,
        "leakage_threshold": sim.leakage_threshold,
        "samples": sim.samples,
    }


def _require_graph(cfg: Config) -> None:
    if cfg.graph is None:
        raise ConfigError("$.vertices", "required property is missing")


def cmd_simulate(args) -> dict[str, Any]:
    cfg = load_config(args.config)
    _require_graph(cfg)
    if not cfg.pulses:
        raise ConfigError("$.pulses", "at least one pulse is required")
    s = _settings(cfg, args)
    mode = s.pop("mode")
    log.info("simulating %d pulse(s) in %s mode", len(cfg.pulses), mode)
    res = simulate(cfg.graph, cfg.pulses, cfg.initial, mode, coupling=cfg.coupling, **s)
    write_trajectory_csv(os.path.join(args.out, "trajectory.csv"), res.trajectory)
    final = {"mode": mode, "amplitudes": _state_doc(res.final_walker)}
    if res.ladder is not None:
        final["ladder"] = [
            {"vertex": v, "coins": list(m), "amplitude": pair(a)}
            for (v, m), a in sorted(res.ladder.as_dict().items())
        ]
    _write(os.path.join(args.out, "final_state.json"), dumps(final))
    if mode in (EXACT, RESONANT):
        u = np.eye(cfg.graph.size, dtype=complex)
        for p in cfg.pulses:
            if mode == EXACT:
                step = exact_propagator(cfg.graph, p, s["dt"], cfg.initial, cfg.coupling, samples=2)[0]
            else:
                lam = adjacency_from_drive(cfg.graph, p, s["tol_res"])
                step = expm_hermitian(lam, effective_time(p.envelope, p.envelope.t_end))
            u = step @ u
        _write(os.path.join(args.out, "unitary.json"),
               dumps({"labels": list(cfg.graph.labels), "matrix": _matrix_doc(u)}))
    report = {
        "command": "simulate",
        "mode": mode,
        "norm_drift": res.norm_drift,
        "boundary_leakage": res.boundary_leakage,
        "coin_purity": res.coin_purity,
        "diagnostics": list(res.diagnostics),
    }
    _write(os.path.join(args.out, "report.json"), dumps(report))
    return report


def _rotation_from(step: dict[str, Any], index: int) -> LocalRotation:
    try:
        mat = np.array([[complex(*z) for z in row] for row in step["matrix"]], dtype=complex)
        return LocalRotation(tuple(step["support"]), mat, tuple(step.get("new_labels", step["support"])))
    except KeyError as exc:
        raise ConfigError(f"$.reduce[{index}].{exc.args[0]}", "required property is missing") from None
    except ValueError as exc:
        raise ConfigError(f"$.reduce[{index}].matrix", str(exc)) from None


def cmd_reduce(args) -> dict[str, Any]:
    cfg = load_config(args.config)
    _require_graph(cfg)
    if not cfg.reduce:
        raise ConfigError("$.reduce", "no reduction steps given")
    graph = cfg.graph
    steps = []
    for i, step in enumerate(cfg.reduce):
        if "move" in step:
            report = apply_move(graph, step["move"], step.get("roles"), cfg.protected,
                                new_labels=step.get("new_labels"))
        else:
            report = apply_rotation_generic(graph, graph.energies, _rotation_from(step, i), cfg.protected)
        g2 = report.g_doubleprime
        off = [
            {"p": report.labels_after[p], "q": report.labels_after[q], "value": pair(g2[p, q])}
            for p in range(len(g2)) for q in range(p + 1, len(g2)) if abs(g2[p, q]) > 1e-13
        ]
        steps.append({
            "move": step.get("move", "rotation"),
            "support": list(report.rotation.support),
            "labels_after": list(report.labels_after),
            "amplitudes": {k: pair(v) for k, v in sorted(report.amplitudes.items())},
            "energy_cross_terms": off,
            "spectrum_error": report.spectrum_error(),
        })
        graph = graph_from_report(report, graph)
    _write(os.path.join(args.out, "reduced_graph.json"), dumps(graph_to_document(graph)))
    out = {"command": "reduce", "steps": steps}
    _write(os.path.join(args.out, "report.json"), dumps(out))
    return out


def _gate_graph(cfg: Config | None, gate: str):
    if cfg is not None and cfg.graph is not None:
        return cfg.graph
    return two_qutrit_graph() if gate == "CZ" else lambda_system()


def _synthesize(gate: str, graph, params: dict[str, Any]):
    env = params.get("envelope", "flat")
    if gate == "Z":
        return synthesize_z(graph, params.get("n", 0), params.get("omega"), params.get("tau"), envelope=env)
    if gate == "H":
        return synthesize_hadamard(graph, params.get("n", 0), params.get("omega"), params.get("tau"), envelope=env)
    return synthesize_cz(
        graph, params.get("n", 3), params.get("m", 1), params.get("n_A", 1), params.get("n_A_prime", 1),
        params.get("tau", 100.0), envelope=env,
    )


def _gate_params(cfg: Config | None, args) -> tuple[str, dict[str, Any]]:
    params: dict[str, Any] = dict(cfg.gate) if cfg is not None and cfg.gate else {}
    for key in ("n", "m", "n_A", "n_A_prime", "omega", "tau", "envelope"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    gate = getattr(args, "gate", None) or params.get("name")
    if gate is None:
        raise ConfigError("$.gate.name", "required property is missing")
    gate = gate.upper()
    if cfg is not None and cfg.gate and cfg.gate.get("name", gate) != gate:
        raise ConfigError("$.gate.name", f"config names {cfg.gate['name']} but {gate} was requested")
    params["name"] = gate
    return gate, params


def _synthesis_doc(graph, syn) -> dict[str, Any]:
    classes = {c.class_id: c for c in compute_edge_classes(graph, 1e-9)}
    return {
        "gate": syn.gate,
        "tau_gate": syn.tau_gate,
        "integers": dict(syn.integers),
        "amplitudes": [
            {"class_id": cid, "delta_e": classes[cid].delta_e, "omega": pair(om),
             "edges": [[graph.edges[i].hi, graph.edges[i].lo] for i in classes[cid].members]}
            for cid, om in sorted(syn.amplitudes.items())
        ],
        "achieved_fidelity": syn.achieved_fidelity,
        "refined": syn.refined,
        "residual": syn.residual,
        "roles": dict(sorted(syn.roles.items())),
        "pulse": pulse_to_document(syn.pulse),
    }


def cmd_synthesize(args) -> dict[str, Any]:
    cfg = load_config(args.config) if args.config else None
    gate, params = _gate_params(cfg, args)
    graph = _gate_graph(cfg, gate)
    syn = _synthesize(gate, graph, params)
    doc = _synthesis_doc(graph, syn)
    # a ready-to-run config: graph plus the synthesized pulse
    run = graph_to_document(graph)
    run["pulses"] = [doc["pulse"]]
    run["simulation"] = {"mode": RESONANT}
    run["gate"] = {k: v for k, v in params.items() if k in ("name", "n", "m", "n_A", "n_A_prime", "envelope")}
    _write(os.path.join(args.out, "synthesis.json"), dumps(doc))
    _write(os.path.join(args.out, "gate_config.json"), dumps(run))
    print(f"{gate}: fidelity {syn.achieved_fidelity:.15f} tau {syn.tau_gate:.12g}")
    return doc


def cmd_verify(args) -> dict[str, Any]:
    cfg = load_config(args.config) if args.config else None
    gate, params = _gate_params(cfg, args)
    graph = _gate_graph(cfg, gate)
    syn = _synthesize(gate, graph, params)
    sim = cfg.simulation if cfg is not None else parse_document({}).simulation
    mode = args.mode or (sim.mode if cfg is not None and "simulation" in cfg.document else RESONANT)
    dt = args.dt if args.dt is not None else sim.dt
    M = args.coin_levels if args.coin_levels is not None else sim.coin_levels
    spec = GateSpec.for_graph(gate, graph)
    log.info("verifying %s in %s mode over %d basis walks", gate, mode, len(spec.affected_vertices))
    rep = verify_gate(spec, syn, graph, mode=mode, dt=dt, M=M, workers=sim.workers,
                      leakage_threshold=sim.leakage_threshold)
    _write(os.path.join(args.out, "unitary.json"),
           dumps({"labels": list(rep.labels), "matrix": _matrix_doc(rep.unitary)}))
    out = {
        "command": "verify",
        "gate": gate,
        "mode": mode,
        "fidelity": rep.fidelity,
        "is_unitary": rep.is_unitary,
        "boundary_leakage": rep.boundary_leakage,
        "coin_purity": rep.coin_purity,
        "flags": rep.flags,
        "walks": [
            {"start": w.start, "return_probability": w.return_probability, "phase": w.phase,
             "overlap": w.overlap, "incomplete": w.incomplete}
            for w in rep.walks
        ],
        "synthesis": _synthesis_doc(graph, syn),
    }
    _write(os.path.join(args.out, "report.json"), dumps(out))
    print(f"{gate} [{mode}]: fidelity {rep.fidelity:.15f}")
    min_fid = args.min_fidelity if args.min_fidelity is not None else params.get("min_fidelity")
    if min_fid is not None:
        rep.require(min_fid)
    return out


def cmd_compare(args) -> dict[str, Any]:
    cfg = load_config(args.config)
    _require_graph(cfg)
    if len(cfg.pulses) != 1:
        raise ConfigError("$.pulses", "compare needs exactly one pulse")
    dt = args.dt if args.dt is not None else cfg.simulation.dt
    M = args.coin_levels if args.coin_levels is not None else cfg.simulation.coin_levels
    rep = approximation_report(cfg.graph, cfg.pulses[0], cfg.initial, dt, M,
                               cfg.simulation.resonance_tol, cfg.simulation.leakage_threshold)
    out = {
        "command": "compare",
        "distances": rep.distances,
        "coin_purity": rep.coin_purity,
        "boundary_leakage": rep.boundary_leakage,
        "finals": {k: _state_doc(v) for k, v in rep.finals.items()},
    }
    _write(os.path.join(args.out, "report.json"), dumps(out))
    for k, v in rep.distances.items():
        print(f"{k:14s} {v:.6e}")
    return out


def cmd_line_demo(args) -> dict[str, Any]:
    coin0 = (1.0, 0.0) if args.coin_start == 0 else (0.0, 1.0)
    dist = line_walk_demo(args.steps, initial_coin=coin0)
    lines = ["site,probability"]
    lines += ["%d,%.17g" % (int(s), float(p)) for s, p in zip(dist.sites, dist.probabilities)]
    _write(os.path.join(args.out, "distribution.csv"), "\n".join(lines) + "\n")
    mean = float(np.dot(dist.sites, dist.probabilities))
    print(f"{args.steps} steps: mean position {mean:.6f}")
    return {"command": "line-demo", "mean": mean}


# parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwgates", description="Quantum-walk gate synthesis and simulation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True, sim=True):
        p.add_argument("-c", "--config", required=config_required, help="JSON configuration file")
        p.add_argument("-o", "--out", default="out", help="output directory (default: out)")
        if sim:
            p.add_argument("--mode", choices=MODES, help="override simulation.mode")
            p.add_argument("--dt", type=float, help="override simulation.dt")
            p.add_argument("--coin-levels", type=int, dest="coin_levels", help="override simulation.coin_levels")

    def gate_opts(p):
        p.add_argument("--n", type=int)
        p.add_argument("--m", type=int)
        p.add_argument("--n-A", type=int, dest="n_A")
        p.add_argument("--n-A-prime", type=int, dest="n_A_prime")
        p.add_argument("--omega", type=float, help="total leg amplitude (Z and H)")
        p.add_argument("--tau", type=float, help="effective gate time")
        p.add_argument("--envelope", choices=["flat", "raised_cosine"])

    p = sub.add_parser("simulate", help="propagate a walker through the configured pulses")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reduce", help="apply local basis rotations to the configured graph")
    common(p, sim=False)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("synthesize", help="find drive amplitudes for a gate")
    p.add_argument("gate", type=str.upper, choices=["Z", "H", "CZ"])
    common(p, config_required=False, sim=False)
    gate_opts(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="synthesize a gate and check it by simulation")
    p.add_argument("gate", type=str.upper, nargs="?", choices=["Z", "H", "CZ"])
    common(p, config_required=False)
    gate_opts(p)
    p.add_argument("--min-fidelity", type=float, dest="min_fidelity")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="compare exact, coined, rotating-wave and resonant dynamics")
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("line-demo", help="Hadamard walk on a line")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--coin-start", type=int, choices=[0, 1], default=0, dest="coin_start")
    p.add_argument("-o", "--out", default="out")
    p.set_defaults(func=cmd_line_demo)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    start = time.perf_counter()
    try:
        args.func(args)
    except QWGatesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return QWGatesError.exit_code
    print(f"{args.command} finished in {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
