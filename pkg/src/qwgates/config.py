"""JSON configuration documents: schema, positioned validation errors and conversion to model objects.

Complex numbers are written as ``[re, im]`` pairs. Errors carry a path into
the document such as ``$.simulation.dt``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import jsonschema
import numpy as np

from .drive import DIPOLE, CouplingFunction, Envelope, Pulse, PulseComponent
from .errors import ConfigError, GraphError
from .graph import AUXILIARY, QUBIT, Edge, Graph, Vertex, validate_graph
from .propagate import (
    DEFAULT_COIN_LEVELS,
    DEFAULT_LEAKAGE_THRESHOLD,
    DEFAULT_SAMPLES,
    EXACT,
    FULL,
    MODES,
    RWA,
    WalkerState,
)

_NUMBER = {"type": "number"}
_COMPLEX = {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "qubit_count": {"type": "integer", "minimum": 0},
        "vertices": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["label", "energy"],
                "properties": {
                    "label": {"type": "string", "minLength": 1},
                    "energy": _NUMBER,
                    "levels": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "domain": {"enum": [QUBIT, AUXILIARY]},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["hi", "lo", "g"],
                "properties": {
                    "hi": {"type": "string"},
                    "lo": {"type": "string"},
                    "g": _COMPLEX,
                },
            },
        },
        "pulses": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["envelope", "components"],
                "properties": {
                    "envelope": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["kind", "t_gate"],
                        "properties": {
                            "kind": {"enum": ["flat", "raised_cosine", "gaussian"]},
                            "t_start": _NUMBER,
                            "t_gate": {"type": "number", "exclusiveMinimum": 0},
                            "sigma": {"type": "number", "exclusiveMinimum": 0},
                            "truncation": {"type": "number", "exclusiveMinimum": 0},
                        },
                    },
                    "components": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["omega", "amp"],
                            "properties": {
                                "omega": {"type": "number", "exclusiveMinimum": 0},
                                "amp": _COMPLEX,
                            },
                        },
                    },
                },
            },
        },
        "coupling": {
            "type": "object",
            "additionalProperties": False,
            "required": ["taylor"],
            "properties": {"taylor": {"type": "array", "items": _NUMBER, "minItems": 1}},
        },
        "simulation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": list(MODES)},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "coin_levels": {"type": "integer", "minimum": 1},
                "resonance_tol": {"type": "number", "minimum": 0},
                "leakage_threshold": {"type": "number", "minimum": 0},
                "samples": {"type": "integer", "minimum": 2},
                "workers": {"type": "integer", "minimum": 1},
            },
        },
        "initial_state": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "label": {"type": "string"},
                "amplitudes": {"type": "object", "additionalProperties": _COMPLEX},
            },
        },
        "gate": {
            "type": "object",
            "additionalProperties": False,
            "required": ["name"],
            "properties": {
                "name": {"enum": ["Z", "H", "CZ"]},
                "n": {"type": "integer", "minimum": 0},
                "m": {"type": "integer", "minimum": 1},
                "n_A": {"type": "integer", "minimum": 0},
                "n_A_prime": {"type": "integer", "minimum": 0},
                "omega": {"type": "number", "exclusiveMinimum": 0},
                "tau": {"type": "number", "exclusiveMinimum": 0},
                "envelope": {"enum": ["flat", "raised_cosine"]},
                "min_fidelity": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
        "reduce": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "move": {"enum": ["one_segment_branch", "diagonal_loop", "loop6"]},
                    "roles": {"type": "object", "additionalProperties": {"type": "string"}},
                    "new_labels": {"type": "array", "items": {"type": "string"}},
                    "support": {"type": "array", "items": {"type": "string"}},
                    "matrix": {"type": "array", "items": {"type": "array", "items": _COMPLEX}},
                },
            },
        },
        "protected": {"type": "array", "items": {"type": "string"}},
    },
}


@dataclass
class SimulationSettings:
    mode: str = "resonant"
    dt: float | None = None
    coin_levels: int = DEFAULT_COIN_LEVELS
    resonance_tol: float = 1e-9
    leakage_threshold: float = DEFAULT_LEAKAGE_THRESHOLD
    samples: int = DEFAULT_SAMPLES
    workers: int = 4


@dataclass
class Config:
    graph: Graph | None
    pulses: list[Pulse]
    simulation: SimulationSettings
    initial: WalkerState | None
    coupling: CouplingFunction = DIPOLE
    gate: dict[str, Any] | None = None
    reduce: list[dict[str, Any]] = field(default_factory=list)
    protected: list[str] | None = None
    document: dict[str, Any] = field(default_factory=dict)


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _cx(pair) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def _validate_schema(doc: Any) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if not errors:
        return
    err = errors[0]
    parts = list(err.absolute_path)
    if err.validator == "required":
        missing = err.message.split("'")[1]
        raise ConfigError(_path(parts + [missing]), "required property is missing")
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        key = extra[0] if extra else "?"
        raise ConfigError(_path(parts + [key]), "unknown key")
    raise ConfigError(_path(parts), err.message)


def parse_graph(doc: dict[str, Any]) -> Graph:
    verts = []
    for v in doc["vertices"]:
        levels = tuple(v["levels"]) if "levels" in v else None
        verts.append(Vertex(v["label"], float(v["energy"]), levels, v.get("domain", AUXILIARY)))
    edges = tuple(Edge(e["hi"], e["lo"], _cx(e["g"])) for e in doc.get("edges", []))
    graph = Graph(tuple(verts), edges, int(doc.get("qubit_count", 0)))
    diags = validate_graph(graph)
    if diags:
        d = diags[0]
        raise ConfigError("$.vertices" if d.kind in ("duplicate label", "qubit levels", "computational basis") else "$.edges",
                          f"{d.kind} {list(d.labels)} {d.message}".strip())
    return graph


def parse_pulses(doc: dict[str, Any]) -> list[Pulse]:
    pulses = []
    for i, p in enumerate(doc.get("pulses", [])):
        env = p["envelope"]
        try:
            envelope = Envelope(
                env["kind"], float(env.get("t_start", 0.0)), float(env["t_gate"]),
                env.get("sigma"), env.get("truncation"),
            )
            comps = tuple(PulseComponent(float(c["omega"]), _cx(c["amp"])) for c in p["components"])
            pulses.append(Pulse(envelope, comps))
        except ValueError as exc:
            raise ConfigError(f"$.pulses[{i}]", str(exc)) from None
    order = sorted(range(len(pulses)), key=lambda k: pulses[k].envelope.t_start)
    for a, b in zip(order, order[1:]):
        if pulses[b].envelope.t_start < pulses[a].envelope.t_end:
            raise ConfigError(f"$.pulses[{b}]", "pulses overlap")
    return [pulses[k] for k in order]


def parse_document(doc: Any) -> Config:
    _validate_schema(doc)
    graph = parse_graph(doc) if "vertices" in doc else None
    if graph is None and ("edges" in doc or "initial_state" in doc):
        raise ConfigError("$.vertices", "required property is missing")
    pulses = parse_pulses(doc)
    sim_doc = doc.get("simulation", {})
    sim = SimulationSettings(**sim_doc)
    if sim.mode in (FULL, RWA, EXACT) and "dt" not in sim_doc and pulses:
        raise ConfigError("$.simulation.dt", f"required in {sim.mode} mode")
    coupling = DIPOLE
    if "coupling" in doc:
        try:
            coupling = CouplingFunction(tuple(doc["coupling"]["taylor"]))
        except ValueError as exc:
            raise ConfigError("$.coupling.taylor", str(exc)) from None
    initial = None
    if "initial_state" in doc:
        initial = _parse_initial(doc["initial_state"], graph)
    elif graph is not None:
        comp = graph.computational_labels()
        initial = WalkerState.basis(graph, comp[0] if comp else graph.labels[0])
    return Config(
        graph, pulses, sim, initial, coupling, doc.get("gate"), list(doc.get("reduce", [])),
        doc.get("protected"), doc,
    )


def _parse_initial(section: dict[str, Any], graph: Graph) -> WalkerState:
    if ("label" in section) == ("amplitudes" in section):
        raise ConfigError("$.initial_state", "give exactly one of 'label' or 'amplitudes'")
    if "label" in section:
        if section["label"] not in graph.labels:
            raise ConfigError("$.initial_state.label", f"unknown vertex {section['label']!r}")
        return WalkerState.basis(graph, section["label"])
    amps = np.zeros(graph.size, dtype=complex)
    for lab, pair in section["amplitudes"].items():
        if lab not in graph.labels:
            raise ConfigError(f"$.initial_state.amplitudes.{lab}", "unknown vertex")
        amps[graph.index(lab)] = _cx(pair)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-9:
        raise ConfigError("$.initial_state.amplitudes", f"state is not normalized (norm {norm:.12g})")
    return WalkerState(amps, graph.labels)


def parse_config(text: str | bytes) -> Config:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"$ (line {exc.lineno}, column {exc.colno})", exc.msg) from None
    try:
        return parse_document(doc)
    except GraphError as exc:
        raise ConfigError("$.vertices", str(exc)) from None


def load_config(path: str) -> Config:
    with open(path, "rb") as fh:
        return parse_config(fh.read())


# serialization ----------------------------------------------------------------


def pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def graph_to_document(graph: Graph) -> dict[str, Any]:
    verts = []
    for v in graph.vertices:
        item: dict[str, Any] = {"label": v.label, "energy": float(v.energy), "domain": v.domain}
        if v.levels is not None:
            item["levels"] = [int(x) for x in v.levels]
        verts.append(item)
    return {
        "qubit_count": graph.qubit_count,
        "vertices": verts,
        "edges": [{"hi": e.hi, "lo": e.lo, "g": pair(e.g)} for e in graph.edges],
    }


def pulse_to_document(pulse: Pulse) -> dict[str, Any]:
    env = pulse.envelope
    envelope: dict[str, Any] = {"kind": env.kind, "t_start": env.t_start, "t_gate": env.t_gate}
    if env.sigma is not None:
        envelope["sigma"] = env.sigma
        envelope["truncation"] = env.truncation
    return {
        "envelope": envelope,
        "components": [{"omega": c.omega, "amp": pair(c.amp)} for c in pulse.components],
    }


def dumps(obj: Any) -> str:
    """Deterministic JSON text (sorted keys, shortest round-trip floats)."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
