import copy
import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwgates.config import dumps, graph_to_document, load_config, parse_config, parse_document, pulse_to_document
from qwgates.errors import ConfigError
from qwgates.library import lambda_system, two_qutrit_graph

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = {
    "qubit_count": 1,
    "vertices": [
        {"label": "0", "energy": 0.0, "levels": [0], "domain": "qubit"},
        {"label": "1", "energy": 2.0, "levels": [1], "domain": "qubit"},
        {"label": "2", "energy": 10.0},
    ],
    "edges": [{"hi": "2", "lo": "0", "g": [1.0, 0.0]}, {"hi": "2", "lo": "1", "g": [0.5, 0.5]}],
    "pulses": [{"envelope": {"kind": "flat", "t_gate": 10.0}, "components": [{"omega": 8.0, "amp": [0.1, 0.0]}]}],
    "simulation": {"mode": "full", "dt": 0.01, "coin_levels": 4},
    "initial_state": {"label": "1"},
}


def errors_for(doc):
    with pytest.raises(ConfigError) as info:
        parse_document(doc)
    return info.value


def test_minimal_config_parses():
    cfg = parse_config(json.dumps(MINIMAL))
    assert cfg.graph.labels == ("0", "1", "2")
    assert cfg.graph.edges[1].g == 0.5 + 0.5j
    assert cfg.simulation.dt == 0.01 and cfg.simulation.coin_levels == 4
    assert cfg.initial.amplitude("1") == 1.0
    assert cfg.pulses[0].components[0].amp == 0.1


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.json")))
def test_shipped_configs_parse(name):
    load_config(str(CONFIGS / name))


@pytest.mark.parametrize("mode", ["full", "rwa", "exact"])
def test_missing_dt_names_the_path(mode):
    doc = copy.deepcopy(MINIMAL)
    doc["simulation"] = {"mode": mode}
    err = errors_for(doc)
    assert err.path == "$.simulation.dt"


def test_resonant_mode_needs_no_dt():
    doc = copy.deepcopy(MINIMAL)
    doc["simulation"] = {"mode": "resonant"}
    assert parse_document(doc).simulation.dt is None


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d.update(extra=1), "$.extra"),
        (lambda d: d["simulation"].update(step=1), "$.simulation.step"),
        (lambda d: d["edges"][1].update(g=[1.0]), "$.edges[1].g"),
        (lambda d: d["vertices"][0].pop("energy"), "$.vertices[0].energy"),
        (lambda d: d["pulses"][0]["envelope"].update(kind="square"), "$.pulses[0].envelope.kind"),
        (lambda d: d["simulation"].update(mode="fast"), "$.simulation.mode"),
        (lambda d: d["initial_state"].update(label="9"), "$.initial_state.label"),
    ],
)
def test_positioned_errors(mutate, path):
    doc = copy.deepcopy(MINIMAL)
    mutate(doc)
    assert errors_for(doc).path == path


def test_overlapping_pulses_rejected():
    doc = copy.deepcopy(MINIMAL)
    second = copy.deepcopy(doc["pulses"][0])
    second["envelope"]["t_start"] = 5.0
    doc["pulses"].append(second)
    err = errors_for(doc)
    assert "pulses overlap" in str(err)


def test_graph_defects_become_config_errors():
    doc = copy.deepcopy(MINIMAL)
    doc["edges"][0] = {"hi": "0", "lo": "2", "g": [1.0, 0.0]}
    assert "edge orientation" in str(errors_for(doc))


def test_initial_amplitudes_must_be_normalized():
    doc = copy.deepcopy(MINIMAL)
    doc["initial_state"] = {"amplitudes": {"0": [0.6, 0.0], "1": [0.0, 0.8]}}
    assert parse_document(doc).initial.amplitude("1") == 0.8j
    doc["initial_state"] = {"amplitudes": {"0": [0.6, 0.0]}}
    assert errors_for(doc).path == "$.initial_state.amplitudes"
    doc["initial_state"] = {}
    assert errors_for(doc).path == "$.initial_state"


def test_invalid_json_reports_position():
    with pytest.raises(ConfigError) as info:
        parse_config('{"qubit_count": 1,}')
    assert info.value.path.startswith("$ (line 1")


def test_bad_coupling_rejected():
    doc = copy.deepcopy(MINIMAL)
    doc["coupling"] = {"taylor": [0.0, 0.0]}
    assert errors_for(doc).path == "$.coupling.taylor"


@pytest.mark.parametrize("graph", [lambda_system(), two_qutrit_graph()])
def test_graph_document_round_trip(graph):
    doc = graph_to_document(graph)
    again = parse_document(json.loads(dumps(doc))).graph
    assert again == graph


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 100), st.floats(0, 50), st.floats(0.1, 20),
       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_pulse_document_round_trip(t_gate, t_start, omega, amp):
    doc = copy.deepcopy(MINIMAL)
    doc["pulses"] = [{"envelope": {"kind": "raised_cosine", "t_start": t_start, "t_gate": t_gate},
                      "components": [{"omega": omega, "amp": [amp.real, amp.imag]}]}]
    pulse = parse_document(doc).pulses[0]
    assert pulse_to_document(pulse) == doc["pulses"][0]


def test_dumps_is_deterministic():
    a = dumps({"b": 1.0, "a": [0.1, 1e-300]})
    assert a == dumps({"a": [0.1, 1e-300], "b": 1.0})
    assert a.endswith("\n")
