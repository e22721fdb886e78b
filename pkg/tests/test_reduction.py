import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwgates.errors import ConditionViolated, ReductionError
from qwgates.graph import QUBIT, Graph, Vertex
from qwgates.reduction import (
    LocalRotation,
    apply_move,
    apply_rotation_generic,
    branches_to_loop4,
    diagonal_loop_to_chain,
    graph_from_report,
    loop4_condition_residual,
    loop4_to_branches,
    loop6_to_loop4,
    match_move,
    move_branch_one_segment,
)

seeds = st.integers(0, 2**31 - 1)


def cplx(rng, k):
    return list(rng.normal(size=k) + 1j * rng.normal(size=k))


def check_amplitudes(report, pairs):
    """Each named closed-form amplitude equals the generic transform entry."""
    for name, (p, q, diagonal) in pairs.items():
        got = report.cross_term(p, q) if diagonal else report.amplitude(p, q)
        assert got == pytest.approx(report.amplitudes[name], abs=1e-12), name


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_branch_move_closed_forms(seed):
    rng = np.random.default_rng(seed)
    a, a_p, b = cplx(rng, 3)
    rep = move_branch_one_segment(a, a_p, b, rng.normal(size=4))
    check_amplitudes(rep, {
        "1-x": ("1", "x", False),
        "x-3": ("x", "3", False),
        "3-x'": ("3", "x'", False),
        "x-x' diagonal": ("x", "x'", True),
    })
    assert rep.amplitude("1", "x'") == pytest.approx(0, abs=1e-12)
    assert rep.spectrum_error() < 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_branches_to_square_closed_forms(seed):
    rng = np.random.default_rng(seed)
    a, a_p, b, b_p, c = cplx(rng, 5)
    rep = branches_to_loop4(a, a_p, b, b_p, c, rng.normal(size=6))
    check_amplitudes(rep, {
        "A": ("1", "x", False),
        "A'": ("x", "2'", False),
        "B": ("x", "3", False),
        "B'": ("3", "x'", False),
        "C": ("3", "4", False),
        "C'": ("2'", "x'", False),
    })
    assert rep.spectrum_error() < 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_diagonal_loop_closed_forms(seed):
    rng = np.random.default_rng(seed)
    a, b, c, d = cplx(rng, 4)
    rep = diagonal_loop_to_chain(a, b, c, d, rng.normal(size=4))
    check_amplitudes(rep, {
        "A": ("0", "x", False),
        "B": ("x", "2", False),
        "C": ("2", "x'", False),
        "x-x' diagonal": ("x", "x'", True),
    })
    assert rep.amplitude("0", "x'") == pytest.approx(0, abs=1e-12)
    assert rep.spectrum_error() < 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_hexagon_closed_forms(seed):
    rng = np.random.default_rng(seed)
    a, b, c1, c2, a_p, b_p = cplx(rng, 6)
    rep = loop6_to_loop4(a, b, c1, c2, a_p, b_p, rng.normal(size=6))
    check_amplitudes(rep, {
        "0-x": ("0", "x", False),
        "x-y": ("x", "y", False),
        "y-x'": ("y", "x'", False),
        "x'-y'": ("x'", "y'", False),
        "y-3": ("y", "3", False),
        "3-y'": ("3", "y'", False),
        "x-x' diagonal": ("x", "x'", True),
        "y-y' diagonal": ("y", "y'", True),
    })
    # the square: x is no longer tied to y'
    assert rep.amplitude("x", "y'") == pytest.approx(0, abs=1e-12)
    assert rep.amplitude("0", "x'") == pytest.approx(0, abs=1e-12)
    assert rep.spectrum_error() < 1e-12


def _square_from_branches(rng):
    a, a_p, b_p, c = cplx(rng, 4)
    b = abs(rng.normal()) + 0.1
    rep = branches_to_loop4(a, a_p, b, b_p, c)
    amps = [rep.amplitudes[k] for k in ("A", "A'", "B", "B'", "C", "C'")]
    return (a, a_p, b, b_p, c), amps


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_square_inverse_round_trip(seed):
    rng = np.random.default_rng(seed)
    original, amps = _square_from_branches(rng)
    assert loop4_condition_residual(amps[0], amps[1], amps[2], amps[3], amps[5]) < 1e-9
    back = loop4_to_branches(*amps)
    got = [back.amplitudes[k] for k in ("a", "a'", "b", "b'", "c")]
    assert np.allclose(got, original, atol=1e-10)
    assert back.spectrum_error() < 1e-12


def test_square_inverse_rejects_condition_violation():
    with pytest.raises(ConditionViolated, match="condition violated"):
        loop4_to_branches(1.0, 0.5, 0.3, 0.2j, 1.0, 0.9)
    with pytest.raises(ReductionError):
        loop4_to_branches(1.0, 0.0, 0.3, 0.2, 1.0, 0.9)


def test_rotation_validation():
    with pytest.raises(ReductionError):
        LocalRotation(("a", "b"), np.ones((2, 2)), ("x", "y"))
    with pytest.raises(ReductionError):
        LocalRotation(("a", "a"), np.eye(2), ("x", "y"))
    ident = LocalRotation.identity(("a", "b"))
    assert np.array_equal(ident.matrix, np.eye(2))


def diamond(protect=True):
    dom = QUBIT if protect else "auxiliary"
    verts = [Vertex("a", 0.0, (0,), dom), Vertex("b", 1.0), Vertex("c", 2.0, (1,), dom), Vertex("d", 1.3)]
    g = Graph.build(verts, [("b", "a", 0.7 + 0.2j), ("c", "b", 0.5), ("c", "d", 0.3 + 0.4j), ("d", "a", 0.6)],
                    qubit_count=1 if protect else 0)
    return g


def test_graph_move_and_round_trip():
    g = diamond()
    roles = match_move(g, "diagonal_loop", ["a", "c"])
    assert {roles["0"], roles["2"]} == {"a", "c"}
    rep = apply_move(g, "diagonal_loop")
    assert rep.spectrum_error() < 1e-12
    reduced = graph_from_report(rep, g)
    assert set(reduced.labels) == {"a", "c", "b+d", "b-d"}
    assert reduced.vertex("a").is_qubit and reduced.vertex("c").is_qubit
    # without the off-diagonal energy terms only the coupling graph is reproduced
    h = reduced.coupling_matrix()
    order = [reduced.index(lab) for lab in rep.labels_after]
    assert np.allclose(h[np.ix_(order, order)], rep.h_prime - np.diag(np.diag(rep.h_prime)), atol=1e-13)


def test_protected_vertices_cannot_be_rotated():
    g = diamond()
    rot = LocalRotation(("a", "b"), np.eye(2), ("a2", "b2"))
    with pytest.raises(ReductionError, match="protected"):
        apply_rotation_generic(g, None, rot)


def test_move_matching_errors():
    g = diamond()
    with pytest.raises(ReductionError, match="no subgraph"):
        match_move(g, "loop6", ["a", "c"])
    with pytest.raises(ReductionError, match="unknown move"):
        apply_move(g, "twist")
    verts = [Vertex(f"{k}{i}", float(i)) for k in "pq" for i in range(4)]
    couplings = [(f"{k}{j}", f"{k}{i}", 0.5) for k in "pq" for i, j in ((0, 1), (1, 2), (3, 2), (0, 3))]
    two_loops = Graph.build(verts, couplings)
    with pytest.raises(ReductionError, match="several"):
        match_move(two_loops, "diagonal_loop")


def test_label_collision_rejected():
    g = diamond(protect=False)
    rot = LocalRotation(("b", "d"), np.eye(2), ("a", "d"))
    with pytest.raises(ReductionError, match="collide"):
        apply_rotation_generic(g, None, rot, protected=[])


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_generic_rotation_preserves_spectrum(seed):
    rng = np.random.default_rng(seed)
    n = 5
    verts = [Vertex(str(i), float(e)) for i, e in enumerate(np.sort(rng.uniform(0, 4, n)))]
    couplings = [(str(j), str(i), complex(*rng.normal(size=2))) for i in range(n) for j in range(i + 1, n)]
    g = Graph.build(verts, couplings)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    rep = apply_rotation_generic(g, None, LocalRotation(("1", "2", "3"), q, ("p", "q", "r")), protected=[])
    assert rep.spectrum_error() < 1e-12
    assert rep.consumed_labels == ("1", "2", "3")
    assert rep.introduced_labels == ("p", "q", "r")
