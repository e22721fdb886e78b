"""Gate targets, parameter synthesis for Z, Hadamard and CZ walks, and verification.

Basis order is big-endian over the computational labels: ``|0...0>`` first,
the first qubit most significant.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import least_squares

from .drive import FLAT, RAISED_COSINE, Envelope, Pulse, PulseComponent, effective_time
from .errors import (
    GraphError,
    InfeasibleIntegers,
    RefinementStalled,
    SynthesisError,
    VerificationError,
)
from .graph import Graph, adjacency_from_drive, compute_edge_classes, require_valid
from .linalg import expm_hermitian, is_unitary
from .propagate import (
    DEFAULT_COIN_LEVELS,
    EXACT,
    FULL,
    RESONANT,
    RWA,
    WalkerState,
    build_ladder,
    coined_walk_run,
    default_dt,
    exact_propagator,
    resonant_walk_run,
)

CLASS_TOL = 1e-9
RETURN_TOL = 1e-6

_SQRT2 = math.sqrt(2.0)


def target_unitary(name: str, qubit_count: int | None = None) -> np.ndarray:
    name = name.upper()
    single = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Z": np.diag([1, -1]).astype(complex),
        "H": np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2,
    }
    double = {
        "CZ": np.diag([1, 1, 1, -1]).astype(complex),
        "CNOT": np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        ),
    }
    if name in single:
        expected = 1
        u = single[name]
    elif name in double:
        expected = 2
        u = double[name]
    else:
        raise ValueError(f"unknown gate {name!r}")
    if qubit_count is not None and qubit_count != expected:
        raise ValueError(f"gate {name} acts on {expected} qubit(s), not {qubit_count}")
    return u.copy()


def gate_fidelity(u_achieved: np.ndarray, u_target: np.ndarray) -> float:
    """``|Tr(U_target^dagger U_achieved)| / d``; insensitive to a global phase."""
    a = np.asarray(u_achieved, dtype=complex)
    t = np.asarray(u_target, dtype=complex)
    if a.shape != t.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {t.shape}")
    return float(min(1.0, abs(np.trace(t.conj().T @ a)) / a.shape[0]))


@dataclass(frozen=True)
class GateSpec:
    name: str
    target: np.ndarray
    affected_vertices: tuple[str, ...]

    def __post_init__(self):
        t = np.asarray(self.target, dtype=complex)
        object.__setattr__(self, "target", t)
        object.__setattr__(self, "affected_vertices", tuple(self.affected_vertices))
        if not is_unitary(t, 1e-12):
            raise ValueError("gate target is not unitary")
        if t.shape[0] != len(self.affected_vertices):
            raise ValueError("target dimension does not match the computational labels")

    @classmethod
    def for_graph(cls, name: str, graph: Graph, matrix: np.ndarray | None = None) -> "GateSpec":
        labels = graph.computational_labels()
        if name.lower() == "custom":
            if matrix is None:
                raise ValueError("custom gates need a matrix")
            return cls("custom", matrix, labels)
        return cls(name.upper(), target_unitary(name, graph.qubit_count), labels)

    def plan(self) -> "WalkPlan":
        return WalkPlan.from_spec(self)


@dataclass(frozen=True)
class WalkRow:
    start: str
    final: dict[str, complex]
    kind: str


@dataclass(frozen=True)
class WalkPlan:
    rows: tuple[WalkRow, ...]

    @classmethod
    def from_spec(cls, spec: GateSpec) -> "WalkPlan":
        rows = []
        labels = spec.affected_vertices
        for j, lab in enumerate(labels):
            col = spec.target[:, j]
            final = {labels[i]: complex(col[i]) for i in range(len(labels)) if abs(col[i]) > 1e-15}
            if set(final) == {lab}:
                phase = final[lab]
                kind = "trivial" if abs(phase - 1) < 1e-12 else f"return, phase {np.angle(phase):.6g}"
            else:
                kind = "superposition"
            rows.append(WalkRow(lab, final, kind))
        return cls(tuple(rows))


@dataclass
class SynthesisResult:
    gate: str
    amplitudes: dict[int, complex]
    tau_gate: float
    integers: dict[str, int]
    achieved_fidelity: float
    refined: bool
    pulse: Pulse
    residual: float = 0.0
    roles: dict[str, int] = field(default_factory=dict)


# amplitudes and pulses ----------------------------------------------------


def class_amplitudes(graph: Graph, per_edge: Mapping[int, complex], tol_rel: float = CLASS_TOL) -> dict[int, complex]:
    """Collapse per-edge amplitudes onto edge classes, rejecting assignments that break a class."""
    classes = compute_edge_classes(graph, tol_rel)
    out: dict[int, complex] = {}
    for cl in classes:
        vals = [complex(per_edge[i]) for i in cl.members if i in per_edge]
        if not vals:
            continue
        if len(vals) != len(cl.members) or any(abs(v - vals[0]) > 1e-12 * max(1, abs(vals[0])) for v in vals):
            raise SynthesisError(f"amplitudes differ within edge class {cl.class_id}")
        out[cl.class_id] = vals[0]
    return out


def pulse_for_amplitudes(
    graph: Graph,
    amplitudes: Mapping[int, complex],
    tau_gate: float,
    envelope: str = FLAT,
    t_start: float = 0.0,
    tol_rel: float = CLASS_TOL,
) -> Pulse:
    """Pulse whose resonant amplitude on class ``c`` is ``amplitudes[c]`` over effective time ``tau_gate``.

    Each class is driven at its gap with ``amp = Omega / g``.
    """
    classes = {c.class_id: c for c in compute_edge_classes(graph, tol_rel)}
    comps = []
    for cid, om in sorted(amplitudes.items()):
        cl = classes[cid]
        if cl.delta_e <= 0:
            raise SynthesisError(f"edge class {cid} has no energy gap to drive")
        if cl.g_representative == 0:
            raise SynthesisError(f"edge class {cid} has zero coupling")
        comps.append(PulseComponent(cl.delta_e, complex(om) / cl.g_representative))
    if envelope == FLAT:
        env = Envelope(FLAT, t_start, tau_gate)
    elif envelope == RAISED_COSINE:
        env = Envelope(RAISED_COSINE, t_start, 2.0 * tau_gate)
    else:
        raise SynthesisError(f"synthesis supports flat and raised_cosine envelopes, not {envelope!r}")
    return Pulse(env, tuple(comps))


def _class_of_edge(graph: Graph, edge_index: int, tol_rel: float = CLASS_TOL) -> int:
    for cl in compute_edge_classes(graph, tol_rel):
        if edge_index in cl.members:
            return cl.class_id
    raise GraphError(f"edge {edge_index} has no class")


def _edge_between(graph: Graph, p: str, q: str) -> int | None:
    for i, e in enumerate(graph.edges):
        if {e.hi, e.lo} == {p, q}:
            return i
    return None


def _resonant_gate_unitary(graph: Graph, pulse: Pulse, labels: Sequence[str]) -> np.ndarray:
    lam = adjacency_from_drive(graph, pulse)
    u = expm_hermitian(lam, effective_time(pulse.envelope, pulse.envelope.t_end))
    idx = [graph.index(lab) for lab in labels]
    return u[np.ix_(idx, idx)]


def _check_classes_distinct(graph: Graph, class_ids: Sequence[int], what: str) -> None:
    classes = {c.class_id: c for c in compute_edge_classes(graph, CLASS_TOL)}
    gaps = [classes[c].delta_e for c in class_ids]
    for i in range(len(gaps)):
        for j in range(i + 1, len(gaps)):
            if abs(gaps[i] - gaps[j]) <= CLASS_TOL * max(1.0, abs(gaps[i])):
                raise SynthesisError(f"{what}: edge classes share a transition frequency and cannot be addressed separately")


# Z -------------------------------------------------------------------------


def synthesize_z(
    graph: Graph,
    n: int = 0,
    omega: float | None = None,
    tau: float | None = None,
    target: str | None = None,
    envelope: str = FLAT,
) -> SynthesisResult:
    """Single resonant leg from ``target`` (default ``|1>``) to an auxiliary level with ``tau*Omega = pi(2n+1)``."""
    require_valid(graph)
    if n < 0:
        raise SynthesisError("n must be non-negative")
    comp = graph.computational_labels()
    if graph.qubit_count != 1 or len(comp) != 2:
        raise SynthesisError("Z synthesis needs a one-qubit graph")
    target = comp[-1] if target is None else target
    legs = [
        i for i, e in enumerate(graph.edges)
        if target in (e.hi, e.lo) and not graph.vertex(e.lo if e.hi == target else e.hi).is_qubit
    ]
    if not legs:
        raise SynthesisError(f"no auxiliary leg attached to {target!r}")
    leg = legs[0]
    cid = _class_of_edge(graph, leg)
    others = {
        _class_of_edge(graph, i) for i, e in enumerate(graph.edges)
        if i != leg and any(graph.vertex(x).is_qubit for x in (e.hi, e.lo))
    }
    if cid in others:
        raise SynthesisError("the Z leg shares its edge class with another qubit transition")
    phase_area = math.pi * (2 * n + 1)
    if omega is None and tau is None:
        tau = phase_area / 0.05
    if omega is not None and tau is not None:
        raise SynthesisError("give either omega or tau, not both")
    if omega is not None:
        if omega == 0:
            raise SynthesisError("the Z leg amplitude must be nonzero")
        tau = phase_area / abs(omega)
    om = phase_area / tau
    pulse = pulse_for_amplitudes(graph, {cid: om}, tau, envelope)
    u = _resonant_gate_unitary(graph, pulse, comp)
    return SynthesisResult(
        "Z", {cid: complex(om)}, float(tau), {"n": n},
        gate_fidelity(u, target_unitary("Z", 1)), False, pulse, roles={"leg": cid},
    )


# Hadamard -------------------------------------------------------------------

HADAMARD_RATIO = math.sqrt(2.0) - 1.0


def hadamard_amplitudes(omega_total: float) -> tuple[complex, complex]:
    """``(Omega on the |0> leg, Omega on the |1> leg)``: ratio ``sqrt(2)-1``, relative phase ``pi``."""
    return (-omega_total * math.sin(math.pi / 8), omega_total * math.cos(math.pi / 8) + 0j)


def synthesize_hadamard(
    graph: Graph,
    n: int = 0,
    omega_total: float | None = None,
    tau: float | None = None,
    envelope: str = FLAT,
) -> SynthesisResult:
    """Two-leg Lambda walk: ``|Omega_0|/|Omega_1| = sqrt(2)-1``, opposite phases, ``tau*Omega = pi(2n+1)``."""
    require_valid(graph)
    if n < 0:
        raise SynthesisError("n must be non-negative")
    comp = graph.computational_labels()
    if graph.qubit_count != 1 or len(comp) != 2:
        raise SynthesisError("Hadamard synthesis needs a one-qubit graph")
    zero, one = comp
    hub = None
    for v in graph.vertices:
        if v.is_qubit:
            continue
        if _edge_between(graph, v.label, zero) is not None and _edge_between(graph, v.label, one) is not None:
            hub = v.label
            break
    if hub is None:
        raise SynthesisError("no auxiliary level coupled to both qubit states")
    e0 = _edge_between(graph, hub, zero)
    e1 = _edge_between(graph, hub, one)
    c0, c1 = _class_of_edge(graph, e0), _class_of_edge(graph, e1)
    if c0 == c1:
        raise SynthesisError("both legs belong to one edge class")
    _check_classes_distinct(graph, [c0, c1], "Hadamard")
    area = math.pi * (2 * n + 1)
    if omega_total is not None and tau is not None:
        raise SynthesisError("give either omega_total or tau, not both")
    if omega_total is None and tau is None:
        tau = area / 0.05
    if omega_total is not None:
        tau = area / omega_total
    om0, om1 = hadamard_amplitudes(area / tau)
    pulse = pulse_for_amplitudes(graph, {c0: om0, c1: om1}, tau, envelope)
    u = _resonant_gate_unitary(graph, pulse, comp)
    return SynthesisResult(
        "H", {c0: om0, c1: om1}, float(tau), {"n": n},
        gate_fidelity(u, target_unitary("H", 1)), False, pulse, roles={"leg0": c0, "leg1": c1},
    )


# CZ ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainSolution:
    """Hoppings of the reduced four-site walk-4 chain, in units of ``pi / tau``."""

    x: float
    y: float
    z: float


def cz_chain(n: int, m: int, n_a: int, n_a_p: int) -> ChainSolution:
    """Chain ``|11> -X- x -Y- |22> -Z- x'`` whose eigenvalues are ``+-n, +-m`` (units ``pi/tau``)."""
    if n % 2 == 0 or m % 2 == 0 or not 0 < m < n:
        raise InfeasibleIntegers(f"infeasible integers: need odd 0 < m < n, got n={n}, m={m}")
    if n_a < 0 or n_a_p < 0 or n_a == n_a_p == 0:
        raise InfeasibleIntegers("infeasible integers: n_A, n_A' must be non-negative and not both zero")
    x = 2.0 * math.hypot(n_a, n_a_p)
    if not m <= x <= n:
        raise InfeasibleIntegers(
            f"infeasible integers: need m <= 2*sqrt(n_A^2 + n_A'^2) <= n, got {x:.6g} outside [{m}, {n}]"
        )
    z = n * m / x
    y2 = (n + m) ** 2 - (x + z) ** 2
    return ChainSolution(x, math.sqrt(max(0.0, y2)), z)


def cz_roles(graph: Graph) -> dict[str, int]:
    """Edge classes of the two-qutrit CZ graph: ``A``, ``A'`` (shared), ``B``, ``B'`` (shifted)."""
    def edge(p, q):
        i = _edge_between(graph, p, q)
        if i is None:
            raise SynthesisError(f"CZ graph is missing the edge {p}-{q}")
        return i

    for lab in ("00", "01", "10", "11", "02", "20", "12", "21", "22"):
        graph.index(lab)
    groups = {
        "A": [edge("01", "02"), edge("11", "12")],
        "A'": [edge("10", "20"), edge("11", "21")],
        "B": [edge("12", "22")],
        "B'": [edge("21", "22")],
    }
    roles = {}
    for name, members in groups.items():
        ids = {_class_of_edge(graph, i) for i in members}
        if len(ids) != 1:
            raise SynthesisError(f"edges of role {name} do not share one class")
        roles[name] = ids.pop()
    if len(set(roles.values())) != 4:
        raise SynthesisError("CZ needs four distinct edge classes; interactions leave the symmetry intact")
    _check_classes_distinct(graph, list(roles.values()), "CZ")
    return roles


def cz_seed(chain: ChainSolution, n_a: int, n_a_p: int, tau: float) -> dict[str, complex]:
    unit = math.pi / tau
    a = 2 * math.pi * n_a / tau
    d = 2 * math.pi * n_a_p / tau
    om_x = math.hypot(a, d)
    b_c = chain.y * unit
    c_c = chain.z * unit
    return {
        "A": complex(a),
        "A'": complex(d),
        "B": complex((a * b_c + d * c_c) / om_x),
        "B'": complex((d * b_c - a * c_c) / om_x),
    }


def synthesize_cz(
    graph: Graph,
    n: int = 3,
    m: int = 1,
    n_a: int = 1,
    n_a_p: int = 1,
    tau: float = 100.0,
    envelope: str = FLAT,
    residual_target: float = 1e-10,
) -> SynthesisResult:
    """Walk-4 return with phase ``pi`` through the interaction-shifted edges, walks 2 and 3 trivial."""
    require_valid(graph)
    chain = cz_chain(n, m, n_a, n_a_p)
    roles = cz_roles(graph)
    seed = cz_seed(chain, n_a, n_a_p, tau)
    comp = graph.computational_labels()
    target = target_unitary("CZ", 2)
    cols = [graph.index(lab) for lab in comp]

    def amps_from(x):
        vals = dict(seed)
        vals["B"] = complex(x[0], 0.0)
        vals["B'"] = complex(x[1], x[2])
        return {roles[k]: v for k, v in vals.items()}

    def residual(x):
        pulse = pulse_for_amplitudes(graph, amps_from(x), tau, envelope)
        u = expm_hermitian(adjacency_from_drive(graph, pulse), effective_time(pulse.envelope, pulse.envelope.t_end))
        want = np.zeros((graph.size, len(cols)), dtype=complex)
        want[cols, :] = target
        diff = (u[:, cols] - want).ravel()
        return np.concatenate([diff.real, diff.imag])

    x0 = np.array([seed["B"].real, seed["B'"].real, seed["B'"].imag])
    fit = least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, method="lm")
    x = fit.x if np.linalg.norm(fit.fun) <= np.linalg.norm(residual(x0)) else x0
    res = float(np.linalg.norm(residual(x)))
    if res > 1e-6:
        raise RefinementStalled(f"refinement stalled at residual {res:.3e}")
    amps = amps_from(x)
    pulse = pulse_for_amplitudes(graph, amps, tau, envelope)
    u = _resonant_gate_unitary(graph, pulse, comp)
    return SynthesisResult(
        "CZ", amps, float(tau), {"n": n, "m": m, "n_A": n_a, "n_A_prime": n_a_p},
        gate_fidelity(u, target), True, pulse, residual=res, roles=roles,
    )


# verification -----------------------------------------------------------------


@dataclass
class WalkOutcome:
    start: str
    column: np.ndarray
    return_probability: float
    phase: float
    overlap: float
    incomplete: bool


@dataclass
class VerificationReport:
    gate: str
    mode: str
    labels: tuple[str, ...]
    unitary: np.ndarray
    fidelity: float
    walks: list[WalkOutcome]
    boundary_leakage: float
    coin_purity: float
    is_unitary: bool

    @property
    def flags(self) -> list[str]:
        return [f"incomplete return from {w.start}" for w in self.walks if w.incomplete]

    def require(self, min_fidelity: float) -> None:
        if self.flags:
            raise VerificationError("; ".join(self.flags))
        if self.fidelity < min_fidelity:
            raise VerificationError(f"fidelity {self.fidelity:.12g} below {min_fidelity}")


def verify_gate(
    spec: GateSpec,
    synthesis: SynthesisResult | None,
    graph: Graph,
    pulse: Pulse | None = None,
    mode: str = RESONANT,
    dt: float | None = None,
    M: int = DEFAULT_COIN_LEVELS,
    workers: int = 4,
    leakage_threshold: float | None = 1e-6,
) -> VerificationReport:
    """Run one walk per computational basis state and assemble the achieved gate column by column."""
    if pulse is None:
        if synthesis is None:
            raise ValueError("need a synthesis result or an explicit pulse")
        pulse = synthesis.pulse
    if synthesis is not None:
        known = {c.class_id for c in compute_edge_classes(graph, CLASS_TOL)}
        if not set(synthesis.amplitudes) <= known:
            raise VerificationError("synthesis amplitudes refer to edge classes absent from the graph")
    labels = spec.affected_vertices
    dt = default_dt(graph, pulse) if dt is None else dt
    model = None
    if mode in (FULL, RWA):
        model = build_ladder(graph, pulse, dt, M, mode)
        if pulse.envelope.kind == FLAT:
            model.powers()
        else:
            model.eig("minus")
            model.eig("plus")

    def walk(label: str):
        init = WalkerState.basis(graph, label)
        if mode == RESONANT:
            res = resonant_walk_run(graph, pulse, init, samples=2)
        elif mode == EXACT:
            res = exact_propagator(graph, pulse, dt, init, samples=2)[1]
        elif mode in (FULL, RWA):
            res = coined_walk_run(
                graph, pulse, init, dt, M, mode, leakage_threshold=leakage_threshold,
                samples=2, model=model,
            )
        else:
            raise ValueError(f"unknown mode {mode!r}")
        return label, res

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = dict(pool.map(walk, labels))

    idx = [graph.index(lab) for lab in labels]
    u = np.zeros((len(labels), len(labels)), dtype=complex)
    walks = []
    for j, lab in enumerate(labels):
        amps = results[lab].final_walker.amplitudes
        col = amps[idx]
        u[:, j] = col
        ret = float(np.sum(np.abs(col) ** 2))
        ov = np.vdot(spec.target[:, j], col)
        walks.append(WalkOutcome(lab, col, ret, float(np.angle(ov)), float(abs(ov)), 1.0 - ret > RETURN_TOL))
    fid = gate_fidelity(u, spec.target)
    return VerificationReport(
        spec.name,
        mode,
        tuple(labels),
        u,
        fid,
        walks,
        max(r.boundary_leakage for r in results.values()),
        min(r.coin_purity for r in results.values()),
        bool(is_unitary(u, 1e-8)),
    )
