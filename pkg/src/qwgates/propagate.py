"""Propagation modes: exact time-ordered, coined quasienergy-ladder walk, RWA and resonant walks.

All modes work in the same interaction frame, so final walker states from
different modes can be compared directly.

The coined walk attaches one integer ladder index ``m_c`` to every pulse
component. The step is generated by the time-independent ladder Hamiltonian
``K + W`` with ``K = -E_xi + sum_c omega_c m_c`` and ``W`` built from ladder
shifts. Reading the walker out by summing amplitudes coherently over all
``m`` recovers the driven interaction-frame dynamics.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg as sla
from scipy.optimize import brentq

from . import kernels
from .drive import (
    DIPOLE,
    FLAT,
    CouplingFunction,
    Pulse,
    drive_signal,
    effective_time,
    generalized_interaction_terms,
    max_drive_bound,
    sequence_pulses,
)
from .errors import GraphError, LeakageError, QWGatesError
from .graph import Graph, adjacency_from_drive
from .linalg import expm_hermitian

EXACT = "exact"
FULL = "full"
RWA = "rwa"
RESONANT = "resonant"
MODES = (EXACT, FULL, RWA, RESONANT)

NORM_TOL = 1e-9
DEFAULT_COIN_LEVELS = 6
DEFAULT_LEAKAGE_THRESHOLD = 1e-6
DEFAULT_SAMPLES = 101
MAX_LADDER_STATES = 3000


@dataclass(frozen=True)
class WalkerState:
    amplitudes: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", tuple(self.labels))
        if amps.shape != (len(self.labels),):
            raise ValueError("amplitude vector does not match the label list")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"walker state is not normalized (norm {norm:.12g})")

    @classmethod
    def basis(cls, graph: Graph, label: str) -> "WalkerState":
        amps = np.zeros(graph.size, dtype=complex)
        amps[graph.index(label)] = 1.0
        return cls(amps, graph.labels)

    @classmethod
    def from_amplitudes(cls, graph: Graph, amps, normalize: bool = False) -> "WalkerState":
        amps = np.asarray(amps, dtype=complex)
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(amps, graph.labels)

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[self.labels.index(label)])


@dataclass(frozen=True)
class LadderState:
    """Walker amplitudes on ``(vertex, m)`` pairs, ``m`` one rung index per pulse component."""

    vertex: np.ndarray
    coins: np.ndarray
    amplitudes: np.ndarray
    labels: tuple[str, ...]
    truncation: int

    def as_dict(self) -> dict[tuple[str, tuple[int, ...]], complex]:
        return {
            (self.labels[v], tuple(int(x) for x in m)): complex(a)
            for v, m, a in zip(self.vertex, self.coins, self.amplitudes)
            if a != 0
        }

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class Trajectory:
    t: np.ndarray
    tau: np.ndarray
    probabilities: np.ndarray
    norm: np.ndarray
    leakage: np.ndarray
    labels: tuple[str, ...]

    @classmethod
    def concatenate(cls, parts: Sequence["Trajectory"]) -> "Trajectory":
        tau_offset = 0.0
        taus = []
        for p in parts:
            taus.append(p.tau + tau_offset)
            tau_offset += float(p.tau[-1]) if len(p.tau) else 0.0
        return cls(
            np.concatenate([p.t for p in parts]),
            np.concatenate(taus),
            np.concatenate([p.probabilities for p in parts]),
            np.concatenate([p.norm for p in parts]),
            np.concatenate([p.leakage for p in parts]),
            parts[0].labels,
        )


@dataclass
class PropagationResult:
    mode: str
    trajectory: Trajectory
    final_walker: WalkerState
    norm_drift: float = 0.0
    boundary_leakage: float = 0.0
    coin_purity: float = 1.0
    ladder: LadderState | None = None
    diagnostics: list[str] = field(default_factory=list)


def default_dt(graph: Graph, pulse: Pulse) -> float:
    """``min(1/(50 max omega), 1/(50 max dE))`` over the nonzero scales."""
    scales = [float(np.max(pulse.omegas))] if pulse.components else []
    _, _, _, de = graph.edge_arrays
    if len(de) and np.max(de) > 0:
        scales.append(float(np.max(de)))
    if not scales:
        return pulse.envelope.t_gate / 100
    return 1.0 / (50.0 * max(scales))


def step_grid(pulse: Pulse, dt: float) -> tuple[int, float]:
    """Number of steps covering the pulse window and the step that tiles it exactly."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    nsteps = max(1, math.ceil(pulse.envelope.t_gate / dt - 1e-9))
    return nsteps, pulse.envelope.t_gate / nsteps


def _sample_steps(nsteps: int, samples: int) -> np.ndarray:
    samples = max(2, min(samples, nsteps + 1))
    return np.unique(np.round(np.linspace(0, nsteps, samples)).astype(np.int64))


def _initial_vector(graph: Graph, initial: WalkerState | None) -> np.ndarray:
    if initial is None:
        return WalkerState.basis(graph, graph.labels[0]).amplitudes.copy()
    if tuple(initial.labels) != graph.labels:
        raise GraphError("initial state labels do not match the graph")
    return np.array(initial.amplitudes, dtype=complex)


def _effective_times(pulse: Pulse, t: np.ndarray) -> np.ndarray:
    return np.array([effective_time(pulse.envelope, float(x)) for x in t])


# exact mode ---------------------------------------------------------------


def exact_propagator(
    graph: Graph,
    pulse: Pulse,
    dt: float | None = None,
    initial: WalkerState | None = None,
    coupling: CouplingFunction = DIPOLE,
    samples: int = DEFAULT_SAMPLES,
    backend: str | None = None,
) -> tuple[np.ndarray, PropagationResult]:
    """Midpoint product ``U = prod_k exp(-i dt V(t_k + dt/2))`` over the pulse window."""
    dt = default_dt(graph, pulse) if dt is None else dt
    nsteps, dt = step_grid(pulse, dt)
    diagnostics = []
    bound = max_drive_bound(pulse, graph, coupling)
    if dt * bound > 0.1:
        msg = f"dt * max|V| = {dt * bound:.3g} exceeds 0.1; exact propagation may be inaccurate"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        diagnostics.append(msg)
    t0 = pulse.envelope.t_start
    t_mid = t0 + (np.arange(nsteps) + 0.5) * dt
    s = drive_signal(pulse, t_mid, coupling)
    hi, lo, g, de = graph.edge_arrays
    steps = _sample_steps(nsteps, samples)
    u, snaps = kernels.exact_products(
        hi, lo, np.conj(g), de, s, t_mid, dt, graph.size, steps, backend=backend
    )
    psi0 = _initial_vector(graph, initial)
    states = snaps @ psi0
    norms = np.linalg.norm(states, axis=1)
    t = t0 + steps * dt
    traj = Trajectory(
        t,
        _effective_times(pulse, t),
        np.abs(states) ** 2,
        norms,
        np.zeros(len(steps)),
        graph.labels,
    )
    final = u @ psi0
    result = PropagationResult(
        EXACT,
        traj,
        WalkerState(final / np.linalg.norm(final), graph.labels),
        norm_drift=float(np.max(np.abs(norms - 1.0))),
        diagnostics=diagnostics,
    )
    return u, result


# coined ladder walk -------------------------------------------------------


@dataclass
class LadderModel:
    """Ladder band, step generators and their eigendecompositions for one pulse."""

    graph: Graph
    pulse: Pulse
    mode: str
    truncation: int
    dt: float
    nsteps: int
    vertex: np.ndarray
    coins: np.ndarray
    w_minus: np.ndarray
    w_plus: np.ndarray
    frame: np.ndarray
    boundary: np.ndarray
    _eig: dict = field(default_factory=dict, repr=False)
    _power: tuple | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.vertex)

    def eig(self, which: str):
        if which not in self._eig:
            w, q = np.linalg.eigh(self.w_minus if which == "minus" else self.w_plus)
            self._eig[which] = (w, np.asfortranarray(q))
        return self._eig[which]

    def origin_index(self, v: int) -> int:
        hits = np.nonzero((self.vertex == v) & ~np.any(self.coins, axis=1))[0]
        return int(hits[0])

    def readout(self, psi: np.ndarray, t: float) -> np.ndarray:
        """Coherent sum over rungs after undoing the frame rotation up to time ``t``."""
        rotated = psi * np.exp(1j * t * self.frame)
        out = np.zeros(self.graph.size, dtype=complex)
        np.add.at(out, self.vertex, rotated)
        return out

    def reduced_density(self, psi: np.ndarray) -> np.ndarray:
        rows = {}
        for i, m in enumerate(map(tuple, self.coins)):
            rows.setdefault(m, []).append(i)
        rho = np.zeros((self.graph.size, self.graph.size), dtype=complex)
        for idx in rows.values():
            vec = np.zeros(self.graph.size, dtype=complex)
            vec[self.vertex[idx]] = psi[idx]
            rho += np.outer(vec, vec.conj())
        return rho

    def one_step(self) -> np.ndarray:
        wm, qm = self.eig("minus")
        step = np.diag(np.exp(-1j * self.dt * self.frame))
        if self.mode == FULL:
            wp, qp = self.eig("plus")
            step = (qp * np.exp(-1j * self.dt * wp)) @ (qp.conj().T @ step)
        return (qm * np.exp(-1j * self.dt * wm)) @ (qm.conj().T @ step)

    def powers(self):
        """Complex Schur form of the constant-envelope step, for direct powers."""
        if self._power is None:
            t, z = sla.schur(self.one_step(), output="complex")
            lam = np.diag(t)
            self._power = (lam / np.abs(lam), z)
        return self._power


def _ladder_terms(pulse: Pulse, coupling: CouplingFunction, mode: str):
    """Per component, the ``(shift, coefficient)`` pairs kept in this mode."""
    order = max(1, coupling.order)
    terms = []
    for comp in pulse.components:
        kept = [
            (s, c)
            for s, c in generalized_interaction_terms(coupling, comp, order)
            if mode == FULL or s >= 0
        ]
        terms.append(kept)
    return terms


def build_ladder(
    graph: Graph,
    pulse: Pulse,
    dt: float,
    truncation: int = DEFAULT_COIN_LEVELS,
    mode: str = FULL,
    coupling: CouplingFunction = DIPOLE,
    max_states: int = MAX_LADDER_STATES,
) -> LadderModel:
    if mode not in (FULL, RWA):
        raise ValueError(f"ladder walk mode must be 'full' or 'rwa', got {mode!r}")
    if truncation < 1:
        raise ValueError("coin truncation M must be at least 1")
    nsteps, dt = step_grid(pulse, dt)
    ncomp = len(pulse.components)
    hi, lo, g, _ = graph.edge_arrays
    terms = _ladder_terms(pulse, coupling, mode)
    # moves[v]: (upper vertex, coin shift, coefficient, belongs to the minus part)
    moves: list[list] = [[] for _ in range(graph.size)]
    for c, kept in enumerate(terms):
        for s, coeff in kept:
            shift = np.zeros(ncomp, dtype=np.int64)
            shift[c] = s
            for e in range(len(hi)):
                amp = coeff * np.conj(g[e])
                moves[lo[e]].append((hi[e], shift, amp, s >= 0))

    origin = tuple([0] * ncomp)
    index: dict[tuple[int, tuple[int, ...]], int] = {}
    queue = deque()
    for v in range(graph.size):
        index[(v, origin)] = len(index)
        queue.append((v, origin))
    entries = []  # (row, col, value, is_minus) for |hi,m+s><lo,m|
    while queue:
        v, m = queue.popleft()
        src = index[(v, m)]
        for u, shift, amp, is_minus in moves[v]:
            m2 = tuple(int(x) for x in np.add(m, shift))
            if max((abs(x) for x in m2), default=0) > truncation:
                continue
            key = (u, m2)
            if key not in index:
                if len(index) >= max_states:
                    raise QWGatesError(
                        f"ladder band exceeds {max_states} states; lower the coin levels "
                        "or use the resonant mode"
                    )
                index[key] = len(index)
                queue.append(key)
            entries.append((index[key], src, amp, is_minus))
        # reverse direction: from an upper vertex back down
        for e in range(len(hi)):
            if hi[e] != v:
                continue
            for c, kept in enumerate(terms):
                for s, coeff in kept:
                    m2 = list(m)
                    m2[c] -= s
                    if max((abs(x) for x in m2), default=0) > truncation:
                        continue
                    key = (int(lo[e]), tuple(m2))
                    if key not in index:
                        if len(index) >= max_states:
                            raise QWGatesError(
                                f"ladder band exceeds {max_states} states; lower the coin "
                                "levels or use the resonant mode"
                            )
                        index[key] = len(index)
                        queue.append(key)
    n = len(index)
    keys = sorted(index, key=index.get)
    vertex = np.array([k[0] for k in keys], dtype=np.int64)
    coins = np.array([k[1] for k in keys], dtype=np.int64).reshape(n, ncomp)
    w_minus = np.zeros((n, n), dtype=complex)
    w_plus = np.zeros((n, n), dtype=complex)
    for row, col, amp, is_minus in entries:
        target = w_minus if is_minus else w_plus
        target[row, col] += amp
        target[col, row] += np.conj(amp)
    energies = graph.energies
    frame = -energies[vertex] + (coins @ pulse.omegas if ncomp else 0.0)
    boundary = (
        np.any(np.abs(coins) == truncation, axis=1) if ncomp else np.zeros(n, dtype=bool)
    )
    return LadderModel(
        graph, pulse, mode, truncation, dt, nsteps, vertex, coins, w_minus, w_plus,
        np.asarray(frame, dtype=float), boundary,
    )


def _run_ladder(
    model: LadderModel,
    psi0_walker: np.ndarray,
    samples: int,
    backend: str | None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Returns sample steps, sampled ladder states, final ladder state, boundary maximum."""
    env = model.pulse.envelope
    t0 = env.t_start
    psi0 = np.zeros(model.size, dtype=complex)
    for v, a in enumerate(psi0_walker):
        if a != 0:
            psi0[model.origin_index(v)] = a * np.exp(-1j * t0 * model.frame[model.origin_index(v)])
    steps = _sample_steps(model.nsteps, samples)
    if env.kind == FLAT:
        lam, z = model.powers()
        c0 = z.conj().T @ psi0
        dense = _sample_steps(model.nsteps, 1001)
        grid = np.union1d(dense, steps)
        states = (np.exp(1j * np.outer(grid, np.angle(lam))) * c0) @ z.T
        bmass = np.sum(np.abs(states[:, model.boundary]) ** 2, axis=1)
        pick = np.searchsorted(grid, steps)
        return steps, states[pick], states[-1], float(np.max(bmass))
    t_right = t0 + (np.arange(model.nsteps) + 1) * model.dt
    phis = env(t_right)
    wm, qm = model.eig("minus")
    if model.mode == FULL:
        wp, qp = model.eig("plus")
    else:
        wp, qp = wm, qm
    kphase = np.exp(-1j * model.dt * model.frame)
    final, snaps, worst = kernels.coined_steps(
        psi0, kphase, qm, wm, qp, wp, model.mode == FULL, phis, model.dt,
        model.boundary, steps, backend=backend,
    )
    return steps, snaps, final, float(worst)


def coined_walk_run(
    graph: Graph,
    pulse: Pulse,
    initial: WalkerState | None = None,
    dt: float | None = None,
    M: int = DEFAULT_COIN_LEVELS,
    mode: str = FULL,
    coupling: CouplingFunction = DIPOLE,
    leakage_threshold: float | None = DEFAULT_LEAKAGE_THRESHOLD,
    samples: int = DEFAULT_SAMPLES,
    backend: str | None = None,
    model: LadderModel | None = None,
) -> PropagationResult:
    """Coined walk on the truncated quasienergy ladder (``mode`` is ``full`` or ``rwa``)."""
    dt = default_dt(graph, pulse) if dt is None else dt
    if model is None:
        model = build_ladder(graph, pulse, dt, M, mode, coupling)
    psi0 = _initial_vector(graph, initial)
    steps, snaps, final, worst = _run_ladder(model, psi0, samples, backend)
    t = pulse.envelope.t_start + steps * model.dt
    probs = np.empty((len(steps), graph.size))
    for i, (tk, psi) in enumerate(zip(t, snaps)):
        walker = model.readout(psi, tk)
        probs[i] = np.abs(walker) ** 2 / np.sum(np.abs(walker) ** 2)
    norms = np.linalg.norm(snaps, axis=1)
    leak = np.sum(np.abs(snaps[:, model.boundary]) ** 2, axis=1)
    traj = Trajectory(t, _effective_times(pulse, t), probs, norms, leak, graph.labels)
    walker = model.readout(final, pulse.envelope.t_end)
    walker = walker / np.linalg.norm(walker)
    rho = model.reduced_density(final)
    purity = float(np.real(np.trace(rho @ rho)) / np.real(np.trace(rho)) ** 2)
    ladder = LadderState(model.vertex, model.coins, final, graph.labels, model.truncation)
    result = PropagationResult(
        model.mode,
        traj,
        WalkerState(walker, graph.labels),
        norm_drift=float(max(np.max(np.abs(norms - 1.0)), abs(np.linalg.norm(final) - 1.0))),
        boundary_leakage=worst,
        coin_purity=purity,
        ladder=ladder,
    )
    if leakage_threshold is not None and worst > leakage_threshold:
        raise LeakageError(
            f"boundary leakage {worst:.3e} exceeds {leakage_threshold:.1e}; increase the coin levels"
        )
    return result


# resonant mode ------------------------------------------------------------


def _time_at_tau(pulse: Pulse, tau: float, tau_g: float) -> float:
    env = pulse.envelope
    if tau <= 0:
        return env.t_start
    if tau >= tau_g:
        return env.t_end
    if env.kind == FLAT:
        return env.t_start + tau
    return brentq(lambda t: effective_time(env, t) - tau, env.t_start, env.t_end, xtol=1e-14)


def resonant_walk_run(
    graph: Graph,
    pulse: Pulse,
    initial: WalkerState | None = None,
    tol_res: float = 1e-9,
    samples: int = DEFAULT_SAMPLES,
    coupling: CouplingFunction = DIPOLE,
) -> PropagationResult:
    """Continuous-time walk ``exp(-i tau Lambda)`` with the resonant adjacency matrix."""
    if not coupling.is_dipole:
        raise ValueError("the resonant mode supports the dipole coupling only")
    lam = adjacency_from_drive(graph, pulse, tol_res)
    tau_g = effective_time(pulse.envelope, pulse.envelope.t_end)
    psi0 = _initial_vector(graph, initial)
    w, q = np.linalg.eigh(lam)
    c0 = q.conj().T @ psi0
    taus = np.linspace(0.0, tau_g, max(2, samples))
    states = (np.exp(-1j * np.outer(taus, w)) * c0) @ q.T
    t = np.array([_time_at_tau(pulse, x, tau_g) for x in taus])
    norms = np.linalg.norm(states, axis=1)
    traj = Trajectory(t, taus, np.abs(states) ** 2, norms, np.zeros(len(taus)), graph.labels)
    final = expm_hermitian(lam, tau_g) @ psi0
    return PropagationResult(
        RESONANT,
        traj,
        WalkerState(final / np.linalg.norm(final), graph.labels),
        norm_drift=float(np.max(np.abs(norms - 1.0))),
    )


def resonant_unitary(graph: Graph, pulse: Pulse, tol_res: float = 1e-9) -> np.ndarray:
    lam = adjacency_from_drive(graph, pulse, tol_res)
    return expm_hermitian(lam, effective_time(pulse.envelope, pulse.envelope.t_end))


# dispatch and comparison --------------------------------------------------


def run_mode(
    graph: Graph,
    pulse: Pulse,
    initial: WalkerState | None,
    mode: str,
    dt: float | None = None,
    M: int = DEFAULT_COIN_LEVELS,
    coupling: CouplingFunction = DIPOLE,
    tol_res: float = 1e-9,
    leakage_threshold: float | None = DEFAULT_LEAKAGE_THRESHOLD,
    samples: int = DEFAULT_SAMPLES,
) -> PropagationResult:
    if mode == EXACT:
        return exact_propagator(graph, pulse, dt, initial, coupling, samples)[1]
    if mode in (FULL, RWA):
        return coined_walk_run(
            graph, pulse, initial, dt, M, mode, coupling, leakage_threshold, samples
        )
    if mode == RESONANT:
        return resonant_walk_run(graph, pulse, initial, tol_res, samples, coupling)
    raise ValueError(f"unknown mode {mode!r}")


def simulate(
    graph: Graph,
    pulses: Sequence[Pulse],
    initial: WalkerState,
    mode: str,
    **kwargs,
) -> PropagationResult:
    """Run a sequence of non-overlapping pulses, handing the walker from one to the next."""
    pulses = sequence_pulses(pulses)
    if not pulses:
        raise ValueError("at least one pulse is required")
    results = []
    state = initial
    for p in pulses:
        res = run_mode(graph, p, state, mode, **kwargs)
        results.append(res)
        state = res.final_walker
    if len(results) == 1:
        return results[0]
    return PropagationResult(
        mode,
        Trajectory.concatenate([r.trajectory for r in results]),
        state,
        norm_drift=max(r.norm_drift for r in results),
        boundary_leakage=max(r.boundary_leakage for r in results),
        coin_purity=min(r.coin_purity for r in results),
        ladder=results[-1].ladder,
        diagnostics=[d for r in results for d in r.diagnostics],
    )


@dataclass
class ApproximationReport:
    distances: dict[str, float]
    coin_purity: dict[str, float]
    boundary_leakage: dict[str, float]
    finals: dict[str, WalkerState]


def approximation_report(
    graph: Graph,
    pulse: Pulse,
    initial: WalkerState,
    dt: float | None = None,
    M: int = DEFAULT_COIN_LEVELS,
    tol_res: float = 1e-9,
    leakage_threshold: float | None = DEFAULT_LEAKAGE_THRESHOLD,
) -> ApproximationReport:
    """Run all four modes on the same input and compare the final walkers."""
    dt = default_dt(graph, pulse) if dt is None else dt
    runs = {
        EXACT: exact_propagator(graph, pulse, dt, initial)[1],
        FULL: coined_walk_run(graph, pulse, initial, dt, M, FULL, leakage_threshold=leakage_threshold),
        RWA: coined_walk_run(graph, pulse, initial, dt, M, RWA, leakage_threshold=leakage_threshold),
        RESONANT: resonant_walk_run(graph, pulse, initial, tol_res),
    }

    def dist(a, b):
        return float(np.linalg.norm(runs[a].final_walker.amplitudes - runs[b].final_walker.amplitudes))

    return ApproximationReport(
        {
            "exact-full": dist(EXACT, FULL),
            "full-rwa": dist(FULL, RWA),
            "rwa-resonant": dist(RWA, RESONANT),
        },
        {k: r.coin_purity for k, r in runs.items()},
        {k: r.boundary_leakage for k, r in runs.items()},
        {k: r.final_walker for k, r in runs.items()},
    )


def site_probabilities(state: WalkerState | LadderState) -> np.ndarray:
    """Vertex occupation probabilities; ladder rungs are traced out."""
    if isinstance(state, LadderState):
        out = np.zeros(len(state.labels))
        np.add.at(out, state.vertex, np.abs(state.amplitudes) ** 2)
        return out
    return np.abs(state.amplitudes) ** 2


# line walk ----------------------------------------------------------------

HADAMARD_COIN = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class LineDistribution:
    sites: np.ndarray
    probabilities: np.ndarray

    def at(self, site: int) -> float:
        return float(self.probabilities[site - int(self.sites[0])])


def line_walk_demo(
    steps: int,
    coin: np.ndarray = HADAMARD_COIN,
    initial_coin: Sequence[complex] = (1.0, 0.0),
) -> LineDistribution:
    """Discrete-time coined walk on a line: coin toss, then coin 0 steps right and coin 1 left."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    coin = np.asarray(coin, dtype=complex)
    if coin.shape != (2, 2) or np.linalg.norm(coin.conj().T @ coin - np.eye(2), 2) > 1e-12:
        raise ValueError("coin must be a 2x2 unitary")
    c0 = np.asarray(initial_coin, dtype=complex)
    if abs(np.linalg.norm(c0) - 1.0) > 1e-12:
        raise ValueError("initial coin state must be normalized")
    # the Hadamard coin runs as the integer matrix sqrt(2) H so small walks stay exact
    scaled = np.array_equal(coin, HADAMARD_COIN)
    step_coin = np.array([[1, 1], [1, -1]], dtype=complex) if scaled else coin
    size = 2 * steps + 1
    psi = np.zeros((size, 2), dtype=complex)
    psi[steps] = c0
    for _ in range(steps):
        psi = psi @ step_coin.T
        shifted = np.zeros_like(psi)
        shifted[1:, 0] = psi[:-1, 0]
        shifted[:-1, 1] = psi[1:, 1]
        psi = shifted
    probs = np.sum(np.abs(psi) ** 2, axis=1)
    if scaled:
        probs = np.ldexp(probs, -steps)
    return LineDistribution(np.arange(-steps, steps + 1), probs)


__all__ = [
    "EXACT", "FULL", "RWA", "RESONANT", "MODES", "WalkerState", "LadderState", "Trajectory",
    "PropagationResult", "LadderModel", "ApproximationReport", "LineDistribution",
    "default_dt", "step_grid", "exact_propagator", "build_ladder", "coined_walk_run",
    "resonant_walk_run", "resonant_unitary", "run_mode", "simulate", "approximation_report",
    "site_probabilities", "line_walk_demo", "HADAMARD_COIN", "expm_hermitian",
]
