"""Control pulses and the driving terms they generate on a state graph."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy import integrate

from .errors import ResonanceError

if TYPE_CHECKING:
    from .graph import Graph

FLAT = "flat"
RAISED_COSINE = "raised_cosine"
GAUSSIAN = "gaussian"
ENVELOPE_KINDS = (FLAT, RAISED_COSINE, GAUSSIAN)


@dataclass(frozen=True)
class PulseComponent:
    omega: float
    amp: complex

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"component frequency must be positive, got {self.omega}")
        object.__setattr__(self, "amp", complex(self.amp))


@dataclass(frozen=True)
class Envelope:
    """Switching profile, zero outside ``[t_start, t_start + t_gate]``.

    The gaussian is centred in the window and cut to zero beyond
    ``truncation * sigma`` from the centre.
    """

    kind: str = FLAT
    t_start: float = 0.0
    t_gate: float = 1.0
    sigma: float | None = None
    truncation: float | None = None

    def __post_init__(self):
        if self.kind not in ENVELOPE_KINDS:
            raise ValueError(f"unknown envelope kind {self.kind!r}")
        if not self.t_gate > 0:
            raise ValueError("t_gate must be positive")
        if self.kind == GAUSSIAN:
            if self.sigma is None or self.sigma <= 0:
                raise ValueError("gaussian envelope needs sigma > 0")
            if self.truncation is None:
                object.__setattr__(self, "truncation", 0.5 * self.t_gate / self.sigma)
            if self.truncation * self.sigma > 0.5 * self.t_gate * (1 + 1e-12):
                raise ValueError("gaussian truncation extends past the pulse window")

    @property
    def t_end(self) -> float:
        return self.t_start + self.t_gate

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        u = t - self.t_start
        inside = (u >= 0) & (u <= self.t_gate)
        if self.kind == FLAT:
            val = np.ones_like(u)
        elif self.kind == RAISED_COSINE:
            val = np.sin(np.pi * u / self.t_gate) ** 2
        else:
            x = u - 0.5 * self.t_gate
            val = np.exp(-0.5 * (x / self.sigma) ** 2)
            inside &= np.abs(x) <= self.truncation * self.sigma
        return np.where(inside, val, 0.0)


@dataclass(frozen=True)
class Pulse:
    envelope: Envelope
    components: tuple[PulseComponent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        omegas = sorted(c.omega for c in self.components)
        if any(b - a <= 0 for a, b in zip(omegas, omegas[1:])):
            raise ValueError("pulse component frequencies must be distinct")

    @property
    def omegas(self) -> np.ndarray:
        return np.array([c.omega for c in self.components], dtype=float)

    @property
    def amps(self) -> np.ndarray:
        return np.array([c.amp for c in self.components], dtype=complex)

    def scaled(self, factor: complex) -> "Pulse":
        return Pulse(self.envelope, tuple(PulseComponent(c.omega, c.amp * factor) for c in self.components))


@dataclass(frozen=True)
class CouplingFunction:
    """Field coupling ``F(x) = sum_m taylor[m] x**m`` (``taylor[m] = F^(m)(0)/m!``)."""

    taylor: tuple[float, ...] = (0.0, 1.0)

    def __post_init__(self):
        taylor = tuple(float(c) for c in self.taylor)
        if not taylor or not all(math.isfinite(c) for c in taylor):
            raise ValueError("taylor coefficients must be a finite non-empty list")
        if not any(taylor):
            raise ValueError("taylor coefficients are all zero")
        object.__setattr__(self, "taylor", taylor)

    @property
    def order(self) -> int:
        return len(self.taylor) - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.taylor)

    @property
    def is_dipole(self) -> bool:
        return self.taylor[:2] == (0.0, 1.0) and not any(self.taylor[2:])


DIPOLE = CouplingFunction()


def detunings(graph: "Graph", omega: float) -> list[tuple[float, float]]:
    """Per-edge ``(delta_minus, delta_plus) = (dE - omega, dE + omega)``."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    _, _, _, de = graph.edge_arrays
    return [(float(d - omega), float(d + omega)) for d in de]


def resonance_partition(
    graph: "Graph", pulse: Pulse, tol_res: float = 1e-9
) -> dict[int, tuple[list[int], list[int]]]:
    """Split, per edge, the component indices into resonant and non-resonant lists."""
    if tol_res < 0:
        raise ValueError("tol_res must be non-negative")
    _, _, _, de = graph.edge_arrays
    out = {}
    for i, d in enumerate(de):
        res, off = [], []
        for k, c in enumerate(pulse.components):
            (res if abs(d - c.omega) <= tol_res else off).append(k)
        if len(res) > 1:
            e = graph.edges[i]
            raise ResonanceError(
                f"edge {e.hi}-{e.lo} is resonant with several components "
                f"{[pulse.components[k].omega for k in res]}"
            )
        out[i] = (res, off)
    return out


def drive_signal(pulse: Pulse, t, coupling: CouplingFunction = DIPOLE) -> np.ndarray:
    """Real scalar ``Phi(t) * sum_w F(amp_w* e^{iwt} + amp_w e^{-iwt})``."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for c in pulse.components:
        x = 2.0 * np.real(np.conj(c.amp) * np.exp(1j * c.omega * t))
        total = total + coupling(x)
    return pulse.envelope(t) * total


def classical_hamiltonian(
    graph: "Graph", pulse: Pulse, t: float, coupling: CouplingFunction = DIPOLE
) -> np.ndarray:
    """Interaction-picture drive ``V(t)`` with ``[hi, lo] = s(t) g* e^{-i dE t}``."""
    hi, lo, g, de = graph.edge_arrays
    s = float(drive_signal(pulse, t, coupling))
    v = np.zeros((graph.size, graph.size), dtype=complex)
    vals = s * np.conj(g) * np.exp(-1j * de * t)
    v[hi, lo] = vals
    v[lo, hi] = np.conj(vals)
    return v


def effective_time(envelope: Envelope, t: float) -> float:
    """Integral of the envelope from ``t_start`` to ``t``."""
    if t < envelope.t_start:
        raise ValueError("t precedes the pulse start")
    u = min(t - envelope.t_start, envelope.t_gate)
    if envelope.kind == FLAT:
        return float(u)
    if envelope.kind == RAISED_COSINE:
        T = envelope.t_gate
        return float(0.5 * u - T * math.sin(2 * math.pi * u / T) / (4 * math.pi))
    half = envelope.truncation * envelope.sigma
    lo = 0.5 * envelope.t_gate - half
    hi = min(u, 0.5 * envelope.t_gate + half)
    if hi <= lo:
        return 0.0
    val, _ = integrate.quad(
        lambda x: math.exp(-0.5 * ((x - 0.5 * envelope.t_gate) / envelope.sigma) ** 2),
        lo,
        hi,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=200,
    )
    return float(val)


def generalized_interaction_terms(
    coupling: CouplingFunction, component: PulseComponent, order: int
) -> list[tuple[int, complex]]:
    """Expand ``F(amp* I+ + amp I-)`` into net ladder shifts.

    Returns ``(k, coeff)`` pairs: ``k > 0`` multiplies ``(I+)^k``, ``k < 0``
    multiplies ``(I-)^|k|`` and ``k = 0`` is the scalar part collected from
    the even powers. Terms above the Taylor order of ``F`` vanish.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    e = component.amp
    coeffs: dict[int, complex] = {}
    for m in range(min(order, coupling.order) + 1):
        f = coupling.taylor[m]
        if f == 0:
            continue
        for k in range(m + 1):
            # k factors of amp* I+ and m-k of amp I-; I+ I- = 1 in the classical limit
            shift = 2 * k - m
            coeffs[shift] = coeffs.get(shift, 0j) + f * math.comb(m, k) * np.conj(e) ** k * e ** (m - k)
    return sorted((k, complex(v)) for k, v in coeffs.items() if v != 0)


def max_drive_bound(pulse: Pulse, graph: "Graph", coupling: CouplingFunction = DIPOLE) -> float:
    """Upper bound on ``max_t |V(t)_{ij}|``."""
    _, _, g, _ = graph.edge_arrays
    if not len(g):
        return 0.0
    gmax = float(np.max(np.abs(g)))
    total = 0.0
    for c in pulse.components:
        x = 2 * abs(c.amp)
        total += sum(abs(f) * x**m for m, f in enumerate(coupling.taylor))
    return gmax * total


def sequence_pulses(pulses: Sequence[Pulse]) -> list[Pulse]:
    """Order pulses in time, rejecting overlapping windows."""
    ordered = sorted(pulses, key=lambda p: p.envelope.t_start)
    for a, b in zip(ordered, ordered[1:]):
        if b.envelope.t_start < a.envelope.t_end:
            raise ValueError("pulses overlap")
    return ordered
