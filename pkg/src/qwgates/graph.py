"""State graphs: vertices are (multi)qubit basis states, edges are driven transitions.

Edges are stored with ``hi`` the higher-energy endpoint, so every gap
``delta_e = E[hi] - E[lo]`` is non-negative. The coupling ``g`` multiplies the
lowering direction: the drive enters the Hamiltonian as ``g* |hi><lo| + h.c.``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .errors import GraphError

if TYPE_CHECKING:
    from .drive import Pulse

QUBIT = "qubit"
AUXILIARY = "auxiliary"


@dataclass(frozen=True)
class Vertex:
    label: str
    energy: float
    levels: tuple[int, ...] | None = None
    domain: str = AUXILIARY

    @property
    def is_qubit(self) -> bool:
        return self.domain == QUBIT


@dataclass(frozen=True)
class Edge:
    hi: str
    lo: str
    g: complex
    class_id: int | None = None


@dataclass(frozen=True)
class EdgeClass:
    class_id: int
    members: tuple[int, ...]
    delta_e: float
    g_representative: complex


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    labels: tuple[str, ...]
    message: str = ""


@dataclass(frozen=True)
class Graph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    qubit_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    @classmethod
    def build(
        cls,
        vertices: Iterable[Vertex],
        couplings: Iterable[tuple[str, str, complex]],
        qubit_count: int = 0,
    ) -> "Graph":
        """Create a graph, orienting each ``(a, b, g)`` coupling by energy."""
        vertices = tuple(vertices)
        energy = {v.label: v.energy for v in vertices}
        edges = []
        for a, b, g in couplings:
            if energy[a] >= energy[b]:
                edges.append(Edge(a, b, complex(g)))
            else:
                edges.append(Edge(b, a, complex(g)))
        return cls(vertices, tuple(edges), qubit_count)

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(v.label for v in self.vertices)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise GraphError(f"unknown vertex {label!r}") from None

    def vertex(self, label: str) -> Vertex:
        return self.vertices[self.index(label)]

    @property
    def size(self) -> int:
        return len(self.vertices)

    @cached_property
    def energies(self) -> np.ndarray:
        return np.array([v.energy for v in self.vertices], dtype=float)

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(hi_index, lo_index, g, delta_e)`` arrays, one entry per edge."""
        hi = np.array([self.index(e.hi) for e in self.edges], dtype=np.int64)
        lo = np.array([self.index(e.lo) for e in self.edges], dtype=np.int64)
        g = np.array([e.g for e in self.edges], dtype=complex)
        de = self.energies[hi] - self.energies[lo] if self.edges else np.zeros(0)
        return hi, lo, g, de

    def delta_e(self, edge: Edge) -> float:
        return self.vertex(edge.hi).energy - self.vertex(edge.lo).energy

    def coupling_matrix(self) -> np.ndarray:
        """Hermitian matrix with ``g*`` at ``[hi, lo]`` and ``g`` at ``[lo, hi]``."""
        h = np.zeros((self.size, self.size), dtype=complex)
        hi, lo, g, _ = self.edge_arrays
        h[hi, lo] = np.conj(g)
        h[lo, hi] = g
        return h

    def computational_labels(self) -> list[str]:
        """Qubit-domain labels in big-endian order (``|0...0>`` first)."""
        qubits = [v for v in self.vertices if v.is_qubit]
        return [v.label for v in sorted(qubits, key=lambda v: basis_index(v.levels))]

    def neighbours(self, label: str) -> list[str]:
        out = []
        for e in self.edges:
            if e.hi == label:
                out.append(e.lo)
            elif e.lo == label:
                out.append(e.hi)
        return out

    def with_class_ids(self, tol_rel: float = 1e-9) -> "Graph":
        classes = compute_edge_classes(self, tol_rel)
        ids = {}
        for c in classes:
            for i in c.members:
                ids[i] = c.class_id
        edges = tuple(replace(e, class_id=ids[i]) for i, e in enumerate(self.edges))
        return Graph(self.vertices, edges, self.qubit_count)


def basis_index(levels: Sequence[int]) -> int:
    out = 0
    for q in levels:
        out = 2 * out + int(q)
    return out


def validate_graph(graph: Graph) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    seen: set[str] = set()
    for v in graph.vertices:
        if v.label in seen:
            diags.append(Diagnostic("duplicate label", (v.label,)))
        seen.add(v.label)
        if v.is_qubit:
            lv = v.levels or ()
            if len(lv) != graph.qubit_count or any(q not in (0, 1) for q in lv):
                diags.append(
                    Diagnostic(
                        "qubit levels",
                        (v.label,),
                        f"expected {graph.qubit_count} levels in {{0, 1}}, got {lv}",
                    )
                )
    energy = {v.label: v.energy for v in graph.vertices}
    pairs: set[frozenset] = set()
    for e in graph.edges:
        missing = [lab for lab in (e.hi, e.lo) if lab not in energy]
        if missing:
            diags.append(Diagnostic("missing endpoint", tuple(missing)))
            continue
        if e.hi == e.lo:
            diags.append(Diagnostic("self edge", (e.hi,)))
            continue
        if energy[e.hi] < energy[e.lo]:
            diags.append(
                Diagnostic("edge orientation", (e.hi, e.lo), "energy(hi) < energy(lo)")
            )
        key = frozenset((e.hi, e.lo))
        if key in pairs:
            diags.append(Diagnostic("duplicate edge", (e.hi, e.lo)))
        pairs.add(key)
    comp = [v for v in graph.vertices if v.is_qubit]
    if graph.qubit_count and comp:
        idx = sorted(basis_index(v.levels) for v in comp if v.levels)
        if idx != list(range(2**graph.qubit_count)):
            diags.append(
                Diagnostic(
                    "computational basis",
                    tuple(v.label for v in comp),
                    f"need exactly {2 ** graph.qubit_count} distinct computational states",
                )
            )
    return diags


def require_valid(graph: Graph) -> None:
    diags = validate_graph(graph)
    if diags:
        raise GraphError("; ".join(f"{d.kind} {d.labels}" for d in diags))


def _rel(x: complex, y: complex) -> float:
    scale = max(abs(x), abs(y))
    return 0.0 if scale == 0 else abs(x - y) / scale


def compute_edge_classes(graph: Graph, tol_rel: float) -> list[EdgeClass]:
    """Partition edges by equal ``(delta_e, g)`` within a relative tolerance."""
    if tol_rel <= 0:
        raise ValueError("tol_rel must be positive")
    _, _, g, de = graph.edge_arrays
    groups: list[list[int]] = []
    for i in range(len(graph.edges)):
        for grp in groups:
            j = grp[0]
            if max(_rel(de[i], de[j]), _rel(g[i], g[j])) <= tol_rel:
                grp.append(i)
                break
        else:
            groups.append([i])

    def key(grp):
        j = grp[0]
        return (round(de[j], 12), round(abs(g[j]), 12), round(cmath.phase(g[j]), 12), j)

    groups.sort(key=key)
    return [
        EdgeClass(cid, tuple(grp), float(de[grp[0]]), complex(g[grp[0]]))
        for cid, grp in enumerate(groups)
    ]


def adjacency_from_drive(graph: Graph, pulse: "Pulse", tol_res: float = 1e-9) -> np.ndarray:
    """Resonant adjacency matrix: ``[hi, lo] = conj(amp * g)`` for the resonant component."""
    from .drive import resonance_partition

    lam = np.zeros((graph.size, graph.size), dtype=complex)
    hi, lo, g, _ = graph.edge_arrays
    for i, (res, _) in resonance_partition(graph, pulse, tol_res).items():
        if not res:
            continue
        comp = pulse.components[res[0]]
        val = np.conj(comp.amp * g[i])
        lam[hi[i], lo[i]] = val
        lam[lo[i], hi[i]] = np.conj(val)
    return lam


def resonant_amplitudes(graph: Graph, pulse: "Pulse", tol_res: float = 1e-9) -> dict[int, complex]:
    """Map edge index to its resonant amplitude ``Omega_i = g_i * amp``."""
    from .drive import resonance_partition

    _, _, g, _ = graph.edge_arrays
    out = {}
    for i, (res, _) in resonance_partition(graph, pulse, tol_res).items():
        if res:
            out[i] = complex(g[i] * pulse.components[res[0]].amp)
    return out


@dataclass(frozen=True)
class LocalityReport:
    is_local: bool
    residual: float
    norm: float


def _product_order(graph: Graph) -> tuple[list[int], tuple[int, ...]]:
    levels = [v.levels for v in graph.vertices]
    if any(lv is None for lv in levels):
        raise GraphError("every vertex needs per-qubit levels to factor the state space")
    k = len(levels[0])
    if k < 1 or any(len(lv) != k for lv in levels):
        raise GraphError("inconsistent level tuple lengths")
    dims = tuple(max(lv[j] for lv in levels) + 1 for j in range(k))
    if len(set(levels)) != len(levels) or len(levels) != math.prod(dims):
        raise GraphError(f"vertex set does not factor as a product of dimensions {dims}")
    order = sorted(range(len(levels)), key=lambda i: levels[i])
    return order, dims


def local_projection(lam: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Orthogonal (Hilbert-Schmidt) projection onto sums of single-factor operators."""
    k = len(dims)
    d = int(np.prod(dims))
    t = lam.reshape(tuple(dims) * 2)
    out = np.zeros((d, d), dtype=complex)
    letters = "abcdefghijklmnopqrstuvwxyz"
    for j in range(k):
        rows = list(letters[:k])
        cols = [rows[m] if m != j else letters[k + j] for m in range(k)]
        keep = np.einsum(f"{''.join(rows)}{''.join(cols)}->{rows[j]}{cols[j]}", t)
        reduced = keep.reshape(dims[j], dims[j]) / (d / dims[j])
        term = np.ones((1, 1), dtype=complex)
        for m in range(k):
            term = np.kron(term, reduced if m == j else np.eye(dims[m]))
        out += term
    out -= (k - 1) * np.trace(lam) / d * np.eye(d)
    return out


def is_local_generator(lam: np.ndarray, graph: Graph) -> LocalityReport:
    """Test whether ``lam`` is a sum of single-subsystem terms (so its exponential never entangles)."""
    order, dims = _product_order(graph)
    lam = np.asarray(lam, dtype=complex)
    perm = lam[np.ix_(order, order)]
    residual = float(np.linalg.norm(perm - local_projection(perm, dims)))
    norm = float(np.linalg.norm(perm))
    return LocalityReport(residual <= 1e-12 * norm or norm == 0.0, residual, norm)
