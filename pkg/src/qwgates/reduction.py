"""Local basis rotations that simplify walk graphs.

A rotation replaces a few vertices by orthonormal superpositions of them.
The coupling part of the Hamiltonian stays a graph (``G'``) with new edge
amplitudes; the diagonal energy part generally picks up off-diagonal terms
and becomes a second graph (``G''``). Both are returned so the spectrum of
the sum can be checked against the original.

Amplitudes follow the operator convention ``X |p><q| + h.c.``: a coupling
``X`` between ``p`` and ``q`` is stored at ``H[p, q]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConditionViolated, ReductionError
from .graph import QUBIT, Edge, Graph, Vertex

UNITARY_TOL = 1e-12
CONDITION_TOL = 1e-9


@dataclass(frozen=True)
class LocalRotation:
    """Columns of ``matrix`` are the new states in the coordinates of ``support``."""

    support: tuple[str, ...]
    matrix: np.ndarray
    new_labels: tuple[str, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "new_labels", tuple(self.new_labels))
        k = len(self.support)
        if m.shape != (k, k) or len(self.new_labels) != k:
            raise ReductionError("rotation matrix must be square over its support")
        if len(set(self.support)) != k:
            raise ReductionError("rotation support has repeated labels")
        if np.linalg.norm(m.conj().T @ m - np.eye(k), 2) > UNITARY_TOL * max(1.0, k):
            raise ReductionError("rotation matrix is not unitary")

    @classmethod
    def identity(cls, labels: Sequence[str]) -> "LocalRotation":
        return cls(tuple(labels), np.eye(len(labels)), tuple(labels))


@dataclass
class ReductionReport:
    rotation: LocalRotation
    labels_before: tuple[str, ...]
    labels_after: tuple[str, ...]
    h_before: np.ndarray
    energies_before: np.ndarray
    h_prime: np.ndarray
    g_doubleprime: np.ndarray
    consumed_labels: tuple[str, ...]
    introduced_labels: tuple[str, ...]
    amplitudes: dict[str, complex] = field(default_factory=dict)

    @property
    def g_prime(self) -> list[tuple[str, str, complex]]:
        """Nonzero couplings of the rotated graph as ``(p, q, H'[p, q])`` with ``p`` before ``q``."""
        scale = max(1.0, float(np.max(np.abs(self.h_prime)))) if self.h_prime.size else 1.0
        out = []
        n = len(self.labels_after)
        for i in range(n):
            for j in range(i + 1, n):
                v = self.h_prime[i, j]
                if abs(v) > 1e-13 * scale:
                    out.append((self.labels_after[i], self.labels_after[j], complex(v)))
        return out

    def amplitude(self, p: str, q: str) -> complex:
        return complex(self.h_prime[self.labels_after.index(p), self.labels_after.index(q)])

    def cross_term(self, p: str, q: str) -> complex:
        return complex(self.g_doubleprime[self.labels_after.index(p), self.labels_after.index(q)])

    def spectra(self) -> tuple[np.ndarray, np.ndarray]:
        before = np.linalg.eigvalsh(self.h_before + np.diag(self.energies_before))
        after = np.linalg.eigvalsh(self.h_prime + self.g_doubleprime)
        return before, after

    def spectrum_error(self) -> float:
        """Largest eigenvalue mismatch relative to the spectral radius."""
        before, after = self.spectra()
        scale = float(np.max(np.abs(before))) if before.size else 0.0
        return float(np.max(np.abs(before - after)) / (scale if scale > 0 else 1.0))


def _transform(
    labels: Sequence[str],
    h: np.ndarray,
    energies: np.ndarray,
    rot: LocalRotation,
    amplitudes: Mapping[str, complex] | None = None,
) -> ReductionReport:
    labels = tuple(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    missing = [s for s in rot.support if s not in pos]
    if missing:
        raise ReductionError(f"rotation support not in graph: {missing}")
    n = len(labels)
    basis = np.eye(n, dtype=complex)
    idx = [pos[s] for s in rot.support]
    basis[np.ix_(idx, idx)] = rot.matrix
    after = list(labels)
    for k, s in enumerate(rot.support):
        after[pos[s]] = rot.new_labels[k]
    if len(set(after)) != n:
        raise ReductionError("new labels collide with existing vertices")
    h = np.asarray(h, dtype=complex)
    energies = np.asarray(energies, dtype=float)
    h_prime = basis.conj().T @ h @ basis
    g2 = basis.conj().T @ np.diag(energies).astype(complex) @ basis
    # coupling-only part stays traceless on rotated pairs; clean roundoff on the diagonal
    h_prime[np.diag_indices(n)] = np.real(np.diag(h_prime))
    consumed = tuple(s for s in rot.support if s not in rot.new_labels)
    introduced = tuple(s for s in rot.new_labels if s not in rot.support)
    return ReductionReport(
        rot,
        labels,
        tuple(after),
        h,
        energies,
        0.5 * (h_prime + h_prime.conj().T),
        0.5 * (g2 + g2.conj().T),
        consumed,
        introduced,
        dict(amplitudes or {}),
    )


def apply_rotation_generic(
    graph: Graph,
    energies: np.ndarray | None,
    rot: LocalRotation,
    protected: Iterable[str] | None = None,
) -> ReductionReport:
    """Rotate part of a graph: ``G' = T H T^dagger`` on the couplings and on the diagonal term.

    ``protected`` defaults to the qubit-domain vertices; a support touching
    them is rejected because it would change the walk endpoints.
    """
    if protected is None:
        protected = [v.label for v in graph.vertices if v.domain == QUBIT]
    hit = sorted(set(protected) & set(rot.support))
    if hit:
        raise ReductionError(f"rotation support touches protected vertices {hit}")
    energies = graph.energies if energies is None else np.asarray(energies, dtype=float)
    return _transform(graph.labels, graph.coupling_matrix(), energies, rot)


def _local(labels, couplings: Mapping[tuple[str, str], complex]) -> np.ndarray:
    pos = {lab: i for i, lab in enumerate(labels)}
    h = np.zeros((len(labels), len(labels)), dtype=complex)
    for (p, q), v in couplings.items():
        h[pos[p], pos[q]] += v
        h[pos[q], pos[p]] += np.conj(v)
    return h


def _pair_rotation(u: complex, v: complex) -> tuple[np.ndarray, float]:
    """Columns ``x = (u*, v*)/W`` and ``x' = (v, -u)/W`` with ``W = sqrt(|u|^2 + |v|^2)``."""
    w = math.hypot(abs(u), abs(v))
    if w == 0:
        raise ReductionError("degenerate rotation: both amplitudes vanish")
    m = np.array([[np.conj(u), v], [np.conj(v), -u]], dtype=complex) / w
    return m, w


def _energies(energies, count: int) -> np.ndarray:
    if energies is None:
        return np.zeros(count)
    e = np.asarray(energies, dtype=float)
    if e.shape != (count,):
        raise ValueError(f"expected {count} energies")
    return e


def move_branch_one_segment(a: complex, a_p: complex, b: complex, energies=None) -> ReductionReport:
    """Chain ``1 -a- 2 -b- 3`` with a branch ``1 -a'- 1'``; energies ``(E1, E2, E3, E1')``.

    Rotating ``(2, 1')`` into ``(x, x')`` moves the branch two segments along
    the chain: ``1 -Omega_x- x -ab/Omega_x- 3 -a'b*/Omega_x- x'``.
    """
    labels = ("1", "2", "3", "1'")
    e = _energies(energies, 4)
    h = _local(labels, {("1", "2"): a, ("1", "1'"): a_p, ("2", "3"): b})
    m, om = _pair_rotation(a, a_p)
    rot = LocalRotation(("2", "1'"), m, ("x", "x'"))
    amps = {
        "1-x": om,
        "x-3": a * b / om,
        "3-x'": a_p * np.conj(b) / om,
        "x-x' diagonal": (e[1] - e[3]) * a * a_p / om**2,
    }
    return _transform(labels, h, e, rot, amps)


def branches_to_loop4(
    a: complex, a_p: complex, b: complex, b_p: complex, c: complex, energies=None
) -> ReductionReport:
    """Chain ``1 -a- 2 -b- 3 -c- 4`` with branches ``1 -a'- 1'`` and ``2 -b'- 2'`` to a square loop.

    Energies ``(E1, E2, E3, E4, E1', E2')``. The loop is ``x -B- 3 -B'- x' -C'- 2' -A'- x``
    with ``A = 1-x`` and ``C = 3-4``.
    """
    labels = ("1", "2", "3", "4", "1'", "2'")
    e = _energies(energies, 6)
    h = _local(
        labels,
        {("1", "2"): a, ("1", "1'"): a_p, ("2", "3"): b, ("2", "2'"): b_p, ("3", "4"): c},
    )
    m, om = _pair_rotation(a, a_p)
    rot = LocalRotation(("2", "1'"), m, ("x", "x'"))
    amps = {
        "A": om,
        "A'": a * b_p / om,
        "B": a * b / om,
        "B'": a_p * np.conj(b) / om,
        "C": c,
        "C'": a_p * np.conj(b_p) / om,
    }
    return _transform(labels, h, e, rot, amps)


def loop4_condition_residual(A, A_p, B, B_p, C_p) -> float:
    """Relative mismatch of ``B' A'* = C' B*`` (the cross-multiplied solvability condition)."""
    lhs = B_p * np.conj(A_p)
    rhs = C_p * np.conj(B)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return float(abs(lhs - rhs) / scale)


def loop4_to_branches(
    A: complex, A_p: complex, B: complex, B_p: complex, C: complex, C_p: complex, energies=None
) -> ReductionReport:
    """Inverse of :func:`branches_to_loop4`; energies ``(E1, Ex, E3, E4, Ex', E2')``.

    Solvable only when ``B'/B* = C'/A'*``. The recovered ``b`` is real and
    positive (the remaining gauge freedom).
    """
    if B == 0 or A_p == 0:
        raise ReductionError("loop amplitudes B and A' must be nonzero")
    if loop4_condition_residual(A, A_p, B, B_p, C_p) > CONDITION_TOL:
        raise ConditionViolated("condition violated: B'/B* != C'/A'*")
    om_y = math.hypot(abs(B), abs(B_p))
    a = A * B / om_y
    a_p = A * B_p / om_y
    b = om_y
    b_p = A_p * om_y / B
    c = C
    labels = ("1", "x", "3", "4", "x'", "2'")
    e = _energies(energies, 6)
    h = _local(
        labels,
        {("1", "x"): A, ("x", "2'"): A_p, ("x", "3"): B, ("3", "x'"): B_p, ("3", "4"): C, ("2'", "x'"): C_p},
    )
    om = math.hypot(abs(a), abs(a_p))
    # |2> = (a|x> + a'*|x'>)/Omega_x, |1'> = (a'|x> - a*|x'>)/Omega_x
    m = np.array([[a, a_p], [np.conj(a_p), -np.conj(a)]], dtype=complex) / om
    rot = LocalRotation(("x", "x'"), m, ("2", "1'"))
    amps = {
        "a": a,
        "a'": a_p,
        "b": b,
        "b'": b_p,
        "c": c,
        "2-1' diagonal": (e[1] - e[4]) * np.conj(a) * a_p / om**2,
    }
    return _transform(labels, h, e, rot, amps)


def diagonal_loop_to_chain(a: complex, b: complex, c: complex, d: complex, energies=None) -> ReductionReport:
    """Square ``0 -a- 1 -b- 2``, ``0 -d- 3``, ``3 -c- 2`` (attached at 0 and 2) to a chain plus branch.

    Energies ``(E0, E1, E2, E3)``. Result: ``0 -A- x -B- 2 -C- x'``.
    """
    labels = ("0", "1", "2", "3")
    e = _energies(energies, 4)
    h = _local(labels, {("0", "1"): a, ("1", "2"): b, ("3", "2"): c, ("0", "3"): d})
    m, om = _pair_rotation(a, d)
    rot = LocalRotation(("1", "3"), m, ("x", "x'"))
    amps = {
        "A": om,
        "B": (a * b + c * d) / om,
        "C": (np.conj(b) * d - a * np.conj(c)) / om,
        "x-x' diagonal": (e[1] - e[3]) * a * d / om**2,
    }
    return _transform(labels, h, e, rot, amps)


def loop6_to_loop4(
    a: complex, b: complex, c1: complex, c2: complex, a_p: complex, b_p: complex, energies=None
) -> ReductionReport:
    """Hexagon ``0 -a- 1 -c1- 1' -a'- 3`` and ``0 -b- 2 -c2- 2' -b'- 3`` to an edge-sharing square.

    Energies ``(E0, E1, E2, E3, E1', E2')``. Two pair rotations: ``(1, 2) -> (x, x')``
    and ``(1', 2') -> (y, y')``. ``b' = 0`` is the chain with a two-segment branch.
    """
    labels = ("0", "1", "2", "3", "1'", "2'")
    e = _energies(energies, 6)
    h = _local(
        labels,
        {("0", "1"): a, ("0", "2"): b, ("1", "1'"): c1, ("2", "2'"): c2, ("1'", "3"): a_p, ("2'", "3"): b_p},
    )
    m1, om_x = _pair_rotation(a, b)
    m2, om_y = _pair_rotation(a * c1, b * c2)
    rot = LocalRotation(("1", "2", "1'", "2'"), _block(m1, m2), ("x", "x'", "y", "y'"))
    amps = {
        "0-x": om_x,
        "x-y": om_y / om_x,
        "y-x'": a * b * (abs(c1) ** 2 - abs(c2) ** 2) / (om_x * om_y),
        "x'-y'": c1 * c2 * om_x / om_y,
        "y-3": (a * a_p * c1 + b * b_p * c2) / om_y,
        "3-y'": (b * np.conj(a_p) * c2 - a * np.conj(b_p) * c1) / om_y,
        "x-x' diagonal": (e[1] - e[2]) * a * b / om_x**2,
        "y-y' diagonal": (e[4] - e[5]) * a * b * c1 * c2 / om_y**2,
    }
    return _transform(labels, h, e, rot, amps)


def _block(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = m1
    out[2:, 2:] = m2
    return out


# graph-level application --------------------------------------------------

MOVES = ("one_segment_branch", "diagonal_loop", "loop6")


def _hop(graph: Graph, h: np.ndarray, p: str, q: str) -> complex:
    return complex(h[graph.index(p), graph.index(q)])


def match_move(graph: Graph, move: str, protected: Iterable[str] = ()) -> dict[str, str]:
    """Locate the unique subgraph a move applies to; rotated vertices avoid ``protected``.

    Returns a role-to-label map using the role names of the local move.
    """
    protected = set(protected)
    nbrs = {lab: set(graph.neighbours(lab)) for lab in graph.labels}
    found: list[dict[str, str]] = []
    if move == "one_segment_branch":
        for v1 in graph.labels:
            for v2 in nbrs[v1]:
                for v1p in nbrs[v1] - {v2}:
                    if len(nbrs[v1p]) != 1 or v2 in protected or v1p in protected:
                        continue
                    others = nbrs[v2] - {v1}
                    if len(others) != 1:
                        continue
                    found.append({"1": v1, "2": v2, "3": next(iter(others)), "1'": v1p})
    elif move == "diagonal_loop":
        for v0 in graph.labels:
            for v1, v3 in _pairs(sorted(nbrs[v0])):
                if v1 in protected or v3 in protected or len(nbrs[v1]) != 2 or len(nbrs[v3]) != 2:
                    continue
                common = (nbrs[v1] & nbrs[v3]) - {v0}
                for v2 in common:
                    found.append({"0": v0, "1": v1, "2": v2, "3": v3})
    elif move == "loop6":
        for v0 in graph.labels:
            for v1, v2 in _pairs(sorted(nbrs[v0])):
                if any(len(nbrs[v]) != 2 for v in (v1, v2)):
                    continue
                v1p = next(iter(nbrs[v1] - {v0}))
                v2p = next(iter(nbrs[v2] - {v0}))
                if v1p == v2p or any(len(nbrs[v]) != 2 for v in (v1p, v2p)):
                    continue
                t1 = nbrs[v1p] - {v1}
                t2 = nbrs[v2p] - {v2}
                if t1 != t2 or any(v in protected for v in (v1, v2, v1p, v2p)):
                    continue
                found.append({"0": v0, "1": v1, "2": v2, "3": next(iter(t1)), "1'": v1p, "2'": v2p})
    else:
        raise ReductionError(f"unknown move {move!r}; expected one of {MOVES}")
    unique = {tuple(sorted(f.items())): f for f in found}
    if not unique:
        raise ReductionError(f"no subgraph matches move {move!r}")
    # symmetric duplicates of one loop describe the same subgraph
    by_set: dict[frozenset, dict[str, str]] = {}
    for f in unique.values():
        by_set.setdefault(frozenset(f.values()), f)
    if len(by_set) > 1:
        raise ReductionError(f"move {move!r} matches several subgraphs; name the vertices explicitly")
    return next(iter(sorted(by_set.values(), key=lambda f: sorted(f.items()))))


def _pairs(items):
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            yield items[i], items[j]


def apply_move(
    graph: Graph,
    move: str,
    roles: Mapping[str, str] | None = None,
    protected: Iterable[str] | None = None,
    energies: np.ndarray | None = None,
    new_labels: Sequence[str] | None = None,
) -> ReductionReport:
    """Apply a named local move to a whole graph, locating it with :func:`match_move` if needed."""
    if protected is None:
        protected = [v.label for v in graph.vertices if v.domain == QUBIT]
    protected = list(protected)
    if roles is None:
        roles = match_move(graph, move, protected)
    h = graph.coupling_matrix()
    e = graph.energies if energies is None else np.asarray(energies, dtype=float)
    r = dict(roles)
    if move == "one_segment_branch":
        local = move_branch_one_segment(
            _hop(graph, h, r["1"], r["2"]), _hop(graph, h, r["1"], r["1'"]), _hop(graph, h, r["2"], r["3"])
        )
        support = (r["2"], r["1'"])
        default_new = (f"{support[0]}+{support[1]}", f"{support[0]}-{support[1]}")
    elif move == "diagonal_loop":
        local = diagonal_loop_to_chain(
            _hop(graph, h, r["0"], r["1"]),
            _hop(graph, h, r["1"], r["2"]),
            _hop(graph, h, r["3"], r["2"]),
            _hop(graph, h, r["0"], r["3"]),
        )
        support = (r["1"], r["3"])
        default_new = (f"{support[0]}+{support[1]}", f"{support[0]}-{support[1]}")
    elif move == "loop6":
        local = loop6_to_loop4(
            _hop(graph, h, r["0"], r["1"]),
            _hop(graph, h, r["0"], r["2"]),
            _hop(graph, h, r["1"], r["1'"]),
            _hop(graph, h, r["2"], r["2'"]),
            _hop(graph, h, r["1'"], r["3"]),
            _hop(graph, h, r["2'"], r["3"]),
        )
        support = (r["1"], r["2"], r["1'"], r["2'"])
        default_new = tuple(f"{s}*" for s in support)
    else:
        raise ReductionError(f"unknown move {move!r}; expected one of {MOVES}")
    labels = tuple(new_labels) if new_labels is not None else default_new
    rot = LocalRotation(support, local.rotation.matrix, labels)
    report = apply_rotation_generic(graph, e, rot, protected)
    report.amplitudes = dict(local.amplitudes)
    return report


def graph_from_report(report: ReductionReport, original: Graph, tol: float = 1e-13) -> Graph:
    """Rebuild a graph from ``G'`` using the diagonal of ``G''`` as vertex energies.

    Off-diagonal ``G''`` entries are not representable as vertex energies;
    they stay in the report.
    """
    energies = np.real(np.diag(report.g_doubleprime))
    old = {v.label: v for v in original.vertices}
    verts = []
    for lab, en in zip(report.labels_after, energies):
        v = old.get(lab)
        if v is not None and lab not in report.rotation.support:
            verts.append(Vertex(lab, float(en), v.levels, v.domain))
        else:
            verts.append(Vertex(lab, float(en)))
    couplings = []
    for p, q, val in report.g_prime:
        if abs(val) <= tol:
            continue
        # H[hi, lo] = g*, so g = conj(H[p, q]) when p is the upper vertex
        ep = energies[report.labels_after.index(p)]
        eq = energies[report.labels_after.index(q)]
        if ep >= eq:
            couplings.append(Edge(p, q, complex(np.conj(val))))
        else:
            couplings.append(Edge(q, p, complex(val)))
    return Graph(tuple(verts), tuple(couplings), original.qubit_count)
