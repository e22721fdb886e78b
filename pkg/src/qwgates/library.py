"""Ready-made state graphs used by the gate constructions, tests and example configs."""

from __future__ import annotations

from typing import Sequence

from .graph import AUXILIARY, QUBIT, Graph, Vertex


def lambda_system(
    e0: float = 0.0,
    e1: float = 2.0,
    e_aux: float = 10.0,
    g0: complex = 1.0,
    g1: complex = 1.0,
) -> Graph:
    """One qubit ``|0>, |1>`` plus an auxiliary level ``|2>`` coupled to both."""
    verts = (
        Vertex("0", e0, (0,), QUBIT),
        Vertex("1", e1, (1,), QUBIT),
        Vertex("2", e_aux, (2,), AUXILIARY),
    )
    return Graph.build(verts, [("2", "0", g0), ("2", "1", g1)], qubit_count=1)


def two_qutrit_graph(
    levels_a: Sequence[float] = (0.0, 5.0, 9.7),
    levels_b: Sequence[float] = (0.0, 5.5, 10.9),
    interaction: float = -0.35,
    g: complex = 1.0,
) -> Graph:
    """Two three-level systems with a ``|22>`` energy shift; only ``1 <-> 2`` transitions are driven.

    Labels are ``"ab"`` with ``a`` the level of the first (most significant)
    system. Levels ``0, 1`` form the two-qubit computational domain.
    """
    verts = []
    for a in range(3):
        for b in range(3):
            energy = levels_a[a] + levels_b[b] + (interaction if a == 2 and b == 2 else 0.0)
            domain = QUBIT if a < 2 and b < 2 else AUXILIARY
            verts.append(Vertex(f"{a}{b}", float(energy), (a, b), domain))
    couplings = []
    for a in range(3):
        couplings.append((f"{a}2", f"{a}1", g))
    for b in range(3):
        couplings.append((f"2{b}", f"1{b}", g))
    return Graph.build(verts, couplings, qubit_count=2)
