"""Time the compiled and numpy kernels on exact and coined stepping.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from qwgates import kernels
from qwgates.drive import Envelope, Pulse, PulseComponent
from qwgates.graph import Graph, Vertex
from qwgates.propagate import WalkerState, build_ladder, coined_walk_run, exact_propagator


def random_graph(n: int, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    verts = [Vertex(str(i), float(e)) for i, e in enumerate(np.sort(rng.uniform(0, 5, n)))]
    couplings = [
        (str(j), str(i), complex(rng.normal(), rng.normal()) * 0.3)
        for i in range(n) for j in range(i + 1, n)
    ]
    return Graph.build(verts, couplings)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])
    g = random_graph(6, 1)
    pulse = Pulse(
        Envelope("raised_cosine", 0.0, 20.0),
        (PulseComponent(1.7, 0.2), PulseComponent(math.sqrt(7.0), 0.1j)),
    )
    init = WalkerState.basis(g, "0")
    model = build_ladder(g, pulse, 0.005, 3, "full")
    model.eig("minus")
    model.eig("plus")
    print(f"exact: {g.size} vertices, {model.nsteps} steps; coined: {model.size} ladder states")
    print(f"{'kernel':10s} {'backend':10s} {'seconds':>10s}")
    for backend in backends:
        t = best_of(lambda: exact_propagator(g, pulse, 0.005, init, backend=backend), args.repeat)
        print(f"{'exact':10s} {backend:10s} {t:10.4f}")
    for backend in backends:
        t = best_of(
            lambda: coined_walk_run(g, pulse, init, leakage_threshold=None, backend=backend, model=model),
            args.repeat,
        )
        print(f"{'coined':10s} {backend:10s} {t:10.4f}")


if __name__ == "__main__":
    main()
