import numpy as np
import pytest

from qwgates import kernels
from qwgates.drive import Envelope, Pulse, PulseComponent
from qwgates.propagate import WalkerState, coined_walk_run, exact_propagator

from conftest import random_graph

compiled = pytest.importorskip("qwgates._kernels", reason="compiled extension not built")


def _pulse():
    return Pulse(
        Envelope("raised_cosine", 0.5, 4.0),
        (PulseComponent(1.7, 0.25 + 0.05j), PulseComponent(3.1, 0.1 - 0.2j)),
    )


def test_backend_is_reported():
    assert kernels.BACKEND in ("compiled", "python")
    with pytest.raises(ValueError):
        kernels._backend("fortran")


def test_exact_backends_agree(rng):
    g = random_graph(rng, 5)
    p = _pulse()
    u_c, r_c = exact_propagator(g, p, 0.01, backend="compiled", samples=17)
    u_p, r_p = exact_propagator(g, p, 0.01, backend="python", samples=17)
    assert np.allclose(u_c, u_p, atol=1e-12)
    assert np.allclose(r_c.trajectory.probabilities, r_p.trajectory.probabilities, atol=1e-12)


@pytest.mark.parametrize("mode", ["full", "rwa"])
def test_coined_backends_agree(rng, mode):
    g = random_graph(rng, 3)
    p = _pulse()
    init = WalkerState.basis(g, "0")
    a = coined_walk_run(g, p, init, 0.01, 3, mode, leakage_threshold=None, backend="compiled", samples=9)
    b = coined_walk_run(g, p, init, 0.01, 3, mode, leakage_threshold=None, backend="python", samples=9)
    assert np.allclose(a.ladder.amplitudes, b.ladder.amplitudes, atol=1e-13)
    assert a.boundary_leakage == pytest.approx(b.boundary_leakage, rel=1e-9, abs=1e-20)
    assert np.allclose(a.trajectory.probabilities, b.trajectory.probabilities, atol=1e-13)


def test_pure_python_fallback_is_selected_by_environment():
    import os
    import subprocess
    import sys

    code = (
        "from qwgates import kernels; from qwgates.gates import synthesize_z; from qwgates.library import lambda_system;"
        "print(kernels.BACKEND, synthesize_z(lambda_system()).achieved_fidelity > 1 - 1e-12)"
    )
    env = dict(os.environ, QWGATES_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "True"]
