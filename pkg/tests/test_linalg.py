import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from qwgates.errors import HermiticityError
from qwgates.linalg import check_hermitian, expm_hermitian, global_phase_distance, is_unitary


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1), st.floats(-5, 5))
def test_expm_hermitian_matches_pade(n, seed, s):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = a + a.conj().T
    u = expm_hermitian(h, s)
    assert np.allclose(u, expm(-1j * s * h), atol=1e-10)
    assert is_unitary(u, 1e-10)


def test_non_hermitian_input_is_rejected():
    with pytest.raises(HermiticityError):
        check_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(HermiticityError):
        check_hermitian(np.zeros((2, 3)))


def test_global_phase_distance_ignores_phase():
    v = np.array([0.6, 0.8j])
    assert global_phase_distance(np.exp(0.7j) * v, v) < 1e-15
    assert global_phase_distance(v, np.array([1.0, 0.0])) > 0.1


def test_is_unitary_rejects_non_square():
    assert not is_unitary(np.ones((2, 3)))
    assert not is_unitary(2 * np.eye(2))
