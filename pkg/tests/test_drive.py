import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from qwgates.drive import (
    DIPOLE,
    CouplingFunction,
    Envelope,
    Pulse,
    PulseComponent,
    classical_hamiltonian,
    detunings,
    drive_signal,
    effective_time,
    generalized_interaction_terms,
    max_drive_bound,
    resonance_partition,
    sequence_pulses,
)
from qwgates.errors import ResonanceError
from qwgates.library import lambda_system

from conftest import random_graph


def test_envelopes_vanish_outside_window():
    for env in (
        Envelope("flat", 2.0, 5.0),
        Envelope("raised_cosine", 2.0, 5.0),
        Envelope("gaussian", 2.0, 5.0, sigma=1.0),
    ):
        assert env(1.999) == 0.0
        assert env(7.001) == 0.0
        assert env(4.5) > 0.0


def test_gaussian_truncation_cuts_tails():
    env = Envelope("gaussian", 0.0, 10.0, sigma=1.0, truncation=2.0)
    assert env(5.0 + 2.1) == 0.0
    assert env(5.0 + 1.9) == pytest.approx(math.exp(-0.5 * 1.9**2))
    assert Envelope("gaussian", 0.0, 10.0, sigma=2.0).truncation == pytest.approx(2.5)
    with pytest.raises(ValueError):
        Envelope("gaussian", 0.0, 10.0, sigma=1.0, truncation=6.0)


@pytest.mark.parametrize("kwargs", [dict(kind="square"), dict(t_gate=0.0), dict(kind="gaussian")])
def test_envelope_rejects_bad_parameters(kwargs):
    with pytest.raises(ValueError):
        Envelope(**kwargs)


@pytest.mark.parametrize(
    "env",
    [
        Envelope("flat", 1.0, 7.0),
        Envelope("raised_cosine", 1.0, 7.0),
        Envelope("gaussian", 1.0, 7.0, sigma=1.3),
        Envelope("gaussian", 1.0, 7.0, sigma=1.3, truncation=1.5),
    ],
)
def test_effective_time_matches_independent_integral(env):
    centre = env.t_start + 0.5 * env.t_gate
    for t in (1.0, 2.3, 4.5, 8.0, 9.0):
        if env.kind == "gaussian":
            half = env.truncation * env.sigma
            lo, hi = centre - half, min(t, centre + half)
            scale = env.sigma * math.sqrt(2.0)
            want = 0.0 if hi <= lo else env.sigma * math.sqrt(math.pi / 2) * (
                math.erf((hi - centre) / scale) - math.erf((lo - centre) / scale)
            )
        else:
            want, _ = integrate.quad(lambda x: float(env(x)), env.t_start, min(t, env.t_end), limit=200)
        assert effective_time(env, t) == pytest.approx(want, abs=1e-11)
    with pytest.raises(ValueError):
        effective_time(env, 0.0)


def test_raised_cosine_effective_time_is_half_the_window():
    env = Envelope("raised_cosine", 0.0, 12.0)
    assert effective_time(env, env.t_end) == pytest.approx(6.0, abs=1e-14)


def test_pulse_components_must_be_distinct_and_positive():
    env = Envelope("flat", 0.0, 1.0)
    with pytest.raises(ValueError):
        Pulse(env, (PulseComponent(1.0, 0.1), PulseComponent(1.0, 0.2)))
    with pytest.raises(ValueError):
        PulseComponent(0.0, 0.1)


def test_dipole_terms_are_single_shifts():
    terms = generalized_interaction_terms(DIPOLE, PulseComponent(2.0, 0.3 - 0.2j), 1)
    assert terms == [(-1, pytest.approx(0.3 - 0.2j)), (1, pytest.approx(0.3 + 0.2j))]


def test_quadratic_coupling_terms():
    e = 0.4 + 0.1j
    terms = dict(generalized_interaction_terms(CouplingFunction((0.0, 0.0, 1.0)), PulseComponent(1.0, e), 2))
    assert terms[2] == pytest.approx(np.conj(e) ** 2)
    assert terms[0] == pytest.approx(2 * abs(e) ** 2)
    assert terms[-2] == pytest.approx(e**2)
    # orders above the Taylor degree add nothing
    assert generalized_interaction_terms(DIPOLE, PulseComponent(1.0, e), 4) == generalized_interaction_terms(
        DIPOLE, PulseComponent(1.0, e), 1
    )


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=1, max_size=5),
    st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False),
    st.floats(0, 2 * math.pi),
)
def test_interaction_terms_reproduce_the_classical_signal(taylor, amp, theta):
    if not any(taylor):
        taylor = taylor + [1.0]
    f = CouplingFunction(tuple(taylor))
    comp = PulseComponent(1.0, amp)
    terms = generalized_interaction_terms(f, comp, max(1, f.order))
    x = 2.0 * np.real(np.conj(amp) * np.exp(1j * theta))
    series = sum(c * np.exp(1j * s * theta) for s, c in terms)
    assert series.real == pytest.approx(float(f(x)), abs=1e-9)
    assert abs(series.imag) < 1e-9


def test_drive_signal_dipole_closed_form():
    env = Envelope("flat", 0.0, 10.0)
    p = Pulse(env, (PulseComponent(3.0, 0.2 + 0.1j),))
    t = np.linspace(0.0, 10.0, 7)
    want = 2 * np.real((0.2 - 0.1j) * np.exp(3j * t))
    assert np.allclose(drive_signal(p, t), want, atol=1e-15)


def test_classical_hamiltonian_is_hermitian_and_bounded(rng):
    g = random_graph(rng)
    p = Pulse(Envelope("raised_cosine", 0.0, 5.0), (PulseComponent(1.1, 0.3), PulseComponent(2.7, 0.2j)))
    bound = max_drive_bound(p, g)
    for t in np.linspace(0.0, 5.0, 11):
        v = classical_hamiltonian(g, p, t)
        assert np.allclose(v, v.conj().T)
        assert np.max(np.abs(v)) <= bound + 1e-12


def test_detunings_and_partition():
    g = lambda_system()
    assert detunings(g, 10.0) == [(0.0, 20.0), (-2.0, 18.0)]
    env = Envelope("flat", 0.0, 1.0)
    part = resonance_partition(g, Pulse(env, (PulseComponent(8.0, 0.1), PulseComponent(10.0, 0.1))))
    assert part == {0: ([1], [0]), 1: ([0], [1])}
    with pytest.raises(ResonanceError):
        resonance_partition(g, Pulse(env, (PulseComponent(8.0, 0.1), PulseComponent(8.05, 0.1))), tol_res=0.1)


def test_sequence_pulses_orders_and_rejects_overlap():
    a = Pulse(Envelope("flat", 5.0, 2.0))
    b = Pulse(Envelope("flat", 0.0, 5.0))
    assert sequence_pulses([a, b]) == [b, a]
    with pytest.raises(ValueError, match="pulses overlap"):
        sequence_pulses([a, Pulse(Envelope("flat", 6.0, 1.0))])
