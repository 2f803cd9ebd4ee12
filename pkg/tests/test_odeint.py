import numba
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pairspin.errors import ConfigError, NonFiniteState, StepUnderflow
from pairspin.odeint import IntegratorSpec, integrate, oscillation_cap


@numba.njit(cache=True)
def _rotation(t, y, args):
    omega = args[0]
    return 1j * omega * y


@numba.njit(cache=True)
def _hermitian(t, y, args):
    # V(t) = [[cos t, 0.3 e^{2it}], [0.3 e^{-2it}, -cos t]] (times amplitude a)
    a = args[0]
    off = 0.3 * a * np.exp(2j * t)
    out = np.empty(2, dtype=np.complex128)
    out[0] = -1j * (a * np.cos(t) * y[0] + off * y[1])
    out[1] = -1j * (np.conj(off) * y[0] - a * np.cos(t) * y[1])
    return out


def test_zero_rhs_returns_initial_state_exactly():
    y0 = np.array([1.5 - 2j, 0.25j, -3.0])
    y = integrate(lambda t, y: np.zeros_like(y), y0, -4.0, 7.0)
    assert np.array_equal(y, y0)


@pytest.mark.parametrize("omega", [0.5, 1.0, 3.0])
def test_periodic_phase_returns_to_one(omega):
    y = integrate(_rotation, np.array([1.0 + 0j]), 0.0, 2 * np.pi / omega, args=(omega,))
    assert abs(y[0] - 1.0) <= 1e-9


def test_python_callable_matches_compiled():
    y_py = integrate(lambda t, y: 1j * 2.0 * y, np.array([1.0 + 0j]), 0.0, 1.3)
    y_nb = integrate(_rotation, np.array([1.0 + 0j]), 0.0, 1.3, args=(2.0,))
    assert abs(y_py[0] - y_nb[0]) < 1e-14
    assert abs(y_nb[0] - np.exp(2.6j)) < 1e-9


def test_real_decay():
    y = integrate(lambda t, y: -y, np.array([1.0]), 0.0, 5.0)
    assert y.dtype == np.float64
    assert abs(y[0] - np.exp(-5.0)) < 1e-11


@given(st.floats(0.1, 3.0), st.floats(-np.pi, np.pi))
def test_hermitian_generator_conserves_norm(a, phase):
    y0 = np.array([np.cos(0.3), np.sin(0.3) * np.exp(1j * phase)])
    y = integrate(_hermitian, y0, -10.0, 10.0, args=(a,))
    assert abs(np.linalg.norm(y) - 1.0) <= 1e-9


def test_halving_rel_tol_does_not_increase_error():
    y0 = np.array([1.0 + 0j, 0.0])
    ref = integrate(_hermitian, y0, 0.0, 20.0, IntegratorSpec(rel_tol=1e-13, abs_tol=1e-15), (2.0,))
    errors = []
    for rtol in (1e-5, 5e-6, 2.5e-6, 1.25e-6, 6.25e-7):
        spec = IntegratorSpec(rel_tol=rtol, abs_tol=rtol * 1e-2, max_step=10.0)
        errors.append(np.abs(integrate(_hermitian, y0, 0.0, 20.0, spec, (2.0,)) - ref).max())
    assert all(b <= a for a, b in zip(errors, errors[1:])), errors


def test_backward_then_forward_recovers_initial_state():
    spec = IntegratorSpec()
    y0 = np.array([0.6 + 0.1j, 0.2 - 0.77j])
    back = integrate(_hermitian, y0, 8.0, -3.0, spec, (1.5,))
    again = integrate(_hermitian, back, -3.0, 8.0, spec, (1.5,))
    assert np.abs(again - y0).max() <= 10 * (spec.rel_tol + spec.abs_tol)


def test_deterministic():
    y0 = np.array([1.0 + 0j, 0.0])
    a = integrate(_hermitian, y0, 0.0, 15.0, args=(2.5,))
    b = integrate(_hermitian, y0, 0.0, 15.0, args=(2.5,))
    assert np.array_equal(a, b)


def test_step_underflow():
    spec = IntegratorSpec(min_step=1e-3, max_step=0.05, rel_tol=1e-12, abs_tol=1e-14)
    with pytest.raises(StepUnderflow):
        integrate(lambda t, y: np.array([1e4 * np.cos(1e5 * t) * y[0]]), np.array([1.0]), 0.0, 1.0, spec)


def test_non_finite_state():
    with pytest.raises(NonFiniteState):
        integrate(lambda t, y: np.array([np.inf]), np.array([1.0]), 0.0, 1.0)


def test_equal_endpoints_rejected():
    with pytest.raises(ValueError):
        integrate(lambda t, y: y, np.array([1.0]), 1.0, 1.0)


@pytest.mark.parametrize("kwargs", [
    {"rel_tol": 0.0}, {"abs_tol": -1.0}, {"max_step": np.inf}, {"min_step": 1.0, "max_step": 0.5},
])
def test_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        IntegratorSpec(**kwargs)


def test_oscillation_cap():
    assert oscillation_cap(1.0) == 0.05
    assert oscillation_cap(20.0) == pytest.approx(0.1 * np.pi / 20.0)
    spec = IntegratorSpec().capped(oscillation_cap(20.0))
    assert spec.max_step == pytest.approx(np.pi / 200) and spec.min_step <= spec.max_step
