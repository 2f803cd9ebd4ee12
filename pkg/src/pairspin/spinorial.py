"""Two-level (spin-precession-like) reduction for linearly polarized pulses."""

import numba
import numpy as np

from . import odeint
from .errors import UnsupportedPolarization
from .pulse import CHARGE, DEFAULT_EPS_A, eval_potential, integration_window, potential_field_kernel

ELECTRON = "electron"
POSITRON = "positron"


@numba.njit(cache=True, nogil=True)
def _two_level(y, p_par, p_perp2, A_t, E_t):
    e = CHARGE
    kin = p_par - e * A_t
    w2 = p_perp2 + kin * kin + 1.0
    w = np.sqrt(w2)
    big = e * np.sqrt(p_perp2 + 1.0) * E_t / (2.0 * w2)
    out = np.empty(2, dtype=np.complex128)
    # i d/dt c = [[w, i W], [-i W, -w]] c
    out[0] = -1j * (w * y[0] + 1j * big * y[1])
    out[1] = -1j * (-1j * big * y[0] - w * y[1])
    return out


@numba.njit(cache=True, nogil=True)
def spinorial_kernel(t, y, args):
    p_par, p_perp2, n, par = args
    A, E = potential_field_kernel(par, t)
    A_t = A[0] * n[0] + A[1] * n[1] + A[2] * n[2]
    E_t = E[0] * n[0] + E[1] * n[1] + E[2] * n[2]
    return _two_level(y, p_par, p_perp2, A_t, E_t)


def _split(p, n):
    p = np.asarray(p, dtype=float)
    n = np.asarray(n, dtype=float)
    p_par = float(p @ n)
    perp = p - p_par * n
    return p_par, float(perp @ perp)


def spinorial_rhs(state, p, n, A_t, E_t):
    """d/dt (c+, c-) at momentum p for a field along the unit vector n."""
    p_par, p_perp2 = _split(p, n)
    return _two_level(np.asarray(state, dtype=complex), p_par, p_perp2, float(A_t), float(E_t))


def check_linear(pulse):
    if not pulse.is_linear:
        raise UnsupportedPolarization(
            f"two-level reduction needs a linearly polarized pulse, got delta={pulse.delta}")


def spinorial_distribution(p, species, pulse, spec=None, window=None):
    """Electron distribution 2|c+(t_f)|^2 at p, or positron 2|c-(t_f)|^2 at -p."""
    check_linear(pulse)
    spec = spec or odeint.IntegratorSpec()
    if species not in (ELECTRON, POSITRON):
        raise ValueError(f"species must be 'electron' or 'positron', got {species!r}")
    p = np.asarray(p, dtype=float)
    if species == POSITRON:
        p = -p
    window = tuple(window) if window is not None else integration_window(pulse, DEFAULT_EPS_A)
    n = np.array(pulse.eps1)
    p_par, p_perp2 = _split(p, n)
    ts = np.linspace(window[0], window[1], 2001)
    kin = np.abs(p_par - CHARGE * (eval_potential(pulse, ts) @ n))
    w_max = np.sqrt(1.0 + p_perp2 + kin.max() ** 2)
    y0 = np.array([0.0, 1.0] if species == ELECTRON else [1.0, 0.0], dtype=complex)
    y, _ = odeint.run(spinorial_kernel, y0, window[0], window[1],
                      spec.capped(odeint.oscillation_cap(w_max)),
                      (p_par, p_perp2, n, pulse.params))
    return float(2.0 * abs(y[0] if species == ELECTRON else y[1]) ** 2)
