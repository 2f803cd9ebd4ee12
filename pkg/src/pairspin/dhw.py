"""Reduced DHW kinetic equations along momentum characteristics.

The state is (f_W, v1, v2, v3), ten reals, evolved along p(t) = p - eA(t).
The raw ten-component DHW vector W = (f3, g0, g1, g2) and its linear
equation of motion are kept as an internal consistency check.
"""

import numba
import numpy as np

from . import odeint
from .pulse import CHARGE, DEFAULT_EPS_A, integration_window, potential_field_kernel
from .smatrix import Variant

# (f -/+ 1) source sign: Feynman-type uses f - 1
_SOURCE = {Variant.FEYNMAN: -1.0, Variant.ANTI_FEYNMAN: 1.0}


@numba.njit(cache=True, nogil=True)
def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


@numba.njit(cache=True, nogil=True)
def _reduced_rhs(state, p, p0, E, source):
    e = CHARGE
    f = state[0]
    v1 = state[1:4]
    v2 = state[4:7]
    v3 = state[7:10]
    pE = p[0] * E[0] + p[1] * E[1] + p[2] * E[2]
    Ev1 = E[0] * v1[0] + E[1] * v1[1] + E[2] * v1[2]
    pv1 = p[0] * v1[0] + p[1] * v1[1] + p[2] * v1[2]
    out = np.empty(10)
    out[0] = e * Ev1 / (2.0 * p0)
    pre = 2.0 * e / p0 ** 3 * (f + source)
    px_v2 = _cross(p, v2)
    px_v1 = _cross(p, v1)
    for j in range(3):
        out[1 + j] = (pre * (p[j] * pE - p0 * p0 * E[j])
                      - e * p[j] * Ev1 / (p0 * p0)
                      + 2.0 * px_v2[j] - 2.0 * v3[j])
        out[4 + j] = 2.0 * px_v1[j]
        out[7 + j] = 2.0 * (p[j] * pv1 + v1[j])
    return out


@numba.njit(cache=True, nogil=True)
def _kinetic(par, p, t):
    A, E = potential_field_kernel(par, t)
    pt = (p[0] - CHARGE * A[0], p[1] - CHARGE * A[1], p[2] - CHARGE * A[2])
    p0 = np.sqrt(1.0 + pt[0] ** 2 + pt[1] ** 2 + pt[2] ** 2)
    return pt, p0, E


@numba.njit(cache=True, nogil=True)
def reduced_kernel(t, y, args):
    p, par, source = args
    pt, p0, E = _kinetic(par, p, t)
    return _reduced_rhs(y, pt, p0, E, source)


@numba.njit(cache=True, nogil=True)
def _raw_rhs(W, p):
    out = np.empty(10)
    g0 = W[1:4]
    g1 = W[4:7]
    g2 = W[7:10]
    out[0] = 2.0 * (p[0] * g2[0] + p[1] * g2[1] + p[2] * g2[2])
    pg1 = _cross(p, g1)
    pg0 = _cross(p, g0)
    for j in range(3):
        out[1 + j] = 2.0 * pg1[j]
        out[4 + j] = 2.0 * pg0[j] - 2.0 * g2[j]
        out[7 + j] = -2.0 * p[j] * W[0] + 2.0 * g1[j]
    return out


@numba.njit(cache=True, nogil=True)
def raw_kernel(t, y, args):
    p, par = args
    pt, _, _ = _kinetic(par, p, t)
    return _raw_rhs(y, pt)


def _as_state(fW, v1, v2, v3):
    return np.concatenate([[fW], v1, v2, v3]).astype(float)


def dhw_rhs(state, p_t, p0_t, E_t, variant):
    """Time derivative of the reduced state at kinetic momentum p_t."""
    return _reduced_rhs(np.asarray(state, dtype=float), np.asarray(p_t, dtype=float),
                        float(p0_t), np.asarray(E_t, dtype=float), _SOURCE[Variant(variant)])


def dhw_raw_rhs(W, p_t, E_t=None):
    """dW/dt = M(p_t) W.  The field enters only through the characteristic."""
    return _raw_rhs(np.asarray(W, dtype=float), np.asarray(p_t, dtype=float))


def unit_vacuum(p_t):
    """e1 = (1, 0, p, 0) / p0, proportional to the vacuum DHW vector."""
    p_t = np.asarray(p_t, dtype=float)
    p0 = np.sqrt(1.0 + p_t @ p_t)
    e1 = np.zeros(10)
    e1[0] = 1.0 / p0
    e1[4:7] = p_t / p0
    return e1


def projector_basis(p_t):
    """The 10x9 matrix T with e1^T T = 0 used to embed (v1, v2, v3)."""
    T = np.zeros((10, 9))
    T[0, 0:3] = -np.asarray(p_t, dtype=float)
    T[1:4, 3:6] = np.eye(3)
    T[4:7, 0:3] = np.eye(3)
    T[7:10, 6:9] = np.eye(3)
    return T


def vacuum_vector(p_t, variant=Variant.FEYNMAN):
    """W at t -> -inf: -2 e1 for Feynman-type, +2 e1 for anti-Feynman-type."""
    sign = -1.0 if Variant(variant) == Variant.FEYNMAN else 1.0
    return 2.0 * sign * unit_vacuum(p_t)


def reconstruct(fW, w9, p_t, variant=Variant.FEYNMAN):
    """W = 2 (f_W -/+ 1) e1 + T w9."""
    return (2.0 * (fW + _SOURCE[Variant(variant)]) * unit_vacuum(p_t)
            + projector_basis(p_t) @ np.asarray(w9, dtype=float))


def _spec_for(p, pulse, spec, window):
    t_i, t_f = window
    ts = np.linspace(t_i, t_f, 2001)
    from .pulse import eval_potential
    kin = np.linalg.norm(p[None, :] - CHARGE * eval_potential(pulse, ts), axis=1)
    return spec.capped(odeint.oscillation_cap(np.sqrt(1.0 + kin.max() ** 2)))


def evolve_reduced(p, variant, pulse, spec=None, window=None):
    """Final reduced state for characteristic momentum ``p`` (electron momentum at t_i)."""
    spec = spec or odeint.IntegratorSpec()
    p = np.asarray(p, dtype=float)
    window = tuple(window) if window is not None else integration_window(pulse, DEFAULT_EPS_A)
    args = (p, pulse.params, _SOURCE[Variant(variant)])
    y, _ = odeint.run(reduced_kernel, np.zeros(10), window[0], window[1],
                      _spec_for(p, pulse, spec, window), args)
    return y


def evolve_raw(p, pulse, spec=None, window=None, variant=Variant.FEYNMAN):
    spec = spec or odeint.IntegratorSpec()
    p = np.asarray(p, dtype=float)
    window = tuple(window) if window is not None else integration_window(pulse, DEFAULT_EPS_A)
    pt0, _, _ = _kinetic(pulse.params, p, window[0])
    y, _ = odeint.run(raw_kernel, vacuum_vector(np.array(pt0), variant), window[0], window[1],
                      _spec_for(p, pulse, spec, window), (p, pulse.params))
    return y


def dhw_distribution(p, variant, pulse, spec=None, window=None):
    """One-particle distribution at the reported momentum ``p``.

    Feynman: f_W(t_f) on the characteristic starting at p.  Anti-Feynman: the
    positron distribution at p, from the characteristic starting at -p; the
    reduced variable runs from 0 down to -f there, so its magnitude is returned.
    """
    variant = Variant(variant)
    p = np.asarray(p, dtype=float)
    if variant == Variant.FEYNMAN:
        return float(evolve_reduced(p, variant, pulse, spec, window)[0])
    return float(-evolve_reduced(-p, variant, pulse, spec, window)[0])
