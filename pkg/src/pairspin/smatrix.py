"""Dirac mode equations with Feynman / anti-Feynman boundary conditions.

A single homogeneous-field momentum mode is expanded in free bispinors,

    Phi(t) = sum_lambda C+_lambda(t) u+_{q,lambda} e^{-i p0 t} + C-_lambda(t) u-_{-q,lambda} e^{+i p0 t},

and the four coefficients obey dC/dt = -i V(t) C with Hermitian V.  The
boundary conditions fix one frequency sector at t_i and the other at t_f; the
problem is linear, so it is solved exactly by superposing two forward
integrations and solving a 2x2 system.
"""

from dataclasses import dataclass
from enum import Enum

import numba
import numpy as np

from . import odeint
from .bispinor import BispinorBasis, coupling_matrices, mode_bispinors
from .errors import SingularShooting
from .pulse import DEFAULT_EPS_A, integration_window, potential_field_kernel

DET_FLOOR = 1e-12


class Variant(str, Enum):
    FEYNMAN = "Feynman"
    ANTI_FEYNMAN = "AntiFeynman"

    @classmethod
    def parse(cls, text):
        key = text.strip().lower().replace("-", "").replace("_", "")
        for v in cls:
            if v.value.lower() == key:
                return v
        raise ValueError(f"unknown variant {text!r}")


@dataclass(frozen=True)
class PairAmplitudes:
    """Renormalized conditional amplitudes at one reported momentum.

    ``A[c, o]`` and ``f[c, o]`` index the conditioning spin ``c`` (positron
    for Feynman, electron for anti-Feynman) and the outgoing spin ``o`` of
    the other particle; index 0 is lambda = +, 1 is lambda = -.
    ``p`` is the reported momentum (electron for Feynman, positron for
    anti-Feynman) and ``q`` the electron momentum of the solved mode.
    """

    p: np.ndarray
    q: np.ndarray
    variant: Variant
    basis: BispinorBasis
    A: np.ndarray
    N_tilde: np.ndarray
    C_out: np.ndarray
    norm_drift: float

    @property
    def f(self):
        return np.abs(self.A) ** 2

    @property
    def f_total(self):
        return float(self.f.sum())


@numba.njit(cache=True, nogil=True)
def _interaction(G, p0, par, t):
    A, _ = potential_field_kernel(par, t)
    up = np.exp(2j * p0 * t)
    down = np.conj(up)
    V = np.empty((4, 4), dtype=np.complex128)
    for a in range(4):
        for b in range(4):
            v = A[0] * G[0, a, b] + A[1] * G[1, a, b] + A[2] * G[2, a, b]
            if a < 2 and b >= 2:
                v *= up
            elif a >= 2 and b < 2:
                v *= down
            V[a, b] = v
    return V


@numba.njit(cache=True, nogil=True)
def coefficient_kernel(t, y, args):
    """Right-hand side for ``y`` holding k stacked 4-vectors of coefficients."""
    G, p0, par = args
    A, _ = potential_field_kernel(par, t)
    up = np.exp(2j * p0 * t)
    down = np.conj(up)
    out = np.empty_like(y)
    for a in range(4):
        for b in range(4):
            v = A[0] * G[0, a, b] + A[1] * G[1, a, b] + A[2] * G[2, a, b]
            if a < 2 and b >= 2:
                v *= up
            elif a >= 2 and b < 2:
                v *= down
            v *= -1j
            for k in range(y.shape[0] // 4):
                if b == 0:
                    out[4 * k + a] = v * y[4 * k]
                else:
                    out[4 * k + a] += v * y[4 * k + b]
    return out


def coefficient_rhs(mode, pulse, t, c):
    """dc/dt for one 4-vector of coefficients."""
    args = (coupling_matrices(mode), mode.p0, pulse.params)
    return coefficient_kernel(float(t), np.asarray(c, dtype=complex), args)


def resolve_window(pulse, window=None, eps_A=DEFAULT_EPS_A):
    return tuple(window) if window is not None else integration_window(pulse, eps_A)


def evolve_basis(q, variant, pulse, basis, spec=None, window=None):
    """Forward-integrate the two shooting solutions of one mode.

    Returns (M, P, drift): the final coefficients of the sector constrained at
    t_f, of the free sector, and the largest norm drift of the two columns.
    """
    spec = spec or odeint.IntegratorSpec()
    t_i, t_f = resolve_window(pulse, window)
    mode = mode_bispinors(basis, q)
    spec = spec.capped(odeint.oscillation_cap(mode.p0))
    # sector fixed at t_i is zero; the other one starts from e_mu
    start = (2, 3) if variant == Variant.FEYNMAN else (0, 1)
    y0 = np.zeros(8, dtype=complex)
    y0[start[0]] = 1.0
    y0[4 + start[1]] = 1.0
    args = (coupling_matrices(mode), mode.p0, pulse.params)
    y, _ = odeint.run(coefficient_kernel, y0, t_i, t_f, spec, args)
    C = y.reshape(2, 4).T  # column mu = solution started from e_mu
    drift = float(np.max(np.abs(np.linalg.norm(C, axis=0) - 1.0)))
    if variant == Variant.FEYNMAN:
        return C[2:, :], C[:2, :], drift
    return C[:2, :], C[2:, :], drift


def _renormalize(M, P, variant):
    if abs(np.linalg.det(M)) < DET_FLOOR:
        raise SingularShooting(f"|det M| = {abs(np.linalg.det(M)):.3e} below {DET_FLOOR:g}")
    alpha = np.linalg.solve(M, np.eye(2, dtype=complex))  # column c solves M a = e_c
    C_out = (P @ alpha).T  # row c
    N_tilde = np.linalg.norm(alpha, axis=0)
    A = C_out / N_tilde[:, None]
    if variant == Variant.ANTI_FEYNMAN:
        A = -A
    return A, N_tilde, C_out


def solve_boundary_value(q, cond, variant, pulse, basis, spec=None, window=None):
    """One conditioning row: (A[cond, :], N_tilde[cond], C_out[cond, :]).

    ``q`` is the electron momentum of the mode and ``cond`` is +1 or -1.
    """
    variant = Variant(variant)
    M, P, _ = evolve_basis(q, variant, pulse, basis, spec, window)
    A, N_tilde, C_out = _renormalize(M, P, variant)
    row = 0 if cond > 0 else 1
    return A[row], float(N_tilde[row]), C_out[row]


def pair_distributions(p, variant, pulse, basis=None, spec=None, window=None):
    """Full 2x2 amplitudes at the reported momentum ``p``.

    Anti-Feynman runs solve the mode at electron momentum -p, so ``p`` is the
    positron momentum there.
    """
    variant = Variant(variant)
    basis = basis or BispinorBasis()
    p = np.asarray(p, dtype=float)
    q = p if variant == Variant.FEYNMAN else -p
    M, P, drift = evolve_basis(q, variant, pulse, basis, spec, window)
    A, N_tilde, C_out = _renormalize(M, P, variant)
    return PairAmplitudes(p=p, q=q, variant=variant, basis=basis, A=A,
                          N_tilde=N_tilde, C_out=C_out, norm_drift=drift)
