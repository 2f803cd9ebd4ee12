"""Analytic electric-field pulses with vanishing vector potential at both ends.

All pulses share the asymmetric envelope

    F(t) = tau0 / cosh(t / tau(t)),   tau(t) = tau0 * (1 + sigma * tanh(t / t0))

and are specified through the vector potential, A(t) = E0 F(t) g(t), with the
field E = -dA/dt taken analytically.  Since A -> 0 at both temporal infinities
the time integral of the field vanishes identically.

Units are relativistic (hbar = c = m_e = |e| = 1, e = -1): E0 is measured in
Schwinger fields, times in Compton times, momenta in m_e c.
"""

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numba
import numpy as np
from scipy import integrate

from .errors import ConfigError

# electron charge in relativistic units
CHARGE = -1.0

DEFAULT_EPS_A = 1e-16

_ORTHO_TOL = 1e-12


class PulseKind(str, Enum):
    SAUTER_LIKE = "SauterLike"
    OSCILLATING = "Oscillating"
    ELLIPTIC = "Elliptic"


_KIND_CODE = {PulseKind.SAUTER_LIKE: 0, PulseKind.OSCILLATING: 1, PulseKind.ELLIPTIC: 2}


def _unit_orthogonal(v):
    v = np.asarray(v, dtype=float)
    trial = np.array([0.0, 1.0, 0.0]) if abs(v[1]) < 0.9 else np.array([1.0, 0.0, 0.0])
    w = trial - np.dot(trial, v) * v
    return tuple(w / np.linalg.norm(w))


@dataclass(frozen=True)
class PulseConfig:
    """Parameters of one pulse.

    ``omega``, ``chi`` and ``delta`` are ignored for ``SauterLike`` pulses,
    ``delta`` only matters for ``Elliptic`` ones.  When ``eps2`` is omitted a
    unit vector orthogonal to ``eps1`` is chosen.
    """

    kind: PulseKind
    E0: float
    tau0: float = 3.0
    t0: float = 3.0
    sigma: float = 0.0
    omega: float = 0.0
    chi: float = 0.0
    delta: float = 0.0
    eps1: tuple = (1.0, 0.0, 0.0)
    eps2: tuple = None
    params: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", PulseKind(self.kind))
        for name in ("E0", "tau0", "t0", "sigma", "omega", "chi", "delta"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ConfigError(name, f"must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.tau0 <= 0:
            raise ConfigError("tau0", f"must satisfy tau0 > 0, got {self.tau0}")
        if self.t0 <= 0:
            raise ConfigError("t0", f"must satisfy t0 > 0, got {self.t0}")
        if not -1.0 < self.sigma < 1.0:
            raise ConfigError("sigma", f"must lie in (-1, 1), got {self.sigma}")
        if self.omega < 0:
            raise ConfigError("omega", f"must satisfy omega >= 0, got {self.omega}")

        eps1 = np.asarray(self.eps1, dtype=float)
        if eps1.shape != (3,) or abs(np.linalg.norm(eps1) - 1.0) > _ORTHO_TOL:
            raise ConfigError("eps1", "must be a unit 3-vector (|eps1| = 1 to 1e-12)")
        eps2 = _unit_orthogonal(eps1) if self.eps2 is None else self.eps2
        eps2 = np.asarray(eps2, dtype=float)
        if eps2.shape != (3,) or abs(np.linalg.norm(eps2) - 1.0) > _ORTHO_TOL:
            raise ConfigError("eps2", "must be a unit 3-vector (|eps2| = 1 to 1e-12)")
        if abs(np.dot(eps1, eps2)) > _ORTHO_TOL:
            raise ConfigError("eps2", "must be orthogonal to eps1 (eps1.eps2 = 0 to 1e-12)")
        object.__setattr__(self, "eps1", tuple(float(x) for x in eps1))
        object.__setattr__(self, "eps2", tuple(float(x) for x in eps2))

        params = np.array(
            [_KIND_CODE[self.kind], self.E0, self.tau0, self.t0, self.sigma,
             self.omega, self.chi, self.delta, *self.eps1, *self.eps2]
        )
        params.setflags(write=False)
        object.__setattr__(self, "params", params)

    @property
    def is_linear(self):
        """True when A(t) stays along the fixed direction ``eps1``."""
        return self.kind != PulseKind.ELLIPTIC or self.delta == 0.0

    def with_(self, **changes):
        values = {k: getattr(self, k) for k in
                  ("kind", "E0", "tau0", "t0", "sigma", "omega", "chi", "delta", "eps1", "eps2")}
        values.update(changes)
        if "eps1" in changes and "eps2" not in changes:
            values["eps2"] = None
        return PulseConfig(**values)


# -- compiled kernels ---------------------------------------------------------
# Parameter vector layout:
#   [kind, E0, tau0, t0, sigma, omega, chi, delta, eps1(3), eps2(3)]


@numba.njit(cache=True, nogil=True)
def envelope_kernel(par, t):
    """Return F(t) and F'(t), including the tau'(t) chain-rule term."""
    tau0 = par[2]
    t0 = par[3]
    sigma = par[4]
    s = t / t0
    tau = tau0 * (1.0 + sigma * np.tanh(s))
    sech_s = 1.0 / np.cosh(s)
    dtau = tau0 * sigma * sech_s * sech_s / t0
    u = t / tau
    du = (tau - t * dtau) / (tau * tau)
    sech_u = 1.0 / np.cosh(u)
    F = tau0 * sech_u
    dF = -F * np.tanh(u) * du
    return F, dF


@numba.njit(cache=True, nogil=True)
def potential_field_kernel(par, t):
    """Vector potential A(t) and field E(t) = -dA/dt as two 3-tuples."""
    kind = int(par[0])
    E0 = par[1]
    F, dF = envelope_kernel(par, t)
    if kind == 0:
        g1, dg1, g2, dg2 = 1.0, 0.0, 0.0, 0.0
    else:
        omega = par[5]
        phase = omega * t + par[6]
        c = np.cos(phase)
        s = np.sin(phase)
        if kind == 1:
            c1, c2 = 1.0, 0.0
        else:
            c1, c2 = np.cos(par[7]), np.sin(par[7])
        g1, dg1 = c * c1, -omega * s * c1
        g2, dg2 = s * c2, omega * c * c2
    a1 = E0 * F * g1
    a2 = E0 * F * g2
    e1 = -E0 * (dF * g1 + F * dg1)
    e2 = -E0 * (dF * g2 + F * dg2)
    A = (a1 * par[8] + a2 * par[11], a1 * par[9] + a2 * par[12], a1 * par[10] + a2 * par[13])
    E = (e1 * par[8] + e2 * par[11], e1 * par[9] + e2 * par[12], e1 * par[10] + e2 * par[13])
    return A, E


@numba.njit(cache=True, nogil=True)
def _sample_kernel(par, ts):
    n = ts.shape[0]
    F = np.empty(n)
    dF = np.empty(n)
    A = np.empty((n, 3))
    E = np.empty((n, 3))
    for i in range(n):
        F[i], dF[i] = envelope_kernel(par, ts[i])
        a, e = potential_field_kernel(par, ts[i])
        for j in range(3):
            A[i, j] = a[j]
            E[i, j] = e[j]
    return F, dF, A, E


def _sample(pulse, t):
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    return _sample_kernel(pulse.params, ts.ravel())


# -- public operations --------------------------------------------------------


def envelope(pulse, t):
    """F(t) = tau0 / cosh(t / tau(t))."""
    F = _sample(pulse, t)[0]
    return float(F[0]) if np.ndim(t) == 0 else F.reshape(np.shape(t))


def envelope_derivative(pulse, t):
    dF = _sample(pulse, t)[1]
    return float(dF[0]) if np.ndim(t) == 0 else dF.reshape(np.shape(t))


def eval_potential(pulse, t):
    """A(t); shape (3,) for scalar t, otherwise t.shape + (3,)."""
    A = _sample(pulse, t)[2]
    return A[0] if np.ndim(t) == 0 else A.reshape(np.shape(t) + (3,))


def eval_field(pulse, t):
    """E(t) = -dA/dt in closed form."""
    E = _sample(pulse, t)[3]
    return E[0] if np.ndim(t) == 0 else E.reshape(np.shape(t) + (3,))


def net_impulse(pulse, t_i, t_f):
    """Adaptive quadrature of the field over [t_i, t_f]."""
    if not t_i < t_f:
        raise ValueError("net_impulse needs t_i < t_f")
    # split at the carrier period so quad sees a few oscillations per piece
    width = pulse.tau0 * (1 - abs(pulse.sigma))
    if pulse.kind != PulseKind.SAUTER_LIKE and pulse.omega > 0:
        width = min(width, 2 * np.pi / pulse.omega)
    edges = np.unique(np.concatenate([
        np.arange(t_i, t_f, 2.0 * width), [t_f]]))
    out = np.zeros(3)
    with warnings.catch_warnings():
        # epsrel = 1e-13 is at roundoff level for oscillating pieces; quad warns
        # there, but its own error estimates stay at or below ~2e-13
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            for j in range(3):
                val, _ = integrate.quad(
                    lambda s: potential_field_kernel(pulse.params, s)[1][j],
                    a, b, epsabs=1e-15, epsrel=1e-13, limit=200)
                out[j] += val
    return out


def _majorants(pulse, ts):
    """Pointwise upper bounds on |A| and |E| built from the envelope alone."""
    F, dF, _, _ = _sample_kernel(pulse.params, ts)
    omega = 0.0 if pulse.kind == PulseKind.SAUTER_LIKE else pulse.omega
    E0 = abs(pulse.E0)
    return E0 * F, E0 * (np.abs(dF) + omega * F)


def _search_step(pulse):
    scale = min(pulse.tau0 * (1 - abs(pulse.sigma)), pulse.t0)
    if pulse.kind != PulseKind.SAUTER_LIKE and pulse.omega > 0:
        scale = min(scale, 2 * np.pi / pulse.omega)
    return 0.02 * scale


def integration_window(pulse, eps_A=DEFAULT_EPS_A):
    """Smallest [t_i, t_f] outside which |A| and |E| stay below eps_A times their maxima.

    The search brackets the last crossing of the envelope majorants on a
    uniform grid stepping outward from t = 0 and refines it by bisection.
    """
    if not 0.0 < eps_A < 1.0:
        raise ConfigError("eps_A", f"must lie in (0, 1), got {eps_A}")
    if pulse.E0 == 0.0:
        return -pulse.tau0, pulse.tau0

    h = _search_step(pulse)
    # beyond |t| ~ tau_max * (ln(2/eps) + margin) the envelope is a pure exponential tail
    tau_max = pulse.tau0 * (1 + abs(pulse.sigma))
    reach = tau_max * (np.log(2.0 / eps_A) + 40.0) + 10.0 * pulse.t0
    n = int(np.ceil(reach / h))
    grid = h * np.arange(n + 1)

    both = np.concatenate([-grid[::-1], grid[1:]])
    _, _, A, E = _sample_kernel(pulse.params, both)
    a_max = np.max(np.linalg.norm(A, axis=1))
    e_max = np.max(np.linalg.norm(E, axis=1))
    thr_a = eps_A * a_max
    thr_e = eps_A * e_max

    def excess(ts):
        ma, me = _majorants(pulse, np.atleast_1d(ts))
        return np.maximum(ma - thr_a, me - thr_e)

    edges = []
    for sign in (-1.0, 1.0):
        ts = sign * grid
        above = np.nonzero(excess(ts) >= 0.0)[0]
        k = above[-1] if above.size else 0
        if k == n:
            raise ConfigError("eps_A", "window search did not terminate")
        lo, hi = ts[k], ts[k + 1]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if excess(mid)[0] >= 0.0:
                lo = mid
            else:
                hi = mid
        edges.append(hi)
    return float(edges[0]), float(edges[1])
