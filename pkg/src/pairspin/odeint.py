"""Adaptive Dormand-Prince 8(5,3) integrator for small dense ODE systems.

One source serves two execution modes: right-hand sides that are numba
``njit`` functions run through the compiled core, plain Python callables run
through the same algorithm interpreted.  The tableau comes from scipy.

The right-hand side signature is ``rhs(t, y, args) -> dy`` with ``y`` a 1-D
real or complex array.
"""

from dataclasses import dataclass

import numba
import numpy as np
from numba.core.registry import CPUDispatcher
from scipy.integrate._ivp import dop853_coefficients as _dop

from .errors import ConfigError, NonFiniteState, StepUnderflow

_N_STAGES = _dop.N_STAGES
_A = np.ascontiguousarray(_dop.A[:_N_STAGES, :_N_STAGES])
_B = np.ascontiguousarray(_dop.B)
_C = np.ascontiguousarray(_dop.C[:_N_STAGES])
_E3 = np.ascontiguousarray(_dop.E3)
_E5 = np.ascontiguousarray(_dop.E5)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_EXPONENT = -1.0 / 8.0

# status codes returned by the core
_OK, _UNDERFLOW, _NONFINITE = 0, 1, 2


@dataclass(frozen=True)
class IntegratorSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.05
    min_step: float = 1e-10

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "min_step"):
            value = float(getattr(self, name))
            if not (np.isfinite(value) and value > 0):
                raise ConfigError(name, f"must be positive, got {value}")
            object.__setattr__(self, name, value)
        if self.min_step > self.max_step:
            raise ConfigError("min_step", "must satisfy 0 < min_step <= max_step")

    def capped(self, max_step):
        """Copy with ``max_step`` lowered to at most the given value."""
        cap = min(self.max_step, max_step)
        return IntegratorSpec(self.rel_tol, self.abs_tol, cap, min(self.min_step, cap))


def oscillation_cap(p0):
    """Largest step that still resolves phases rotating at 2 * p0."""
    return min(0.05, 0.1 * 2.0 * np.pi / (2.0 * p0))


@numba.njit(cache=True, nogil=True)
def _dop853(rhs, y0, t0, t1, args, rtol, atol, max_step, min_step):
    n = y0.shape[0]
    y = y0.copy()
    y_stage = np.empty_like(y)
    y_new = np.empty_like(y)
    K = np.zeros((_N_STAGES + 1, n), dtype=y0.dtype)
    span = t1 - t0
    direction = 1.0 if span > 0 else -1.0
    h_abs = min(max_step, 0.01 * abs(span))
    t = t0
    K[0] = rhs(t, y, args)
    nsteps = 0
    while direction * (t1 - t) > 0:
        last = False
        if h_abs >= abs(t1 - t):
            h_abs = abs(t1 - t)
            last = True
        elif h_abs < min_step:
            return y, t, nsteps, _UNDERFLOW
        accepted = False
        while not accepted:
            h = direction * h_abs
            for s in range(1, _N_STAGES):
                for i in range(n):
                    acc = 0.0 * y[i]
                    for j in range(s):
                        acc += _A[s, j] * K[j, i]
                    y_stage[i] = y[i] + h * acc
                K[s] = rhs(t + _C[s] * h, y_stage, args)
            for i in range(n):
                acc = 0.0 * y[i]
                for j in range(_N_STAGES):
                    acc += _B[j] * K[j, i]
                y_new[i] = y[i] + h * acc
            t_new = t1 if last else t + h
            K[_N_STAGES] = rhs(t_new, y_new, args)

            err5 = 0.0
            err3 = 0.0
            finite = True
            for i in range(n):
                scale = atol + rtol * max(abs(y[i]), abs(y_new[i]))
                e5 = 0.0 * y[i]
                e3 = 0.0 * y[i]
                for j in range(_N_STAGES + 1):
                    e5 += _E5[j] * K[j, i]
                    e3 += _E3[j] * K[j, i]
                r5 = abs(e5) / scale
                r3 = abs(e3) / scale
                if not (np.isfinite(r5) and np.isfinite(r3) and np.isfinite(abs(y_new[i]))):
                    finite = False
                err5 = max(err5, r5 * r5)
                err3 = max(err3, r3 * r3)
            if not finite:
                return y, t, nsteps, _NONFINITE
            denom = err5 + 0.01 * err3
            err = 0.0 if denom == 0.0 else h_abs * err5 / np.sqrt(denom)

            if err <= 1.0:
                accepted = True
                factor = _MAX_FACTOR if err == 0.0 else min(_MAX_FACTOR, _SAFETY * err ** _EXPONENT)
                t = t_new
                y[:] = y_new
                K[0] = K[_N_STAGES]
                nsteps += 1
                h_abs = min(max_step, h_abs * factor)
            else:
                h_abs *= max(_MIN_FACTOR, _SAFETY * err ** _EXPONENT)
                last = False
                if h_abs < min_step:
                    return y, t, nsteps, _UNDERFLOW
    return y, t, nsteps, _OK


def _check(y, t, status, spec):
    if status == _UNDERFLOW:
        raise StepUnderflow(f"step size fell below min_step={spec.min_step:g} at t={t:.6g}")
    if status == _NONFINITE:
        raise NonFiniteState(f"state left the finite range at t={t:.6g}")
    return y


def run(rhs, y0, t_i, t_f, spec, args):
    """Integrate a compiled ``rhs(t, y, args)``; returns (y(t_f), accepted steps)."""
    y, t, nsteps, status = _dop853(
        rhs, y0, float(t_i), float(t_f), args,
        spec.rel_tol, spec.abs_tol, spec.max_step, spec.min_step)
    return _check(y, t, status, spec), nsteps


def integrate(rhs, y0, t_i, t_f, spec=None, args=None):
    """Return y(t_f) for dy/dt = rhs(t, y[, args]) with y(t_i) = y0.

    ``rhs`` may be an ``njit`` function taking ``(t, y, args)`` or any Python
    callable; Python callables take ``(t, y)`` when ``args`` is None.
    Backward integration (t_f < t_i) is supported.
    """
    spec = spec or IntegratorSpec()
    if t_i == t_f:
        raise ValueError("integrate needs t_i != t_f")
    y0 = np.array(y0, dtype=np.complex128 if np.iscomplexobj(y0) else np.float64).ravel()
    if isinstance(rhs, CPUDispatcher):
        return run(rhs, y0, t_i, t_f, spec, () if args is None else args)[0]

    if args is None:
        def call(t, y, _):
            return np.asarray(rhs(t, y), dtype=y0.dtype).reshape(y0.shape)
    else:
        def call(t, y, a):
            return np.asarray(rhs(t, y, a), dtype=y0.dtype).reshape(y0.shape)
    with np.errstate(all="ignore"):
        y, t, _, status = _dop853.py_func(
            call, y0, float(t_i), float(t_f), args,
            spec.rel_tol, spec.abs_tol, spec.max_step, spec.min_step)
    return _check(y, t, status, spec)
