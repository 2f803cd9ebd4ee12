"""Momentum-grid sweeps over the three backends and cross-method comparisons.

Grid arrays have shape (ny, nx): row ``j`` holds p_y[j], column ``i`` holds
p_x[i].  Rows are the unit of parallel work and are assembled in order, so
results do not depend on the number of workers.
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import odeint
from .bispinor import BispinorBasis
from .dhw import dhw_distribution
from .errors import ConfigError, GridPointError
from .smatrix import Variant, pair_distributions, resolve_window
from .spinorial import ELECTRON, POSITRON, check_linear, spinorial_distribution

METHODS = ("smatrix", "dhw", "spinorial")
REL_FLOOR = 1e-12


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise ConfigError("count", f"grid axis needs count >= 2, got {self.count}")
        if not (np.isfinite(self.min) and np.isfinite(self.max) and self.min < self.max):
            raise ConfigError("min", f"grid axis needs min < max, got ({self.min}, {self.max})")
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "count", int(self.count))

    def values(self):
        return np.linspace(self.min, self.max, self.count)

    @property
    def spacing(self):
        return (self.max - self.min) / (self.count - 1)


@dataclass(frozen=True)
class MomentumGrid:
    px: Axis
    py: Axis
    pz: float = 0.0

    @classmethod
    def square(cls, lo, hi, count, pz=0.0):
        return cls(Axis(lo, hi, count), Axis(lo, hi, count), pz)

    @property
    def shape(self):
        return (self.py.count, self.px.count)

    def points(self):
        """Momenta as an array of shape (ny, nx, 3)."""
        PX, PY = np.meshgrid(self.px.values(), self.py.values())
        return np.stack([PX, PY, np.full_like(PX, self.pz)], axis=-1)

    def momentum(self, index):
        j, i = index
        return np.array([self.px.values()[i], self.py.values()[j], self.pz])


@dataclass
class GridResult:
    grid: MomentumGrid
    method: str
    variant: Variant
    f_total: np.ndarray
    f: np.ndarray = None  # (ny, nx, 2, 2), smatrix only
    A: np.ndarray = None
    N_tilde: np.ndarray = None
    norm_drift: np.ndarray = None
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DiffReport:
    method_a: str
    method_b: str
    max_abs: float
    max_rel: float
    argmax_abs: np.ndarray
    argmax_rel: np.ndarray

    def passes(self, rel_tol):
        return self.max_rel <= rel_tol


def _point_solver(method, variant, pulse, basis, spec, window):
    if method == "smatrix":
        def solve(p):
            amp = pair_distributions(p, variant, pulse, basis, spec, window)
            return amp.f_total, amp
    elif method == "dhw":
        def solve(p):
            return dhw_distribution(p, variant, pulse, spec, window), None
    else:
        species = ELECTRON if variant == Variant.FEYNMAN else POSITRON

        def solve(p):
            return spinorial_distribution(p, species, pulse, spec, window), None
    return solve


def _check_method(method, pulse):
    if method not in METHODS:
        raise ConfigError("method", f"expected one of {', '.join(METHODS)}, got {method!r}")
    if method == "spinorial":
        check_linear(pulse)


def _scan_points(points, method, variant, pulse, basis, spec, parallelism, window):
    ny, nx = points.shape[:2]
    solve = _point_solver(method, variant, pulse, basis, spec, window)

    def row(j):
        out = []
        for i in range(nx):
            p = points[j, i]
            try:
                out.append(solve(p))
            except Exception as exc:  # attach the momentum, keep the cause
                raise GridPointError(p, exc) from exc
        return out

    if parallelism == 1:
        rows = [row(j) for j in range(ny)]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(row, range(ny)))

    f_total = np.array([[v for v, _ in r] for r in rows])
    extra = {}
    if method == "smatrix":
        amps = [[a for _, a in r] for r in rows]
        extra["f"] = np.array([[a.f for a in r] for r in amps])
        extra["A"] = np.array([[a.A for a in r] for r in amps])
        extra["N_tilde"] = np.array([[a.N_tilde for a in r] for r in amps])
        extra["norm_drift"] = np.array([[a.norm_drift for a in r] for r in amps])
    return f_total, extra


def scan_grid(grid, method, variant=Variant.FEYNMAN, pulse=None, basis=None, spec=None,
              parallelism=1, window=None):
    """Evaluate one backend at every grid point."""
    if pulse is None:
        raise ConfigError("pulse", "a pulse is required")
    if int(parallelism) != parallelism or parallelism < 1:
        raise ConfigError("parallelism", f"must be a positive integer, got {parallelism}")
    _check_method(method, pulse)
    variant = Variant(variant)
    basis = basis or BispinorBasis()
    spec = spec or odeint.IntegratorSpec()
    window = resolve_window(pulse, window)

    start = time.perf_counter()
    f_total, extra = _scan_points(grid.points(), method, variant, pulse, basis, spec,
                                  int(parallelism), window)
    metadata = {"pulse": pulse, "basis": basis, "spec": spec, "window": window,
                "parallelism": int(parallelism), "wall_time": time.perf_counter() - start}
    return GridResult(grid=grid, method=method, variant=variant, f_total=f_total,
                      metadata=metadata, **extra)


def diff_report(a, b, points, name_a, name_b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diff = np.abs(a - b)
    rel = diff / np.maximum(np.maximum(np.abs(a), np.abs(b)), REL_FLOOR)
    ia = np.unravel_index(np.argmax(diff), diff.shape)
    ir = np.unravel_index(np.argmax(rel), rel.shape)
    return DiffReport(name_a, name_b, float(diff[ia]), float(rel[ir]),
                      points[ia].copy(), points[ir].copy())


def compare_methods(grid, method_a, method_b, variant=Variant.FEYNMAN, pulse=None,
                    spec=None, basis=None, parallelism=1, window=None):
    """Pointwise f_total comparison of two backends on the same grid."""
    window = resolve_window(pulse, window)
    ra = scan_grid(grid, method_a, variant, pulse, basis, spec, parallelism, window)
    rb = ra if method_b == method_a else scan_grid(
        grid, method_b, variant, pulse, basis, spec, parallelism, window)
    return diff_report(ra.f_total, rb.f_total, grid.points(), method_a, method_b)


def reflection_check(grid, method, pulse, spec=None, basis=None, parallelism=1, window=None):
    """Compare the anti-Feynman distribution at p with the Feynman one at -p."""
    _check_method(method, pulse)
    basis = basis or BispinorBasis()
    spec = spec or odeint.IntegratorSpec()
    window = resolve_window(pulse, window)
    anti = scan_grid(grid, method, Variant.ANTI_FEYNMAN, pulse, basis, spec, parallelism, window)
    mirrored, _ = _scan_points(-grid.points(), method, Variant.FEYNMAN, pulse, basis, spec,
                               int(parallelism), window)
    return diff_report(anti.f_total, mirrored, grid.points(),
                       f"{method}:AntiFeynman(p)", f"{method}:Feynman(-p)")


def available_cores():
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
