"""Phase maps of pair amplitudes, plaquette winding numbers and singularity classification.

Plaquette ``(j, i)`` is the cell with corners p[j, i], p[j, i+1], p[j+1, i+1],
p[j+1, i] (counterclockwise, p_x to the right, p_y up).  Each grid edge is
wrapped once and reused with opposite sign by its two neighbouring cells, so
the sum of all plaquette windings equals the boundary winding exactly.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import UnresolvedWinding

SNAP_TOL = 0.25
NODAL_THRESHOLD = 1e-3
NODAL_MIN_RUN = 3
# corners below this fraction of the map maximum have no defined phase
ZERO_FLOOR = 1e-10
# an edge counts as a pi jump when its wrapped difference exceeds this
JUMP_MIN = 0.75 * np.pi

VORTEX = "vortex"
NODAL = "nodal-line-segment"
UNRESOLVED = "unresolved"


def wrap(d):
    """Map angles into (-pi, pi]."""
    w = np.mod(np.asarray(d, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(w <= -np.pi, w + 2.0 * np.pi, w)


def reference_phase(p, eta, t_i, t_f):
    """eta * sqrt(p^2 + 1) * (t_f - t_i); p may be a single vector or (..., 3)."""
    if not t_f > t_i:
        raise ValueError(f"reference phase needs t_f > t_i, got ({t_i}, {t_f})")
    p = np.asarray(p, dtype=float)
    return eta * np.sqrt(1.0 + np.sum(p * p, axis=-1)) * (t_f - t_i)


@dataclass
class PhaseMap:
    grid: object
    amplitude: np.ndarray  # complex (ny, nx)
    phase: np.ndarray
    eta: float
    t_i: float
    t_f: float
    helicity: bool = False


def phase_map(grid, amplitude, eta, t_i, t_f, helicity=False):
    amplitude = np.asarray(amplitude, dtype=complex)
    if amplitude.shape != grid.shape:
        raise ValueError(f"amplitude shape {amplitude.shape} does not match grid {grid.shape}")
    phi = reference_phase(grid.points(), eta, t_i, t_f)
    phase = wrap(np.angle(np.exp(1j * np.mod(phi, 2.0 * np.pi)) * amplitude))
    return PhaseMap(grid, amplitude, phase, float(eta), float(t_i), float(t_f), helicity)


def _edges(phase):
    dx = wrap(np.diff(phase, axis=1))  # (ny, nx-1): from (j, i) to (j, i+1)
    dy = wrap(np.diff(phase, axis=0))  # (ny-1, nx): from (j, i) to (j+1, i)
    return dx, dy


def circulation(phase):
    """Counterclockwise wrapped circulation / 2 pi for every plaquette (unsnapped)."""
    phase = np.asarray(phase, dtype=float)
    if phase.ndim != 2 or min(phase.shape) < 2:
        raise ValueError("winding numbers need a grid of at least 2x2")
    dx, dy = _edges(phase)
    circ = dx[:-1, :] + dy[:, 1:] - dx[1:, :] - dy[:, :-1]
    return circ / (2.0 * np.pi)


def winding_numbers(pmap, strict=True):
    """Integer winding per plaquette, shape (ny-1, nx-1).

    With ``strict`` an UnresolvedWinding is raised when any snap residual
    exceeds SNAP_TOL; otherwise ``(windings, residuals)`` is returned.
    """
    phase = pmap.phase if isinstance(pmap, PhaseMap) else pmap
    circ = circulation(phase)
    n = np.rint(circ).astype(int)
    residual = np.abs(circ - n)
    if not strict:
        return n, residual
    if residual.max() > SNAP_TOL:
        j, i = np.unravel_index(np.argmax(residual), residual.shape)
        raise UnresolvedWinding(f"plaquette ({j}, {i}) has snap residual {residual[j, i]:.3f}")
    return n


def boundary_winding(phase):
    """Counterclockwise wrapped circulation along the outer grid boundary."""
    dx, dy = _edges(np.asarray(phase, dtype=float))
    total = dx[0, :].sum() + dy[:, -1].sum() - dx[-1, :].sum() - dy[:, 0].sum()
    return int(np.rint(total / (2.0 * np.pi)))


def _segment_min(a, b):
    """Smallest |a + s (b - a)| for s in [0, 1], elementwise."""
    d = b - a
    dd = np.abs(d) ** 2
    s = np.where(dd > 0, -np.real(np.conj(a) * d) / np.where(dd > 0, dd, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    return np.abs(a + s * d)


def cell_minimum(amplitude):
    """Interpolated |amplitude| minimum over the four edges of each plaquette."""
    a = np.asarray(amplitude, dtype=complex)
    hx = _segment_min(a[:, :-1], a[:, 1:])
    hy = _segment_min(a[:-1, :], a[1:, :])
    return np.minimum.reduce([hx[:-1, :], hx[1:, :], hy[:, :-1], hy[:, 1:]])


def _jump_cells(phase):
    dx, dy = _edges(phase)
    jx = np.abs(dx) > JUMP_MIN
    jy = np.abs(dy) > JUMP_MIN
    return jx[:-1, :] | jx[1:, :] | jy[:, :-1] | jy[:, 1:]


def _has_run(mask, length):
    for axis in (0, 1):
        run = np.zeros(mask.shape, dtype=int)
        lines = np.moveaxis(mask, axis, 0)
        acc = np.moveaxis(run, axis, 0)
        for k in range(lines.shape[0]):
            acc[k] = np.where(lines[k], (acc[k - 1] if k else 0) + 1, 0)
        if run.max() >= length:
            return True
    return False


def undefined_cells(amplitude):
    """Plaquettes with a corner where the amplitude is numerically zero."""
    a = np.abs(np.asarray(amplitude))
    z = a <= ZERO_FLOOR * a.max()
    return z[:-1, :-1] | z[:-1, 1:] | z[1:, :-1] | z[1:, 1:]


def convention_cells(grid):
    """Plaquettes touching p = 0 on a p_z = 0 slice (empty otherwise)."""
    mask = np.zeros((grid.py.count - 1, grid.px.count - 1), dtype=bool)
    if grid.pz != 0.0:
        return mask
    px, py = grid.px.values(), grid.py.values()
    ix = (px[:-1] <= 0.0) & (px[1:] >= 0.0)
    iy = (py[:-1] <= 0.0) & (py[1:] >= 0.0)
    return iy[:, None] & ix[None, :]


@dataclass(frozen=True)
class SingularityRecord:
    cell: tuple  # (j, i)
    center: tuple  # (p_x, p_y) of the plaquette centre
    winding: int
    classification: str
    amplitude_min: float
    convention_dependent: bool = False


def classify_singularities(pmap, windings=None):
    """Vortex records for nonzero windings and nodal-line segments for pi-jump chains.

    Nonzero windings on plaquettes touching p = 0 of a helicity map, or
    touching a corner with no defined phase, are reported as unresolved.
    """
    if windings is None:
        windings = winding_numbers(pmap)
    windings = np.asarray(windings)
    grid = pmap.grid
    amp_min = cell_minimum(pmap.amplitude)
    scale = np.abs(pmap.amplitude).max()
    excluded = convention_cells(grid) if pmap.helicity else np.zeros(windings.shape, bool)
    px, py = grid.px.values(), grid.py.values()
    cx = 0.5 * (px[:-1] + px[1:])
    cy = 0.5 * (py[:-1] + py[1:])

    def record(j, i, cls, conv=False):
        return SingularityRecord((int(j), int(i)), (float(cx[i]), float(cy[j])),
                                 int(windings[j, i]), cls, float(amp_min[j, i]), conv)

    undefined = undefined_cells(pmap.amplitude)
    records = []
    for j, i in zip(*np.nonzero(windings)):
        if excluded[j, i]:
            records.append(record(j, i, UNRESOLVED, True))
        elif undefined[j, i]:
            records.append(record(j, i, UNRESOLVED))
        else:
            records.append(record(j, i, VORTEX))

    candidates = ((windings == 0) & (amp_min < NODAL_THRESHOLD * scale)
                  & _jump_cells(pmap.phase) & ~excluded)
    labels, count = ndimage.label(candidates)
    nodal = np.zeros(candidates.shape, dtype=bool)
    for k in range(1, count + 1):
        component = labels == k
        if _has_run(component, NODAL_MIN_RUN):
            nodal |= component
    for j, i in zip(*np.nonzero(nodal)):
        records.append(record(j, i, NODAL))
    records.sort(key=lambda r: r.cell)
    return records


def vortices(records):
    return [r for r in records if r.classification == VORTEX]


def phase_map_rows(pmap):
    pts = pmap.grid.points()
    for j in range(pts.shape[0]):
        for i in range(pts.shape[1]):
            a = pmap.amplitude[j, i]
            yield (pts[j, i, 0], pts[j, i, 1], a.real, a.imag, pmap.phase[j, i])


def singularity_rows(records):
    for r in records:
        yield (r.cell[0], r.cell[1], r.center[0], r.center[1], r.winding, r.classification)
