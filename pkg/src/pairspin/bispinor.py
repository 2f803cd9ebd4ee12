"""Dirac matrices (Dirac representation), free bispinors and the interaction matrix.

Coefficient vectors throughout the package are ordered as
``[(+,+), (+,-), (-,+), (-,-)]`` in (beta, lambda): index ``2 * b + l`` with
``b = 0`` for positive frequency and ``l = 0`` for lambda = +.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .pulse import CHARGE

SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)

GAMMA0 = np.block([[_I2, _Z2], [_Z2, -_I2]])
GAMMA = np.array([np.block([[_Z2, s], [-s, _Z2]]) for s in SIGMA])
# alpha^j = gamma^0 gamma^j
ALPHA = np.array([GAMMA0 @ g for g in GAMMA])
# Sigma^j = diag(sigma^j, sigma^j)
SPIN = np.array([np.block([[s, _Z2], [_Z2, s]]) for s in SIGMA])

LAMBDAS = (1, -1)


def index(beta, lam):
    """Position of C^(beta)_lambda in a coefficient vector."""
    return 2 * (0 if beta > 0 else 1) + (0 if lam > 0 else 1)


def free_hamiltonian(q):
    """H0(q) = alpha.q + gamma^0 in relativistic units."""
    return np.einsum("j,jab->ab", np.asarray(q, dtype=float), ALPHA) + GAMMA0


def angles(v):
    """Polar angle in [0, pi] and azimuth in (-pi, pi]; (0, 0) for the zero vector."""
    v = np.asarray(v, dtype=float)
    r = np.linalg.norm(v)
    if r == 0.0:
        return 0.0, 0.0
    theta = np.arccos(np.clip(v[2] / r, -1.0, 1.0))
    phi = np.arctan2(v[1], v[0])
    if phi == -np.pi:
        phi = np.pi
    return float(theta), float(phi)


def _half_angle_spinors(theta, phi):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    em, ep = np.exp(-0.5j * phi), np.exp(0.5j * phi)
    return np.array([em * c, ep * s]), np.array([-em * s, ep * c])


@dataclass(frozen=True)
class BispinorBasis:
    """Spin quantization along a fixed axis, or helicity (axis = None)."""

    kind: str = "fixed"
    axis: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.kind not in ("fixed", "helicity"):
            raise ConfigError("basis", f"unknown basis kind {self.kind!r}")
        if self.kind == "fixed":
            axis = np.asarray(self.axis, dtype=float)
            if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > 1e-12:
                raise ConfigError("basis", "fixed axis must be a unit 3-vector")
            object.__setattr__(self, "axis", tuple(float(a) for a in axis))
        else:
            object.__setattr__(self, "axis", None)

    @classmethod
    def parse(cls, text):
        """Accepts "z", "x", "y", "axis:x,y,z" or "helicity"."""
        text = text.strip().lower()
        if text == "helicity":
            return cls("helicity")
        named = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}
        if text in named:
            return cls("fixed", named[text])
        if text.startswith("axis:"):
            try:
                axis = [float(v) for v in text[5:].split(",")]
            except ValueError:
                raise ConfigError("basis", f"cannot parse axis {text!r}") from None
            if len(axis) != 3:
                raise ConfigError("basis", "axis needs three components")
            return cls("fixed", tuple(axis))
        raise ConfigError("basis", f"expected 'z', 'axis:x,y,z' or 'helicity', got {text!r}")

    def __str__(self):
        if self.kind == "helicity":
            return "helicity"
        if self.axis == (0.0, 0.0, 1.0):
            return "z"
        return "axis:" + ",".join(repr(a) for a in self.axis)


def pauli_spinors(basis, q):
    """Two-spinors (chi_+, chi_-) with (sigma.n) chi_lambda = lambda chi_lambda.

    n is the fixed axis, or the direction of q for helicity.  For helicity at
    q = 0 the north-pole convention theta = phi = 0 is used.
    """
    n = basis.axis if basis.kind == "fixed" else q
    return _half_angle_spinors(*angles(n))


@dataclass(frozen=True)
class ModeBispinors:
    """u^(+)_{q,lambda} and u^(-)_{-q,lambda} for one electron momentum q."""

    q: np.ndarray
    p0: float
    u_plus: np.ndarray  # (2, 4), rows lambda = +, -
    u_minus: np.ndarray  # (2, 4)
    matrix: np.ndarray = field(repr=False)  # (4, 4), columns in coefficient order


def mode_bispinors(basis, q):
    q = np.asarray(q, dtype=float)
    p0 = float(np.sqrt(1.0 + q @ q))
    norm = np.sqrt((p0 + 1.0) / (2.0 * p0))
    sq = np.einsum("j,jab->ab", q, SIGMA) / (p0 + 1.0)
    chis = pauli_spinors(basis, q)
    u_plus = np.array([norm * np.concatenate([chi, sq @ chi]) for chi in chis])
    u_minus = np.array([norm * np.concatenate([-(sq @ chi), chi]) for chi in chis])
    matrix = np.column_stack([u_plus[0], u_plus[1], u_minus[0], u_minus[1]])
    return ModeBispinors(q=q, p0=p0, u_plus=u_plus, u_minus=u_minus, matrix=matrix)


def coupling_matrices(mode):
    """G_j = B^dagger (-e alpha_j) B, so that the static part of V is sum_j A_j G_j."""
    B = mode.matrix
    return np.array([-CHARGE * (B.conj().T @ a @ B) for a in ALPHA])


def phase_matrix(p0, t):
    """exp(i (beta - beta') p0 t) arranged in coefficient order."""
    up = np.exp(2j * p0 * t)
    P = np.ones((4, 4), dtype=complex)
    P[:2, 2:] = up
    P[2:, :2] = np.conj(up)
    return P


def interaction_matrix(mode, A, t):
    """V(t); the coefficients obey dC/dt = -i V(t) C."""
    static = np.einsum("j,jab->ab", np.asarray(A, dtype=float), coupling_matrices(mode))
    return phase_matrix(mode.p0, t) * static
