"""Constant spinor algebra and the pointwise spinor <-> (coframe, density) map.

Conventions are frozen once and for all: metric diag(-1,+1,+1), Pauli
matrices with the first index enumerating rows, epsilon = [[0,-1],[1,0]]
for every index placement.  Dotted/undotted index placement never shows up
at runtime; every contraction below is a fixed 2x2 matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveDensity, WrongDensitySign

# Minkowski metrics, diagonal entries only.
METRIC3 = np.array([-1.0, 1.0, 1.0])
METRIC4 = np.array([-1.0, 1.0, 1.0, 1.0])

# Frame metric o_jk = o^jk (3D) and its 4D extension.
O3 = np.array([-1.0, 1.0, 1.0])
O4 = np.array([-1.0, 1.0, 1.0, 1.0])

# Pauli matrices sigma_alpha (lower index), alpha = 0..3.
SIGMA_LOWER = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# sigma^alpha: index raised with diag(-1,+1,+1); sigma^3 = sigma_3.
SIGMA_UPPER = np.array(
    [-SIGMA_LOWER[0], SIGMA_LOWER[1], SIGMA_LOWER[2], SIGMA_LOWER[3]]
)

SIGMA3 = SIGMA_LOWER[3]

# Metric spinor, same matrix for all four index placements.
EPSILON = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class Spinor2:
    """A 2-component complex spinor value.

    The role tag records whether the value is meant as an undotted or a
    dotted spinor; it has no runtime effect.
    """

    c1: complex
    c2: complex
    role: str = "undotted"

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2], dtype=complex)


@dataclass(frozen=True)
class CoframeDensity:
    """A 3x3 real coframe matrix (row j = covector theta^j) and a density."""

    theta: np.ndarray
    rho: float


@dataclass(frozen=True)
class CoframeReport:
    """Deviations of a coframe from the kinematic constraints."""

    max_orthonormality_deviation: float
    det_deviation: float
    theta00: float
    passed: bool


def _values(xi) -> np.ndarray:
    if isinstance(xi, Spinor2):
        return xi.as_array()
    return np.asarray(xi, dtype=complex)


def density_of_spinor(xi) -> np.ndarray | float:
    """Density rho = |c1|^2 - |c2|^2.

    Accepts a single Spinor2 or an array of shape (..., 2); the sign of the
    result conveys the class of the spinor.
    """
    v = _values(xi)
    rho = np.abs(v[..., 0]) ** 2 - np.abs(v[..., 1]) ** 2
    return float(rho) if rho.ndim == 0 else rho


def coframe_map(xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized spinor -> (theta, rho) map on arrays of shape (..., 2).

    Returns (theta, rho) with theta of shape (..., 3, 3).  No density check
    is performed here; callers enforce positivity.
    """
    v = np.asarray(xi, dtype=complex)
    rho = np.abs(v[..., 0]) ** 2 - np.abs(v[..., 1]) ** 2
    theta = np.empty(v.shape[:-1] + (3, 3))
    for alpha in range(3):
        sv = v @ SIGMA_LOWER[alpha].T  # (sigma_alpha xi)_a
        theta[..., 0, alpha] = (np.conj(v) * sv).sum(-1).real / rho
        # epsilon^{cb} sigma3_{ba} xi^a sigma_{alpha cd} xi^d
        w = v[..., 1] * sv[..., 0] + v[..., 0] * sv[..., 1]
        theta[..., 1, alpha] = (w / rho).real
        theta[..., 2, alpha] = (w / rho).imag
    return theta, rho


def coframe_of_spinor(xi) -> CoframeDensity:
    """Pointwise spinor -> CoframeDensity, positive class only."""
    v = _values(xi)
    rho = density_of_spinor(v)
    if rho <= 0.0:
        raise NonPositiveDensity(
            f"density {rho:.6g} is not positive; apply bijection_to_positive first"
        )
    theta, _ = coframe_map(v)
    return CoframeDensity(theta=theta, rho=float(rho))


def verify_coframe(cd: CoframeDensity, tol: float = 1e-12) -> CoframeReport:
    """Check o_jk theta^j theta^k = g, det = +1 and theta^0_0 > 0."""
    theta = np.asarray(cd.theta, dtype=float)
    gram = np.einsum("...ja,j,...jb->...ab", theta, O3, theta)
    dev = float(np.max(np.abs(gram - np.diag(METRIC3))))
    ddet = float(np.max(np.abs(np.linalg.det(theta) - 1.0)))
    t00 = float(np.min(theta[..., 0, 0]))
    passed = dev <= tol and ddet <= tol and t00 > 0.0 and bool(np.all(np.asarray(cd.rho) > 0.0))
    return CoframeReport(dev, ddet, t00, passed)


def bijection_to_positive(xi_tilde) -> Spinor2 | np.ndarray:
    """Map a negative-density spinor to the positive class.

    The map (a, b) -> (conj(b), conj(a)) flips the sign of the density;
    applying it twice returns to the original class.
    """
    v = _values(xi_tilde)
    rho = density_of_spinor(v)
    if np.any(np.asarray(rho) >= 0.0):
        raise WrongDensitySign("input spinor must have strictly negative density")
    out = np.stack([np.conj(v[..., 1]), np.conj(v[..., 0])], axis=-1)
    if isinstance(xi_tilde, Spinor2):
        return Spinor2(complex(out[0]), complex(out[1]), role=xi_tilde.role)
    return out
