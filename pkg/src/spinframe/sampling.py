"""Band-limited trigonometric test fields with exact derivatives.

Everything random in the package is drawn from numpy's default_rng
(PCG64), seeded explicitly, so identical seeds reproduce fields exactly.
A TrigPoly is a finite Fourier sum sum_k c_k exp(i k . w x); derivatives
are again TrigPolys, which is what "analytic mode" means throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import LatticeSpec, SpinorBundle, CoframeBundle, spectral_derivative


@dataclass(frozen=True)
class TrigPoly:
    """f(x) = sum_M coeffs[M] * exp(i sum_a freqs[M,a] * base[a] * x_a)."""

    freqs: np.ndarray     # (M, dims) integers
    coeffs: np.ndarray    # (M,) complex
    base: np.ndarray      # (dims,) base angular frequencies

    @property
    def dims(self) -> int:
        return self.freqs.shape[1]

    def derivative(self, axis: int) -> "TrigPoly":
        return TrigPoly(self.freqs, self.coeffs * 1j * self.freqs[:, axis] * self.base[axis], self.base)

    def conj(self) -> "TrigPoly":
        return TrigPoly(-self.freqs, np.conj(self.coeffs), self.base)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        return TrigPoly(
            np.concatenate([self.freqs, other.freqs]),
            np.concatenate([self.coeffs, other.coeffs]),
            self.base,
        )

    def scale(self, c) -> "TrigPoly":
        return TrigPoly(self.freqs, self.coeffs * c, self.base)

    def sup_bound(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def __call__(self, coords) -> np.ndarray:
        """Evaluate on broadcastable coordinate arrays (one per axis)."""
        out = 0.0
        for k, c in zip(self.freqs, self.coeffs):
            phase = 0.0
            for a in range(self.dims):
                if k[a] != 0:
                    phase = phase + k[a] * self.base[a] * coords[a]
            out = out + c * np.exp(1j * phase)
        return out + np.zeros(np.broadcast_shapes(*(np.shape(c) for c in coords)), dtype=complex)

    def on(self, spec: LatticeSpec) -> np.ndarray:
        return self(spec.meshgrid())


def constant_poly(value, base) -> TrigPoly:
    dims = len(base)
    return TrigPoly(np.zeros((1, dims), dtype=int), np.array([value], dtype=complex), np.asarray(base, float))


def random_trig_poly(rng: np.random.Generator, base, max_mode: int = 3,
                     n_modes: int = 6, amplitude: float = 1.0, real: bool = False) -> TrigPoly:
    """Random band-limited field, <= max_mode per axis; real=True hermitizes."""
    dims = len(base)
    freqs = rng.integers(-max_mode, max_mode + 1, size=(n_modes, dims))
    coeffs = (rng.normal(size=n_modes) + 1j * rng.normal(size=n_modes))
    p = TrigPoly(freqs, coeffs, np.asarray(base, float))
    if real:
        p = TrigPoly(
            np.concatenate([freqs, -freqs]),
            np.concatenate([coeffs, np.conj(coeffs)]) / 2.0,
            p.base,
        )
    s = p.sup_bound()
    return p.scale(amplitude / s if s > 0 else 1.0)


@dataclass(frozen=True)
class SpinorPoly:
    """Pair of TrigPolys forming a spinor field."""

    c1: TrigPoly
    c2: TrigPoly

    def bundle(self, spec: LatticeSpec) -> SpinorBundle:
        coords = spec.meshgrid()
        vals = np.stack([self.c1(coords), self.c2(coords)], axis=-1)
        derivs = np.stack(
            [
                np.stack([self.c1.derivative(a)(coords), self.c2.derivative(a)(coords)], axis=-1)
                for a in range(spec.dims)
            ],
            axis=-2,
        )
        return SpinorBundle(spec, vals, derivs)

    def scale_exp(self, h: TrigPoly) -> "ScaledSpinor":
        return ScaledSpinor(self, h)


@dataclass(frozen=True)
class ScaledSpinor:
    """e^h eta for a real scalar TrigPoly h, with product-rule derivatives."""

    eta: SpinorPoly
    h: TrigPoly

    def bundle(self, spec: LatticeSpec) -> SpinorBundle:
        b = self.eta.bundle(spec)
        coords = spec.meshgrid()
        eh = np.exp(self.h(coords).real)
        dh = np.stack([self.h.derivative(a)(coords).real for a in range(spec.dims)], axis=-1)
        vals = eh[..., None] * b.values
        derivs = eh[..., None, None] * (b.derivs + dh[..., :, None] * b.values[..., None, :])
        return SpinorBundle(spec, vals, derivs)


def base_for(spec: LatticeSpec) -> np.ndarray:
    """Fundamental angular frequencies matching the grid periods."""
    return np.array([2.0 * np.pi / (n * h) for n, h in zip(spec.extents, spec.spacing)])


def random_positive_spinor(rng: np.random.Generator, base, max_mode: int = 3,
                           slack: float = 0.3) -> SpinorPoly:
    """eta = (1 + da, db) with sup|da|, sup|db| <= slack, so rho > 0 pointwise."""
    da = random_trig_poly(rng, base, max_mode, amplitude=slack)
    db = random_trig_poly(rng, base, max_mode, amplitude=slack)
    return SpinorPoly(constant_poly(1.0, base) + da, db)


def random_covector_polys(rng: np.random.Generator, base, max_mode: int = 2,
                          amplitude: float = 0.5) -> list[TrigPoly]:
    """Three real band-limited components for an electromagnetic covector."""
    return [random_trig_poly(rng, base, max_mode, amplitude=amplitude, real=True)
            for _ in range(3)]


def covector_on(polys, spec: LatticeSpec) -> np.ndarray:
    coords = spec.meshgrid()
    return np.stack([p(coords).real for p in polys], axis=-1)


def random_positive_spinor_4d(rng: np.random.Generator, spec: LatticeSpec,
                              max_mode: int = 2, slack: float = 0.3) -> SpinorPoly:
    """Positive-class spinor on a 4D grid, periodic in all axes incl. x3."""
    base = base_for(spec)
    return random_positive_spinor(rng, base, max_mode, slack)


def coframe_bundle_from_spinor(b: SpinorBundle, order: int = 2,
                               backend: str = "stencil") -> CoframeBundle:
    """Coframe route: theta from the pointwise map, dtheta by grid derivative.

    The derivative deliberately goes through the sampled theta grid (not the
    chain rule), which is what makes the coframe route independent of the
    spinor route.
    """
    from .algebra import coframe_map

    theta, rho = coframe_map(b.values)
    if backend == "spectral":
        dtheta = np.stack(
            [spectral_derivative(theta, b.spec, a) for a in range(b.spec.dims)], axis=-3
        )
        return CoframeBundle(b.spec, theta, dtheta, rho)
    return CoframeBundle.from_grid(b.spec, theta, order=order, rho=rho)
