"""Formally self-adjoint first-order operators, their scaling-covariant
Lagrangians, the combined nonlinear Lagrangian, and the reduction lemma
with its worked 1D example.

The domain here is Euclidean R^n (no Lorentzian structure); fields are
C^m-valued columns on a lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    DegenerateDenominator,
    DimensionMismatch,
    ProbeOutsideInterior,
    VanishingU,
)
from .grids import LatticeSpec, _axis_derivative, spectral_derivative

_HERM_TOL = 1e-12
_CROSS_TOL = 1e-12


def _check_hermitian(mat: np.ndarray, what: str) -> None:
    dev = float(np.max(np.abs(mat - np.conj(np.swapaxes(mat, -1, -2)))))
    if dev > _HERM_TOL * max(1.0, float(np.max(np.abs(mat)))):
        raise ValueError(f"{what} is not Hermitian (deviation {dev:.3g})")


@dataclass
class FirstOrderOperator:
    """A = i B^alpha d_alpha + (i/2)(d_alpha B^alpha) + C with Hermitian
    matrix coefficients.

    b has shape (n, m, m) for constant coefficients or (*grid, n, m, m) for
    variable ones; c is (m, m) or (*grid, m, m).  For variable b the
    divergence d_alpha B^alpha must be supplied in db_div (same shape as c);
    constant b has zero divergence automatically.
    """

    spec: LatticeSpec
    b: np.ndarray
    c: np.ndarray
    db_div: np.ndarray | None = None

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=complex)
        self.c = np.asarray(self.c, dtype=complex)
        n = self.spec.dims
        if self.b.shape[-3] != n:
            raise DimensionMismatch(
                f"b has {self.b.shape[-3]} direction slots, grid has {n}")
        m = self.b.shape[-1]
        if self.b.shape[-2] != m or self.c.shape[-2:] != (m, m):
            raise DimensionMismatch("b and c must be square and share mdim")
        _check_hermitian(self.b, "B")
        _check_hermitian(self.c, "C")
        if self.db_div is None:
            if self.b.ndim > 3:
                raise DimensionMismatch(
                    "variable-coefficient b needs an explicit divergence db_div")
            self.db_div = np.zeros((m, m), dtype=complex)
        else:
            self.db_div = np.asarray(self.db_div, dtype=complex)

    @property
    def mdim(self) -> int:
        return self.b.shape[-1]

    @property
    def n(self) -> int:
        return self.spec.dims


def _derivs_of(u: np.ndarray, spec: LatticeSpec, backend: str, order: int) -> np.ndarray:
    if backend == "spectral":
        ds = [spectral_derivative(u, spec, a) for a in range(spec.dims)]
    else:
        ds = [_axis_derivative(u, spec, a, order) for a in range(spec.dims)]
    return np.stack(ds, axis=-2)


def op_apply(op: FirstOrderOperator, u: np.ndarray, du: np.ndarray | None = None,
             backend: str = "stencil", order: int = 4) -> np.ndarray:
    """A u on the grid; u is (*grid, m), du optionally (*grid, n, m)."""
    u = np.asarray(u, dtype=complex)
    if u.shape[-1] != op.mdim:
        raise DimensionMismatch(f"u has {u.shape[-1]} components, operator wants {op.mdim}")
    if du is None:
        du = _derivs_of(u, op.spec, backend, order)
    out = np.einsum("...amk,...ak->...m", np.broadcast_to(
        op.b, u.shape[:-1] + op.b.shape[-3:]), du) * 1j
    out = out + 0.5j * np.einsum("...mk,...k->...m",
                                 np.broadcast_to(op.db_div, u.shape[:-1] + (op.mdim, op.mdim)), u)
    out = out + np.einsum("...mk,...k->...m",
                          np.broadcast_to(op.c, u.shape[:-1] + (op.mdim, op.mdim)), u)
    return out


def first_order_lagrangian(op: FirstOrderOperator, u: np.ndarray,
                           du: np.ndarray | None = None,
                           backend: str = "stencil", order: int = 4) -> np.ndarray:
    """L(u) = Re(u* A u), cross-asserted against its expanded form
    (i/2)[u* B du - (du*) B u] + u* C u."""
    u = np.asarray(u, dtype=complex)
    if du is None:
        du = _derivs_of(u, op.spec, backend, order)
    au = op_apply(op, u, du)
    spelled = np.einsum("...m,...m->...", np.conj(u), au).real
    bu_du = np.einsum("...m,...amk,...ak->...", np.conj(u),
                      np.broadcast_to(op.b, u.shape[:-1] + op.b.shape[-3:]), du)
    expanded = (0.5j * (bu_du - np.conj(bu_du))).real \
        + np.einsum("...m,...mk,...k->...", np.conj(u),
                    np.broadcast_to(op.c, u.shape[:-1] + (op.mdim, op.mdim)), u).real
    dev = float(np.max(np.abs(spelled - expanded)))
    if dev > _CROSS_TOL * max(1.0, float(np.max(np.abs(spelled)))):
        raise AssertionError(f"first_order_lagrangian forms differ by {dev:.3g}")
    return spelled


def combine_densities(lp: np.ndarray, lm: np.ndarray,
                      denom_tol: float = 1e-12) -> np.ndarray:
    """lp lm / (lp - lm); any two scaling-covariant densities may be fed in,
    which is what generates the hierarchy of reducible equations."""
    denom = lp - lm
    scale = max(float(np.max(np.abs(lp))), float(np.max(np.abs(lm))), 1e-300)
    if np.any(np.abs(denom) < denom_tol * scale):
        raise DegenerateDenominator("L_+ - L_- vanishes somewhere on the grid")
    return lp * lm / denom


def combined_lagrangian(op_p: FirstOrderOperator, op_m: FirstOrderOperator,
                        u: np.ndarray, du: np.ndarray | None = None,
                        backend: str = "stencil", order: int = 4,
                        denom_tol: float = 1e-12) -> np.ndarray:
    if du is None:
        du = _derivs_of(np.asarray(u, dtype=complex), op_p.spec, backend, order)
    lp = first_order_lagrangian(op_p, u, du)
    lm = first_order_lagrangian(op_m, u, du)
    return combine_densities(lp, lm, denom_tol)


# ---------------------------------------------------------------------------
# The 1D scalar example: i u' +- u = 0
# ---------------------------------------------------------------------------


def example_operators(spec: LatticeSpec) -> tuple[FirstOrderOperator, FirstOrderOperator]:
    """The scalar pair with B = 1 and C = +-1, so A_+- u = i u' +- u."""
    b = np.ones((1, 1, 1))
    return (FirstOrderOperator(spec, b, np.array([[1.0]])),
            FirstOrderOperator(spec, b, np.array([[-1.0]])))


def example_ode_residual(u: np.ndarray, du: np.ndarray, ddu: np.ndarray) -> np.ndarray:
    """Field equation of the combined density for the scalar example:

    ((ubar u' - u ubar')/(2|u|^2) u)' + ((ubar u')^2 - (u ubar')^2)/(4|u|^4) u + u

    evaluated from supplied first and second derivative values, so it works
    in analytic mode as well as on stencil data.
    """
    u = np.asarray(u, dtype=complex)
    mod2 = np.abs(u) ** 2
    if np.any(mod2 == 0.0):
        raise VanishingU("u vanishes somewhere on the grid")
    num = np.conj(u) * du - u * np.conj(du)
    q = num / (2.0 * mod2)
    # derivative of q by the quotient rule; the u' ubar' cross terms cancel
    num_d = np.conj(u) * ddu - u * np.conj(ddu)
    mod2_d = np.conj(du) * u + np.conj(u) * du
    q_d = num_d / (2.0 * mod2) - q * mod2_d / mod2
    second = (np.conj(u) * du) ** 2 - (u * np.conj(du)) ** 2
    return q_d * u + q * du + second / (4.0 * mod2 ** 2) * u + u


# ---------------------------------------------------------------------------
# Solvable constant-coefficient instances and ODE integration
# ---------------------------------------------------------------------------


def solvable_operator(rng: np.random.Generator, spec: LatticeSpec, mdim: int,
                      modes=None) -> tuple[FirstOrderOperator, np.ndarray]:
    """Random constant-coefficient 1D operator whose solutions are exact
    integer Fourier modes of the periodic grid.

    With B = W W* and C = W diag(k) W* (k integers), B^{-1} C has spectrum k,
    so solutions of A u = 0 are band-limited and sampled exactly.  Returns
    the operator and the integer spectrum.
    """
    if spec.dims != 1:
        raise DimensionMismatch("solvable instances are one-dimensional")
    w = rng.normal(size=(mdim, mdim)) + 1j * rng.normal(size=(mdim, mdim))
    w += 2.0 * np.eye(mdim)  # keep it comfortably invertible
    if modes is None:
        modes = rng.integers(-3, 4, size=mdim)
    modes = np.asarray(modes)
    b = (w @ w.conj().T)[None, :, :]
    c = w @ np.diag(modes.astype(float)) @ w.conj().T
    return FirstOrderOperator(spec, b, c), modes


def integrate_solution(op: FirstOrderOperator, u0: np.ndarray,
                       rtol: float = 1e-12, atol: float = 1e-12) -> np.ndarray:
    """Solve A u = 0 as the linear ODE u' = i B^{-1} C u along the 1D grid
    with a high-order explicit integrator.  Requires invertible constant B.
    """
    from scipy.integrate import solve_ivp

    if op.spec.dims != 1:
        raise DimensionMismatch("ODE integration needs a one-dimensional grid")
    if op.b.ndim != 3:
        raise DimensionMismatch("ODE integration needs constant coefficients")
    bmat = op.b[0]
    cond = np.linalg.cond(bmat)
    if not np.isfinite(cond) or cond > 1e12:
        raise DegenerateDenominator("B is singular or near-singular")
    gen = 1j * np.linalg.solve(bmat, op.c)
    x = op.spec.axis_coords(0)
    sol = solve_ivp(lambda t, y: gen @ y, (x[0], x[-1]), np.asarray(u0, complex),
                    t_eval=x, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    return sol.y.T


def solution_derivs(op: FirstOrderOperator, u: np.ndarray) -> np.ndarray:
    """Exact derivative bundle of a solution of A u = 0 (constant B):
    u' = i B^{-1} C u, applied pointwise."""
    gen = 1j * np.linalg.solve(op.b[0], op.c)
    return np.einsum("mk,...k->...m", gen, u)[..., None, :]


# ---------------------------------------------------------------------------
# Lemma check: variational derivative of the combined action vs A_+- u
# ---------------------------------------------------------------------------


class LemmaVerdict(Enum):
    SOLVES_A_PLUS = "SolvesAPlus"
    SOLVES_A_MINUS = "SolvesAMinus"
    SOLVES_NEITHER = "SolvesNeither"
    INCONSISTENT = "Inconsistent"


@dataclass
class LemmaResult:
    verdict: LemmaVerdict
    gradient_norm: float
    a_plus_residual: float
    a_minus_residual: float
    scale: float


def _combined_action(op_p, op_m, u, backend, order, denom_tol) -> float:
    L = combined_lagrangian(op_p, op_m, u, backend=backend, order=order,
                            denom_tol=denom_tol)
    return math.fsum(L.ravel().tolist()) * op_p.spec.cell_volume


def combined_action_gradient(op_p: FirstOrderOperator, op_m: FirstOrderOperator,
                             u: np.ndarray, probes, step: float = 1e-6,
                             backend: str = "spectral", order: int = 4,
                             denom_tol: float = 1e-12) -> np.ndarray:
    """Two-sided difference of the combined action w.r.t. Re/Im of each
    component at the probe points; (len(probes), mdim, 2)."""
    spec = op_p.spec
    u = np.asarray(u, dtype=complex)
    out = np.empty((len(probes), op_p.mdim, 2))
    margin = 2
    for i, p in enumerate(probes):
        p = tuple(int(x) for x in np.atleast_1d(p))
        for ax in range(spec.dims):
            if not spec.periodic[ax] and not margin <= p[ax] < spec.extents[ax] - margin:
                raise ProbeOutsideInterior(f"probe {p} within margin {margin} of a boundary")
        for comp in range(op_p.mdim):
            for k, delta in enumerate((1.0, 1.0j)):
                vals = []
                for sign in (1.0, -1.0):
                    v = u.copy()
                    v[p + (comp,)] += sign * step * delta
                    vals.append(_combined_action(op_p, op_m, v, backend, order, denom_tol))
                out[i, comp, k] = (vals[0] - vals[1]) / (2.0 * step)
    return out


def lemma_check(op_p: FirstOrderOperator, op_m: FirstOrderOperator, u: np.ndarray,
                du: np.ndarray | None = None, tol: float = 1e-6,
                probes=None, backend: str = "spectral", order: int = 4) -> LemmaResult:
    """Compare near-vanishing of the combined-action variational derivative
    with the two linear residuals.  Inconsistent must never occur."""
    spec = op_p.spec
    u = np.asarray(u, dtype=complex)
    if probes is None:
        rng = np.random.default_rng(0)
        idx = rng.integers(0, np.array(spec.extents), size=(8, spec.dims))
        probes = [tuple(row) for row in idx]
    umax = float(np.max(np.abs(u)))
    scale = max(umax, umax ** 2, 1.0)
    grad = combined_action_gradient(op_p, op_m, u, probes, backend=backend, order=order)
    gnorm = float(np.max(np.abs(grad)))
    ap = float(np.max(np.abs(op_apply(op_p, u, du, backend=backend, order=order))))
    am = float(np.max(np.abs(op_apply(op_m, u, du, backend=backend, order=order))))
    g_zero = gnorm <= tol * scale
    op_scale = scale * (1.0 + float(np.max(np.abs(op_p.c))) + float(np.max(np.abs(op_m.c))))
    ap_zero = ap <= tol * op_scale
    am_zero = am <= tol * op_scale
    if g_zero and ap_zero:
        verdict = LemmaVerdict.SOLVES_A_PLUS
    elif g_zero and am_zero:
        verdict = LemmaVerdict.SOLVES_A_MINUS
    elif not g_zero and not (ap_zero or am_zero):
        verdict = LemmaVerdict.SOLVES_NEITHER
    else:
        verdict = LemmaVerdict.INCONSISTENT
    return LemmaResult(verdict, gnorm, ap, am, scale)
