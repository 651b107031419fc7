"""Lattice containers and the discrete exterior calculus.

Fields live on uniform grids over (x0, x1, x2[, x3]).  Antisymmetric
fields store independent components only, in lexicographic order of the
index tuples returned by :func:`form_components`.  The wedge convention is
(P ^ Q) = ((p+q)!/(p! q!)) Alt(P (x) Q), i.e. the determinant convention,
so that d(dx^0) ^ dx^1 etc. have unit components and
(1/3) theta ^ d theta = Alt(theta (x) d theta) exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .algebra import METRIC3, METRIC4
from .errors import (
    AxisOutOfRange,
    GridTooSmall,
    IoError,
    RankMismatch,
    RankOverflow,
    UnsupportedRank,
)

KINDS = ("scalar", "spinor", "covector", "2-form", "3-form", "coframe")


@dataclass(frozen=True)
class LatticeSpec:
    """Uniform grid over 3 or 4 coordinates."""

    extents: tuple[int, ...]
    spacing: tuple[float, ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        if not 1 <= len(self.extents) <= 4:
            raise ValueError("only 1D through 4D grids are supported")
        if len(self.spacing) != self.dims or len(self.periodic) != self.dims:
            raise ValueError("extents, spacing and periodic must have equal length")
        if any(n <= 0 for n in self.extents) or any(h <= 0 for h in self.spacing):
            raise ValueError("extents and spacing must be positive")

    @property
    def dims(self) -> int:
        return len(self.extents)

    @property
    def metric(self) -> np.ndarray:
        """Lorentzian metric; only the 3D and 4D model grids carry one."""
        if self.dims == 3:
            return METRIC3
        if self.dims == 4:
            return METRIC4
        raise UnsupportedRank("no Lorentzian metric on a Euclidean domain grid")

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis_coords(self, axis: int) -> np.ndarray:
        return np.arange(self.extents[axis]) * self.spacing[axis]

    def meshgrid(self) -> list[np.ndarray]:
        return np.meshgrid(*(self.axis_coords(a) for a in range(self.dims)), indexing="ij")


def periodic_spec(n, h, dims: int = 3) -> LatticeSpec:
    """Fully periodic cubic-ish grid; n and h may be scalars or sequences."""
    ns = tuple(int(x) for x in (n if np.iterable(n) else [n] * dims))
    hs = tuple(float(x) for x in (h if np.iterable(h) else [h] * dims))
    return LatticeSpec(ns, hs, (True,) * len(ns))


def form_components(dims: int, rank: int) -> list[tuple[int, ...]]:
    """Lexicographic independent index tuples of an antisymmetric rank-r field."""
    return list(combinations(range(dims), rank))


def _perm_sign(perm) -> int:
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


@dataclass
class LatticeField:
    """Dense per-point values of one field on a lattice.

    Shapes by kind: scalar (*n,), spinor (*n, 2) complex, covector (*n, d),
    2-form / 3-form (*n, ncomp) with component order from form_components,
    coframe (*n, 3, 3).
    """

    spec: LatticeSpec
    kind: str
    values: np.ndarray
    boundary_margin: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        self.values = np.asarray(self.values)

    @property
    def rank(self) -> int:
        return {"scalar": 0, "covector": 1, "2-form": 2, "3-form": 3}[self.kind]

    @property
    def components(self) -> list[tuple[int, ...]]:
        return form_components(self.spec.dims, self.rank)


def form_field(spec: LatticeSpec, rank: int, values) -> LatticeField:
    kind = {0: "scalar", 1: "covector", 2: "2-form", 3: "3-form"}[rank]
    return LatticeField(spec, kind, values)


_STENCILS = {
    2: ([1], [0.5]),
    4: ([1, 2], [2.0 / 3.0, -1.0 / 12.0]),
}


def _axis_derivative(values: np.ndarray, spec: LatticeSpec, axis: int, order: int) -> np.ndarray:
    offsets, weights = _STENCILS[order]
    h = spec.spacing[axis]
    out = np.zeros_like(values, dtype=np.promote_types(values.dtype, float))
    for k, w in zip(offsets, weights):
        out += w * (np.roll(values, -k, axis=axis) - np.roll(values, k, axis=axis)) / h
    if not spec.periodic[axis]:
        # one-sided edges at matching order would change the truncation
        # analysis; interior-only contract, so edges get first-order values
        margin = max(offsets)
        sl_lo = [slice(None)] * values.ndim
        sl_hi = [slice(None)] * values.ndim
        for k in range(margin):
            sl_lo[axis], sl_hi[axis] = k, values.shape[axis] - 1 - k
            lo, hi = tuple(sl_lo), tuple(sl_hi)
            out[lo] = np.take(values, k + 1, axis) - np.take(values, k, axis)
            out[lo] /= h
            out[hi] = np.take(values, -1 - k, axis) - np.take(values, -2 - k, axis)
            out[hi] /= h
    return out


def partial_derivative(f: LatticeField, axis: int, order: int = 2) -> LatticeField:
    """Central-difference partial derivative along one axis.

    Periodic axes wrap; non-periodic axes are accurate in the interior only
    and the returned field carries the boundary margin.
    """
    if not 0 <= axis < f.spec.dims:
        raise AxisOutOfRange(f"axis {axis} outside 0..{f.spec.dims - 1}")
    if order not in _STENCILS:
        raise ValueError("order must be 2 or 4")
    need = 5 if order == 4 else 3
    if f.spec.extents[axis] < need:
        raise GridTooSmall(f"axis {axis} has {f.spec.extents[axis]} < {need} points")
    vals = _axis_derivative(f.values, f.spec, axis, order)
    margin = f.boundary_margin if f.spec.periodic[axis] else max(
        f.boundary_margin + (order // 2), f.boundary_margin
    )
    return replace(f, values=vals, boundary_margin=margin)


def spectral_derivative(values: np.ndarray, spec: LatticeSpec, axis: int) -> np.ndarray:
    """FFT derivative along a periodic axis; exact on resolved Fourier modes."""
    if not spec.periodic[axis]:
        raise ValueError("spectral derivative needs a periodic axis")
    n = spec.extents[axis]
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=spec.spacing[axis])
    shape = [1] * values.ndim
    shape[axis] = n
    out = np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(values, axis=axis), axis=axis)
    return out if np.iscomplexobj(values) else out.real


def _raise_indices(field: LatticeField) -> np.ndarray:
    g = field.spec.metric
    factors = np.array([np.prod(g[list(c)]) for c in field.components])
    return field.values * factors


def lorentz_dot(P: LatticeField, Q: LatticeField) -> LatticeField:
    """Pointwise (1/r!) P.Q contraction with the Lorentzian metric; signed."""
    if P.rank != Q.rank or P.spec.dims != Q.spec.dims:
        raise RankMismatch("operands must share rank and dimension")
    if P.rank == 0:
        vals = P.values * Q.values
    else:
        vals = np.einsum("...c,...c->...", _raise_indices(P), Q.values)
    return LatticeField(P.spec, "scalar", vals.real if not np.iscomplexobj(vals) else vals)


def norm_squared(P: LatticeField) -> np.ndarray:
    return lorentz_dot(P, P).values


def hodge_dual(R: LatticeField) -> LatticeField:
    """Hodge star on a 3D lattice, epsilon_{012} = +1, indices raised with g."""
    if R.spec.dims != 3:
        raise UnsupportedRank("hodge_dual is defined on 3D grids only")
    r = R.rank
    up = _raise_indices(R) if r > 0 else R.values[..., None]
    comps_in = form_components(3, r) if r > 0 else [()]
    comps_out = form_components(3, 3 - r)
    out = np.zeros(R.values.shape[: R.values.ndim - (1 if r > 0 else 0)] + (len(comps_out),))
    out = out.astype(up.dtype)
    for i, ci in enumerate(comps_in):
        rest = tuple(a for a in range(3) if a not in ci)
        j = comps_out.index(rest)
        out[..., j] += _perm_sign(ci + rest) * up[..., i]
    if 3 - r == 0:
        return LatticeField(R.spec, "scalar", out[..., 0])
    return form_field(R.spec, 3 - r, out)


def wedge(P: LatticeField, Q: LatticeField) -> LatticeField:
    """Wedge product under the determinant convention."""
    d = P.spec.dims
    p, q = P.rank, Q.rank
    if p + q > d:
        raise RankOverflow(f"rank {p}+{q} exceeds dimension {d}")
    comps_p = {c: i for i, c in enumerate(P.components)}
    comps_q = {c: i for i, c in enumerate(Q.components)}
    comps_out = form_components(d, p + q)
    pv = P.values if p > 0 else P.values[..., None]
    qv = Q.values if q > 0 else Q.values[..., None]
    out = np.zeros(pv.shape[:-1] + (len(comps_out),), dtype=np.promote_types(pv.dtype, qv.dtype))
    for j, c in enumerate(comps_out):
        for sub in combinations(c, p):
            rest = tuple(a for a in c if a not in sub)
            # sign of the shuffle (sub, rest) relative to sorted c
            order = [c.index(a) for a in sub + rest]
            out[..., j] += _perm_sign(order) * pv[..., comps_p.get(sub, 0)] * qv[..., comps_q.get(rest, 0)]
    if p + q == 0:
        return LatticeField(P.spec, "scalar", out[..., 0])
    return form_field(P.spec, p + q, out)


def exterior_derivative(P: LatticeField, order: int = 2) -> LatticeField:
    """Discrete d on an antisymmetric field, via partial_derivative."""
    d = P.spec.dims
    r = P.rank
    if r + 1 > d:
        raise RankOverflow("exterior derivative of a top form")
    comps_in = {c: i for i, c in enumerate(P.components)} if r > 0 else {(): 0}
    comps_out = form_components(d, r + 1)
    pv = P.values if r > 0 else P.values[..., None]
    derivs = [
        _axis_derivative(pv, P.spec, a, order) for a in range(d)
    ]
    out = np.zeros(pv.shape[:-1] + (len(comps_out),), dtype=np.promote_types(pv.dtype, float))
    for j, c in enumerate(comps_out):
        for pos, a in enumerate(c):
            rest = tuple(b for b in c if b != a)
            out[..., j] += (-1) ** pos * derivs[a][..., comps_in[rest]]
    margin = P.boundary_margin + (0 if all(P.spec.periodic) else order // 2)
    f = form_field(P.spec, r + 1, out)
    f.boundary_margin = margin
    return f


@dataclass
class ModelParams:
    """Mass, sign pair and electromagnetic covector.

    A may be a constant length-3 covector or a grid field of shape (*n, 3);
    it is stored broadcastable against the grid.
    """

    m: float
    r: int = 1
    s: int = 1
    A: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if self.r not in (-1, 1) or self.s not in (-1, 1):
            raise ValueError("r and s must be +-1")
        self.A = np.asarray(self.A, dtype=float)

    def a_on(self, spec: LatticeSpec) -> np.ndarray:
        """A as an array broadcastable to (*extents3, 3)."""
        if self.A.ndim == 1:
            return self.A
        return self.A


# ---------------------------------------------------------------------------
# Field bundles: values plus per-axis first derivatives.  Analytic
# constructors fill the derivative slots in closed form, stencil/spectral
# constructors differentiate the sampled values.
# ---------------------------------------------------------------------------


@dataclass
class SpinorBundle:
    """Spinor values (*n, 2) with derivatives (*n, dims, 2)."""

    spec: LatticeSpec
    values: np.ndarray
    derivs: np.ndarray
    x3_independent_bilinears: bool = False

    @property
    def rho(self) -> np.ndarray:
        return np.abs(self.values[..., 0]) ** 2 - np.abs(self.values[..., 1]) ** 2

    @classmethod
    def from_grid(cls, spec: LatticeSpec, values: np.ndarray, order: int = 2,
                  backend: str = "stencil") -> "SpinorBundle":
        if backend == "spectral":
            derivs = np.stack(
                [spectral_derivative(values, spec, a) for a in range(spec.dims)], axis=-2
            )
        else:
            derivs = np.stack(
                [_axis_derivative(values, spec, a, order) for a in range(spec.dims)], axis=-2
            )
        return cls(spec, values, derivs)


@dataclass
class CoframeBundle:
    """Coframe values (*n, 3, 3) with derivatives (*n, dims, 3, 3)."""

    spec: LatticeSpec
    theta: np.ndarray
    dtheta: np.ndarray
    rho: np.ndarray | None = None

    @classmethod
    def from_grid(cls, spec: LatticeSpec, theta: np.ndarray, order: int = 2,
                  rho=None) -> "CoframeBundle":
        dtheta = np.stack(
            [_axis_derivative(theta, spec, a, order) for a in range(spec.dims)], axis=-3
        )
        return cls(spec, theta, dtheta, rho)


# ---------------------------------------------------------------------------
# Snapshot file format: magic, version, dims, kind code, extents, spacing,
# periodic flags, then row-major little-endian float64 payload (complex as
# re,im pairs).
# ---------------------------------------------------------------------------

_MAGIC = b"SPFR"
_KIND_CODES = {k: i for i, k in enumerate(KINDS)}


def save_field(f: LatticeField, path) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<BBB", 1, f.spec.dims, _KIND_CODES[f.kind]))
            fh.write(struct.pack(f"<{f.spec.dims}q", *f.spec.extents))
            fh.write(struct.pack(f"<{f.spec.dims}d", *f.spec.spacing))
            fh.write(struct.pack(f"<{f.spec.dims}B", *(int(p) for p in f.spec.periodic)))
            fh.write(struct.pack("<B", int(np.iscomplexobj(f.values))))
            payload = np.ascontiguousarray(f.values)
            if np.iscomplexobj(payload):
                payload = payload.astype(np.complex128).view(np.float64)
            else:
                payload = payload.astype(np.float64)
            fh.write(payload.astype("<f8").tobytes())
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_field(path) -> LatticeField:
    try:
        with open(path, "rb") as fh:
            if fh.read(4) != _MAGIC:
                raise IoError("bad magic")
            _, dims, kcode = struct.unpack("<BBB", fh.read(3))
            extents = struct.unpack(f"<{dims}q", fh.read(8 * dims))
            spacing = struct.unpack(f"<{dims}d", fh.read(8 * dims))
            periodic = tuple(bool(b) for b in struct.unpack(f"<{dims}B", fh.read(dims)))
            (is_complex,) = struct.unpack("<B", fh.read(1))
            data = np.frombuffer(fh.read(), dtype="<f8")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    spec = LatticeSpec(extents, spacing, periodic)
    kind = KINDS[kcode]
    if is_complex:
        data = data.view(np.complex128)
    tail = {
        "scalar": (),
        "spinor": (2,),
        "covector": (dims,),
        "2-form": (len(form_components(dims, 2)),),
        "3-form": (len(form_components(dims, 3)),),
        "coframe": (3, 3),
    }[kind]
    return LatticeField(spec, kind, data.reshape(extents + tail))
