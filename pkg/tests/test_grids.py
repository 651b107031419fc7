import numpy as np
import pytest

from spinframe.errors import AxisOutOfRange, RankMismatch, RankOverflow, UnsupportedRank
from spinframe.grids import (
    LatticeField,
    LatticeSpec,
    exterior_derivative,
    form_components,
    form_field,
    hodge_dual,
    load_field,
    lorentz_dot,
    norm_squared,
    partial_derivative,
    periodic_spec,
    save_field,
    spectral_derivative,
    wedge,
)


@pytest.fixture
def spec3():
    return periodic_spec(16, 2.0 * np.pi / 16, 3)


def _coords(spec):
    return spec.meshgrid()


def test_form_components_order():
    assert form_components(3, 2) == [(0, 1), (0, 2), (1, 2)]
    assert form_components(4, 3) == [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]


def test_stencil_derivative_orders(spec3):
    x = _coords(spec3)
    f = form_field(spec3, 0, np.sin(2.0 * x[1]))
    exact = 2.0 * np.cos(2.0 * x[1])
    e2 = np.max(np.abs(partial_derivative(f, 1, order=2).values - exact))
    e4 = np.max(np.abs(partial_derivative(f, 1, order=4).values - exact))
    # second-order truncation bound k^3 h^2 / 6
    h = spec3.spacing[1]
    assert e2 <= 8.0 * h ** 2 / 6.0 * 1.0001
    assert e4 < e2 / 3.0


def test_spectral_derivative_exact_on_modes(spec3):
    x = _coords(spec3)
    f = np.exp(1j * (2 * x[0] - 3 * x[2]))
    d = spectral_derivative(f, spec3, 2)
    assert np.max(np.abs(d - (-3j) * f)) < 1e-12


def test_partial_derivative_rejects_bad_axis(spec3):
    f = form_field(spec3, 0, np.zeros(spec3.extents))
    with pytest.raises(AxisOutOfRange):
        partial_derivative(f, 3)


def test_lorentz_dot_signature(spec3):
    shape = spec3.extents
    for axis, sign in ((0, -1.0), (1, 1.0), (2, 1.0)):
        v = np.zeros(shape + (3,))
        v[..., axis] = 1.0
        u = form_field(spec3, 1, v)
        assert np.allclose(lorentz_dot(u, u).values, sign)


def test_lorentz_dot_rank_mismatch(spec3):
    u = form_field(spec3, 1, np.zeros(spec3.extents + (3,)))
    w = form_field(spec3, 2, np.zeros(spec3.extents + (3,)))
    with pytest.raises(RankMismatch):
        lorentz_dot(u, w)


def test_hodge_of_volume_form(spec3):
    # T_{012} = 1 maps to the scalar -1 (one index raised across the metric)
    t = form_field(spec3, 3, np.ones(spec3.extents + (1,)))
    assert np.allclose(hodge_dual(t).values, -1.0)


@pytest.mark.parametrize("rank", [0, 1, 2, 3])
def test_double_hodge_sign(spec3, rank):
    # ** = (-1)^{r(3-r)} sign(det g) = -(-1)^{r(3-r)} in signature -++
    ncomp = len(form_components(3, rank))
    rng = np.random.default_rng(rank)
    vals = rng.normal(size=spec3.extents + (ncomp,))
    if rank == 0:
        vals = vals[..., 0]
    f = form_field(spec3, rank, vals)
    twice = hodge_dual(hodge_dual(f))
    sign = -((-1.0) ** (rank * (3 - rank)))
    assert np.allclose(twice.values, sign * f.values, atol=1e-13)


def test_hodge_unsupported_in_4d():
    spec4 = periodic_spec(4, 1.0, 4)
    f = form_field(spec4, 2, np.zeros(spec4.extents + (6,)))
    with pytest.raises(UnsupportedRank):
        hodge_dual(f)


def test_wedge_basis_and_overflow(spec3):
    e = {}
    for axis in range(3):
        v = np.zeros(spec3.extents + (3,))
        v[..., axis] = 1.0
        e[axis] = form_field(spec3, 1, v)
    w01 = wedge(e[0], e[1])
    assert np.allclose(w01.values[..., 0], 1.0)  # (dx0 ^ dx1)_{01}
    assert np.allclose(w01.values[..., 1:], 0.0)
    vol = wedge(w01, e[2])
    assert np.allclose(vol.values[..., 0], 1.0)
    with pytest.raises(RankOverflow):
        wedge(vol, e[0])


def test_wedge_antisymmetry(spec3):
    rng = np.random.default_rng(1)
    u = form_field(spec3, 1, rng.normal(size=spec3.extents + (3,)))
    v = form_field(spec3, 1, rng.normal(size=spec3.extents + (3,)))
    assert np.allclose(wedge(u, v).values, -wedge(v, u).values)


def test_exterior_derivative_nilpotent(spec3):
    x = _coords(spec3)
    f = form_field(spec3, 0, np.sin(x[0]) * np.cos(2 * x[1]) + np.sin(x[2]))
    ddf = exterior_derivative(exterior_derivative(f))
    assert np.max(np.abs(ddf.values)) < 1e-12


def test_snapshot_round_trip(tmp_path, spec3):
    rng = np.random.default_rng(2)
    f = form_field(spec3, 2, rng.normal(size=spec3.extents + (3,)))
    path = tmp_path / "field.spfr"
    save_field(f, path)
    g = load_field(path)
    assert g.kind == f.kind
    assert g.spec == f.spec
    assert np.array_equal(g.values, f.values)


def test_snapshot_round_trip_complex(tmp_path, spec3):
    rng = np.random.default_rng(3)
    vals = rng.normal(size=spec3.extents + (2,)) + 1j * rng.normal(size=spec3.extents + (2,))
    f = LatticeField(spec3, "spinor", vals)
    path = tmp_path / "spinor.spfr"
    save_field(f, path)
    g = load_field(path)
    assert np.array_equal(g.values, vals)
