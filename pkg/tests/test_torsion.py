import numpy as np
import pytest

from spinframe.errors import NonPositiveDensity
from spinframe.grids import ModelParams, hodge_dual, periodic_spec
from spinframe.plane_waves import PlaneWaveLabel, plane_wave_spinor
from spinframe.sampling import (
    base_for,
    coframe_bundle_from_spinor,
    covector_on,
    random_covector_polys,
    random_positive_spinor,
    random_positive_spinor_4d,
)
from spinframe.torsion import (
    alt3,
    axial_torsion_coframe,
    axial_torsion_spinor,
    kk_decomposition_check,
    reduced_axial_torsion,
    reduced_quantities,
    spinor_vs_coframe_residual,
    torsion_tensor,
)


def test_constant_spinor_has_no_torsion():
    spec = periodic_spec(8, 2.0 * np.pi / 8, 3)
    from spinframe.sampling import SpinorPoly, constant_poly
    base = base_for(spec)
    b = SpinorPoly(constant_poly(1.0, base), constant_poly(0.0, base)).bundle(spec)
    assert np.allclose(axial_torsion_spinor(b), 0.0)
    t = reduced_axial_torsion(b, ModelParams(m=1.0), 1)
    assert np.allclose(t, 0.0)


def test_two_routes_agree_analytically():
    spec = periodic_spec(16, 2.0 * np.pi / 16, 3)
    for r in (1, -1):
        for s in (1, -1):
            b = plane_wave_spinor(PlaneWaveLabel(r, s, 1.0, 0.0), spec)
            cb = coframe_bundle_from_spinor(b, backend="spectral")
            assert spinor_vs_coframe_residual(b, cb) < 1e-10


def test_two_routes_residual_shrinks_second_order():
    rng = np.random.default_rng(7)
    sp = None
    rms = []
    for n in (32, 64):
        spec = periodic_spec(n, 2.0 * np.pi / n, 3)
        if sp is None:
            sp = random_positive_spinor(rng, base_for(spec), max_mode=2)
        b = sp.bundle(spec)
        cb = coframe_bundle_from_spinor(b)
        rms.append(spinor_vs_coframe_residual(b, cb, norm="rms"))
    ratio = rms[0] / rms[1]
    assert 3.7 <= ratio <= 4.3


def test_wedge_route_equals_antisymmetrized_tensor():
    rng = np.random.default_rng(3)
    spec = periodic_spec(12, 2.0 * np.pi / 12, 3)
    sp = random_positive_spinor(rng, base_for(spec), max_mode=2)
    cb = coframe_bundle_from_spinor(sp.bundle(spec))
    via_wedge = axial_torsion_coframe(cb, check_tol=1e-8).values[..., 0]
    via_tensor = alt3(torsion_tensor(cb))[..., 0]
    assert np.max(np.abs(via_wedge - via_tensor)) < 1e-13


def test_reduced_torsion_requires_positive_class():
    spec = periodic_spec(8, 2.0 * np.pi / 8, 3)
    from spinframe.sampling import SpinorPoly, constant_poly
    base = base_for(spec)
    b = SpinorPoly(constant_poly(0.0, base), constant_poly(1.0, base)).bundle(spec)
    with pytest.raises(NonPositiveDensity):
        reduced_axial_torsion(b, ModelParams(m=1.0), 1)


def test_reduced_quantities_plane_wave():
    # eta = (1,0) e^{-i m x0}: t = +4m/3 (so the s=+1 density vanishes) and
    # u = (4m/3, 0, 0) for r = +1
    spec = periodic_spec(8, 2.0 * np.pi / 8, 3)
    m = 1.0
    b = plane_wave_spinor(PlaneWaveLabel(1, 1, m, 0.0), spec)
    q = reduced_quantities(b, ModelParams(m=m), 1)
    assert np.allclose(q.t, 4.0 * m / 3.0)
    assert np.allclose(q.u[..., 0], 4.0 * m / 3.0)
    assert np.allclose(q.u[..., 1:], 0.0)
    assert np.allclose(q.rho, 1.0)


def test_kk_decomposition_analytic():
    spec = periodic_spec(8, 2.0 * np.pi / 8, 4)
    for seed in range(10):
        rng = np.random.default_rng(seed)
        b = random_positive_spinor_4d(rng, spec, max_mode=2).bundle(spec)
        rep = kk_decomposition_check(b, ModelParams(m=1.0), tol=1e-10,
                                     coframe_derivs="chain")
        assert rep.passed
        assert rep.max_residual < 1e-10


def test_kk_decomposition_stencil_is_second_order():
    rng = np.random.default_rng(11)
    residuals = []
    sp = None
    for n in (16, 32):
        spec = periodic_spec(n, 2.0 * np.pi / n, 4)
        if sp is None:
            sp = random_positive_spinor_4d(rng, spec, max_mode=1)
        b = sp.bundle(spec)
        rep = kk_decomposition_check(b, ModelParams(m=1.0), coframe_derivs="grid")
        residuals.append(rep.max_residual)
    ratio = residuals[0] / residuals[1]
    assert 2.5 <= ratio <= 5.5


def test_reduced_fields_are_x3_independent():
    # xi = eta e^{-i m x3}: t, u, rho computed from the 4D field at two x3
    # slices coincide with the reduced formulas on eta
    n = 8
    spec4 = periodic_spec((n, n, n, 8), (2.0 * np.pi / n,) * 3 + (np.pi / 8,), 4)
    spec3 = periodic_spec(n, 2.0 * np.pi / n, 3)
    rng = np.random.default_rng(5)
    from spinframe.sampling import SpinorPoly, TrigPoly
    sp3 = random_positive_spinor(rng, base_for(spec3), max_mode=2)
    base4 = base_for(spec4)
    k3 = 1.0 / base4[3]
    phase = TrigPoly(np.array([[0.0, 0.0, 0.0, -k3]]), np.array([1.0 + 0j]), base4)
    def lift(q):
        f = np.hstack([q.freqs, np.zeros((len(q.freqs), 1))])
        out = TrigPoly(f, q.coeffs, base4)
        return TrigPoly(out.freqs + phase.freqs, out.coeffs * phase.coeffs[0], base4)
    sp4 = SpinorPoly(lift(sp3.c1), lift(sp3.c2))
    b4 = sp4.bundle(spec4)
    t4 = axial_torsion_spinor(b4)
    b3 = sp3.bundle(spec3)
    t3 = reduced_axial_torsion(b3, ModelParams(m=1.0), 1)
    assert np.max(np.abs(t4 - t3[..., None])) < 1e-12
