import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinframe.algebra import (
    EPSILON,
    METRIC3,
    O3,
    SIGMA_LOWER,
    SIGMA_UPPER,
    CoframeDensity,
    Spinor2,
    bijection_to_positive,
    coframe_map,
    coframe_of_spinor,
    density_of_spinor,
    verify_coframe,
)
from spinframe.errors import NonPositiveDensity, WrongDensitySign


def test_pauli_matrices_pinned():
    assert np.array_equal(SIGMA_LOWER[0], np.eye(2))
    assert np.array_equal(SIGMA_LOWER[1], np.array([[0, 1], [1, 0]]))
    assert np.array_equal(SIGMA_LOWER[2], np.array([[0, -1j], [1j, 0]]))
    assert np.array_equal(SIGMA_LOWER[3], np.diag([1, -1]))
    # raising with diag(-1,1,1,1): only the temporal one flips
    assert np.array_equal(SIGMA_UPPER[0], -np.eye(2))
    for k in (1, 2, 3):
        assert np.array_equal(SIGMA_UPPER[k], SIGMA_LOWER[k])
    assert np.array_equal(EPSILON, np.array([[0, -1], [1, 0]]))


def test_density_values():
    assert density_of_spinor(np.array([1.0, 0.0])) == 1.0
    assert density_of_spinor(np.array([0.0, 1.0])) == -1.0
    assert density_of_spinor(np.array([2.0, 1.0])) == 3.0


def test_unit_spinor_gives_identity_coframe():
    theta, rho = coframe_map(np.array([1.0 + 0j, 0.0]))
    assert rho == pytest.approx(1.0)
    assert np.allclose(theta, np.eye(3), atol=1e-15)


def test_coframe_scale_invariance():
    # theta depends only on the projective class: xi and c*xi give the same
    # coframe for real c
    xi = np.array([1.3 + 0.4j, 0.2 - 0.1j])
    t1, r1 = coframe_map(xi)
    t2, r2 = coframe_map(2.5 * xi)
    assert np.allclose(t1, t2, atol=1e-14)
    assert r2 == pytest.approx(2.5 ** 2 * r1)


def test_coframe_of_spinor_rejects_negative_class():
    with pytest.raises(NonPositiveDensity):
        coframe_of_spinor(Spinor2(0.1 + 0j, 1.0 + 0j))


def test_verify_coframe_on_random_batch():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(500, 2)) + 1j * rng.normal(size=(500, 2))
    a[:, 0] += np.sign(a[:, 0].real + 1e-300) * (np.abs(a[:, 1]) + 0.1)
    theta, rho = coframe_map(a)
    rep = verify_coframe(CoframeDensity(theta, rho), tol=1e-12)
    assert rep.passed
    assert rep.max_orthonormality_deviation < 1e-12
    assert rep.det_deviation < 1e-12


def test_verify_coframe_flags_bad_input():
    theta = np.eye(3) * 1.01
    rep = verify_coframe(CoframeDensity(theta, 1.0), tol=1e-12)
    assert not rep.passed


def test_bijection_flips_density_and_involutes():
    xi = np.array([0.3 + 0.1j, 1.2 - 0.5j])
    rho = density_of_spinor(xi)
    assert rho < 0
    out = bijection_to_positive(xi)
    assert density_of_spinor(out) == pytest.approx(-rho)
    # applying the same map again returns the original spinor
    back = np.stack([np.conj(out[..., 1]), np.conj(out[..., 0])], axis=-1)
    assert np.allclose(back, xi)


def test_bijection_rejects_positive_class():
    with pytest.raises(WrongDensitySign):
        bijection_to_positive(np.array([1.0 + 0j, 0.0]))


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_coframe_constraints_property(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=2) + 1j * rng.normal(size=2)
    a[0] += np.sign(a[0].real + 1e-300) * (abs(a[1]) + 0.1)
    theta, rho = coframe_map(a)
    gram = np.einsum("ja,j,jb->ab", theta, O3, theta)
    assert np.allclose(gram, np.diag(METRIC3), atol=1e-12)
    assert np.linalg.det(theta) == pytest.approx(1.0, abs=1e-12)
    assert theta[0, 0] > 0
    assert rho > 0
