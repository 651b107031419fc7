import numpy as np
import pytest

from spinframe.errors import InvalidProbeField, WrongDensitySign
from spinframe.grids import periodic_spec
from spinframe.plane_waves import (
    Classification,
    PlaneWaveLabel,
    boosted_amplitude,
    boosted_wave,
    classify,
    coframe_rotation_angle,
    dispersion_matrix,
    grid_mode_momenta,
    measured_rotation_rate,
    plane_wave_spinor,
    symbol_matrix,
    table_of_states,
)


def test_label_validation():
    with pytest.raises(ValueError):
        PlaneWaveLabel(0, 1)
    with pytest.raises(ValueError):
        PlaneWaveLabel(1, 1, 1.0, 1.0)   # A0 must be below m
    with pytest.raises(ValueError):
        PlaneWaveLabel(1, 1, 1.0, -0.1)


def test_energy_values_at_quarter_potential():
    vals = {(r, s): PlaneWaveLabel(r, s, 1.0, 0.25).energy
            for r in (1, -1) for s in (1, -1)}
    assert vals[(1, 1)] == pytest.approx(0.75)
    assert vals[(1, -1)] == pytest.approx(1.25)
    assert vals[(-1, 1)] == pytest.approx(1.25)
    assert vals[(-1, -1)] == pytest.approx(0.75)


def test_classification_table():
    rows = table_of_states(1.0, 0.25)
    assert rows == [
        (1, 1, "electron", "up", 0.75),
        (1, -1, "positron", "down", 1.25),
        (-1, 1, "positron", "up", 1.25),
        (-1, -1, "electron", "down", 0.75),
    ]


def test_classification_requires_interior_potential():
    with pytest.raises(InvalidProbeField):
        classify(PlaneWaveLabel(1, 1, 1.0, 0.0))


def test_dispersion_matrix_kernel():
    m = dispersion_matrix(1.0, 1, 1.0)
    assert np.allclose(m, np.diag([0.0, -2.0]))
    assert np.linalg.det(m) == 0.0
    assert np.linalg.det(dispersion_matrix(0.9, 1, 1.0)) != 0.0


def test_measured_rotation_rate_matches_energy():
    for r in (1, -1):
        for s in (1, -1):
            lab = PlaneWaveLabel(r, s, 1.0, 0.25)
            rate = measured_rotation_rate(lab)
            assert rate == pytest.approx(lab.temporal_frequency, abs=1e-8)
            assert abs(rate) == pytest.approx(lab.energy, abs=1e-8)


def test_coframe_rotation_angle_doubles_phase():
    lab = PlaneWaveLabel(1, 1, 1.0, 0.0)
    assert coframe_rotation_angle(lab, 0.5, 0.25) == pytest.approx(2 * (0.5 + 0.25))


def test_grid_mode_momenta_on_shell():
    moms = grid_mode_momenta()
    assert len(moms) >= 20
    assert (1, 0, 0) in moms and (-1, 0, 0) in moms
    for p0, p1, p2 in moms:
        assert p0 ** 2 - p1 ** 2 - p2 ** 2 == 1


def test_boosted_amplitude_unit_density_and_kernel():
    for mom in [(3, 2, 2), (-3, 2, -2), (9, 4, 8)]:
        s = 1 if mom[0] > 0 else -1
        z = boosted_amplitude(np.array(mom, float), s, 1.0)
        assert abs(z[0]) ** 2 - abs(z[1]) ** 2 == pytest.approx(1.0)
        assert np.max(np.abs(symbol_matrix(np.array(mom, float), s, 1.0) @ z)) < 1e-12


def test_boosted_amplitude_wrong_branch():
    with pytest.raises(WrongDensitySign):
        boosted_amplitude(np.array([3.0, 2.0, 2.0]), -1, 1.0)


def test_boosted_amplitude_off_shell():
    with pytest.raises(ValueError):
        boosted_amplitude(np.array([2.0, 0.0, 0.0]), 1, 1.0)


def test_plane_wave_spinor_shapes():
    spec3 = periodic_spec(8, 2.0 * np.pi / 8, 3)
    spec4 = periodic_spec(8, 2.0 * np.pi / 8, 4)
    lab = PlaneWaveLabel(1, 1, 1.0, 0.0)
    b3 = plane_wave_spinor(lab, spec3)
    assert b3.values.shape == (8, 8, 8, 2)
    b4 = plane_wave_spinor(lab, spec4)
    assert b4.values.shape == (8, 8, 8, 8, 2)
    assert b4.x3_independent_bilinears
