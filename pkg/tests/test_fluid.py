import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from modeswim.errors import CalibrationError, DomainError
from modeswim.fluid import (FluidModel, beam_added_mass_per_length, calibrate,
                            plate_added_mass_per_area, wet_frequencies)


def _basis(freqs):
    from modeswim.eigensolver import ModalBasis
    n = len(freqs)
    return ModalBasis(frequencies=np.asarray(freqs, dtype=float),
                      shapes=np.eye(n), medium="dry", mesh=None, matrices=None)


class TestAddedMass:
    def test_switch_off(self):
        fluid = FluidModel(density=1830.0, calibration_factor=0.0)
        assert beam_added_mass_per_length(0.0124, fluid) == 0.0

    def test_strip_value(self):
        fluid = FluidModel(density=1830.0, calibration_factor=1.0)
        assert beam_added_mass_per_length(0.0124, fluid) == pytest.approx(
            0.22100, rel=1e-4)

    def test_width_squared_scaling(self):
        fluid = FluidModel(density=1000.0)
        assert beam_added_mass_per_length(0.02, fluid) == pytest.approx(
            4.0 * beam_added_mass_per_length(0.01, fluid))

    def test_plate_scaling_is_linear_in_span(self):
        fluid = FluidModel(density=1830.0)
        assert plate_added_mass_per_area(0.16, fluid) == pytest.approx(
            2 * plate_added_mass_per_area(0.08, fluid))

    def test_negative_density_rejected(self):
        with pytest.raises(DomainError):
            FluidModel(density=-1.0)


class TestWetFrequencies:
    def test_beta_three_halves_everything(self):
        basis = _basis([2.0, 10.0, 14.0])
        wet = wet_frequencies(basis, 1.0, 3.0)
        assert np.allclose(wet.frequencies, [1.0, 5.0, 7.0])
        assert wet.medium == "wet"

    def test_zero_added_mass_is_identity(self):
        basis = _basis([2.0, 10.0])
        wet = wet_frequencies(basis, 1.0, 0.0)
        assert np.array_equal(wet.frequencies, basis.frequencies)

    def test_shapes_unchanged(self):
        basis = _basis([1.0, 2.0, 3.0])
        wet = wet_frequencies(basis, 2.0, 6.0)
        assert wet.shapes is basis.shapes

    def test_ordering_preserved(self):
        basis = _basis([1.0, 2.0, 3.0, 4.0])
        wet = wet_frequencies(basis, 1.0, 7.5)
        assert (np.diff(wet.frequencies) > 0).all()

    def test_paper_beam_ratio_prediction(self, table_section):
        # Calibrating the first wet frequency to 4.2 Hz pins the second to
        # f2_dry * 4.2 / f1_dry, independent of the mass details.
        from modeswim.analytic import cantilever_frequencies
        f_dry = cantilever_frequencies(table_section, 0.096, 0.0124, 2)
        fluid = FluidModel(density=1830.0, calibration_factor=1.0)
        per_len = beam_added_mass_per_length(0.0124, fluid)
        beta0 = per_len / (table_section.mass_per_area * 0.0124)
        lam = calibrate(f_dry[0], 4.2, beta0)
        basis = _basis(f_dry)
        wet = wet_frequencies(basis, table_section.mass_per_area * 0.0124,
                              lam * per_len)
        assert wet.frequencies[0] == pytest.approx(4.2, rel=1e-10)
        assert wet.frequencies[1] == pytest.approx(26.6, rel=0.05)


class TestCalibrate:
    def test_frozen_paper_value(self):
        # beta0 frozen from 0.2210 kg/m over 0.022451 kg/m.
        lam = calibrate(22.7, 4.2, 9.84328682)
        assert lam == pytest.approx(2.87, rel=0.01)

    def test_half_frequency_consistency(self):
        assert calibrate(10.0, 5.0, 3.0) == pytest.approx(1.0)

    def test_limit_no_added_mass(self):
        assert calibrate(10.0, 9.9999999, 5.0) == pytest.approx(0.0, abs=1e-6)

    def test_target_above_dry_rejected(self):
        with pytest.raises(CalibrationError):
            calibrate(10.0, 10.5, 3.0)

    @given(dry=st.floats(min_value=1.0, max_value=1e3),
           ratio=st.floats(min_value=1e-3, max_value=0.999),
           beta0=st.floats(min_value=1e-3, max_value=1e3))
    def test_round_trip_property(self, dry, ratio, beta0):
        target = dry * ratio
        lam = calibrate(dry, target, beta0)
        recovered = dry / math.sqrt(1.0 + lam * beta0)
        assert recovered == pytest.approx(target, rel=1e-10)

    @given(lam1=st.floats(min_value=0.01, max_value=10.0),
           lam2=st.floats(min_value=0.01, max_value=10.0))
    def test_monotone_in_lambda(self, lam1, lam2):
        lo, hi = sorted((lam1, lam2))
        if hi - lo < 1e-9:
            return
        f_lo = 10.0 / math.sqrt(1.0 + hi * 2.0)
        f_hi = 10.0 / math.sqrt(1.0 + lo * 2.0)
        assert f_lo < f_hi
