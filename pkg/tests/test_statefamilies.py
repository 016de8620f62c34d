import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homsense.errors import InvalidSpec
from homsense.numerics import integrate
from homsense.statefamilies import (
    Chirp,
    Family,
    PhaseMatchingSpec,
    comb_tooth_sum,
    eval_spectral,
    eval_temporal,
    is_even,
    load_spec,
    normalization,
    spec_from_dict,
    spectral_terms,
    temporal_terms,
    verify_normalization,
)

from conftest import ALL_AMPLITUDE_SPECS, CHIRPED_SPECS


class TestNormalization:
    @pytest.mark.parametrize("name", sorted(ALL_AMPLITUDE_SPECS))
    def test_spectral_norm_is_one(self, name):
        assert verify_normalization(ALL_AMPLITUDE_SPECS[name]) == pytest.approx(
            1.0, abs=1e-8)

    @pytest.mark.parametrize("name", sorted(CHIRPED_SPECS))
    def test_chirped_norm_is_one(self, name):
        assert verify_normalization(CHIRPED_SPECS[name]) == pytest.approx(
            1.0, abs=1e-8)

    def test_temporal_norm_matches(self, fcat):
        terms = temporal_terms(fcat)
        lo, hi = terms.support()
        res = integrate(lambda t: np.abs(terms(t)) ** 2, lo, hi, tol=1e-11)
        assert res.real == pytest.approx(1.0, abs=1e-8)

    def test_normalization_scalar_positive(self, airy):
        assert normalization(airy) > 0

    @settings(max_examples=40, deadline=None)
    @given(sigma=st.floats(0.3, 4.0), delta=st.floats(-3.0, 3.0),
           c=st.floats(0.5, 3.0), sign=st.sampled_from([+1, -1]))
    def test_gaussian_norm_property(self, sigma, delta, c, sign):
        spec = PhaseMatchingSpec(family=Family.GAUSSIAN, sigma=sigma,
                                 delta=delta, freq_chirp=Chirp(c, sign))
        assert verify_normalization(spec) == pytest.approx(1.0, abs=1e-7)


class TestFourierConsistency:
    """Temporal amplitude must be the inverse transform of the spectral one."""

    @pytest.mark.parametrize("name", ["gaussian", "frequency_cat",
                                      "airy_grid"])
    def test_against_quadrature(self, name):
        spec = ALL_AMPLITUDE_SPECS[name]
        f = spectral_terms(spec)
        lo, hi = f.support()
        for t in (0.0, 0.4, -1.1):
            res = integrate(lambda w: f(w) * np.exp(-1j * w * t), lo, hi,
                            tol=1e-12, panels=4)
            expect = res.value / math.sqrt(2.0 * math.pi)
            assert eval_temporal(spec, t) == pytest.approx(expect, abs=1e-9)

    def test_roundtrip(self, tcat):
        w = np.linspace(-4.0, 4.0, 9)
        direct = eval_spectral(tcat, w)
        again = temporal_terms(tcat).fourier(+1)(w)
        np.testing.assert_allclose(again, direct, atol=1e-12)


class TestValidation:
    def test_sigma_positive(self):
        with pytest.raises(InvalidSpec):
            PhaseMatchingSpec(family=Family.GAUSSIAN, sigma=0.0)

    def test_reflectivity_range(self):
        with pytest.raises(InvalidSpec):
            PhaseMatchingSpec(family=Family.AIRY_GRID, sigma=1.0,
                              reflectivity=1.0, tau_bar=1.0)

    def test_grid_needs_tau_bar(self):
        with pytest.raises(InvalidSpec):
            PhaseMatchingSpec(family=Family.AIRY_GRID, sigma=1.0,
                              reflectivity=0.5)

    def test_comb_needs_spacing_and_width(self):
        with pytest.raises(InvalidSpec):
            PhaseMatchingSpec(family=Family.GAUSSIAN_COMB, sigma=1.0,
                              omega_bar=2.0)

    def test_chirps_mutually_exclusive(self):
        with pytest.raises(InvalidSpec):
            PhaseMatchingSpec(family=Family.GAUSSIAN, sigma=1.0,
                              freq_chirp=Chirp(1.0), time_chirp=Chirp(1.0))

    def test_chirp_scale_positive(self):
        with pytest.raises(InvalidSpec):
            Chirp(0.0)

    def test_chirp_sign_flag(self):
        with pytest.raises(InvalidSpec):
            Chirp(1.0, 2)

    @pytest.mark.parametrize("family,kwargs,chirp_field", [
        (Family.FREQUENCY_CAT, dict(delta=5.0), "time_chirp"),
        (Family.TIME_CAT, dict(delta_t=2.0), "freq_chirp"),
        (Family.AIRY_GRID, dict(reflectivity=0.5, tau_bar=2.0), "time_chirp"),
        (Family.FREQUENCY_AIRY_GRID,
         dict(reflectivity=0.5, tau_bar=2.0), "freq_chirp"),
    ])
    def test_unsupported_chirp_direction(self, family, kwargs, chirp_field):
        spec = PhaseMatchingSpec(family=family, sigma=1.0,
                                 **kwargs, **{chirp_field: Chirp(1.0)})
        with pytest.raises(InvalidSpec):
            spectral_terms(spec)

    def test_comb_rejects_chirp(self):
        with pytest.raises(InvalidSpec):
            PhaseMatchingSpec(family=Family.GAUSSIAN_COMB, sigma=5.0,
                              omega_bar=2.0, peak_width=0.3,
                              freq_chirp=Chirp(1.0))

    def test_mixture_has_no_amplitude(self):
        spec = PhaseMatchingSpec(family=Family.TWO_COLOR_MIXTURE, sigma=1.0,
                                 delta=10.0)
        with pytest.raises(InvalidSpec):
            spectral_terms(spec)


class TestJsonIngestion:
    def test_roundtrip(self, state_file):
        path = state_file("cat.json", {"family": "frequency_cat",
                                       "sigma": 1.0, "delta": 10.0})
        spec = load_spec(path)
        assert spec.family is Family.FREQUENCY_CAT
        assert spec.delta == 10.0

    def test_chirp_forms(self):
        short = spec_from_dict({"family": "gaussian", "sigma": 1.0,
                                "freq_chirp": 2.0})
        full = spec_from_dict({"family": "gaussian", "sigma": 1.0,
                               "freq_chirp": {"c": 2.0, "sign": "-"}})
        assert short.freq_chirp == Chirp(2.0, +1)
        assert full.freq_chirp == Chirp(2.0, -1)

    def test_unknown_field_rejected(self):
        with pytest.raises(InvalidSpec):
            spec_from_dict({"family": "gaussian", "sigma": 1.0, "bogus": 3})

    def test_unknown_family_rejected(self):
        with pytest.raises(InvalidSpec):
            spec_from_dict({"family": "sinc", "sigma": 1.0})

    def test_non_numeric_field_rejected(self):
        with pytest.raises(InvalidSpec):
            spec_from_dict({"family": "gaussian", "sigma": "wide"})

    def test_unparseable_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(InvalidSpec):
            load_spec(str(path))


class TestParity:
    def test_even_families(self, gauss, fcat, tcat, comb, airy):
        assert is_even(gauss)
        assert is_even(fcat)
        assert is_even(tcat)
        assert is_even(comb)
        assert not is_even(airy)

    def test_offsets_break_parity(self):
        shifted = PhaseMatchingSpec(family=Family.GAUSSIAN, sigma=1.0,
                                    delta=0.5)
        assert not is_even(shifted)

    def test_even_amplitude_is_symmetric(self, fcat):
        w = np.linspace(0.2, 12.0, 40)
        np.testing.assert_allclose(eval_spectral(fcat, w),
                                   eval_spectral(fcat, -w), atol=1e-13)


class TestCombToothSum:
    @pytest.mark.parametrize("ratio", [0.1, 0.2])
    def test_direct_matches_resummed(self, ratio):
        spec = PhaseMatchingSpec(family=Family.GAUSSIAN_COMB, sigma=5.0,
                                 omega_bar=2.0, peak_width=ratio * 2.0)
        w = np.linspace(-5.0, 5.0, 401)
        direct = comb_tooth_sum(spec, w)
        res = comb_tooth_sum(spec, w, resummed=True)
        np.testing.assert_allclose(res, direct, rtol=1e-9)

    def test_requires_comb(self, gauss):
        with pytest.raises(InvalidSpec):
            comb_tooth_sum(gauss, 0.0)
