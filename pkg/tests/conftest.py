import json

import pytest

from homsense.statefamilies import Chirp, Family, PhaseMatchingSpec


@pytest.fixture
def gauss():
    return PhaseMatchingSpec(family=Family.GAUSSIAN, sigma=1.0)


@pytest.fixture
def fcat():
    return PhaseMatchingSpec(family=Family.FREQUENCY_CAT, sigma=1.0, delta=10.0)


@pytest.fixture
def tcat():
    return PhaseMatchingSpec(family=Family.TIME_CAT, sigma=1.0, delta_t=3.0)


@pytest.fixture
def airy():
    return PhaseMatchingSpec(family=Family.AIRY_GRID, sigma=1.0,
                             reflectivity=0.5, tau_bar=5.0)


@pytest.fixture
def fairy():
    return PhaseMatchingSpec(family=Family.FREQUENCY_AIRY_GRID, sigma=1.0,
                             reflectivity=0.5, tau_bar=5.0)


@pytest.fixture
def comb():
    return PhaseMatchingSpec(family=Family.GAUSSIAN_COMB, sigma=5.0,
                             omega_bar=2.0, peak_width=0.3)


EVEN_SPECS = {
    "gaussian": PhaseMatchingSpec(family=Family.GAUSSIAN, sigma=1.0),
    "frequency_cat": PhaseMatchingSpec(family=Family.FREQUENCY_CAT,
                                       sigma=1.0, delta=10.0),
    "time_cat": PhaseMatchingSpec(family=Family.TIME_CAT, sigma=1.0,
                                  delta_t=3.0),
    "gaussian_comb": PhaseMatchingSpec(family=Family.GAUSSIAN_COMB, sigma=5.0,
                                       omega_bar=2.0, peak_width=0.3),
}

ALL_AMPLITUDE_SPECS = dict(EVEN_SPECS)
ALL_AMPLITUDE_SPECS["airy_grid"] = PhaseMatchingSpec(
    family=Family.AIRY_GRID, sigma=1.0, reflectivity=0.5, tau_bar=5.0)
ALL_AMPLITUDE_SPECS["frequency_airy_grid"] = PhaseMatchingSpec(
    family=Family.FREQUENCY_AIRY_GRID, sigma=1.0, reflectivity=0.5,
    tau_bar=5.0)

CHIRPED_SPECS = {
    "gaussian_freq_chirp": PhaseMatchingSpec(
        family=Family.GAUSSIAN, sigma=1.3, freq_chirp=Chirp(1.5, +1)),
    "gaussian_time_chirp": PhaseMatchingSpec(
        family=Family.GAUSSIAN, sigma=1.3, time_chirp=Chirp(1.5, -1)),
    "airy_freq_chirp": PhaseMatchingSpec(
        family=Family.AIRY_GRID, sigma=1.0, reflectivity=0.5, tau_bar=5.0,
        freq_chirp=Chirp(2.0, +1)),
    "fairy_time_chirp": PhaseMatchingSpec(
        family=Family.FREQUENCY_AIRY_GRID, sigma=1.0, reflectivity=0.5,
        tau_bar=5.0, time_chirp=Chirp(2.0, -1)),
}


@pytest.fixture
def state_file(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return write
