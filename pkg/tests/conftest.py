import numpy as np
import pytest

from beamlab import ArrayGeometry, MismatchSpec, realize_scenario


@pytest.fixture
def ula12():
    return ArrayGeometry.ula(12)


def rng_for(*key):
    """Deterministic counter-based generator for a test-local key."""
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=0xBEA31AB, spawn_key=key)))


def default_truth(rng, snr_db=10.0, inr_db=30.0, snapshots=100, mismatch="none",
                  element_count=12, interferer_doas=(30.0, 50.0)):
    """Paper-default scenario: L=12 half-wavelength ULA, SOI at 0 degrees."""
    geometry = ArrayGeometry.ula(element_count)
    doas = np.asarray(interferer_doas, float)
    powers = 10.0 ** (inr_db / 10.0) * np.ones(doas.size)
    return realize_scenario(geometry, 0.0, 10.0 ** (snr_db / 10.0), doas, powers,
                            1.0, snapshots, MismatchSpec(mismatch), rng)
