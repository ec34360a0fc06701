import numpy as np
import pytest

from phbc import validate_system
from phbc.models import (energy_preserving_wave, graded_wave, transport_system, uniform_wave,
                         wave_independence, wave_system)


def test_bundled_models_are_valid():
    for sys in (transport_system(), uniform_wave(), graded_wave(), energy_preserving_wave()):
        assert validate_system(sys).ok


def test_wave_independence_examples():
    W1, W0 = np.eye(2), np.diag([-1.0, 1.0])
    assert not wave_independence(W1, W0, 1, 1, 1, 1)
    assert wave_independence(W1, W0, 4, 1, 1, 1)
    assert wave_independence(W1, np.eye(2), 1, 1, 1, 1)
    assert not wave_independence(W1, np.zeros((2, 2)), 1, 1, 1, 1)


def test_wave_profiles():
    sys = wave_system(lambda z: 1 + z, 2.0, m=5)
    assert sys.H.samples[:, 0, 0] == pytest.approx(1 / (1 + np.linspace(0, 1, 5)))
    assert sys.H.samples[:, 1, 1] == pytest.approx(np.full(5, 2.0))
    assert wave_system(2.0, 3.0).H.is_constant
