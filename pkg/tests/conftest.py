import sys

import numpy as np
import pytest

from modalsmooth.array_model import LoudspeakerArrayConfig, MicrophoneArrayConfig
from modalsmooth.config import default_config
from modalsmooth.room_model import SceneConfig, enumerate_images

# Reference geometry of the demonstration scene: delay [s], DOR (deg), DOA (deg)
TABLE_ROWS = [
    (0.0129, (106.4, 225.0), (73.6, 45.0)),
    (0.0186, (138.2, 225.0), (138.2, 45.0)),
    (0.0225, (99.3, 246.8), (80.7, 293.2)),
    (0.0225, (99.3, 203.2), (80.7, 156.8)),
    (0.0262, (122.0, 246.8), (122.0, 293.2)),
    (0.0262, (122.0, 203.2), (122.0, 156.8)),
]


@pytest.fixture(scope="session")
def scene():
    return SceneConfig()


@pytest.fixture(scope="session")
def mic_cfg():
    return MicrophoneArrayConfig()


@pytest.fixture(scope="session")
def ls_cfg():
    return LoudspeakerArrayConfig()


@pytest.fixture(scope="session")
def window_reflections(scene):
    return enumerate_images(scene, 0.029, min_delay_s=0.007)


@pytest.fixture(scope="session")
def base_config():
    return default_config()


def random_direction(rng):
    from modalsmooth.sh_math import SphericalAngle

    v = rng.standard_normal(3)
    return SphericalAngle.from_vector(v)


def random_reflections(rng, count):
    """Synthetic reflections with random directions, delays and amplitudes."""
    from modalsmooth.room_model import Reflection

    out = []
    for _ in range(count):
        d = rng.uniform(2.0, 9.0)
        out.append(
            Reflection(
                image_pos=(0.0, 0.0, 0.0),
                mirror_signs=(1, 1, 1),
                bounce_count=0,
                distance_m=d,
                delay_s=d / 343.0,
                amplitude=rng.uniform(0.05, 1.0),
                doa=random_direction(rng),
                dor=random_direction(rng),
            )
        )
    return out


def rel_err(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
