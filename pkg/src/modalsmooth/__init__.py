"""Modal smoothing for MIMO spherical microphone/loudspeaker systems."""

from .array_model import LoudspeakerArrayConfig, MicrophoneArrayConfig
from .config import ConfigError, ExperimentConfig, default_config
from .harness import reproduce_paper, run_experiment, simulate
from .music import (
    PeakDeficitError,
    estimate_signal_count,
    find_peaks,
    hermitian_eig,
    music_spectrum,
    split_subspaces,
)
from .room_model import Reflection, SceneConfig, ShoeboxRoom, enumerate_images
from .sh_math import SphereGrid, SphericalAngle, make_grid, steering_matrix, steering_vector
from .smoothing import CrossSpectrum, combined_smooth, frequency_smooth, modal_smooth
from .synthesis import (
    ConditioningError,
    SpectrumMatrix,
    WindowSpec,
    add_identification_noise,
    apply_time_window,
    assemble_A,
    assemble_H,
    plane_wave_decompose,
    synthesize_broadband,
)

__version__ = "0.1.0"
