"""Experiment configuration: INI-style sections of key/value pairs."""

import configparser
import dataclasses
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .array_model import LoudspeakerArrayConfig, MicrophoneArrayConfig
from .room_model import SceneConfig, ShoeboxRoom
from .synthesis import WindowSpec

METHODS = ("modal", "frequency", "combined")


class ConfigError(ValueError):
    pass


@dataclass
class SceneSection:
    room_dims: tuple = (10.0, 10.0, 8.0)
    wall_reflection: float = 0.8
    mic_pos: tuple = (5.0, 5.0, 3.0)
    loudspeaker_pos: tuple = (2.0, 2.0, 1.75)
    sound_speed: float = 343.0


@dataclass
class LoudspeakerSection:
    radius_m: float = 0.1
    order: int = 3
    membrane_diameter_m: float = 0.0508
    aperture_rule: str = "chord"
    air_density: float = 1.2


@dataclass
class MicrophoneSection:
    radius_m: float = 0.07
    order: int = 2


@dataclass
class SignalSection:
    fs: float = 48000.0
    n_fft: int = 8192
    max_image_delay_s: float = 0.1
    window_start_s: float = 0.007
    window_length: int = 1056


@dataclass
class NoiseSection:
    misalignment_db: float = -30.0
    seed: int = 0


@dataclass
class AnalysisSection:
    method: str = "modal"
    frequency_hz: float = 1600.0
    band_hz: tuple = (1000.0, 1600.0)
    truncation_order: int = 3
    num_signals: int = 6
    grid_deg: float = 1.0
    min_separation_deg: float = 5.0
    conditioning_floor: float = 1e-3
    doa_tolerance_deg: float = 2.0


@dataclass
class OutputSection:
    directory: str = "out"


_SECTIONS = {
    "scene": SceneSection,
    "loudspeaker_array": LoudspeakerSection,
    "microphone_array": MicrophoneSection,
    "signal": SignalSection,
    "noise": NoiseSection,
    "analysis": AnalysisSection,
    "output": OutputSection,
}


@dataclass
class ExperimentConfig:
    scene: SceneSection = field(default_factory=SceneSection)
    loudspeaker_array: LoudspeakerSection = field(default_factory=LoudspeakerSection)
    microphone_array: MicrophoneSection = field(default_factory=MicrophoneSection)
    signal: SignalSection = field(default_factory=SignalSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)
    output: OutputSection = field(default_factory=OutputSection)

    def validate(self):
        a, s = self.analysis, self.signal
        if a.method not in METHODS:
            raise ConfigError(f"analysis.method must be one of {METHODS}, got {a.method!r}")
        nyq = s.fs / 2
        if not 0 < a.frequency_hz < nyq:
            raise ConfigError("analysis.frequency_hz must lie in (0, fs/2)")
        lo, hi = a.band_hz
        if not 0 < lo <= hi < nyq:
            raise ConfigError("analysis.band_hz must lie in (0, fs/2) with low <= high")
        if not 0 <= a.truncation_order <= self.loudspeaker_array.order:
            raise ConfigError("analysis.truncation_order must lie in [0, loudspeaker_array.order]")
        if not 0 < a.num_signals < (self.microphone_array.order + 1) ** 2:
            raise ConfigError("analysis.num_signals must leave a noise subspace")
        for name, val in (
            ("analysis.grid_deg", a.grid_deg),
            ("analysis.doa_tolerance_deg", a.doa_tolerance_deg),
            ("analysis.conditioning_floor", a.conditioning_floor),
            ("signal.fs", s.fs),
            ("signal.max_image_delay_s", s.max_image_delay_s),
        ):
            if not val > 0:
                raise ConfigError(f"{name} must be positive")
        if a.min_separation_deg < 0:
            raise ConfigError("analysis.min_separation_deg must be nonnegative")
        if s.n_fft < 2 or s.window_length < 1:
            raise ConfigError("signal.n_fft and signal.window_length must be positive")
        if s.max_image_delay_s >= s.n_fft / s.fs:
            raise ConfigError("signal.max_image_delay_s must be shorter than n_fft / fs")
        if s.window_start_s < 0 or round(s.window_start_s * s.fs) + s.window_length > s.n_fft:
            raise ConfigError("time window must lie inside the DFT span")
        if self.loudspeaker_array.aperture_rule not in ("chord", "arc"):
            raise ConfigError("loudspeaker_array.aperture_rule must be 'chord' or 'arc'")
        if not np.isfinite(self.noise.misalignment_db) and self.noise.misalignment_db != -np.inf:
            raise ConfigError("noise.misalignment_db must be finite or -inf")
        try:
            self.scene_config()
            self.loudspeaker_config()
            self.microphone_config()
            self.window_spec()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    # model objects ---------------------------------------------------------

    def scene_config(self):
        sc = self.scene
        return SceneConfig(
            room=ShoeboxRoom(dims=tuple(sc.room_dims), wall_reflection=sc.wall_reflection),
            mic_pos=tuple(sc.mic_pos),
            loudspeaker_pos=tuple(sc.loudspeaker_pos),
            sound_speed=sc.sound_speed,
        )

    def aperture_rad(self):
        ls = self.loudspeaker_array
        half = 0.5 * ls.membrane_diameter_m
        if ls.aperture_rule == "chord":
            if half >= ls.radius_m:
                raise ConfigError("membrane wider than the array sphere")
            return float(np.arcsin(half / ls.radius_m))
        return half / ls.radius_m

    def loudspeaker_config(self):
        ls = self.loudspeaker_array
        return LoudspeakerArrayConfig(
            radius_m=ls.radius_m,
            order=ls.order,
            aperture_rad=self.aperture_rad(),
            air_density=ls.air_density,
            sound_speed=self.scene.sound_speed,
        )

    def microphone_config(self):
        mc = self.microphone_array
        return MicrophoneArrayConfig(radius_m=mc.radius_m, order=mc.order, sound_speed=self.scene.sound_speed)

    def window_spec(self):
        return WindowSpec(start_s=self.signal.window_start_s, length_samples=self.signal.window_length)

    def with_overrides(self, **sections):
        """Copy with per-section field overrides, e.g. ``analysis={"method": "frequency"}``."""
        kwargs = {}
        for name in _SECTIONS:
            sec = getattr(self, name)
            kwargs[name] = dataclasses.replace(sec, **sections.get(name, {}))
        return ExperimentConfig(**kwargs).validate()


# text format ----------------------------------------------------------------


def _format_value(val):
    if isinstance(val, tuple):
        return ", ".join(_format_value(v) for v in val)
    if isinstance(val, float):
        return repr(val)
    return str(val)


def _parse_value(raw, default):
    raw = raw.strip()
    if isinstance(default, tuple):
        return tuple(float(p) for p in raw.split(","))
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def dumps(cfg):
    parser = configparser.ConfigParser(interpolation=None)
    for name in _SECTIONS:
        sec = getattr(cfg, name)
        parser[name] = {f.name: _format_value(getattr(sec, f.name)) for f in dataclasses.fields(sec)}
    lines = []
    for name in parser.sections():
        lines.append(f"[{name}]")
        for key, val in parser[name].items():
            lines.append(f"{key} = {val}")
        lines.append("")
    return "\n".join(lines)


def loads(text):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    unknown = set(parser.sections()) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {sorted(unknown)}")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        defaults = cls()
        values = {}
        if parser.has_section(name):
            known = {f.name for f in dataclasses.fields(cls)}
            for key, raw in parser[name].items():
                if key not in known:
                    raise ConfigError(f"unknown key {name}.{key}")
                try:
                    values[key] = _parse_value(raw, getattr(defaults, key))
                except ValueError as exc:
                    raise ConfigError(f"{name}.{key}: cannot parse {raw!r}") from exc
        kwargs[name] = cls(**values)
    return ExperimentConfig(**kwargs).validate()


def load(path):
    with open(path) as fh:
        return loads(fh.read())


def save(cfg, path):
    with open(path, "w") as fh:
        fh.write(dumps(cfg))


def default_config():
    """The shipped configuration of the demonstration scene."""
    text = resources.files("modalsmooth").joinpath("data/paper.cfg").read_text()
    return loads(text)
