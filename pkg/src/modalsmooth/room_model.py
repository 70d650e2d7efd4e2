"""Shoebox image-source geometry.

Angle conventions reproduce the reference table of the demonstration scene:
the DOA of an image is the direction of ``M (r_mic - r_image)`` with
``M = diag(mirror_signs)``, and the DOR is the direction of
``r_image - r_mic``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .sh_math import SphericalAngle


@dataclass(frozen=True)
class ShoeboxRoom:
    dims: tuple = (10.0, 10.0, 8.0)
    wall_reflection: float = 0.8

    def __post_init__(self):
        if len(self.dims) != 3 or min(self.dims) <= 0:
            raise ValueError("room dimensions must be three positive lengths")
        if not 0.0 <= self.wall_reflection <= 1.0:
            raise ValueError("wall reflection coefficient must lie in [0, 1]")

    def contains(self, pos):
        pos = np.asarray(pos, dtype=float)
        return bool(np.all(pos > 0) and np.all(pos < np.asarray(self.dims)))


@dataclass(frozen=True)
class SceneConfig:
    room: ShoeboxRoom = field(default_factory=ShoeboxRoom)
    mic_pos: tuple = (5.0, 5.0, 3.0)
    loudspeaker_pos: tuple = (2.0, 2.0, 1.75)
    sound_speed: float = 343.0

    def __post_init__(self):
        if self.sound_speed <= 0:
            raise ValueError("sound speed must be positive")
        for name in ("mic_pos", "loudspeaker_pos"):
            if not self.room.contains(getattr(self, name)):
                raise ValueError(f"{name} {getattr(self, name)} is not strictly inside the room")
        if np.allclose(self.mic_pos, self.loudspeaker_pos, rtol=0.0, atol=1e-9):
            raise ValueError("microphone and loudspeaker positions coincide")


@dataclass(frozen=True)
class Reflection:
    image_pos: tuple
    mirror_signs: tuple
    bounce_count: int
    distance_m: float
    delay_s: float
    amplitude: float
    doa: SphericalAngle
    dor: SphericalAngle


def _doa(image_pos, mirror_signs, mic_pos):
    vec = np.asarray(mirror_signs) * (np.asarray(mic_pos, float) - np.asarray(image_pos, float))
    return SphericalAngle.from_vector(vec)


def _dor(image_pos, mic_pos):
    return SphericalAngle.from_vector(np.asarray(image_pos, float) - np.asarray(mic_pos, float))


def doa_of(refl, mic_pos):
    return _doa(refl.image_pos, refl.mirror_signs, mic_pos)


def dor_of(refl, mic_pos):
    return _dor(refl.image_pos, mic_pos)


def enumerate_images(scene, max_delay_s, min_delay_s=0.0):
    """All image sources with ``min_delay_s <= delay <= max_delay_s``, sorted by delay.

    Ties in delay (within 1 nm of path length) are ordered by mirror signs,
    positive before negative, x first.
    """
    if max_delay_s <= 0:
        raise ValueError("max_delay_s must be positive")
    c = scene.sound_speed
    pos, signs, bounces, dist = kernels.image_sources(
        scene.room.dims, scene.loudspeaker_pos, scene.mic_pos, max_delay_s * c
    )
    order = np.lexsort((-signs[:, 2], -signs[:, 1], -signs[:, 0], np.round(dist, 9)))
    beta = scene.room.wall_reflection
    out = []
    for i in order:
        delay = dist[i] / c
        if delay < min_delay_s:
            continue
        img = tuple(float(v) for v in pos[i])
        sg = tuple(int(v) for v in signs[i])
        out.append(
            Reflection(
                image_pos=img,
                mirror_signs=sg,
                bounce_count=int(bounces[i]),
                distance_m=float(dist[i]),
                delay_s=float(delay),
                amplitude=float(beta ** bounces[i] / dist[i]),
                doa=_doa(img, sg, scene.mic_pos),
                dor=_dor(img, scene.mic_pos),
            )
        )
    return out


def lambda_l(refl, omega):
    """Propagation factor amplitude * exp(i omega delay)."""
    return refl.amplitude * np.exp(1j * np.asarray(omega) * refl.delay_s)


def reflection_table(reflections):
    """Rows for the ground-truth table, one dict per reflection."""
    rows = []
    for i, r in enumerate(reflections):
        dor_t, dor_p = r.dor.degrees
        doa_t, doa_p = r.doa.degrees
        rows.append(
            {
                "reflection": "direct" if r.bounce_count == 0 else str(i),
                "delay_s": r.delay_s,
                "dor_beta_deg": dor_t,
                "dor_psi_deg": dor_p,
                "doa_theta_deg": doa_t,
                "doa_phi_deg": doa_p,
                "amplitude": r.amplitude,
                "bounce_count": r.bounce_count,
                "mirror_sx": r.mirror_signs[0],
                "mirror_sy": r.mirror_signs[1],
                "mirror_sz": r.mirror_signs[2],
            }
        )
    return rows
