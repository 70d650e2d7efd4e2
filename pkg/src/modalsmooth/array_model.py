"""Radial functions of a spherical-cap loudspeaker array and a rigid-sphere microphone array."""

from dataclasses import dataclass

import numpy as np

from .sh_math import legendre_p, sph_bessel_j, sph_bessel_j_prime, sph_hankel1_h, sph_hankel1_h_prime

INCH = 0.0254


def chord_aperture(membrane_diameter_m, radius_m):
    """Cap half-angle for a flat membrane of the given diameter spanning a chord of the sphere."""
    return float(np.arcsin(0.5 * membrane_diameter_m / radius_m))


@dataclass(frozen=True)
class LoudspeakerArrayConfig:
    radius_m: float = 0.1
    order: int = 3
    aperture_rad: float = chord_aperture(2 * INCH, 0.1)
    air_density: float = 1.2
    sound_speed: float = 343.0

    def __post_init__(self):
        if self.radius_m <= 0:
            raise ValueError("loudspeaker array radius must be positive")
        if self.order < 0:
            raise ValueError("loudspeaker array order must be nonnegative")
        if not 0.0 < self.aperture_rad < np.pi / 2:
            raise ValueError("cap aperture must lie in (0, pi/2)")
        if self.air_density <= 0 or self.sound_speed <= 0:
            raise ValueError("air density and sound speed must be positive")


@dataclass(frozen=True)
class MicrophoneArrayConfig:
    radius_m: float = 0.07
    order: int = 2
    sound_speed: float = 343.0

    def __post_init__(self):
        if self.radius_m <= 0:
            raise ValueError("microphone array radius must be positive")
        if self.order < 0:
            raise ValueError("microphone array order must be nonnegative")
        if self.sound_speed <= 0:
            raise ValueError("sound speed must be positive")


def cap_coefficient(n, aperture_rad):
    c = np.cos(aperture_rad)
    if n == 0:
        return 4.0 * np.pi**2 * (1.0 - c)
    return 4.0 * np.pi**2 / (2 * n + 1) * (legendre_p(n - 1, c) - legendre_p(n + 1, c))


def _rigid_term(n, x):
    # j_n - (j_n' / h_n') h_n
    return sph_bessel_j(n, x) - sph_bessel_j_prime(n, x) / sph_hankel1_h_prime(n, x) * sph_hankel1_h(n, x)


def _check_positive(x, name):
    if np.any(np.asarray(x) <= 0):
        raise ValueError(f"{name} must be positive (Hankel functions are singular at 0)")


def loudspeaker_radial_g(n, k_rL, cfg):
    _check_positive(k_rL, "k r_L")
    pref = cfg.air_density * cfg.sound_speed * cfg.radius_m**2 * (-1j) ** (n + 1)
    return pref * _rigid_term(n, k_rL) * cap_coefficient(n, cfg.aperture_rad)


def mic_radial_b(n, k_rM):
    _check_positive(k_rM, "k r_M")
    return 4.0 * np.pi * (-1j) ** n * _rigid_term(n, k_rM)


def _expand(per_order):
    # repeat the order-n value 2n+1 times, keeping any leading batch axis
    per_order = np.asarray(per_order)
    reps = np.array([2 * n + 1 for n in range(per_order.shape[-1])])
    return np.repeat(per_order, reps, axis=-1)


def g_diagonal(omega, cfg):
    """Diagonal of G(omega). ``omega`` may be an array, giving shape (len(omega), (N_L+1)**2)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be positive")
    x = omega * cfg.radius_m / cfg.sound_speed
    vals = np.stack([loudspeaker_radial_g(n, x, cfg) for n in range(cfg.order + 1)], axis=-1)
    return _expand(vals)


def b_diagonal(omega, cfg):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be positive")
    x = omega * cfg.radius_m / cfg.sound_speed
    vals = np.stack([mic_radial_b(n, x) for n in range(cfg.order + 1)], axis=-1)
    return _expand(vals)


def g_diagonal_dc(cfg):
    """Zero-frequency limit of G: only the order-0 term survives."""
    d = np.zeros((cfg.order + 1) ** 2, dtype=complex)
    d[0] = cfg.air_density * cfg.sound_speed * cfg.radius_m**2 * (-1j) * cap_coefficient(0, cfg.aperture_rad)
    return d


def b_diagonal_dc(cfg):
    d = np.zeros((cfg.order + 1) ** 2, dtype=complex)
    d[0] = 4.0 * np.pi
    return d


def matrix_G(omega, cfg):
    return np.diag(g_diagonal(float(omega), cfg))


def matrix_B(omega, cfg):
    return np.diag(b_diagonal(float(omega), cfg))
