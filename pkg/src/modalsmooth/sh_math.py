"""Special functions, complex spherical harmonics, steering vectors and sphere grids.

Conventions
-----------
* ``theta`` is the polar angle from +z in [0, pi], ``phi`` the azimuth from +x
  toward +y in [0, 2 pi).
* Complex orthonormal harmonics with the Condon-Shortley phase.
* Coefficients of order ``N`` are flattened as (0,0), (1,-1), (1,0), (1,1), ...,
  i.e. index ``n**2 + n + m``.
* Spherical Hankel functions are of the first kind, ``h_n = j_n + i y_n``,
  which is the outgoing wave for an ``exp(-i omega t)`` time dependence.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from . import kernels

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SphericalAngle:
    """A direction on the unit sphere (radians)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (-1e-12 <= self.theta <= np.pi + 1e-12):
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        object.__setattr__(self, "theta", float(min(max(self.theta, 0.0), np.pi)))
        object.__setattr__(self, "phi", float(np.mod(self.phi, TWO_PI)))

    @classmethod
    def from_degrees(cls, theta_deg, phi_deg):
        return cls(np.deg2rad(theta_deg), np.deg2rad(phi_deg))

    @classmethod
    def from_vector(cls, vec):
        vec = np.asarray(vec, dtype=float)
        r = np.linalg.norm(vec)
        if r == 0.0:
            raise ValueError("zero-length vector has no direction")
        theta = np.arccos(np.clip(vec[2] / r, -1.0, 1.0))
        phi = np.arctan2(vec[1], vec[0])
        return cls(theta, phi)

    def to_vector(self):
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])

    @property
    def degrees(self):
        return (float(np.rad2deg(self.theta)), float(np.rad2deg(self.phi)))


@dataclass(frozen=True)
class SteeringVector:
    order: int
    coeffs: np.ndarray


@dataclass(frozen=True)
class SphereGrid:
    """Directions (and optional quadrature weights) on the sphere.

    ``shape`` is set for equiangular grids laid out row-major as (theta, phi),
    which lets the peak finder address neighbours.
    """

    theta: np.ndarray
    phi: np.ndarray
    weights: Optional[np.ndarray] = None
    shape: Optional[tuple] = None

    def __len__(self):
        return self.theta.shape[0]

    @property
    def points(self):
        return [SphericalAngle(t, p) for t, p in zip(self.theta, self.phi)]

    def angle(self, index):
        return SphericalAngle(self.theta[index], self.phi[index])


def sh_index(n, m):
    return n * n + n + m


def n_coeffs(order):
    return (order + 1) ** 2


def legendre_p(n, x):
    """Legendre polynomial P_n(x) by the three-term upward recurrence."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise ValueError("argument outside [-1, 1]")
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p if p.ndim else float(p)


def sh_matrix(theta, phi, order):
    """Matrix of SH values, shape (len(theta), (order+1)**2)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if order < 0:
        raise ValueError("order must be nonnegative")
    return kernels.sh_matrix(theta, phi, order)


def sph_harmonic(n, m, direction):
    if abs(m) > n:
        raise ValueError(f"|m|={abs(m)} exceeds n={n}")
    row = sh_matrix([direction.theta], [direction.phi], n)
    return complex(row[0, sh_index(n, m)])


def steering_vector(direction, order):
    """Row steering vector y(direction) of SH order ``order``."""
    coeffs = sh_matrix([direction.theta], [direction.phi], order)[0]
    return SteeringVector(order=order, coeffs=coeffs)


def steering_matrix(directions, order):
    """Stack of row steering vectors, shape (len(directions), (order+1)**2)."""
    theta = np.array([d.theta for d in directions])
    phi = np.array([d.phi for d in directions])
    return sh_matrix(theta, phi, order)


# Spherical Bessel / Hankel ------------------------------------------------
# Values come from scipy; derivatives use f_n' = f_{n-1} - (n+1)/x f_n.


def sph_bessel_j(n, x):
    return special.spherical_jn(n, x)


def sph_bessel_j_prime(n, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    small = x == 0.0
    xs = np.where(small, 1.0, x)
    if n == 0:
        val = -special.spherical_jn(1, xs)
    else:
        val = special.spherical_jn(n - 1, xs) - (n + 1) / xs * special.spherical_jn(n, xs)
    # j_n'(0) is 1/3 for n = 1 and 0 otherwise
    val = np.where(small, 1.0 / 3.0 if n == 1 else 0.0, val)
    return val if val.ndim else float(val)


def sph_hankel1_h(n, x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("spherical Hankel function is singular at x = 0")
    return special.spherical_jn(n, x) + 1j * special.spherical_yn(n, x)


def sph_hankel1_h_prime(n, x):
    x = np.asarray(x, dtype=float)
    if n == 0:
        return -sph_hankel1_h(1, x)
    return sph_hankel1_h(n - 1, x) - (n + 1) / x * sph_hankel1_h(n, x)


# Grids --------------------------------------------------------------------


def make_grid(resolution_deg=1.0):
    """Cell-centred equiangular grid.

    theta takes the values (k + 1/2) * res, phi the values j * res, so the
    poles are never sampled and no direction is repeated. A 1 degree grid has
    180 x 360 points.
    """
    if resolution_deg <= 0:
        raise ValueError("resolution must be positive")
    n_theta = int(round(180.0 / resolution_deg))
    n_phi = int(round(360.0 / resolution_deg))
    theta = np.deg2rad((np.arange(n_theta) + 0.5) * 180.0 / n_theta)
    phi = np.deg2rad(np.arange(n_phi) * 360.0 / n_phi)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return SphereGrid(theta=tt.ravel(), phi=pp.ravel(), shape=(n_theta, n_phi))


def make_quadrature_grid(order):
    """Gauss-Legendre x uniform-azimuth grid integrating Y_n^m (Y_n'^m')* exactly for n, n' <= order."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    nodes, gl_weights = np.polynomial.legendre.leggauss(order + 1)
    n_phi = 2 * order + 2
    theta = np.arccos(nodes)
    phi = np.arange(n_phi) * TWO_PI / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    weights = np.repeat(gl_weights, n_phi) * (TWO_PI / n_phi)
    return SphereGrid(theta=tt.ravel(), phi=pp.ravel(), weights=weights, shape=(order + 1, n_phi))


def great_circle_deg(a, b):
    """Angle between two directions in degrees, in [0, 180]."""
    u, v = a.to_vector(), b.to_vector()
    # atan2 form stays accurate for nearly equal and nearly opposite directions
    return float(np.rad2deg(np.arctan2(np.linalg.norm(np.cross(u, v)), np.dot(u, v))))
