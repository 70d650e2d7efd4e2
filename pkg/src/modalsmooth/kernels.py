"""Hot numeric kernels, each in a numba-compiled and a pure-numpy flavour.

The public functions at the bottom dispatch on :data:`modalsmooth._accel.USE_NUMBA`.
Both flavours are importable directly (``*_numba`` / ``*_numpy``) so the test
suite can check them against each other and ``benchmarks/bench_kernels.py``
can time them.
"""

import math

import numpy as np

from . import _accel
from ._accel import njit

_INV_SQRT_4PI = 1.0 / math.sqrt(4.0 * math.pi)


# ---------------------------------------------------------------------------
# Spherical-harmonic matrix
# ---------------------------------------------------------------------------


def _recurrence_coeffs(order):
    # a[n, m], b[n, m] for P(n, m) = a x P(n-1, m) + b P(n-2, m), orthonormal scaling
    a = np.zeros((order + 1, order + 1))
    b = np.zeros((order + 1, order + 1))
    for m in range(order + 1):
        for n in range(m + 1, order + 1):
            a[n, m] = math.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
            if n >= m + 2:
                b[n, m] = -math.sqrt(
                    (2.0 * n + 1.0) * ((n - 1.0) ** 2 - m * m)
                    / ((2.0 * n - 3.0) * (n * n - m * m))
                )
    return a, b


@njit
def _sh_matrix_loop(theta, phi, order, a, b):
    npts = theta.shape[0]
    width = (order + 1) * (order + 1)
    out = np.empty((npts, width), dtype=np.complex128)
    pbar = np.zeros((order + 1, order + 1))
    for p in range(npts):
        x = math.cos(theta[p])
        s = math.sin(theta[p])
        pbar[0, 0] = 0.28209479177387814
        for m in range(1, order + 1):
            pbar[m, m] = -math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pbar[m - 1, m - 1]
        for m in range(order + 1):
            if m + 1 <= order:
                pbar[m + 1, m] = a[m + 1, m] * x * pbar[m, m]
            for n in range(m + 2, order + 1):
                pbar[n, m] = a[n, m] * x * pbar[n - 1, m] + b[n, m] * pbar[n - 2, m]
        for n in range(order + 1):
            base = n * n + n
            out[p, base] = pbar[n, 0]
            for m in range(1, n + 1):
                e = complex(math.cos(m * phi[p]), math.sin(m * phi[p]))
                val = pbar[n, m] * e
                out[p, base + m] = val
                sign = 1.0 if m % 2 == 0 else -1.0
                out[p, base - m] = sign * val.conjugate()
    return out


def sh_matrix_numba(theta, phi, order):
    a, b = _recurrence_coeffs(order)
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    return _sh_matrix_loop(theta, phi, order, a, b)


def sh_matrix_numpy(theta, phi, order):
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    a, b = _recurrence_coeffs(order)
    x = np.cos(theta)
    s = np.sin(theta)
    npts = theta.shape[0]
    pbar = np.zeros((order + 1, order + 1, npts))
    pbar[0, 0] = _INV_SQRT_4PI
    for m in range(1, order + 1):
        pbar[m, m] = -math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pbar[m - 1, m - 1]
    for m in range(order + 1):
        if m + 1 <= order:
            pbar[m + 1, m] = a[m + 1, m] * x * pbar[m, m]
        for n in range(m + 2, order + 1):
            pbar[n, m] = a[n, m] * x * pbar[n - 1, m] + b[n, m] * pbar[n - 2, m]
    out = np.empty((npts, (order + 1) ** 2), dtype=np.complex128)
    for n in range(order + 1):
        base = n * n + n
        out[:, base] = pbar[n, 0]
        for m in range(1, n + 1):
            val = pbar[n, m] * np.exp(1j * m * phi)
            out[:, base + m] = val
            out[:, base - m] = (-1) ** m * np.conj(val)
    return out


# ---------------------------------------------------------------------------
# Image-source enumeration
# ---------------------------------------------------------------------------


@njit
def _image_loop(dims, src, mic, max_dist):
    reach = np.empty(3, dtype=np.int64)
    for ax in range(3):
        reach[ax] = int(math.ceil(max_dist / (2.0 * dims[ax]))) + 1
    cap = 8 * (2 * reach[0] + 1) * (2 * reach[1] + 1) * (2 * reach[2] + 1)
    pos = np.empty((cap, 3))
    signs = np.empty((cap, 3), dtype=np.int64)
    bounces = np.empty(cap, dtype=np.int64)
    dist = np.empty(cap)
    count = 0
    for ix in range(-reach[0], reach[0] + 1):
        for iy in range(-reach[1], reach[1] + 1):
            for iz in range(-reach[2], reach[2] + 1):
                for par in range(8):
                    lattice = (ix, iy, iz)
                    d2 = 0.0
                    nb = 0
                    for ax in range(3):
                        flip = (par >> (2 - ax)) & 1
                        sgn = -1 if flip else 1
                        coord = 2.0 * lattice[ax] * dims[ax] + sgn * src[ax]
                        pos[count, ax] = coord
                        signs[count, ax] = sgn
                        nb += abs(2 * lattice[ax] - flip)
                        d2 += (coord - mic[ax]) ** 2
                    d = math.sqrt(d2)
                    if d <= max_dist:
                        bounces[count] = nb
                        dist[count] = d
                        count += 1
    return pos[:count].copy(), signs[:count].copy(), bounces[:count].copy(), dist[:count].copy()


def image_sources_numba(dims, src, mic, max_dist):
    return _image_loop(
        np.asarray(dims, dtype=np.float64),
        np.asarray(src, dtype=np.float64),
        np.asarray(mic, dtype=np.float64),
        float(max_dist),
    )


def image_sources_numpy(dims, src, mic, max_dist):
    dims = np.asarray(dims, dtype=np.float64)
    src = np.asarray(src, dtype=np.float64)
    mic = np.asarray(mic, dtype=np.float64)
    reach = np.ceil(max_dist / (2.0 * dims)).astype(np.int64) + 1
    axes = [np.arange(-r, r + 1) for r in reach]
    lat = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 1, 3)
    flips = ((np.arange(8)[:, None] >> np.array([2, 1, 0])) & 1).reshape(1, 8, 3)
    sgn = 1 - 2 * flips
    pos = (2.0 * lat * dims + sgn * src).reshape(-1, 3)
    signs = np.broadcast_to(sgn, (lat.shape[0], 8, 3)).reshape(-1, 3).astype(np.int64)
    bounces = np.abs(2 * lat - flips).sum(axis=-1).reshape(-1).astype(np.int64)
    dist = np.sqrt(((pos - mic) ** 2).sum(axis=1))
    keep = dist <= max_dist
    return pos[keep], signs[keep], bounces[keep], dist[keep]


# ---------------------------------------------------------------------------
# Grid local maxima (8-neighbourhood, periodic in azimuth)
# ---------------------------------------------------------------------------


@njit
def _local_max_loop(values):
    nt, nph = values.shape
    mask = np.zeros((nt, nph), dtype=np.bool_)
    for i in range(nt):
        i0 = max(i - 1, 0)
        i1 = min(i + 1, nt - 1)
        for j in range(nph):
            v = values[i, j]
            jm = j - 1 if j > 0 else nph - 1
            jp = j + 1 if j < nph - 1 else 0
            ok = True
            for ii in range(i0, i1 + 1):
                if values[ii, jm] > v or values[ii, jp] > v or (ii != i and values[ii, j] > v):
                    ok = False
                    break
            mask[i, j] = ok
    return mask


def local_maxima_numba(values):
    return _local_max_loop(np.ascontiguousarray(values, dtype=np.float64))


def local_maxima_numpy(values):
    values = np.asarray(values, dtype=np.float64)
    padded = np.pad(values, ((1, 1), (0, 0)), constant_values=-np.inf)
    mask = np.ones(values.shape, dtype=bool)
    for di in (-1, 0, 1):
        rows = padded[1 + di : 1 + di + values.shape[0]]
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            mask &= values >= np.roll(rows, -dj, axis=1)
    return mask


# ---------------------------------------------------------------------------
# Noise-subspace projection power, |U_n^H v|^2 per column of v
# ---------------------------------------------------------------------------


@njit
def _projection_loop(noise, steer):
    # row-wise accumulation keeps the inner loop on contiguous memory
    dim, k = noise.shape
    npts = steer.shape[1]
    out = np.zeros(npts)
    z = np.empty(npts, dtype=np.complex128)
    for c in range(k):
        z[:] = 0.0
        for d in range(dim):
            u = noise[d, c].conjugate()
            for p in range(npts):
                z[p] += u * steer[d, p]
        for p in range(npts):
            out[p] += z[p].real * z[p].real + z[p].imag * z[p].imag
    return out


def projection_power_numba(noise, steer):
    return _projection_loop(
        np.ascontiguousarray(noise, dtype=np.complex128),
        np.ascontiguousarray(steer, dtype=np.complex128),
    )


def projection_power_numpy(noise, steer):
    proj = noise.conj().T @ steer
    return np.einsum("kp,kp->p", proj.real, proj.real) + np.einsum("kp,kp->p", proj.imag, proj.imag)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def sh_matrix(theta, phi, order):
    """Rows of complex SH values, one row per direction, columns in (n, m) flattening order."""
    if _accel.numba_active():
        return sh_matrix_numba(theta, phi, order)
    return sh_matrix_numpy(theta, phi, order)


def image_sources(dims, src, mic, max_dist):
    if _accel.numba_active():
        return image_sources_numba(dims, src, mic, max_dist)
    return image_sources_numpy(dims, src, mic, max_dist)


def local_maxima(values):
    if _accel.numba_active():
        return local_maxima_numba(values)
    return local_maxima_numpy(values)


def projection_power(noise, steer):
    if _accel.numba_active():
        return projection_power_numba(noise, steer)
    return projection_power_numpy(noise, steer)
