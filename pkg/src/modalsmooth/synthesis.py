"""SH-domain MIMO transfer matrices over a DFT grid.

Spectra use the ``exp(-i omega t)`` time convention throughout: a delay ``d``
appears as ``exp(+i omega d)``. Consequently the forward transform of a real
signal is ``conj(rfft(x))`` and its inverse is ``irfft(conj(X))``; with this
pairing a synthesized reflection lands at sample ``+d * fs``.
"""

from dataclasses import dataclass, replace

import numpy as np

from .array_model import b_diagonal, b_diagonal_dc, g_diagonal, g_diagonal_dc
from .room_model import enumerate_images
from .sh_math import n_coeffs, sh_index, steering_matrix


class ConditioningError(ValueError):
    """Plane-wave decomposition requested where a radial function is too small."""

    def __init__(self, freq_hz, order, ratio, floor):
        self.freq_hz = freq_hz
        self.order = order
        super().__init__(
            f"|b_{order}| / max|b| = {ratio:.3e} below floor {floor:.1e} at {freq_hz:.2f} Hz"
        )


@dataclass
class SpectrumMatrix:
    """Per-bin complex matrices on the one-sided DFT grid (or a subset of it)."""

    freqs: np.ndarray
    mats: np.ndarray
    fs: float
    n_fft: int
    bins: np.ndarray

    def __post_init__(self):
        if self.mats.shape[0] != self.freqs.shape[0] or self.bins.shape[0] != self.freqs.shape[0]:
            raise ValueError("one matrix per frequency bin required")

    @property
    def is_complete(self):
        return self.bins.shape[0] == self.n_fft // 2 + 1

    def full(self):
        """All ``n_fft`` bins, filling the negative half by conjugate symmetry."""
        self._require_complete()
        neg = np.conj(self.mats[1 : (self.n_fft + 1) // 2][::-1])
        return np.concatenate([self.mats, neg], axis=0)

    def to_time(self):
        """Real impulse responses, shape (n_fft, rows, cols)."""
        self._require_complete()
        return np.fft.irfft(np.conj(self.mats), n=self.n_fft, axis=0)

    @classmethod
    def from_time(cls, x, fs):
        n_fft = x.shape[0]
        mats = np.conj(np.fft.rfft(x, axis=0))
        bins = np.arange(mats.shape[0])
        return cls(freqs=bins * fs / n_fft, mats=mats, fs=fs, n_fft=n_fft, bins=bins)

    def select(self, bins):
        bins = np.asarray(bins, dtype=int)
        pos = np.searchsorted(self.bins, bins)
        if np.any(pos >= self.bins.shape[0]) or np.any(self.bins[np.minimum(pos, len(self.bins) - 1)] != bins):
            raise KeyError("requested bins not present")
        return replace(self, freqs=self.freqs[pos], mats=self.mats[pos], bins=bins)

    def _require_complete(self):
        if not self.is_complete:
            raise ValueError("operation needs every one-sided bin")


@dataclass(frozen=True)
class WindowSpec:
    start_s: float = 0.007
    length_samples: int = 1056

    def __post_init__(self):
        if self.start_s < 0 or self.length_samples < 1:
            raise ValueError("window start must be >= 0 and length >= 1")


def welch_window(length):
    if length == 1:
        return np.ones(1)
    half = (length - 1) / 2.0
    k = np.arange(length)
    return 1.0 - ((k - half) / half) ** 2


def selector(n, m, order):
    """Loudspeaker SH-channel selector d_nm of length (order+1)**2."""
    if not (0 <= n <= order and abs(m) <= n):
        raise IndexError(f"(n, m) = ({n}, {m}) outside order {order}")
    d = np.zeros(n_coeffs(order), dtype=complex)
    d[sh_index(n, m)] = 1.0
    return d


def bin_freqs(fs, n_fft):
    return np.arange(n_fft // 2 + 1) * fs / n_fft


def bins_in_band(fs, n_fft, fmin, fmax):
    f = bin_freqs(fs, n_fft)
    return np.nonzero((f >= fmin) & (f <= fmax))[0]


def nearest_bin(fs, n_fft, freq):
    return int(np.argmin(np.abs(bin_freqs(fs, n_fft) - freq)))


# --- assembly ---------------------------------------------------------------


def _steering(reflections, mic_order, ls_order):
    if not reflections:
        raise ValueError("at least one reflection is required")
    y_doa = steering_matrix([r.doa for r in reflections], mic_order)
    y_dor = steering_matrix([r.dor for r in reflections], ls_order)
    return y_doa, y_dor


def _core_batch(omegas, reflections, y_doa, y_dor):
    # sum_l lambda_l(w) y^H(theta_l) y(beta_l) for every w, via one matrix product
    amp = np.array([r.amplitude for r in reflections])
    delay = np.array([r.delay_s for r in reflections])
    lam = amp[None, :] * np.exp(1j * np.outer(omegas, delay))
    outer = np.conj(y_doa)[:, :, None] * y_dor[:, None, :]
    n_l, rows, cols = outer.shape
    return (lam @ outer.reshape(n_l, rows * cols)).reshape(len(omegas), rows, cols)


def assemble_A(omega, reflections, mic_cfg, ls_cfg):
    """Transfer matrix after plane-wave decomposition, summing reflections one by one."""
    if not reflections:
        raise ValueError("at least one reflection is required")
    g = g_diagonal(omega, ls_cfg)
    out = np.zeros((n_coeffs(mic_cfg.order), n_coeffs(ls_cfg.order)), dtype=complex)
    for r in reflections:
        y_t = steering_matrix([r.doa], mic_cfg.order)[0]
        y_b = steering_matrix([r.dor], ls_cfg.order)[0]
        lam = r.amplitude * np.exp(1j * omega * r.delay_s)
        out += np.outer(np.conj(y_t), y_b * g) * lam
    return out


def assemble_H(omega, reflections, mic_cfg, ls_cfg):
    return b_diagonal(omega, mic_cfg)[:, None] * assemble_A(omega, reflections, mic_cfg, ls_cfg)


def assemble_H_factored(omega, reflections, mic_cfg, ls_cfg):
    """B Y^H(Theta) Lambda Y(Phi) G with explicit steering matrices."""
    y_doa, y_dor = _steering(reflections, mic_cfg.order, ls_cfg.order)
    lam = np.diag([r.amplitude * np.exp(1j * omega * r.delay_s) for r in reflections])
    B = np.diag(b_diagonal(omega, mic_cfg))
    G = np.diag(g_diagonal(omega, ls_cfg))
    return B @ y_doa.conj().T @ lam @ y_dor @ G


def synthesize_reflections(reflections, mic_cfg, ls_cfg, fs, n_fft):
    """H(omega) on every one-sided bin for a given reflection list."""
    max_delay = max(r.delay_s for r in reflections) if reflections else 0.0
    if max_delay >= n_fft / fs:
        raise ValueError(
            f"n_fft={n_fft} spans {n_fft / fs * 1e3:.1f} ms, shorter than the "
            f"latest reflection at {max_delay * 1e3:.1f} ms (time aliasing)"
        )
    y_doa, y_dor = _steering(reflections, mic_cfg.order, ls_cfg.order)
    freqs = bin_freqs(fs, n_fft)
    omegas = 2 * np.pi * freqs
    core = _core_batch(omegas, reflections, y_doa, y_dor)
    b = np.empty((len(freqs), n_coeffs(mic_cfg.order)), dtype=complex)
    g = np.empty((len(freqs), n_coeffs(ls_cfg.order)), dtype=complex)
    b[0], g[0] = b_diagonal_dc(mic_cfg), g_diagonal_dc(ls_cfg)
    b[1:] = b_diagonal(omegas[1:], mic_cfg)
    g[1:] = g_diagonal(omegas[1:], ls_cfg)
    mats = b[:, :, None] * core * g[:, None, :]
    _realify_edges(mats, n_fft)
    return SpectrumMatrix(freqs=freqs, mats=mats, fs=fs, n_fft=n_fft, bins=np.arange(len(freqs)))


def synthesize_broadband(scene, mic_cfg, ls_cfg, fs=48000.0, n_fft=8192, max_delay_s=0.1):
    """Room transfer matrix H on the full one-sided grid from all images up to ``max_delay_s``."""
    if max_delay_s >= n_fft / fs:
        raise ValueError("n_fft too short for the requested image delay range (time aliasing)")
    return synthesize_reflections(enumerate_images(scene, max_delay_s), mic_cfg, ls_cfg, fs, n_fft)


def _realify_edges(mats, n_fft):
    # DC and (even n_fft) Nyquist bins of a real signal are real
    mats[0] = mats[0].real
    if n_fft % 2 == 0:
        mats[-1] = mats[-1].real


# --- noise, windowing, decomposition --------------------------------------------


def add_identification_noise(spec, misalignment_db, seed):
    """Add complex Gaussian identification error at a fixed normalized misalignment per bin.

    The generator for bin ``k`` is seeded by ``(seed, k)``, so the result does
    not depend on processing order.
    """
    if np.isneginf(misalignment_db):
        return replace(spec, mats=spec.mats.copy())
    if not np.isfinite(misalignment_db):
        raise ValueError("misalignment must be finite or -inf")
    ratio = 10.0 ** (misalignment_db / 10.0)
    n_el = spec.mats.shape[1] * spec.mats.shape[2]
    out = spec.mats.copy()
    last = spec.n_fft // 2
    for i, k in enumerate(spec.bins):
        rng = np.random.default_rng([int(seed), int(k)])
        var = ratio * np.sum(np.abs(spec.mats[i]) ** 2) / n_el
        shape = spec.mats.shape[1:]
        if k == 0 or (k == last and spec.n_fft % 2 == 0):
            noise = np.sqrt(var) * rng.standard_normal(shape)
        else:
            noise = np.sqrt(var / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        out[i] += noise
    return replace(spec, mats=out)


def window_samples(win, fs, n_fft):
    start = int(round(win.start_s * fs))
    if start + win.length_samples > n_fft:
        raise ValueError("time window extends beyond the DFT length")
    w = np.zeros(n_fft)
    w[start : start + win.length_samples] = welch_window(win.length_samples)
    return w


def apply_time_window(spec, win):
    w = window_samples(win, spec.fs, spec.n_fft)
    x = spec.to_time() * w[:, None, None]
    return SpectrumMatrix.from_time(x, spec.fs)


def plane_wave_decompose(spec, mic_cfg, floor=1e-3):
    """Divide each order-n microphone row block by b_n at every bin held in ``spec``."""
    if np.any(spec.freqs <= 0):
        raise ConditioningError(0.0, 1, 0.0, floor)
    b = b_diagonal(2 * np.pi * spec.freqs, mic_cfg)
    mags = np.abs(b)
    rel = mags / mags.max(axis=1, keepdims=True)
    bad = np.argwhere(rel < floor)
    if bad.size:
        i, col = bad[0]
        n = int(np.floor(np.sqrt(col)))
        raise ConditioningError(float(spec.freqs[i]), n, float(rel[i, col]), floor)
    return replace(spec, mats=spec.mats / b[:, :, None])
