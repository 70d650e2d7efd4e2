"""MUSIC direction finding on SH-domain cross-spectra."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import kernels
from .sh_math import SphereGrid, great_circle_deg, sh_matrix
from .smoothing import CrossSpectrum


class PeakDeficitError(RuntimeError):
    """Fewer separated spectrum maxima than requested DOAs.

    ``partial`` holds the peaks that were found.
    """

    def __init__(self, wanted, partial):
        self.wanted = wanted
        self.partial = partial
        super().__init__(f"found {len(partial.directions)} separated peaks, {wanted} requested")


@dataclass
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray


@dataclass
class MusicSpectrum:
    grid: SphereGrid
    values: np.ndarray


@dataclass
class DoaEstimate:
    directions: list
    peak_values: np.ndarray
    grid_indices: np.ndarray


def hermitian_eig(S, tol=1e-10):
    """Eigenvalues in descending order with matching unitary eigenvectors."""
    mat = S.mat if isinstance(S, CrossSpectrum) else np.asarray(S)
    scale = max(np.linalg.norm(mat), np.finfo(float).tiny)
    if np.linalg.norm(mat - mat.conj().T) > tol * scale:
        raise ValueError("matrix is not Hermitian")
    w, U = np.linalg.eigh(mat)
    w, U = w[::-1].copy(), U[:, ::-1].copy()
    trace = abs(np.trace(mat).real)
    w[(w < 0) & (w >= -tol * trace)] = 0.0
    return EigenDecomposition(values=w, vectors=U)


def split_subspaces(eig, n_signals):
    dim = eig.vectors.shape[0]
    if not 0 < n_signals < dim:
        raise ValueError(f"signal count {n_signals} leaves no noise subspace in dimension {dim}")
    return eig.vectors[:, n_signals:]


def estimate_signal_count(eig):
    """Position of the largest ratio between consecutive eigenvalues."""
    w = np.asarray(eig.values, dtype=float)
    if w.shape[0] < 2:
        raise ValueError("need at least two eigenvalues")
    floor = max(w[0] * np.finfo(float).eps, np.finfo(float).tiny)
    w = np.maximum(w, floor)
    ratios = w[:-1] / w[1:]
    # argmax returns the first maximum, i.e. the smaller count on ties
    return int(np.argmax(ratios)) + 1


def eigenvalues_db(eig):
    w = np.maximum(np.asarray(eig.values, dtype=float), np.finfo(float).tiny)
    return 10.0 * np.log10(w / w[0])


def music_spectrum(noise_subspace, grid, mic_order, cap=1e15):
    """1 / |U_n^H v(theta)|^2 with v the column steering vector y^H(theta)."""
    steer = sh_matrix(grid.theta, grid.phi, mic_order).conj().T
    denom = kernels.projection_power(noise_subspace, steer)
    return MusicSpectrum(grid=grid, values=1.0 / np.maximum(denom, 1.0 / cap))


def find_peaks(spec, n_peaks, min_separation_deg=5.0):
    """Strongest ``n_peaks`` grid-local maxima at least ``min_separation_deg`` apart."""
    grid = spec.grid
    if grid.shape is None:
        raise ValueError("peak search needs an equiangular grid")
    mask = kernels.local_maxima(spec.values.reshape(grid.shape)).ravel()
    cand = np.nonzero(mask)[0]
    cand = cand[np.argsort(-spec.values[cand], kind="stable")]
    chosen = []
    for idx in cand:
        ang = grid.angle(idx)
        if all(great_circle_deg(ang, grid.angle(j)) >= min_separation_deg for j in chosen):
            chosen.append(idx)
            if len(chosen) == n_peaks:
                break
    chosen = np.array(chosen, dtype=int)
    est = DoaEstimate(
        directions=[grid.angle(i) for i in chosen],
        peak_values=spec.values[chosen],
        grid_indices=chosen,
    )
    if len(chosen) < n_peaks:
        raise PeakDeficitError(n_peaks, est)
    return est


def great_circle_error(a, b):
    return great_circle_deg(a, b)


def match_errors(estimated, truth):
    """Great-circle error per true direction under the best one-to-one matching.

    Minimizes the summed error over assignments; with fewer estimates than
    true directions the unmatched truths get ``None``.
    """
    if not estimated:
        return [None] * len(truth)
    cost = np.array([[great_circle_deg(t, e) for e in estimated] for t in truth])
    rows, cols = linear_sum_assignment(cost)
    errors = [None] * len(truth)
    for r, c in zip(rows, cols):
        errors[r] = float(cost[r, c])
    return errors
