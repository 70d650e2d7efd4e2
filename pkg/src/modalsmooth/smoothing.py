"""Cross-spectrum estimators: frequency, modal, and modal followed by frequency smoothing."""

from dataclasses import dataclass, field

import numpy as np

from .synthesis import selector


@dataclass
class CrossSpectrum:
    mat: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.mat.shape[0]


def _hermitize(S):
    return 0.5 * (S + S.conj().T)


def _order_of(n_cols):
    order = int(round(np.sqrt(n_cols))) - 1
    if (order + 1) ** 2 != n_cols:
        raise ValueError(f"{n_cols} columns is not a complete SH order")
    return order


def modal_vector(A, n, m):
    """Column of ``A`` driven by loudspeaker SH channel (n, m)."""
    return A @ selector(n, m, _order_of(A.shape[1]))


def frequency_smooth(vectors):
    """Average of a a^H over the supplied bins; ``vectors`` has one row per bin."""
    V = np.asarray(vectors)
    if V.ndim != 2 or V.shape[0] == 0:
        raise ValueError("need at least one vector")
    S = V.T @ V.conj() / V.shape[0]
    return CrossSpectrum(_hermitize(S), {"estimator": "frequency", "averaged": V.shape[0]})


def _check_order(A, ls_order):
    if ls_order is None:
        return _order_of(A.shape[-1])
    if A.shape[-1] != (ls_order + 1) ** 2:
        raise ValueError(f"A has {A.shape[-1]} columns, expected {(ls_order + 1) ** 2} for order {ls_order}")
    return ls_order


def modal_smooth(A, ls_order=None):
    """(1 / (N_L+1)^2) A A^H."""
    A = np.asarray(A)
    ls_order = _check_order(A, ls_order)
    n_ch = (ls_order + 1) ** 2
    S = A @ A.conj().T / n_ch
    return CrossSpectrum(_hermitize(S), {"estimator": "modal", "averaged": n_ch})


def modal_smooth_channel_sum(A, ls_order=None):
    """Same estimate as :func:`modal_smooth`, accumulated channel by channel."""
    A = np.asarray(A)
    ls_order = _check_order(A, ls_order)
    S = np.zeros((A.shape[0], A.shape[0]), dtype=complex)
    count = 0
    for n in range(ls_order + 1):
        for m in range(-n, n + 1):
            a = A @ selector(n, m, ls_order)
            S += np.outer(a, a.conj())
            count += 1
    return CrossSpectrum(S / count, {"estimator": "modal", "averaged": count})


def truncate_loudspeaker_order(A, new_order):
    """Keep the first (new_order+1)^2 loudspeaker channels; works on a stack of matrices too."""
    A = np.asarray(A)
    order = _order_of(A.shape[-1])
    if new_order < 0 or new_order > order:
        raise ValueError(f"cannot truncate order {order} to {new_order}")
    return A[..., : (new_order + 1) ** 2]


def combined_smooth(A_stack, ls_order=None):
    """Frequency average of per-bin modal smoothing results."""
    A_stack = np.asarray(A_stack)
    if A_stack.ndim != 3 or A_stack.shape[0] == 0:
        raise ValueError("need a non-empty stack of matrices")
    ls_order = _check_order(A_stack, ls_order)
    n_ch = (ls_order + 1) ** 2
    S = np.einsum("qik,qjk->ij", A_stack, A_stack.conj()) / (n_ch * A_stack.shape[0])
    return CrossSpectrum(
        _hermitize(S), {"estimator": "combined", "averaged": n_ch * A_stack.shape[0]}
    )


def dominant_count(S, rel_threshold=1e-6):
    """Number of eigenvalues above ``rel_threshold`` times the largest."""
    mat = S.mat if isinstance(S, CrossSpectrum) else S
    w = np.linalg.eigvalsh(mat)[::-1]
    return int(np.sum(w > rel_threshold * w[0]))
