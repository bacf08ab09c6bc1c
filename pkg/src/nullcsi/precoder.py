"""Null-space extraction and projection precoding."""

from dataclasses import dataclass

import numpy as np

from .linalg import SubspaceBasis, as_matrix, projector, svd


@dataclass(frozen=True)
class NullSpaceResult:
    """Thresholded right null space of a channel (estimate).

    Attributes
    ----------
    basis : SubspaceBasis
        Right-singular vectors treated as null directions.
    threshold_used : float
        Absolute threshold the singular values were compared against.
    sigma_all : ndarray
        All singular values of the input, descending.
    projector : ndarray
        Orthogonal projector onto ``span(basis)``; zero if the basis is
        empty.
    """

    basis: SubspaceBasis
    threshold_used: float
    sigma_all: np.ndarray
    projector: np.ndarray

    @property
    def dim(self):
        return self.basis.dim

    @property
    def is_empty(self):
        return self.basis.dim == 0


def extract_null_space(G, threshold=0.1, mode="relative"):
    """Null space of `G` after zeroing singular values at or below a threshold.

    Structural null directions (the trailing ``cols - rows`` columns of V for
    a wide matrix) are always included.

    Parameters
    ----------
    G : array_like, (rows, cols)
    threshold : float
        Nonnegative threshold. In ``relative`` mode it multiplies the
        largest singular value.
    mode : {'relative', 'absolute'}

    Returns
    -------
    NullSpaceResult
    """
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    if mode not in ("relative", "absolute"):
        raise ValueError(f"mode must be 'relative' or 'absolute', got {mode!r}")
    res = svd(G)
    cols = res.V.shape[0]
    sigma = res.sigma
    smax = sigma[0] if len(sigma) else 0.0
    thr = float(threshold * smax) if mode == "relative" else float(threshold)
    # sigma is descending, so the qualifying set is a suffix
    n_small = int(np.count_nonzero(sigma <= thr))
    rank_side = len(sigma) - n_small
    basis = SubspaceBasis(res.V[:, rank_side:])
    return NullSpaceResult(basis, thr, sigma, projector(basis))


def identity_precoder(n_tx):
    """Pseudo null-space result for open-loop transmission (no projection)."""
    basis = SubspaceBasis(np.eye(n_tx, dtype=np.complex128))
    return NullSpaceResult(basis, np.inf, np.zeros(0), np.eye(n_tx, dtype=np.complex128))


def project_symbols(null, x):
    """Apply the null-space projector to a transmit vector or block.

    `x` may be a length-M vector or an ``(M, n)`` block of symbol columns.
    """
    x = np.asarray(x, dtype=np.complex128)
    P = null.projector
    if x.shape[0] != P.shape[1]:
        raise ValueError(f"symbol length {x.shape[0]} does not match projector size {P.shape[1]}")
    return P @ x


def spillover_power(H_true, null_est, symbol_energy):
    """Mean SU power reaching the PU through the estimated projector.

    For white symbols of total energy `symbol_energy` spread evenly over the
    M transmit antennas this is ``(E_s / M) * ||H_true P_est||_F^2``.
    """
    H = as_matrix(H_true, "H_true")
    P = null_est.projector
    if H.shape[1] != P.shape[0]:
        raise ValueError(f"channel has {H.shape[1]} columns, projector is {P.shape[0]}x{P.shape[0]}")
    if symbol_energy < 0:
        raise ValueError("symbol_energy must be >= 0")
    M = H.shape[1]
    return float(symbol_energy / M * np.sum(np.abs(H @ P) ** 2))
