"""
Complex linear-algebra primitives.

Everything the perturbation analysis is phrased in lives here: a full SVD,
the two unitarily invariant norms, orthogonal projectors built from a basis,
and canonical (principal) angles between subspaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Functions never
mutate their inputs.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

TOL_UNITARY = 1e-10
TOL_RECON = 1e-10
# Largest roundoff overshoot of a cosine above 1 that is silently clamped.
TOL_CLAMP = 1e-8


class NumericalError(RuntimeError):
    """A factorization failed to converge or produced non-finite output."""


class DegenerateBasisError(ValueError):
    """The Gram matrix of a basis is singular."""


def as_matrix(a, name="matrix"):
    """Return `a` as a finite 2-D complex128 array.

    Parameters
    ----------
    a : array_like
        Input; 1-D input is treated as a column vector.
    name : str
        Used in error messages.

    Raises
    ------
    ValueError
        If `a` is not 1-D/2-D, is empty along a dimension, or has
        non-finite entries.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


class SvdResult(NamedTuple):
    """Full singular value decomposition ``A = U @ diag(sigma) @ V^H``.

    ``U`` is rows x rows, ``V`` is cols x cols and ``sigma`` holds the
    ``min(rows, cols)`` singular values in descending order.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self):
        rows, cols = self.U.shape[0], self.V.shape[0]
        S = np.zeros((rows, cols), dtype=np.complex128)
        k = len(self.sigma)
        S[:k, :k] = np.diag(self.sigma)
        return self.U @ S @ self.V.conj().T


def svd(a):
    """Full SVD of a complex matrix.

    The right factor is returned as ``V`` (not ``V^H``), so that null-space
    directions are the trailing columns of ``V``.

    Raises
    ------
    NumericalError
        If both the divide-and-conquer and the QR-iteration LAPACK drivers
        fail, or the output is not finite.
    """
    a = as_matrix(a)
    try:
        U, s, Vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError:
        try:
            U, s, Vh = scipy.linalg.svd(a, full_matrices=True, lapack_driver="gesvd")
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericalError(f"SVD did not converge: {exc}") from exc
    if not (np.all(np.isfinite(U)) and np.all(np.isfinite(s)) and np.all(np.isfinite(Vh))):
        raise NumericalError("SVD produced non-finite factors")
    return SvdResult(U, s, Vh.conj().T)


def singular_values(a):
    """Descending singular values of `a` (no vectors)."""
    a = as_matrix(a)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc


def spectral_norm(a):
    """Largest singular value of `a`; 0 for the zero matrix."""
    s = singular_values(a)
    return float(s[0]) if len(s) else 0.0


def frobenius_norm(a):
    """sqrt of the sum of squared moduli of the entries."""
    a = as_matrix(a)
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis stored as the columns of `matrix`.

    A zero-column basis (``dim == 0``) represents the trivial subspace and is
    allowed; it carries the ambient dimension in ``matrix.shape[0]``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim == 1:
            m = m.reshape(-1, 1)
        if m.ndim != 2 or not np.all(np.isfinite(m)):
            raise ValueError("basis must be a finite 2-D array")
        if m.shape[1]:
            err = np.linalg.norm(m.conj().T @ m - np.eye(m.shape[1]))
            if err > TOL_UNITARY * max(1, m.shape[1]):
                raise ValueError(f"basis columns are not orthonormal (error {err:.3e})")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[1]

    @property
    def ambient(self):
        return self.matrix.shape[0]

    @classmethod
    def empty(cls, ambient):
        return cls(np.zeros((ambient, 0), dtype=np.complex128))

    @classmethod
    def from_vectors(cls, a):
        """Orthonormalize the columns of `a` (must have full column rank)."""
        a = as_matrix(a)
        q, r = np.linalg.qr(a)
        if np.min(np.abs(np.diag(r))) <= 1e-12 * max(1.0, np.abs(r).max()):
            raise DegenerateBasisError("columns are linearly dependent")
        return cls(q)


def projector(basis):
    """Orthogonal projector ``B (B^H B)^{-1} B^H`` onto ``span(B)``.

    The Gram-matrix inverse is kept even though an orthonormal `B` makes it
    the identity; it absorbs small departures from orthonormality.

    Parameters
    ----------
    basis : SubspaceBasis or array_like
        Columns spanning the subspace.

    Returns
    -------
    P : ndarray, (n, n)
        Hermitian idempotent matrix of rank ``dim``. The zero matrix for an
        empty basis.

    Raises
    ------
    DegenerateBasisError
        If ``B^H B`` is numerically singular.
    """
    B = basis.matrix if isinstance(basis, SubspaceBasis) else as_matrix(basis, "basis")
    n, k = B.shape
    if k == 0:
        return np.zeros((n, n), dtype=np.complex128)
    gram = B.conj().T @ B
    if np.linalg.cond(gram) > 1e12:
        raise DegenerateBasisError("basis Gram matrix is singular")
    P = B @ np.linalg.solve(gram, B.conj().T)
    # symmetrize away roundoff so P is exactly Hermitian
    return 0.5 * (P + P.conj().T)


def canonical_angles(W, Z):
    """Canonical angles between ``span(W)`` and ``span(Z)``.

    Returns ``min(dim W, dim Z)`` angles in radians, ascending. The angles
    are the arccosines of the singular values of ``W^H Z``; angles below
    pi/4 are taken from the sines instead (singular values of the smaller
    basis projected off the larger one), since arccos is ill-conditioned
    near 1.

    Raises
    ------
    ValueError
        If the ambient dimensions differ, or a cosine exceeds 1 by more than
        the clamp tolerance (the inputs were not orthonormal).
    """
    Wm = W.matrix if isinstance(W, SubspaceBasis) else SubspaceBasis(W).matrix
    Zm = Z.matrix if isinstance(Z, SubspaceBasis) else SubspaceBasis(Z).matrix
    if Wm.shape[0] != Zm.shape[0]:
        raise ValueError(f"ambient dimensions differ: {Wm.shape[0]} vs {Zm.shape[0]}")
    if Wm.shape[1] == 0 or Zm.shape[1] == 0:
        return np.zeros(0)
    c = np.linalg.svd(Wm.conj().T @ Zm, compute_uv=False)
    if c.max() > 1 + TOL_CLAMP:
        raise ValueError(f"cosine {c.max():.12f} exceeds 1; bases are not orthonormal")
    c = np.clip(c, 0.0, 1.0)
    big, small = (Wm, Zm) if Wm.shape[1] >= Zm.shape[1] else (Zm, Wm)
    resid = small - big @ (big.conj().T @ small)
    s = np.clip(np.sort(np.linalg.svd(resid, compute_uv=False)), 0.0, 1.0)
    # descending cosines pair with ascending sines
    out = np.arccos(c)
    use_sin = s < np.sqrt(0.5)
    out[use_sin] = np.arcsin(s[use_sin])
    return np.sort(out)


def sin_theta_norm(angles, norm="frobenius"):
    """``||sin Theta||`` in the Frobenius (root-sum-square) or spectral (max) norm."""
    s = np.sin(np.asarray(angles, dtype=float))
    if norm == "frobenius":
        return float(np.sqrt(np.sum(s ** 2)))
    if norm == "spectral":
        return float(s.max()) if s.size else 0.0
    raise ValueError(f"unknown norm {norm!r}")


def random_unitary(n, rng):
    """Haar-distributed n x n unitary matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def matrix_with_singular_values(rows, cols, sigma, rng):
    """Random ``rows x cols`` matrix ``U diag(sigma) V^H`` with Haar factors.

    `sigma` may be shorter than ``min(rows, cols)``; missing values are zero.
    """
    k = min(rows, cols)
    s = np.zeros(k)
    sigma = np.asarray(sigma, dtype=float)
    s[: len(sigma)] = sigma
    S = np.zeros((rows, cols))
    S[:k, :k] = np.diag(s)
    return random_unitary(rows, rng) @ S @ random_unitary(cols, rng).conj().T
