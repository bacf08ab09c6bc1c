"""
Perturbation bounds for singular values and singular subspaces.

Given a channel ``H`` and its erroneous estimate ``G = H + T`` this module
evaluates

* the Weyl (per index, ``||T||_2``) and Mirsky (aggregate, ``||T||_F``)
  bounds on singular-value shifts,
* the gamma/eta bounds describing how zero singular values are lifted,
* Wedin's residual bound on the leading singular subspaces,
* the interval form of the sin-theta theorem for the trailing (null-side)
  subspaces,

and turns residual-over-gap ratios into BER and capacity bounds for the
primary receiver. All bounds are returned together with the directly
measured quantity they bound, never asserted silently.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import erfc

from .channels import PathLossParams, path_gain
from .linalg import (
    as_matrix,
    canonical_angles,
    frobenius_norm,
    sin_theta_norm,
    singular_values,
    spectral_norm,
    svd,
)

SQRT2 = math.sqrt(2.0)
# Slack for floating-point roundoff when checking a bound holds.
BOUND_SLACK = 1e-9


class GapViolationError(ValueError):
    """A bound was requested with a non-positive singular-value gap."""


def qfunc(x):
    """Gaussian tail probability ``Q(x) = erfc(x / sqrt 2) / 2``."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / SQRT2)


def _check_same_shape(H, T):
    if H.shape != T.shape:
        raise ValueError(f"shape mismatch: {H.shape} vs {T.shape}")


def _norm(a, norm):
    if a.size == 0:
        return 0.0
    if norm == "frobenius":
        return frobenius_norm(a)
    if norm == "spectral":
        return spectral_norm(a)
    raise ValueError(f"unknown norm {norm!r}")


@dataclass(frozen=True)
class SingularShift:
    sigma: np.ndarray
    sigma_tilde: np.ndarray
    weyl_bound: float
    mirsky_bound: float

    @property
    def shifts(self):
        return np.abs(self.sigma_tilde - self.sigma)

    @property
    def max_shift(self):
        return float(self.shifts.max()) if self.shifts.size else 0.0

    @property
    def rms_aggregate(self):
        """``sqrt(sum (sigma_tilde - sigma)^2)``, the Mirsky left-hand side."""
        return float(np.sqrt(np.sum(self.shifts ** 2)))

    def weyl_satisfied(self, tol=1e-10):
        return bool(np.all(self.shifts <= self.weyl_bound + tol))

    def mirsky_satisfied(self, tol=1e-10):
        return self.rms_aggregate <= self.mirsky_bound + tol


def singular_shift(H, T):
    """Singular values of `H` and ``H + T`` with the Weyl and Mirsky bounds."""
    H = as_matrix(H, "H")
    T = as_matrix(T, "T")
    _check_same_shape(H, T)
    return SingularShift(
        sigma=singular_values(H),
        sigma_tilde=singular_values(H + T),
        weyl_bound=spectral_norm(T),
        mirsky_bound=frobenius_norm(T),
    )


class EtaGamma(NamedTuple):
    gamma_abs_bound: float
    eta_lo: float
    eta_hi: float


def column_space_projector(H, rtol=None):
    """Orthogonal projector onto the numerical column space of `H`."""
    H = as_matrix(H, "H")
    res = svd(H)
    if rtol is None:
        rtol = max(H.shape) * np.finfo(float).eps
    smax = res.sigma[0] if len(res.sigma) else 0.0
    rank = int(np.count_nonzero(res.sigma > rtol * smax)) if smax > 0 else 0
    Ur = res.U[:, :rank]
    return Ur @ Ur.conj().T


def eta_gamma_decomposition(H, T, i=0):
    """Bounds on the terms of ``sigma_tilde_i^2 = (sigma_i + gamma_i)^2 + eta_i^2``.

    With ``P`` the projector onto the column space of `H` and
    ``P_perp = I - P``:

    * ``|gamma_i| <= ||P T||_2``
    * ``inf_2(P_perp T) <= eta_i <= ||P_perp T||_2``

    where ``inf_2`` is the smallest singular value. The bounds do not depend
    on `i`; it is validated so callers cannot ask about a non-existent
    singular value.
    """
    H = as_matrix(H, "H")
    T = as_matrix(T, "T")
    _check_same_shape(H, T)
    p = min(H.shape)
    if not 0 <= i < p:
        raise IndexError(f"singular value index {i} out of range for {p} values")
    P = column_space_projector(H)
    PT = P @ T
    PperpT = T - PT
    s_perp = singular_values(PperpT)
    return EtaGamma(
        gamma_abs_bound=spectral_norm(PT),
        eta_lo=float(s_perp[-1]),
        eta_hi=float(s_perp[0]),
    )


@dataclass(frozen=True)
class WedinInput:
    H: np.ndarray
    G: np.ndarray
    split_index: int

    def __post_init__(self):
        H = as_matrix(self.H, "H")
        G = as_matrix(self.G, "G")
        _check_same_shape(H, G)
        if not 1 <= self.split_index <= min(H.shape):
            raise ValueError(f"split_index must be in [1, {min(H.shape)}], got {self.split_index}")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "G", G)


@dataclass(frozen=True)
class SinThetaBoundResult:
    """Residual-over-gap bound next to the subspace distance it bounds."""

    epsilon: float
    delta: float
    bound: float
    gap_satisfied: bool
    measured_sin_theta: float

    @property
    def holds(self):
        """True when the gap condition fails or the bound is respected."""
        return (not self.gap_satisfied) or self.measured_sin_theta <= self.bound + BOUND_SLACK

    @property
    def ratio(self):
        """bound / measured (inf when nothing moved)."""
        if self.measured_sin_theta == 0:
            return math.inf if self.bound > 0 else 1.0
        return self.bound / self.measured_sin_theta

    @property
    def eps_over_delta(self):
        return self.epsilon / self.delta if self.delta > 0 else math.inf


def _sin_between(A, B, norm):
    if A.shape[1] == 0 or B.shape[1] == 0:
        return 0.0
    return sin_theta_norm(canonical_angles(A, B), norm)


def wedin_bound(inp):
    """Wedin's bound on the leading singular subspaces.

    Computes the residuals ``R = H V1~ - U1~ S1~`` and
    ``S = H^H U1~ - V1~ S1~`` from the leading `split_index` singular
    triplets of ``G``, the gap

        delta = min( min |sigma(S1~) - sigma(S2)|, min sigma(S1~) )

    and ``bound = sqrt(||R||_F^2 + ||S||_F^2) / delta``. The measured side is
    ``sqrt(||sin Phi||_F^2 + ||sin Theta||_F^2)`` for the left and right
    subspace pairs.

    The result is returned even when delta <= 0; `gap_satisfied` is then
    False and the bound is infinite.
    """
    H, G, r = inp.H, inp.G, inp.split_index
    sH, sG = svd(H), svd(G)
    U1, V1 = sH.U[:, :r], sH.V[:, :r]
    Ut1, Vt1 = sG.U[:, :r], sG.V[:, :r]
    St1 = sG.sigma[:r]
    R = H @ Vt1 - Ut1 * St1
    S = H.conj().T @ Ut1 - Vt1 * St1
    eps = math.sqrt(frobenius_norm(R) ** 2 + frobenius_norm(S) ** 2)

    sigma2 = sH.sigma[r:]
    sep = np.min(np.abs(St1[:, None] - sigma2[None, :])) if sigma2.size else math.inf
    delta = float(min(sep, St1.min()))
    gap = delta > 0

    measured = math.sqrt(
        _sin_between(U1, Ut1, "frobenius") ** 2 + _sin_between(V1, Vt1, "frobenius") ** 2
    )
    bound = eps / delta if gap else math.inf
    return SinThetaBoundResult(eps, delta, bound, gap, measured)


def _interval_gap(inside, outside):
    """Largest delta with `outside` clear of ``(min(inside) - delta, max(inside) + delta)``."""
    lo, hi = inside.min(), inside.max()
    dist = np.maximum(np.maximum(lo - outside, outside - hi), 0.0)
    return float(dist.min())


def null_side_spectrum(sigma, rows, cols, r):
    """Singular values of the trailing block ``Y0^H G X0``.

    A rectangular trailing block also has an implicit zero singular value;
    it is appended so the interval condition sees it.
    """
    tail = np.asarray(sigma[r:], dtype=float)
    if rows - r != cols - r:
        tail = np.append(tail, 0.0)
    return tail


def extended_sin_theta_bound(H, G, r, norm="frobenius", k=None):
    """Interval sin-theta bound on the trailing (null-side) subspaces.

    The trailing singular vectors ``X0`` (right) and ``Y0`` (left) of ``G``
    beyond index `r` are plugged into ``H``::

        R01 = H X0 - Y0 D0,    R02 = H^H Y0 - X0 D0^H,    D0 = Y0^H G X0

    With ``epsilon = max(||R01||, ||R02||)`` and delta the separation between
    the trailing spectrum of ``G`` and the leading `r` singular values of
    ``H`` (either set may play the role of the enclosing interval), the bound
    is ``k * epsilon / delta`` on

        max(||sin theta(R(G0), R(H0))||, ||sin theta(R(G0^H), R(H0^H))||).

    Parameters
    ----------
    H, G : array_like, (rows, cols)
        True channel and estimate.
    r : int
        Number of leading (non-null) singular triplets, ``0 <= r <= min``.
    norm : {'frobenius', 'spectral'}
        Norm used for the residuals and the measured subspace distance.
    k : float, optional
        Norm constant; defaults to sqrt(2), valid for both norms offered.
        Use 2 for a generic unitarily invariant norm.

    Raises
    ------
    ValueError
        If both trailing blocks are empty (``r == rows == cols``).
    """
    H = as_matrix(H, "H")
    G = as_matrix(G, "G")
    _check_same_shape(H, G)
    rows, cols = H.shape
    if not 0 <= r <= min(rows, cols):
        raise ValueError(f"split r={r} out of range for a {rows}x{cols} matrix")
    if r == rows and r == cols:
        raise ValueError("null-side blocks are empty: nothing to bound")
    k = SQRT2 if k is None else float(k)
    if k < 1:
        raise ValueError("k must be >= 1")

    sH, sG = svd(H), svd(G)
    X0, Y0 = sG.V[:, r:], sG.U[:, r:]
    V0, U0 = sH.V[:, r:], sH.U[:, r:]
    D0 = Y0.conj().T @ G @ X0
    R01 = H @ X0 - Y0 @ D0
    R02 = H.conj().T @ Y0 - X0 @ D0.conj().T
    eps = max(_norm(R01, norm), _norm(R02, norm))

    measured = max(_sin_between(Y0, U0, norm), _sin_between(X0, V0, norm))
    if r == 0:
        # both subspaces are the whole space on at least one side
        return SinThetaBoundResult(eps, math.inf, 0.0, True, measured)

    g0 = null_side_spectrum(sG.sigma, rows, cols, r)
    h1 = sH.sigma[:r]
    delta = max(_interval_gap(g0, h1), _interval_gap(h1, g0))
    gap = delta > 0
    bound = k * eps / delta if gap else math.inf
    return SinThetaBoundResult(eps, delta, bound, gap, measured)


def capacity_degradation_weyl_bound(T):
    """Loose capacity-degradation bound ``||T||_2`` from Weyl's theorem.

    Units are whatever the capacity is measured in; the bound is only
    indicative.
    """
    return spectral_norm(T)


@dataclass(frozen=True)
class LinkBudget:
    """Energies at the primary receiver.

    Attributes
    ----------
    e_p : float
        PU energy per bit (> 0).
    e_s : float
        SU energy per symbol vector (>= 0), before path loss.
    n_0 : float
        Noise spectral density (> 0).
    path : PathLossParams
    """

    e_p: float = 10.0
    e_s: float = 3000.0
    n_0: float = 1.0
    path: PathLossParams = PathLossParams(distance=2.0, attenuation_exponent=3.0)

    def __post_init__(self):
        if not self.e_p > 0:
            raise ValueError(f"e_p must be > 0, got {self.e_p}")
        if not self.e_s >= 0:
            raise ValueError(f"e_s must be >= 0, got {self.e_s}")
        if not self.n_0 > 0:
            raise ValueError(f"n_0 must be > 0, got {self.n_0}")

    @property
    def received_su_energy(self):
        """SU energy after path loss, ``e_s * d ** -exponent``."""
        return self.e_s * path_gain(self.path)


def _misalignment_power(budget, x):
    return budget.received_su_energy * x


def ber_upper_bound(budget, epsilon, delta, k=SQRT2):
    """Upper bound on the PU bit error probability under null-space leakage.

    ``Q( sqrt( E_p / (N_0 + E_s d^-a (epsilon/delta) k) ) )``; ``k = 1`` gives
    the bound built from the plain sin-theta theorem.
    """
    if not delta > 0:
        raise GapViolationError(f"delta must be > 0, got {delta}")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if k < 1:
        raise ValueError("k must be >= 1")
    interference = _misalignment_power(budget, epsilon / delta * k)
    return float(qfunc(math.sqrt(budget.e_p / (budget.n_0 + interference))))


class CapacityBounds(NamedTuple):
    c_clean: float
    c_tilde: float
    c_tilde_lower: float
    degradation_upper: float


def capacity_bounds(budget, sin_theta, epsilon, delta, k=SQRT2):
    """Capacity (bits) with and without null-space misalignment, and its bounds.

    * ``c_clean = log2(E_p / N_0)``
    * ``c_tilde = log2(E_p / (N_0 + E_s d^-a sin_theta))``
    * ``c_tilde_lower`` replaces sin_theta by ``k epsilon / delta``
    * ``degradation_upper = c_clean - c_tilde_lower``
    """
    if not delta > 0:
        raise GapViolationError(f"delta must be > 0, got {delta}")
    if sin_theta < 0 or epsilon < 0:
        raise ValueError("sin_theta and epsilon must be >= 0")
    n0, ep = budget.n_0, budget.e_p
    c_clean = math.log2(ep / n0)
    c_tilde = math.log2(ep / (n0 + _misalignment_power(budget, sin_theta)))
    worst = n0 + _misalignment_power(budget, epsilon / delta * k)
    return CapacityBounds(c_clean, c_tilde, math.log2(ep / worst), math.log2(worst / n0))
