"""
Channel realizations, CSI error matrices and path loss.

The Rician generator mixes a deterministic all-ones line-of-sight matrix
with i.i.d. circularly symmetric unit-variance Gaussian scattering::

    H = sqrt(K / (K + 1)) * H_los + sqrt(1 / (K + 1)) * H_nlos

so that every entry has unit mean power regardless of K.
"""

from dataclasses import dataclass

import numpy as np

PERTURBATION_FAMILIES = ("gaussian", "uniform", "none")


@dataclass(frozen=True)
class RicianParams:
    k_factor: float
    n_rx: int
    n_tx: int

    def __post_init__(self):
        if not (self.k_factor >= 0 and np.isfinite(self.k_factor)):
            raise ValueError(f"k_factor must be finite and >= 0, got {self.k_factor}")
        if self.n_rx < 1 or self.n_tx < 1:
            raise ValueError(f"antenna counts must be >= 1, got {self.n_rx}x{self.n_tx}")


@dataclass(frozen=True)
class PerturbationSpec:
    """Distribution of the CSI error matrix.

    `scale` is the per-part standard deviation for ``gaussian`` and the
    per-part half-width for ``uniform``; it is ignored for ``none``.
    """

    family: str = "gaussian"
    scale: float = 0.1

    def __post_init__(self):
        if self.family not in PERTURBATION_FAMILIES:
            raise ValueError(f"family must be one of {PERTURBATION_FAMILIES}, got {self.family!r}")
        if not (self.scale >= 0 and np.isfinite(self.scale)):
            raise ValueError(f"scale must be finite and >= 0, got {self.scale}")

    @property
    def is_zero(self):
        return self.family == "none" or self.scale == 0


@dataclass(frozen=True)
class PathLossParams:
    distance: float = 1.0
    attenuation_exponent: float = 3.0

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError(f"distance must be > 0, got {self.distance}")
        if not self.attenuation_exponent > 0:
            raise ValueError(f"attenuation_exponent must be > 0, got {self.attenuation_exponent}")


def complex_normal(rng, shape):
    """i.i.d. CN(0, 1) samples (each part has variance 1/2)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def draw_rician_channel(params, rng, count=None):
    """Draw one (or `count`) Rician MIMO channel matrices.

    Parameters
    ----------
    params : RicianParams
    rng : numpy.random.Generator
    count : int, optional
        If given, return a stack of shape ``(count, n_rx, n_tx)``.

    Returns
    -------
    H : ndarray, complex
        ``(n_rx, n_tx)`` or ``(count, n_rx, n_tx)``.
    """
    shape = (params.n_rx, params.n_tx) if count is None else (count, params.n_rx, params.n_tx)
    k = params.k_factor
    nlos = complex_normal(rng, shape)
    return np.sqrt(k / (k + 1)) * np.ones(shape) + np.sqrt(1 / (k + 1)) * nlos


def draw_perturbation(spec, rows, cols, rng):
    """Additive CSI error matrix T of the given family and scale.

    Real and imaginary parts are drawn independently; both families scale
    a fixed unit draw, so the same stream yields errors proportional to
    `scale`.
    """
    if spec.family == "none":
        return np.zeros((rows, cols), dtype=np.complex128)
    if spec.family == "gaussian":
        re = rng.standard_normal((rows, cols))
        im = rng.standard_normal((rows, cols))
    else:
        re = rng.uniform(-1.0, 1.0, (rows, cols))
        im = rng.uniform(-1.0, 1.0, (rows, cols))
    return spec.scale * (re + 1j * im)


def path_gain(p):
    """Power attenuation ``d ** -exponent`` applied to SU energy at the PU."""
    return float(p.distance ** (-p.attenuation_exponent))
