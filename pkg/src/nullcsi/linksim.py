"""
Monte Carlo simulation of the primary link under secondary null-space
transmission with imperfect CSI.

One trial draws

* the SU -> PU interference channel ``H`` (block fading, one draw per trial),
* the SU's estimate ``G = H + T``,
* the PU's own single-antenna-to-``n_rx`` desired channel, independently
  per symbol (fast Rician fading),

then the SU sends white BPSK vectors through the projector onto the
estimated null space of ``G`` while the PU detects its BPSK stream by
maximal-ratio combining in complex Gaussian noise of variance ``N0``.

Streams are split per trial into channel, perturbation, SU-symbol and
PU-link substreams. Two trials that share a stream therefore share every
draw that their configurations have in common; series that differ only in
perturbation scale, path loss or SU power see identical channels, noise and
bits.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from .bounds import SQRT2, GapViolationError, ber_upper_bound, extended_sin_theta_bound, qfunc
from .channels import (
    PathLossParams,
    PerturbationSpec,
    RicianParams,
    complex_normal,
    draw_perturbation,
    draw_rician_channel,
    path_gain,
)
from .linalg import canonical_angles, sin_theta_norm
from .precoder import extract_null_space, identity_precoder, spillover_power
from .streams import seed_label, split, stream_from, trial_stream

SWEEP_AXES = ("distance", "su_power", "error_scale", "threshold")
Z95 = 1.959963984540054


@dataclass(frozen=True)
class TrialRecord:
    seed_id: str
    sigma_all: tuple
    null_dim_true: int
    null_dim_est: int
    sin_theta_f: float
    spillover: float
    received_interference: float
    pu_snr: float
    pu_sinr: float
    bit_errors: int
    bits: int
    c_clean_empirical: float
    c_tilde_empirical: float
    eps_over_delta: float
    gap_satisfied: bool

    @property
    def ber(self):
        return self.bit_errors / self.bits

    @property
    def degradation(self):
        return self.c_clean_empirical - self.c_tilde_empirical


@dataclass(frozen=True)
class _Estimate:
    """Everything a trial needs that does not depend on path loss or SU power."""

    H: np.ndarray
    null_est: object
    null_dim_true: int
    sin_theta_f: float
    eps_over_delta: float
    gap_satisfied: bool
    seed_id: str
    seeds: tuple


def _estimate(cfg, rng, open_loop=False):
    ch_ss, pert_ss, su_ss, pu_ss = split(rng, 4)
    ch_rng = stream_from(ch_ss)
    H = draw_rician_channel(RicianParams(cfg.rician_k, cfg.n_rx, cfg.n_tx), ch_rng)
    T = draw_perturbation(cfg.perturbation, cfg.n_rx, cfg.n_tx, stream_from(pert_ss))
    G = H + T
    null_true = extract_null_space(H, cfg.threshold, cfg.threshold_mode)
    if open_loop:
        null_est = identity_precoder(cfg.n_tx)
    else:
        null_est = extract_null_space(G, cfg.threshold, cfg.threshold_mode)
    angles = canonical_angles(null_true.basis, null_est.basis)

    eod, gap = math.nan, False
    if not open_loop and not null_est.is_empty:
        res = extended_sin_theta_bound(H, G, cfg.n_tx - null_est.dim, norm="frobenius")
        gap = res.gap_satisfied
        eod = res.eps_over_delta if gap else math.nan
    return _Estimate(
        H=H,
        null_est=null_est,
        null_dim_true=null_true.dim,
        sin_theta_f=sin_theta_norm(angles, "frobenius"),
        eps_over_delta=eod,
        gap_satisfied=gap,
        seed_id=seed_label(rng),
        seeds=(ch_ss, su_ss, pu_ss),
    )


def _transmit(cfg, est):
    """Run the PU link for one trial's estimate."""
    n = cfg.bits_per_trial
    ch_ss, su_ss, pu_ss = est.seeds
    budget = cfg.budget
    g = path_gain(budget.path)
    M, N = cfg.n_tx, cfg.n_rx

    su_rng = stream_from(su_ss)
    su_bits = su_rng.integers(0, 2, size=(M, n))
    x = math.sqrt(budget.e_s / M) * (1.0 - 2.0 * su_bits)
    HP = est.H @ est.null_est.projector
    interference = math.sqrt(g) * (HP @ x)

    pu_rng = stream_from(pu_ss)
    bits = pu_rng.integers(0, 2, size=n)
    s = math.sqrt(budget.e_p) * (1.0 - 2.0 * bits)
    # desired channel: one column per symbol
    h = draw_rician_channel(RicianParams(cfg.rician_k, N, n), pu_rng)
    noise = math.sqrt(budget.n_0) * complex_normal(pu_rng, (N, n))
    y = h * s + interference + noise
    z = np.sum(h.conj() * y, axis=0)
    errors = int(np.count_nonzero((z.real < 0) != (bits == 1)))

    gain = np.sum(np.abs(h) ** 2, axis=0)
    R = g * (budget.e_s / M) * (HP @ HP.conj().T)
    # interference power seen by the combiner direction h / ||h||
    seen = np.real(np.sum(h.conj() * (R @ h), axis=0)) / gain
    snr = budget.e_p * gain / budget.n_0
    sinr = budget.e_p * gain / (budget.n_0 + seen)
    spill = spillover_power(est.H, est.null_est, budget.e_s)
    return TrialRecord(
        seed_id=est.seed_id,
        sigma_all=tuple(float(v) for v in np.linalg.svd(est.H, compute_uv=False)),
        null_dim_true=est.null_dim_true,
        null_dim_est=est.null_est.dim,
        sin_theta_f=est.sin_theta_f,
        spillover=spill,
        received_interference=g * spill,
        pu_snr=float(np.mean(snr)),
        pu_sinr=float(np.mean(sinr)),
        bit_errors=errors,
        bits=n,
        c_clean_empirical=float(np.mean(np.log2(1.0 + snr))),
        c_tilde_empirical=float(np.mean(np.log2(1.0 + sinr))),
        eps_over_delta=est.eps_over_delta,
        gap_satisfied=est.gap_satisfied,
    )


def run_trial(cfg, rng):
    """Simulate one trial of the null-space scheme.

    Parameters
    ----------
    cfg : ScenarioConfig
    rng : numpy.random.Generator
        Consumed by splitting; pass a fresh stream for reproducible output.

    Returns
    -------
    TrialRecord
    """
    return _transmit(cfg, _estimate(cfg, rng))


def run_open_loop_baseline(cfg, rng):
    """Same chain as `run_trial` with the SU precoder replaced by the identity."""
    return _transmit(cfg, _estimate(cfg, rng, open_loop=True))


def apply_axis(cfg, axis, value):
    """Copy of `cfg` with one sweep axis set.

    ``su_power`` is in dB relative to the PU energy: ``e_s = e_p * 10**(v/10)``.
    """
    b = cfg.budget
    if axis == "distance":
        return replace(cfg, budget=replace(b, path=replace(b.path, distance=float(value))))
    if axis == "su_power":
        return replace(cfg, budget=replace(b, e_s=b.e_p * 10 ** (float(value) / 10)))
    if axis == "error_scale":
        return replace(cfg, perturbation=replace(cfg.perturbation, scale=float(value)))
    if axis == "threshold":
        return replace(cfg, threshold=float(value))
    raise ValueError(f"invalid sweep axis {axis!r}; expected one of {SWEEP_AXES}")


@dataclass(frozen=True)
class SweepResult:
    """Per-point aggregates of a sweep.

    ``ber`` is total errors over total bits; capacities are trial means of
    the per-symbol ergodic rates in bits per channel use. ``ber_bound`` is
    NaN at points where no trial radiated through a non-empty estimated
    null space.
    """

    axis_name: str
    axis_values: tuple
    ber: np.ndarray
    ber_halfwidth: np.ndarray
    ber_bound: np.ndarray
    gap_satisfied: np.ndarray
    eps_over_delta: np.ndarray
    capacity: np.ndarray
    capacity_clean: np.ndarray
    degradation: np.ndarray
    degradation_halfwidth: np.ndarray
    spillover: np.ndarray
    trials_per_point: int
    records: list = field(default_factory=list, repr=False, compare=False)


def binomial_halfwidth(errors, bits, z=Z95):
    """Normal-approximation binomial confidence half-width for a BER estimate."""
    p = errors / bits
    return z * math.sqrt(max(p * (1 - p), 0.0) / bits)


def aggregate(records, budget, k=SQRT2):
    errors = sum(r.bit_errors for r in records)
    bits = sum(r.bits for r in records)
    deg = np.array([r.degradation for r in records])
    eods = np.array([r.eps_over_delta for r in records if r.null_dim_est > 0])
    applicable = eods.size > 0
    gap = bool(applicable and np.all(np.isfinite(eods)))
    bound = math.nan
    mean_eod = math.nan
    if applicable and np.any(np.isfinite(eods)):
        mean_eod = float(np.mean(eods[np.isfinite(eods)]))
        try:
            bound = ber_upper_bound(budget, 0.0 if mean_eod == 0 else mean_eod, 1.0, k)
        except GapViolationError:
            bound = math.nan
    n = len(records)
    spread = float(np.std(deg, ddof=1)) if n > 1 else 0.0
    return {
        "ber": errors / bits,
        "ber_halfwidth": binomial_halfwidth(errors, bits),
        "ber_bound": bound,
        "gap_satisfied": gap,
        "eps_over_delta": mean_eod,
        "capacity": float(np.mean([r.c_tilde_empirical for r in records])),
        "capacity_clean": float(np.mean([r.c_clean_empirical for r in records])),
        "degradation": float(np.mean(deg)),
        "degradation_halfwidth": Z95 * spread / math.sqrt(n),
        "spillover": float(np.mean([r.spillover for r in records])),
    }


def run_sweep(cfg, axis, values, open_loop=False, keep_records=False):
    """Sweep one scenario parameter.

    Trial ``i`` at every point uses the stream ``(master_seed, i)``, so points
    differ only through the swept parameter. For the ``distance`` and
    ``su_power`` axes the CSI estimate is computed once per trial and reused
    across points; the result is identical to calling `run_trial` at each
    point.

    Parameters
    ----------
    cfg : ScenarioConfig
    axis : {'distance', 'su_power', 'error_scale', 'threshold'}
    values : sequence of float
    open_loop : bool
        Simulate the open-loop baseline instead of null-space precoding.
    keep_records : bool
        Attach every TrialRecord to the result.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"invalid sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    values = tuple(float(v) for v in values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if cfg.trials < 1:
        raise ValueError("trials_per_point must be >= 1")

    cfgs = [apply_axis(cfg, axis, v) for v in values]
    per_point = [[] for _ in values]
    reuse = axis in ("distance", "su_power")
    for i in range(cfg.trials):
        est = _estimate(cfg, trial_stream(cfg.master_seed, i), open_loop) if reuse else None
        for j, c in enumerate(cfgs):
            e = est if reuse else _estimate(c, trial_stream(cfg.master_seed, i), open_loop)
            per_point[j].append(_transmit(c, e))

    aggs = [aggregate(recs, c.budget) for recs, c in zip(per_point, cfgs)]

    def col(key, dtype=float):
        return np.array([a[key] for a in aggs], dtype=dtype)

    return SweepResult(
        axis_name=axis,
        axis_values=values,
        ber=col("ber"),
        ber_halfwidth=col("ber_halfwidth"),
        ber_bound=col("ber_bound"),
        gap_satisfied=col("gap_satisfied", bool),
        eps_over_delta=col("eps_over_delta"),
        capacity=col("capacity"),
        capacity_clean=col("capacity_clean"),
        degradation=col("degradation"),
        degradation_halfwidth=col("degradation_halfwidth"),
        spillover=col("spillover"),
        trials_per_point=cfg.trials,
        records=per_point if keep_records else [],
    )


def _rician_mgf(s, mean_snr, k):
    d = 1.0 + k - s * mean_snr
    return (1.0 + k) / d * np.exp(k * s * mean_snr / d)


def reference_ber(budget, diversity_order=1, k_factor=math.inf):
    """Interference-free BPSK bit error probability with MRC.

    Parameters
    ----------
    budget : LinkBudget
        Only ``e_p / n_0`` is used.
    diversity_order : int
        Number of i.i.d. combined branches.
    k_factor : float
        Rician K of every branch (unit mean power). ``inf`` is a
        non-fading channel, for which the result is
        ``Q(sqrt(2 L E_p / N_0))``; one branch gives ``Q(sqrt(2 E_p/N_0))``.
        Finite K is averaged over the fading with the MGF form of the Q
        function, ``(1/pi) int_0^{pi/2} prod_l M(-1/sin^2 t) dt``.
    """
    if diversity_order < 1:
        raise ValueError("diversity_order must be >= 1")
    snr = budget.e_p / budget.n_0
    L = int(diversity_order)
    if math.isinf(k_factor):
        return float(qfunc(math.sqrt(2 * L * snr)))

    def integrand(t):
        return _rician_mgf(-1.0 / math.sin(t) ** 2, snr, k_factor) ** L

    val, _ = integrate.quad(integrand, 0.0, math.pi / 2, epsabs=1e-14, epsrel=1e-10, limit=200)
    return float(val / math.pi)
