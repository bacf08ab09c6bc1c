"""
Empirical certification of the perturbation bounds.

Each suite draws an ensemble of ``(H, T)`` pairs, evaluates a bound and the
quantity it bounds, and records one row per trial. A violation is a row
where the bound applies and the measured value exceeds it beyond
floating-point slack. Suites never raise on a violation; they count it.
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import (
    BOUND_SLACK,
    WedinInput,
    extended_sin_theta_bound,
    singular_shift,
    wedin_bound,
)
from .channels import complex_normal
from .linalg import matrix_with_singular_values, singular_values

CSV_COLUMNS = ("trial", "rows", "cols", "scale", "bound", "measured", "margin", "gap_satisfied")
WEYL_TOL = 1e-10


@dataclass
class SuiteReport:
    name: str
    rows: list = field(default_factory=list)

    def add(self, trial, shape, scale, bound, measured, gap=True, tol=BOUND_SLACK):
        self.rows.append(
            {
                "trial": trial,
                "rows": shape[0],
                "cols": shape[1],
                "scale": scale,
                "bound": bound,
                "measured": measured,
                "margin": bound - measured,
                "gap_satisfied": bool(gap),
                "_tol": tol,
            }
        )

    @property
    def applicable(self):
        return [r for r in self.rows if r["gap_satisfied"]]

    @property
    def violations(self):
        return sum(1 for r in self.applicable if r["measured"] > r["bound"] + r["_tol"])

    def ratios(self):
        """bound / measured over applicable rows with a nonzero measurement."""
        return np.array([r["bound"] / r["measured"] for r in self.applicable if r["measured"] > 0])

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for r in self.rows:
                w.writerow(
                    [
                        r["trial"],
                        r["rows"],
                        r["cols"],
                        repr(float(r["scale"])),
                        repr(float(r["bound"])),
                        repr(float(r["measured"])),
                        repr(float(r["margin"])),
                        int(r["gap_satisfied"]),
                    ]
                )


def _perturbation(rng, shape, scale):
    if scale == 0:
        return np.zeros(shape, dtype=np.complex128)
    return scale * complex_normal(rng, shape)


def weyl_mirsky_suites(n, rng, max_dim=8, dims=None, zero_perturbation=False):
    """Weyl and Mirsky certification on random complex pairs.

    Shapes are drawn uniformly from ``1..max_dim`` in each dimension (or
    cycled from `dims`), the channel scale is log-uniform on [0.1, 10] and
    the perturbation scale log-uniform on [1e-4, 10]. Every tenth trial is
    a diagonal pair with a small real diagonal perturbation that keeps the
    singular values ordered; on those Mirsky holds with equality.

    Returns
    -------
    weyl, mirsky : SuiteReport
        The ``mirsky`` rows carry ``diagonal`` flags in an extra key.
    """
    weyl, mirsky = SuiteReport("weyl"), SuiteReport("mirsky")
    for t in range(n):
        if dims:
            rows, cols = dims[t % len(dims)]
        else:
            rows, cols = (int(v) for v in rng.integers(1, max_dim + 1, size=2))
        diagonal = t % 10 == 9
        scale = 0.0 if zero_perturbation else float(10 ** rng.uniform(-4, 1))
        if diagonal:
            p = min(rows, cols)
            sig = np.sort(rng.uniform(1.0, 10.0, p))[::-1] + np.arange(p)[::-1] * 2.0
            H = np.zeros((rows, cols), dtype=np.complex128)
            H[:p, :p] = np.diag(sig)
            gaps = np.append(-np.diff(sig), sig[-1])
            step = 0.0 if zero_perturbation else 0.4 * gaps.min()
            T = np.zeros_like(H)
            T[:p, :p] = np.diag(step * rng.uniform(-1, 1, p))
            scale = step
        else:
            H = float(10 ** rng.uniform(-1, 1)) * complex_normal(rng, (rows, cols))
            T = _perturbation(rng, (rows, cols), scale)
        res = singular_shift(H, T)
        weyl.add(t, (rows, cols), scale, res.weyl_bound, res.max_shift, tol=WEYL_TOL)
        mirsky.add(t, (rows, cols), scale, res.mirsky_bound, res.rms_aggregate, tol=WEYL_TOL)
        mirsky.rows[-1]["diagonal"] = diagonal
    return weyl, mirsky


def _gapped_spectrum(p, r, rng, top=10.0, bottom=1.0, spread=0.3, null=False):
    lead = top + rng.uniform(-spread, spread, r) * top
    if null:
        tail = rng.uniform(0.0, 0.05, p - r) * bottom
        tail[-1:] = 0.0
    else:
        tail = bottom + rng.uniform(-spread, spread, p - r) * bottom
    return np.sort(np.concatenate([lead, tail]))[::-1]


def wedin_suite(n, rng, dims=((6, 4),), scales=(0.01,), zero_perturbation=False):
    """Wedin bound on gap-enforced ensembles.

    Leading singular values cluster around 10 and the rest around 1; the
    split is ``r = min(rows, cols) // 2`` (at least 1).
    """
    rep = SuiteReport("wedin")
    for t in range(n):
        rows, cols = dims[t % len(dims)]
        p = min(rows, cols)
        r = max(1, p // 2)
        scale = 0.0 if zero_perturbation else scales[t % len(scales)]
        H = matrix_with_singular_values(rows, cols, _gapped_spectrum(p, r, rng), rng)
        G = H + _perturbation(rng, H.shape, scale)
        res = wedin_bound(WedinInput(H, G, r))
        rep.add(t, (rows, cols), scale, res.bound if res.gap_satisfied else math.inf,
                res.measured_sin_theta, res.gap_satisfied)
    return rep


def sin_theta_suite(n, rng, dims=((6, 4), (4, 6), (2, 2), (8, 3)), scales=(0.01, 0.1),
                    norms=("frobenius", "spectral"), zero_perturbation=False):
    """Interval sin-theta bound on the null side.

    Channels have `r` leading singular values near 10 and a trailing block
    near zero that always contains an exact zero, so each ``H`` has a genuine
    null direction; the split is ``r = min(rows, cols) // 2`` (0 for a
    single-row or single-column channel). Norms alternate between
    Frobenius and spectral.
    """
    rep = SuiteReport("sin_theta")
    for t in range(n):
        rows, cols = dims[t % len(dims)]
        p = min(rows, cols)
        r = max(1, p // 2) if p > 1 else 0
        scale = 0.0 if zero_perturbation else scales[t % len(scales)]
        norm = norms[(t // len(scales)) % len(norms)]
        H = matrix_with_singular_values(rows, cols, _gapped_spectrum(p, r, rng, null=True), rng)
        G = H + _perturbation(rng, H.shape, scale)
        res = extended_sin_theta_bound(H, G, r, norm=norm)
        rep.add(t, (rows, cols), scale, res.bound if res.gap_satisfied else math.inf,
                res.measured_sin_theta, res.gap_satisfied)
        rep.rows[-1]["norm"] = norm
    return rep


def loglog_slope(x, y):
    """Least-squares slope of ``log y`` against ``log x``; nan if any y <= 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        return math.nan
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def sqrt_nr_growth_experiment(m, nr_list, rho, trials, rng):
    """Mean smallest perturbed singular value of rank-deficient channels.

    For each receive-antenna count ``nr`` the channel is an ``nr x (m + 1)``
    matrix of rank `m` (one exact zero singular value, unit-power factors),
    perturbed by complex Gaussian noise with per-part standard deviation
    `rho`. The lifted zero singular value is expected to grow like
    ``sqrt(nr)``.

    Returns
    -------
    list of (nr, mean_smallest_sigma_tilde)
    """
    if min(nr_list) <= m:
        raise ValueError(f"every nr must exceed m={m}, got {list(nr_list)}")
    out = []
    cols = m + 1
    for nr in nr_list:
        acc = np.empty(trials)
        for t in range(trials):
            H = complex_normal(rng, (nr, m)) @ complex_normal(rng, (cols, m)).conj().T
            T = rho * (rng.standard_normal((nr, cols)) + 1j * rng.standard_normal((nr, cols)))
            acc[t] = singular_values(H + T)[-1]
        out.append((int(nr), float(np.mean(acc))))
    return out


def mirsky_overestimate_experiment(n_tx, nr_list, rho, trials, rng):
    """Ratio ``||T||_F / sqrt(sum shift_i^2)`` on tall full-rank channels.

    Returns a list of ``(nr, mean ratio)``; the ratio grows like
    ``sqrt(nr)`` when the perturbation is small against the channel.
    """
    out = []
    for nr in nr_list:
        acc = []
        for _ in range(trials):
            H = complex_normal(rng, (nr, n_tx))
            T = rho * (rng.standard_normal((nr, n_tx)) + 1j * rng.standard_normal((nr, n_tx)))
            res = singular_shift(H, T)
            if res.rms_aggregate > 0:
                acc.append(res.mirsky_bound / res.rms_aggregate)
        out.append((int(nr), float(np.mean(acc)) if acc else math.nan))
    return out


GROWTH_WINDOW = (0.35, 0.65)
OVERESTIMATE_WINDOW = (0.3, 0.7)


def run_certification(ensemble_size, rng, dims=None, zero_perturbation=False,
                      growth_trials=2000, out_dir=None):
    """Run every suite and optionally write the per-theorem CSV files.

    Parameters
    ----------
    ensemble_size : int
        Trials for the Weyl/Mirsky ensemble; the subspace suites use
        ``min(ensemble_size, 1000)``.
    rng : numpy.random.Generator
    dims : list of (rows, cols), optional
        Shapes to cycle through. Defaults: random up to 8x8 for Weyl and
        Mirsky, a fixed mix for the subspace suites.
    zero_perturbation : bool
        Force ``T = 0`` in every suite.
    growth_trials : int
        Trials per antenna count for the growth-law tables.
    out_dir : path, optional

    Returns
    -------
    dict
        Suite reports, growth tables, fitted slopes and violation counts.
    """
    if ensemble_size < 1:
        raise ValueError("ensemble_size must be >= 1")
    sub_n = min(ensemble_size, 1000)
    weyl, mirsky = weyl_mirsky_suites(ensemble_size, rng, dims=dims,
                                      zero_perturbation=zero_perturbation)
    wedin_kw = {"dims": tuple(dims)} if dims else {}
    wedin = wedin_suite(sub_n, rng, zero_perturbation=zero_perturbation, **wedin_kw)
    sin_kw = {"dims": tuple(d for d in dims if min(d) >= 1)} if dims else {}
    sin_theta = sin_theta_suite(sub_n, rng, zero_perturbation=zero_perturbation, **sin_kw)

    rho = 0.0 if zero_perturbation else 0.05
    growth = sqrt_nr_growth_experiment(2, [4, 16, 64], rho, growth_trials, rng)
    over = mirsky_overestimate_experiment(2, [4, 16, 64], 1e-3 if not zero_perturbation else 0.0,
                                          max(1, growth_trials // 10), rng)
    growth_slope = loglog_slope(*zip(*growth))
    over_slope = loglog_slope(*zip(*over))

    diag_rows = [r for r in mirsky.rows if r.get("diagonal")]
    diag_err = max((abs(r["margin"]) for r in diag_rows), default=0.0)

    summary = {
        "suites": {"weyl": weyl, "mirsky": mirsky, "wedin": wedin, "sin_theta": sin_theta},
        "growth": growth,
        "growth_slope": growth_slope,
        "mirsky_overestimate": over,
        "mirsky_overestimate_slope": over_slope,
        "mirsky_diagonal_max_gap": diag_err,
        "violations": {k: v.violations for k, v in
                       {"weyl": weyl, "mirsky": mirsky, "wedin": wedin, "sin_theta": sin_theta}.items()},
    }
    if out_dir is not None:
        write_certification(summary, out_dir)
    return summary


def certification_claims(summary):
    """List of ``(claim, passed, detail)`` for a certification summary."""
    claims = []
    for name, count in summary["violations"].items():
        rep = summary["suites"][name]
        claims.append((f"{name}_violations == 0", count == 0,
                       f"{count} violations over {len(rep.applicable)} applicable trials"))
    claims.append(("mirsky equality on diagonal pairs", summary["mirsky_diagonal_max_gap"] <= WEYL_TOL,
                   f"max |bound - measured| = {summary['mirsky_diagonal_max_gap']:.3e}"))
    s = summary["growth_slope"]
    lo, hi = GROWTH_WINDOW
    claims.append(("sqrt(N_R) growth slope in window", bool(lo <= s <= hi), f"slope = {s:.4f}"))
    s = summary["mirsky_overestimate_slope"]
    lo, hi = OVERESTIMATE_WINDOW
    claims.append(("Mirsky overestimate slope in window", bool(lo <= s <= hi), f"slope = {s:.4f}"))
    return claims


def write_certification(summary, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, rep in summary["suites"].items():
        rep.write_csv(out / f"certify_{name}.csv")
    for key in ("growth", "mirsky_overestimate"):
        with open(out / f"certify_{key}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(("nr", "mean"))
            for nr, v in summary[key]:
                w.writerow((nr, repr(v)))
    lines = []
    for name, rep in summary["suites"].items():
        ratios = rep.ratios()
        med = f"{np.median(ratios):.3f}" if ratios.size else "nan"
        mn = f"{ratios.min():.3f}" if ratios.size else "nan"
        lines.append(f"{name}_violations = {rep.violations}  (trials {len(rep.rows)}, "
                     f"applicable {len(rep.applicable)}, bound/measured min {mn} median {med})")
    lines.append(f"growth_slope = {summary['growth_slope']:.4f}")
    lines.append(f"mirsky_overestimate_slope = {summary['mirsky_overestimate_slope']:.4f}")
    for claim, ok, detail in certification_claims(summary):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {claim}: {detail}")
    (out / "certify_summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
