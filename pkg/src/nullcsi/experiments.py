"""
Figure reproduction and certification commands.

Each figure command runs one or more sweeps, writes ``<figure_id>.csv`` and
``<figure_id>_summary.txt`` and returns a process exit status: 0 when every
claim passes, 2 when a claim fails, 1 on an operational error. Claims that
cannot be evaluated on the requested grid are reported as SKIP and do not
affect the status.

CSV columns, in order::

    axis, axis_value, series, metric, value, half_width, gap_satisfied

``half_width`` is the 95% confidence half-width (binomial for BER, normal
over trials for capacity metrics) and is empty for analytic rows.
``gap_satisfied`` is ``true``/``false`` on ``ber_bound`` rows and empty
elsewhere. Numbers are written with ``repr`` so output is byte-stable.
"""

import csv
import logging
import math
import platform
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .bounds import BOUND_SLACK
from .certify import certification_claims, run_certification, write_certification
from .channels import PerturbationSpec
from .linalg import TOL_CLAMP, TOL_RECON, TOL_UNITARY
from .linksim import Z95, reference_ber, run_sweep
from .streams import make_stream

log = logging.getLogger(__name__)

FIGURES = ("ber_vs_distance_gaussian", "ber_vs_distance_uniform", "capacity_vs_su_power", "ber_bound_vs_power")
CSV_COLUMNS = ("axis", "axis_value", "series", "metric", "value", "half_width", "gap_satisfied")

DISTANCE_GRID = tuple(float(d) for d in range(1, 11))
SU_POWER_GRID = tuple(float(v) for v in range(-10, 21, 2))
ERROR_SCALES = (0.0, 0.01, 0.05, 0.1, 0.2)

REFERENCE_DISTANCE = 2.0
REFERENCE_SCALE = 0.2
MIN_BER_RATIO = 3.0
OPEN_LOOP_REL_GAP = 0.10
LOW_POWER_POINTS = 3
N_SIGMA = 3.0


@dataclass
class Claim:
    name: str
    passed: object  # True, False or None (skipped)
    detail: str

    @property
    def label(self):
        return {True: "PASS", False: "FAIL", None: "SKIP"}[self.passed]


@dataclass
class FigureResult:
    figure_id: str
    rows: list
    claims: list

    @property
    def passed(self):
        return all(c.passed is not False for c in self.claims)


def _grid(cfg, axis, default):
    if cfg.sweep is not None and cfg.sweep.axis == axis:
        return tuple(cfg.sweep.values)
    return default


def _series_name(scale):
    return "perfect_csi" if scale == 0 else f"scale_{scale:g}"


def _rows(res, series, metrics):
    out = []
    for i, v in enumerate(res.axis_values):
        for metric, hw in metrics:
            value = getattr(res, metric)[i]
            half = "" if hw is None else repr(float(getattr(res, hw)[i]))
            gap = ""
            if metric == "ber_bound":
                gap = "true" if res.gap_satisfied[i] else "false"
            out.append((res.axis_name, repr(v), series, metric, repr(float(value)), half, gap))
    return out


def _sigma(p, n):
    return math.sqrt(max(p * (1 - p), 0.0) / n)


def _nonincreasing(res):
    """Pairs ``i < j`` with ``ber[j]`` significantly above ``ber[i]``."""
    bad = []
    lo = res.ber - res.ber_halfwidth
    hi = res.ber + res.ber_halfwidth
    for i in range(len(res.ber)):
        for j in range(i + 1, len(res.ber)):
            if lo[j] > hi[i]:
                bad.append((res.axis_values[i], res.axis_values[j]))
    return bad


def figure_ber_vs_distance(cfg, family):
    """BER at the PU against SU-PU distance for one perturbation family."""
    grid = _grid(cfg, "distance", DISTANCE_GRID)
    n_bits = cfg.trials * cfg.bits_per_trial
    free = run_sweep(replace(cfg, perturbation=PerturbationSpec("none", 0.0),
                             budget=replace(cfg.budget, e_s=0.0)), "distance", grid)
    rows = _rows(free, "interference_free", [("ber", "ber_halfwidth")])
    series = {}
    for scale in ERROR_SCALES:
        spec = PerturbationSpec("none", 0.0) if scale == 0 else PerturbationSpec(family, scale)
        res = run_sweep(replace(cfg, perturbation=spec), "distance", grid)
        series[scale] = res
        rows += _rows(res, _series_name(scale), [("ber", "ber_halfwidth")])

    claims = []
    bad = {_series_name(s): _nonincreasing(r) for s, r in series.items()}
    bad = {k: v for k, v in bad.items() if v}
    claims.append(Claim("BER non-increasing in distance", not bad,
                        "no significant increases" if not bad else f"increases: {bad}"))

    perfect = series[0.0]
    below = []
    for scale, res in series.items():
        if scale == 0:
            continue
        for i, d in enumerate(grid):
            tol = N_SIGMA * math.hypot(_sigma(res.ber[i], n_bits), _sigma(perfect.ber[i], n_bits))
            if res.ber[i] < perfect.ber[i] - tol:
                below.append((scale, d))
    claims.append(Claim("perturbed BER not below perfect-CSI BER", not below,
                        "at every distance and scale" if not below else f"significantly below at {below}"))

    if REFERENCE_DISTANCE in grid:
        i = grid.index(REFERENCE_DISTANCE)
        p0, p1 = perfect.ber[i], series[REFERENCE_SCALE].ber[i]
        ratio = p1 / p0 if p0 > 0 else math.inf
        claims.append(Claim(f"BER ratio at d={REFERENCE_DISTANCE:g}, scale={REFERENCE_SCALE:g} >= {MIN_BER_RATIO:g}",
                            bool(ratio >= MIN_BER_RATIO), f"ratio = {ratio:.3f} ({p1:.3e} / {p0:.3e})"))
    else:
        claims.append(Claim("BER ratio at reference point", None, f"d={REFERENCE_DISTANCE:g} not in grid"))

    ref = reference_ber(cfg.budget, cfg.n_rx, cfg.rician_k)
    tol = N_SIGMA * _sigma(ref, n_bits)
    worst = float(np.max(np.abs(free.ber - ref)))
    claims.append(Claim("interference-free floor matches reference_ber", bool(worst <= tol),
                        f"reference {ref:.4e}, max |sim - ref| = {worst:.3e}, 3 sigma = {tol:.3e}"))
    return FigureResult(f"ber_vs_distance_{family}", rows, claims)


def figure_capacity_vs_su_power(cfg):
    """PU capacity degradation against SU power, with the open-loop ceiling."""
    grid = _grid(cfg, "su_power", SU_POWER_GRID)
    family = cfg.perturbation.family if cfg.perturbation.family != "none" else "gaussian"
    metrics = [("degradation", "degradation_halfwidth"), ("capacity", None), ("capacity_clean", None)]
    series = {}
    rows = []
    for scale in ERROR_SCALES:
        spec = PerturbationSpec("none", 0.0) if scale == 0 else PerturbationSpec(family, scale)
        res = run_sweep(replace(cfg, perturbation=spec), "su_power", grid)
        series[scale] = res
        rows += _rows(res, _series_name(scale), metrics)
    open_loop = run_sweep(cfg, "su_power", grid, open_loop=True)
    rows += _rows(open_loop, "open_loop", metrics)

    claims = []
    perfect = series[0.0]
    low = range(min(LOW_POWER_POINTS, len(grid)))
    outside = []
    for scale, res in series.items():
        if scale == 0:
            continue
        for i in low:
            under = res.degradation[i] + res.degradation_halfwidth[i] < \
                perfect.degradation[i] - perfect.degradation_halfwidth[i]
            over = res.degradation[i] - res.degradation_halfwidth[i] > \
                open_loop.degradation[i] + open_loop.degradation_halfwidth[i]
            if under or over:
                outside.append((scale, grid[i]))
    claims.append(Claim("degradation bracketed by perfect CSI and open loop at low SU power", not outside,
                        f"lowest {len(low)} grid points" if not outside else f"outside bracket at {outside}"))

    rising = []
    for name, res in list(((_series_name(s), r) for s, r in series.items())) + [("open_loop", open_loop)]:
        d, h = res.degradation, res.degradation_halfwidth
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if d[j] + h[j] < d[i] - h[i]:
                    rising.append((name, grid[i], grid[j]))
    claims.append(Claim("degradation non-decreasing in SU power", not rising,
                        "all series" if not rising else f"significant decreases: {rising[:5]}"))

    top = len(grid) - 1
    ol = open_loop.degradation[top]
    gaps = {}
    for scale, res in series.items():
        if scale >= REFERENCE_SCALE:
            gaps[scale] = (ol - res.degradation[top]) / ol if ol > 0 else math.nan
    if gaps:
        ok = all(g <= OPEN_LOOP_REL_GAP for g in gaps.values())
        detail = ", ".join(f"scale {s:g}: {g:.3f}" for s, g in gaps.items())
        claims.append(Claim(f"relative gap to open loop at {grid[top]:g} dB <= {OPEN_LOOP_REL_GAP:g}",
                            bool(ok), detail))
    else:
        claims.append(Claim("relative gap to open loop at top of grid", None, "no scale >= 0.2"))
    return FigureResult("capacity_vs_su_power", rows, claims)


def figure_ber_bound_vs_power(cfg):
    """Simulated BER and its analytic upper bound against SU power."""
    grid = _grid(cfg, "su_power", SU_POWER_GRID)
    spec = cfg.perturbation
    name = "perfect_csi" if spec.is_zero else f"{spec.family}_{spec.scale:g}"
    res = run_sweep(cfg, "su_power", grid)
    rows = _rows(res, name, [("ber", "ber_halfwidth"), ("ber_bound", None)])
    checked = [i for i in range(len(grid)) if res.gap_satisfied[i]]
    bad = [grid[i] for i in checked if not res.ber[i] <= res.ber_bound[i] + BOUND_SLACK]
    claims = [Claim("simulated BER <= upper bound at gap-satisfied points", not bad,
                    f"{len(checked)} of {len(grid)} points gap-satisfied"
                    + ("" if not bad else f"; violations at {bad}"))]
    return FigureResult("ber_bound_vs_power", rows, claims)


def run_figure(figure_id, cfg):
    if figure_id == "ber_vs_distance_gaussian":
        return figure_ber_vs_distance(cfg, "gaussian")
    if figure_id == "ber_vs_distance_uniform":
        return figure_ber_vs_distance(cfg, "uniform")
    if figure_id == "capacity_vs_su_power":
        return figure_capacity_vs_su_power(cfg)
    if figure_id == "ber_bound_vs_power":
        return figure_ber_bound_vs_power(cfg)
    raise ValueError(f"unknown figure {figure_id!r}; expected one of {FIGURES}")


def _summary_text(title, claims):
    lines = [title]
    lines += [f"{c.label}  {c.name}: {c.detail}" for c in claims]
    return "\n".join(lines) + "\n"


def write_figure(result, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{result.figure_id}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(result.rows)
    (out / f"{result.figure_id}_summary.txt").write_text(
        _summary_text(result.figure_id, result.claims), encoding="utf-8")
    return csv_path


def cmd_figure(figure_id, cfg, out_dir):
    """Run one figure and write its CSV and summary.

    Returns
    -------
    int
        0 if every claim passes, 2 if any fails, 1 if the output cannot be
        written.
    """
    result = run_figure(figure_id, cfg)
    try:
        write_figure(result, out_dir)
    except OSError as exc:
        log.error("cannot write figure output: %s", exc)
        return 1
    for c in result.claims:
        log.info("%s  %s: %s", c.label, c.name, c.detail)
    return 0 if result.passed else 2


def cmd_certify_bounds(ensemble_size, dims, cfg, out_dir):
    """Run the perturbation-bound certification suites.

    A config whose perturbation family is ``none`` forces ``T = 0``.
    """
    rng = make_stream(cfg.master_seed, (0xCE27,))
    summary = run_certification(
        ensemble_size,
        rng,
        dims=list(dims) if dims else None,
        zero_perturbation=cfg.perturbation.family == "none",
        growth_trials=min(ensemble_size, 2000),
    )
    try:
        write_certification(summary, out_dir)
    except OSError as exc:
        log.error("cannot write certification output: %s", exc)
        return 1
    return 0 if all(ok for _, ok, _ in certification_claims(summary)) else 2


def version_and_env():
    """Lines describing the build and numeric backend."""
    try:
        blas = np.show_config(mode="dicts")["Build Dependencies"]["lapack"]
        lapack = f"{blas.get('name', '?')} {blas.get('version', '')}".strip()
    except Exception:  # older numpy without dict mode
        lapack = "unknown"
    return [
        f"nullcsi {__version__}",
        f"python {platform.python_version()} ({platform.machine()})",
        f"numpy {np.__version__}",
        f"scipy {scipy.__version__}",
        f"lapack {lapack}",
        f"tol_unitary {TOL_UNITARY!r}",
        f"tol_reconstruction {TOL_RECON!r}",
        f"tol_clamp {TOL_CLAMP!r}",
        f"bound_slack {BOUND_SLACK!r}",
        f"confidence_z {Z95!r}",
    ]


def cmd_version_and_env(echo=print):
    for line in version_and_env():
        echo(line)
    return 0
