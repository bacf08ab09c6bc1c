"""
Acceptance suite.

One test per criterion, each at its stated tolerance and ensemble size. The
terminal summary (see ``conftest.py``) prints a PASS/FAIL line for every
criterion. Run on its own with::

    pytest tests/test_acceptance.py -v
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from nullcsi.certify import (
    GROWTH_WINDOW,
    loglog_slope,
    sin_theta_suite,
    sqrt_nr_growth_experiment,
    wedin_suite,
    weyl_mirsky_suites,
)
from nullcsi.channels import PerturbationSpec
from nullcsi.config import ScenarioConfig
from nullcsi.experiments import FIGURES, cmd_figure, run_figure
from nullcsi.linksim import reference_ber, run_sweep, run_trial
from nullcsi.streams import make_stream, trial_stream

pytestmark = pytest.mark.slow
DEFAULT = ScenarioConfig()


def claim(result, prefix):
    matches = [c for c in result.claims if c.name.startswith(prefix)]
    assert len(matches) == 1, f"no unique claim starting with {prefix!r}"
    return matches[0]


@pytest.fixture(scope="module")
def weyl_mirsky():
    t0 = time.perf_counter()
    weyl, mirsky = weyl_mirsky_suites(10_000, make_stream(DEFAULT.master_seed, (1,)))
    return weyl, mirsky, time.perf_counter() - t0


@pytest.fixture(scope="module")
def figures():
    return {}


def figure(cache, figure_id):
    if figure_id not in cache:
        cache[figure_id] = run_figure(figure_id, DEFAULT)
    return cache[figure_id]


@pytest.mark.criterion(1, "Weyl certification, 10^4 pairs up to 8x8, < 60 s")
def test_weyl(weyl_mirsky, record_property):
    weyl, _, elapsed = weyl_mirsky
    shapes = {(r["rows"], r["cols"]) for r in weyl.rows}
    scales = [r["scale"] for r in weyl.rows]
    record_property("detail", f"{weyl.violations} violations / {len(weyl.rows)}, "
                              f"{len(shapes)} shapes, scales {min(scales):.1e}..{max(scales):.1e}, {elapsed:.1f} s")
    assert len(weyl.rows) == 10_000
    assert max(max(s) for s in shapes) <= 8
    assert weyl.violations == 0
    assert elapsed < 60


@pytest.mark.criterion(2, "Mirsky certification with diagonal equality")
def test_mirsky(weyl_mirsky, record_property):
    _, mirsky, _ = weyl_mirsky
    diag = [r for r in mirsky.rows if r["diagonal"]]
    gap = max(abs(r["bound"] - r["measured"]) for r in diag)
    record_property("detail", f"{mirsky.violations} violations / {len(mirsky.rows)}, "
                              f"diagonal max |bound - measured| = {gap:.2e} over {len(diag)}")
    assert mirsky.violations == 0
    assert gap <= 1e-10


@pytest.mark.criterion(3, "Wedin and extended sin-theta certification, 10^3 trials each")
def test_subspace_bounds(record_property):
    rng = make_stream(DEFAULT.master_seed, (3,))
    wedin = wedin_suite(1000, rng)
    sin_theta = sin_theta_suite(1000, rng)
    parts = []
    for rep in (wedin, sin_theta):
        r = rep.ratios()
        parts.append(f"{rep.name}: {rep.violations} viol / {len(rep.applicable)} gap-ok, "
                     f"ratio min {r.min():.2f} median {np.median(r):.2f} max {r.max():.1f}")
    record_property("detail", "; ".join(parts))
    for rep in (wedin, sin_theta):
        assert len(rep.applicable) > 0
        assert rep.violations == 0
        assert rep.ratios().min() >= 1.0 - 1e-9
        assert np.median(rep.ratios()) <= 50


@pytest.mark.criterion(4, "Exact-null annihilation for wide channels at threshold 0")
def test_exact_null(record_property):
    worst = 0.0
    n = 0
    for n_rx, n_tx in [(1, 2), (2, 3), (2, 4), (3, 5)]:
        cfg = replace(DEFAULT, n_rx=n_rx, n_tx=n_tx, threshold=0.0, threshold_mode="absolute",
                      bits_per_trial=10, perturbation=PerturbationSpec("none", 0.0))
        for i in range(250):
            r = run_trial(cfg, trial_stream(4, i))
            worst = max(worst, r.spillover / cfg.budget.e_s)
            n += 1
    record_property("detail", f"max spillover / E_s = {worst:.2e} over {n} trials")
    assert worst < 1e-12


@pytest.mark.criterion(5, "sqrt(N_R) growth law slope in [0.35, 0.65], < 5 min")
def test_growth(record_property):
    t0 = time.perf_counter()
    table = sqrt_nr_growth_experiment(2, [4, 16, 64], 0.05, 2000, make_stream(DEFAULT.master_seed, (5,)))
    elapsed = time.perf_counter() - t0
    slope = loglog_slope(*zip(*table))
    record_property("detail", f"slope {slope:.4f}, means {[round(v, 4) for _, v in table]}, {elapsed:.1f} s")
    lo, hi = GROWTH_WINDOW
    assert lo <= slope <= hi
    assert elapsed < 300


@pytest.mark.criterion(6, "Interference-free BER floor within 3 binomial sigma at 10^6 bits")
def test_ber_floor(record_property):
    base = replace(DEFAULT, perturbation=PerturbationSpec("none", 0.0))
    parts, ok = [], True
    for db in (0, 3, 6, 9):
        budget = replace(base.budget, e_p=10 ** (db / 10), e_s=0.0)
        cfg = replace(base, budget=budget)
        res = run_sweep(cfg, "distance", [budget.path.distance])
        bits = cfg.trials * cfg.bits_per_trial
        ref = reference_ber(budget, cfg.n_rx, cfg.rician_k)
        z = (res.ber[0] - ref) / math.sqrt(ref * (1 - ref) / bits)
        ok &= bits >= 10**6 and abs(z) <= 3
        parts.append(f"{db} dB: {res.ber[0]:.3e} vs {ref:.3e} (z={z:+.2f})")
    record_property("detail", "; ".join(parts))
    assert ok


@pytest.mark.criterion(7, "BER vs distance shape for Gaussian and uniform perturbations")
def test_ber_vs_distance(figures, record_property):
    parts, ok = [], True
    for fid in ("ber_vs_distance_gaussian", "ber_vs_distance_uniform"):
        res = figure(figures, fid)
        mono = claim(res, "BER non-increasing")
        order = claim(res, "perturbed BER not below")
        ratio = claim(res, "BER ratio")
        ok &= all(c.passed is True for c in (mono, order, ratio))
        parts.append(f"{fid.rsplit('_', 1)[1]}: monotone={mono.label} order={order.label} {ratio.detail}")
    record_property("detail", "; ".join(parts))
    assert ok


@pytest.mark.criterion(8, "Capacity degradation bracketed at low power, within 10% of open loop at top")
def test_capacity_vs_power(figures, record_property):
    res = figure(figures, "capacity_vs_su_power")
    bracket = claim(res, "degradation bracketed")
    top = claim(res, "relative gap to open loop")
    record_property("detail", f"bracket {bracket.label}; top-of-grid gap {top.label} ({top.detail})")
    assert bracket.passed is True
    assert top.passed is True


@pytest.mark.criterion(9, "Simulated BER <= analytic upper bound at every gap-satisfied point")
def test_bound_dominance(figures, record_property):
    res = figure(figures, "ber_bound_vs_power")
    c = claim(res, "simulated BER <= upper bound")
    n_gap = sum(1 for r in res.rows if r[3] == "ber_bound" and r[6] == "true")
    record_property("detail", c.detail)
    assert n_gap > 0
    assert c.passed is True


@pytest.mark.criterion(10, "Byte-identical figure CSV across repeated runs")
def test_determinism(tmp_path, record_property):
    cfg = replace(DEFAULT, trials=60, bits_per_trial=200, master_seed=2024)
    same = []
    for fid in FIGURES:
        cmd_figure(fid, cfg, tmp_path / "a")
        cmd_figure(fid, cfg, tmp_path / "b")
        a = (tmp_path / "a" / f"{fid}.csv").read_bytes()
        b = (tmp_path / "b" / f"{fid}.csv").read_bytes()
        same.append(a == b and len(a) > 0)
    record_property("detail", f"{sum(same)}/{len(FIGURES)} figures identical")
    assert all(same)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
