"""Certification harness: suite bookkeeping and small ensembles."""

import csv

import numpy as np
import pytest

from nullcsi.certify import (
    CSV_COLUMNS,
    SuiteReport,
    certification_claims,
    loglog_slope,
    mirsky_overestimate_experiment,
    run_certification,
    sin_theta_suite,
    sqrt_nr_growth_experiment,
    wedin_suite,
    weyl_mirsky_suites,
    write_certification,
)
from nullcsi.streams import make_stream


class TestSuiteReport:
    def test_violation_counting(self):
        rep = SuiteReport("x")
        rep.add(0, (2, 2), 0.1, bound=1.0, measured=0.5)
        rep.add(1, (2, 2), 0.1, bound=1.0, measured=1.5)
        rep.add(2, (2, 2), 0.1, bound=0.1, measured=9.0, gap=False)
        assert rep.violations == 1
        assert len(rep.applicable) == 2
        np.testing.assert_allclose(rep.ratios(), [2.0, 1 / 1.5])

    def test_csv_layout(self, tmp_path):
        rep = SuiteReport("x")
        rep.add(0, (3, 2), 0.01, 0.2, 0.1)
        rep.write_csv(tmp_path / "x.csv")
        rows = list(csv.reader(open(tmp_path / "x.csv")))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert rows[1][:3] == ["0", "3", "2"] and rows[1][-1] == "1"


class TestSuites:
    def test_weyl_mirsky_no_violations(self):
        weyl, mirsky = weyl_mirsky_suites(500, make_stream(0))
        assert weyl.violations == 0 and mirsky.violations == 0
        diag = [r for r in mirsky.rows if r["diagonal"]]
        assert len(diag) == 50
        assert max(abs(r["margin"]) for r in diag) < 1e-10

    def test_subspace_suites_no_violations(self):
        rng = make_stream(1)
        w = wedin_suite(200, rng)
        s = sin_theta_suite(200, rng)
        assert w.violations == 0 and s.violations == 0
        assert len(w.applicable) == 200 and len(s.applicable) == 200
        assert np.all(w.ratios() >= 1) and np.all(s.ratios() >= 1)

    def test_zero_perturbation_margins(self):
        summary = run_certification(1, make_stream(2), zero_perturbation=True, growth_trials=1)
        for name in ("weyl", "mirsky"):
            row = summary["suites"][name].rows[0]
            assert row["measured"] == 0.0 and row["margin"] == 0.0
        for name in ("wedin", "sin_theta"):
            row = summary["suites"][name].rows[0]
            # residuals of an exact SVD are roundoff, not literal zeros
            assert row["bound"] < 1e-12 and row["measured"] < 1e-12
        # rank deficiency of the product channel is exact only up to roundoff
        assert all(v < 1e-12 for _, v in summary["growth"])


class TestGrowth:
    def test_zero_rho(self):
        out = sqrt_nr_growth_experiment(2, [4, 8], 0.0, 5, make_stream(3))
        assert all(v < 1e-12 for _, v in out)

    def test_reproducible(self):
        a = sqrt_nr_growth_experiment(2, [6], 0.05, 1, make_stream(4))
        b = sqrt_nr_growth_experiment(2, [6], 0.05, 1, make_stream(4))
        assert a == b

    def test_rejects_small_nr(self):
        with pytest.raises(ValueError):
            sqrt_nr_growth_experiment(2, [2, 4], 0.05, 1, make_stream(5))

    def test_slope_of_power_law(self):
        x = np.array([4.0, 16.0, 64.0])
        assert loglog_slope(x, 3 * x**0.5) == pytest.approx(0.5)

    def test_overestimate_grows(self):
        out = mirsky_overestimate_experiment(2, [4, 64], 1e-3, 50, make_stream(6))
        assert out[1][1] > out[0][1] > 1


def test_write_and_claims(tmp_path):
    summary = run_certification(200, make_stream(7), growth_trials=200)
    write_certification(summary, tmp_path)
    names = {p.name for p in tmp_path.iterdir()}
    for suite in ("weyl", "mirsky", "wedin", "sin_theta", "growth", "mirsky_overestimate"):
        assert f"certify_{suite}.csv" in names
    text = (tmp_path / "certify_summary.txt").read_text()
    assert "weyl_violations = 0" in text and "growth_slope" in text
    claims = certification_claims(summary)
    assert all(ok for name, ok, _ in claims if "violations" in name)


def test_dims_override():
    summary = run_certification(20, make_stream(8), dims=[(3, 5)], growth_trials=5)
    assert {(r["rows"], r["cols"]) for r in summary["suites"]["weyl"].rows} == {(3, 5)}
    assert summary["violations"]["sin_theta"] == 0
