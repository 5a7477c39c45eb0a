"""Acceptance criteria, one test per criterion, at the stated tolerances.

Each criterion prints a single pass/fail line on the real terminal stream so
the gate is visible regardless of pytest capture settings.  The external-data
reproduction (criterion 5) is conditional: it runs only when the real
ensemble tables are present under EC_DATA_DIR (or ./data) and is skipped
otherwise, as specified.
"""

import json
import math
import os
import statistics
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate, stats

from ecbayes import (AnalysisConfig, ConfidenceLevel, FoldedNormal, Gaussian1D,
                     GuidedJudgements, MiningConfig, ModelPrior,
                     ObservationSpec, PredictorPrior, RandomStream, RealityPrior,
                     RealitySpec, SamplerSettings, correlation_mining_demo,
                     fit_folded_normal, fit_reference, fit_subjective,
                     guided_intercept_variance, guided_slope_variance,
                     load_ensemble_csv, run_constraint, sample_predictive,
                     sign_flip_probability, solve_xi_star, summarize)
from ecbayes.dataio import canonical_json

from conftest import make_line_ensemble


@contextmanager
def criterion(num: int, description: str):
    try:
        yield
    except Exception:
        print(f"[FAIL] criterion {num}: {description}", file=sys.__stdout__)
        raise
    print(f"[PASS] criterion {num}: {description}", file=sys.__stdout__)


def data_dir() -> Path:
    return Path(os.environ.get("EC_DATA_DIR", "data"))


def test_criterion_1_classical_equivalence():
    with criterion(1, "collapsed + point predictor reproduces the t(n-2) "
                      "classical predictive (KS < 0.02, < 5 s)"):
        start = time.time()
        for n in (10, 40, 200):
            e = make_line_ensemble(n=n, beta0=0.8, beta1=1.7, noise=0.6,
                                   seed=n)
            post = fit_reference(e, draws=20000, rng=RandomStream(n))
            x0 = 0.25
            y = sample_predictive(post, RealityPrior(np.zeros((2, 2)), 0.0),
                                  Gaussian1D(x0, 0.0), rng=RandomStream(n, 1))
            design = np.column_stack([np.ones(n), e.x])
            coef, *_ = np.linalg.lstsq(design, e.y, rcond=None)
            rss = float(((e.y - design @ coef) ** 2).sum())
            dof = n - 2
            q = np.array([1.0, x0])
            scale = math.sqrt(rss / dof * (1.0 + q @ np.linalg.inv(design.T @ design) @ q))
            law = stats.t(dof, loc=float(coef @ q), scale=scale)
            ks = stats.kstest(y, law.cdf).statistic
            assert ks < 0.02, (n, ks)
        assert time.time() - start < 5.0


def test_criterion_2_conjugacy_oracle():
    with criterion(2, "reference-fit marginals match the closed-form "
                      "conjugate posterior (3 MC SE moments, KS < 0.02)"):
        e = make_line_ensemble(n=35, beta0=-1.0, beta1=3.0, noise=0.9, seed=12)
        draws = 20000
        post = fit_reference(e, draws=draws, rng=RandomStream(2))
        design = np.column_stack([np.ones(e.n), e.x])
        coef, *_ = np.linalg.lstsq(design, e.y, rcond=None)
        rss = float(((e.y - design @ coef) ** 2).sum())
        dof = e.n - 2
        s2 = rss / dof
        m = np.linalg.inv(design.T @ design)
        for j, vals in enumerate((post.beta0, post.beta1)):
            law = stats.t(dof, loc=coef[j], scale=math.sqrt(s2 * m[j, j]))
            assert stats.kstest(vals, law.cdf).statistic < 0.02
            mc_se = vals.std() / math.sqrt(draws)
            assert abs(vals.mean() - coef[j]) < 3 * mc_se
        # sigma^2: scaled-inverse-chi-squared via the chi2 transform
        assert stats.kstest(rss / post.sigma ** 2,
                            stats.chi2(dof).cdf).statistic < 0.02
        sigma2 = post.sigma ** 2
        expected_var_mean = dof * s2 / (dof - 2)
        mc_se = sigma2.std() / math.sqrt(draws)
        assert abs(sigma2.mean() - expected_var_mean) < 3 * mc_se


def test_criterion_3_marginalization():
    with criterion(3, "layered Normal and Folded-Normal compositions match "
                      "their analytic marginals (KS < 0.01, 1e5 draws)"):
        gen = RandomStream(33).generator()
        n = 100000
        b, sd_in, sd_out = 1.4, 0.9, 1.1
        outer = gen.normal(gen.normal(b, sd_in, size=n), sd_out)
        assert stats.kstest(outer,
                            stats.norm(b, math.hypot(sd_in, sd_out)).cdf
                            ).statistic < 0.01
        s, xi, xi_star = 0.59, 0.0144, 0.11
        sig = np.abs(gen.normal(s, math.sqrt(xi), size=n))
        sig_star = np.abs(gen.normal(sig, math.sqrt(xi_star)))
        total = math.sqrt(xi + xi_star)
        law = stats.foldnorm(s / total, scale=total)
        assert stats.kstest(sig_star, law.cdf).statistic < 0.01


def test_criterion_4_guided_numerics():
    with criterion(4, "guided elicitation: published slope/intercept sds, "
                      "sign-flip probability, xi* defining equation"):
        v1 = guided_slope_variance(12.06, 2.62, 0.01)
        assert abs(math.sqrt(v1) - 3.880) <= 0.005
        v0 = guided_intercept_variance(1.23, 0.46, 3.0, 0.01)
        assert abs(math.sqrt(v0) - 0.5105) <= 0.005
        assert abs(sign_flip_probability(12.06, 3.71) - 5.76e-4) <= 1e-5
        for fn, sy, alpha in [(FoldedNormal(0.59, 0.0144), 1.5, 0.01),
                              (FoldedNormal(0.59, 0.0), 1.5, 0.34),
                              (FoldedNormal(0.3, 0.02), 2.5, 0.499),
                              (FoldedNormal(1.2, 0.3), 5.0, 0.10)]:
            xi = solve_xi_star(fn, sy, alpha)
            if xi > 0:
                survival = FoldedNormal(fn.location,
                                        fn.spread2 + xi).survival(sy)
                assert abs(survival - alpha / 2) <= 1e-6


GUIDED_TABLE = {
    "virtually_certain": {0.66: (2.19, 3.43), 0.90: (1.59, 4.04),
                          0.95: (1.23, 4.36)},
    "very_likely": {0.66: (2.09, 3.53), 0.90: (1.36, 4.28), 0.95: (0.91, 4.70)},
    "likely": {0.66: (1.81, 3.79), 0.90: (0.81, 4.75), 0.95: (0.20, 5.35)},
    "coin_flip": {0.66: (1.56, 4.05), 0.90: (0.32, 5.25), 0.95: (-0.45, 5.97)},
}


def test_criterion_5_external_reproduction():
    path = data_dir() / "cox.csv"
    if not path.exists():
        print(f"[SKIP] criterion 5: external ensemble table required "
              f"({path} not found); criteria 1-4 and 6-9 constitute acceptance",
              file=sys.__stdout__)
        pytest.skip(f"external data required: {path} missing")
    with criterion(5, "published-table reproduction on the external ensemble"):
        e = load_ensemble_csv(path)
        post = fit_reference(e, draws=200000, rng=RandomStream(5))
        s = summarize(post)
        assert abs(s.beta0_hat - 1.23) <= 0.02
        assert abs(s.beta1_hat - 12.06) <= 0.02
        assert abs(s.sd_beta0 - 0.46) <= 0.02
        assert abs(s.sd_beta1 - 2.62) <= 0.02
        assert abs(s.sigma_mean - 0.59) <= 0.02
        assert abs(s.sigma_sd - 0.12) <= 0.02
        assert abs(s.rho - (-0.95)) <= 0.01
        obs = ObservationSpec(0.13, 0.016)
        ref = run_constraint(AnalysisConfig(
            observation=obs, sampler=SamplerSettings(200000, 4, 5)), e)
        lo, hi = ref.intervals[0.66]
        assert abs(lo - 2.2) <= 0.05 and abs(hi - 3.38) <= 0.05
        off = s.rho * s.sd_beta0 * s.sd_beta1
        doubling = run_constraint(AnalysisConfig(
            observation=obs,
            reality=RealitySpec.manual(np.array([[s.sd_beta0 ** 2, off],
                                                 [off, s.sd_beta1 ** 2]]),
                                       s.sigma_sd ** 2),
            sampler=SamplerSettings(200000, 4, 5)), e)
        lo, hi = doubling.intervals[0.66]
        assert abs(lo - 2.17) <= 0.05 and abs(hi - 3.43) <= 0.05
        for label, cells in GUIDED_TABLE.items():
            res = run_constraint(AnalysisConfig(
                observation=obs,
                reality=RealitySpec.guided(GuidedJudgements(
                    ConfidenceLevel.from_label(label), 3.0, 1.5)),
                predictor_prior=PredictorPrior.normal(0.15, 1.0),
                sampler=SamplerSettings(200000, 4, 5)), e)
            for lv, (elo, ehi) in cells.items():
                lo, hi = res.intervals[lv]
                assert abs(lo - elo) <= 0.06, (label, lv)
                assert abs(hi - ehi) <= 0.06, (label, lv)


def test_criterion_6_widening_and_median_stability(cox_ensemble):
    with criterion(6, "interval widths nondecreasing as confidence weakens; "
                      "medians agree within 3 MC SE"):
        specs = [("collapsed", RealitySpec.collapsed())]
        for label in ("virtually_certain", "very_likely", "likely",
                      "coin_flip"):
            specs.append((label, RealitySpec.guided(GuidedJudgements(
                ConfidenceLevel.from_label(label), 3.0, 1.5))))
        draws = 100000
        results = []
        for _, spec in specs:
            cfg = AnalysisConfig(observation=ObservationSpec(0.13, 0.016),
                                 reality=spec,
                                 sampler=SamplerSettings(draws, 4, 21))
            results.append(run_constraint(cfg, cox_ensemble))
        for lv in (0.66, 0.90, 0.95):
            widths = [r.intervals[lv][1] - r.intervals[lv][0] for r in results]
            assert all(b >= a - 1e-9 for a, b in zip(widths, widths[1:])), lv
        # median MC standard error ~ sqrt(pi/2) sd / sqrt(n)
        ses = [math.sqrt(math.pi / 2) * r.y_star_draws.std() / math.sqrt(draws)
               for r in results]
        base = results[0].median
        for r, se in zip(results[1:], ses[1:]):
            assert abs(r.median - base) <= 3.0 * math.hypot(se, ses[0])


def test_criterion_7_mining_band():
    with criterion(7, "mining demo: default run < 60 s, 20-seed median in "
                      "[0.65, 0.90] for some mode, duplicates give exactly 1"):
        start = time.time()
        correlation_mining_demo(MiningConfig(mode="all_pairs", seed=0))
        assert time.time() - start < 60.0
        medians = {}
        for mode in ("one_vs_rest", "all_pairs"):
            values = [correlation_mining_demo(
                MiningConfig(mode=mode, seed=seed)).max_abs_corr
                for seed in range(20)]
            medians[mode] = statistics.median(values)
        assert any(0.65 <= med <= 0.90 for med in medians.values()), medians
        dup = correlation_mining_demo(MiningConfig(
            outputs=1000, mode="one_vs_rest", seed=1, inject_duplicate=True))
        assert dup.max_abs_corr == 1.0


def test_criterion_8_folded_normal_suite():
    with criterion(8, "folded-normal density normalization, Normal limit, "
                      "MLE round-trip within 3 repetition SEs"):
        for loc, sp2 in ((0.0, 1.0), (0.7, 0.2), (2.0, 4.0), (0.59, 0.0144)):
            fn = FoldedNormal(loc, sp2)
            upper = 20.0 * (loc + math.sqrt(sp2))
            total, _ = integrate.quad(fn.pdf, 0.0, upper, limit=300)
            assert abs(total - 1.0) <= 1e-6
        for sp2 in (0.25, 1.0, 4.0):
            loc = 10.0 * math.sqrt(sp2)
            fn = FoldedNormal(loc, sp2)
            grid = np.linspace(0.0, loc + 8 * math.sqrt(sp2), 4001)
            gap = np.abs(fn.pdf(grid) - stats.norm(loc, math.sqrt(sp2)).pdf(grid))
            assert gap.max() < 1e-6
        truth = FoldedNormal(0.59, 0.0144)
        locs, spreads = [], []
        for rep in range(8):
            fitted = fit_folded_normal(truth.sample(100000, RandomStream(rep, 8)))
            locs.append(fitted.location)
            spreads.append(fitted.spread2)
        # recovery within 3 standard errors of a single fit, the SE estimated
        # by repetition (the estimator keeps an O(1/n) bias well inside that)
        for estimates, target in ((locs, 0.59), (spreads, 0.0144)):
            se = statistics.stdev(estimates)
            assert abs(statistics.mean(estimates) - target) <= 3.0 * se


def test_criterion_9_determinism(tmp_path, cox_ensemble):
    with criterion(9, "seeded CLI commands and API endpoints are "
                      "byte-identical across runs and worker counts"):
        from ecbayes.dataio import save_ensemble_csv
        csv_path = tmp_path / "e.csv"
        save_ensemble_csv(make_line_ensemble(n=40, seed=14), csv_path)

        def run_cli(args, out_name):
            out = tmp_path / out_name
            proc = subprocess.run(
                [sys.executable, "-m", "ecbayes.cli", *args, "--out", str(out)],
                capture_output=True, text=True, cwd=tmp_path)
            assert proc.returncode == 0, proc.stderr
            return out.read_bytes(), proc.stdout

        for args in (
            ["fit", "--ensemble", str(csv_path), "--draws", "3000",
             "--seed", "6"],
            ["predict", "--ensemble", str(csv_path), "--z", "0.2",
             "--sigma-z", "0.05", "--draws", "3000", "--seed", "6"],
            ["mine", "--outputs", "400", "--seed", "6"],
        ):
            (a_bytes, a_out) = run_cli(args, "a.json")
            (b_bytes, b_out) = run_cli(args, "b.json")
            if args[0] == "mine":   # wall-clock field differs; compare payloads
                a_doc = json.loads(a_bytes)
                b_doc = json.loads(b_bytes)
                a_doc.pop("elapsed_seconds")
                b_doc.pop("elapsed_seconds")
                assert a_doc == b_doc
            else:
                assert a_bytes == b_bytes, args
                assert a_out == b_out

        from fastapi.testclient import TestClient
        from ecbayes.service import create_app
        client = TestClient(create_app())
        fit_req = {"builtin": "cox", "synthetic": True,
                   "sampler": {"draws": 5000, "seed": 2}}
        r1 = client.post("/api/fit", json=fit_req)
        r2 = client.post("/api/fit", json=fit_req)
        a = r1.json()
        b = r2.json()
        sid_a = a.pop("session")
        sid_b = b.pop("session")
        assert canonical_json(a) == canonical_json(b)
        preq = {"observation": {"z": 0.13, "sigma_z": 0.016}, "seed": 4}
        p1 = client.post("/api/predict", json={"session": sid_a, **preq})
        p2 = client.post("/api/predict", json={"session": sid_b, **preq})
        assert p1.content == p2.content

        # worker counts: chain-parallel fits and partitioned predictive draws
        prior = ModelPrior.subjective((0.0, 0.0), np.diag([25.0, 1156.0]), 2.5)
        f1 = fit_subjective(cox_ensemble, prior, draws=4000, chains=4,
                            rng=RandomStream(13), workers=1)
        f4 = fit_subjective(cox_ensemble, prior, draws=4000, chains=4,
                            rng=RandomStream(13), workers=4)
        np.testing.assert_array_equal(f1.draws, f4.draws)
        rp = RealityPrior(np.diag([0.25, 15.0]), 0.11)
        post = fit_reference(cox_ensemble, draws=20000, rng=RandomStream(3))
        s1 = sample_predictive(post, rp, Gaussian1D(0.13, 0.016),
                               rng=RandomStream(4), workers=1)
        s4 = sample_predictive(post, rp, Gaussian1D(0.13, 0.016),
                               rng=RandomStream(4), workers=4)
        np.testing.assert_array_equal(s1, s4)
