"""Ingest, configuration and catalog behaviour."""

import io
import json

import numpy as np
import pytest

from ecbayes import (DomainError, ParseError, builtin_catalog, catalog_lookup,
                     cox_like_ensemble, engineered_ensemble, load_config,
                     load_ensemble_csv, parse_config, save_ensemble_csv)

MINIMAL = "model,x,y\na,0.1,2.0\nb,0.2,2.5\nc,0.3,3.1\n"


class TestEnsembleCsv:
    def test_smallest_valid(self):
        e = load_ensemble_csv(io.StringIO(MINIMAL))
        assert e.n == 3
        assert e.labels == ("a", "b", "c")
        np.testing.assert_allclose(e.x, [0.1, 0.2, 0.3])

    def test_accepts_inline_text_and_path(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text(MINIMAL)
        assert load_ensemble_csv(path).n == 3
        assert load_ensemble_csv(MINIMAL).n == 3

    def test_degenerate_predictor(self):
        text = "model,x,y\na,1,2\nb,1,3\nc,1,4\n"
        with pytest.raises(ParseError, match="degenerate predictor"):
            load_ensemble_csv(io.StringIO(text))

    def test_error_names_offending_row(self):
        text = "model,x,y\na,0.1,2\nb,oops,3\nc,0.3,4\n"
        with pytest.raises(ParseError, match="row 2.*oops"):
            load_ensemble_csv(io.StringIO(text))

    def test_duplicate_label_and_header_errors(self):
        with pytest.raises(ParseError, match="row 2: duplicate"):
            load_ensemble_csv(io.StringIO("model,x,y\na,1,2\na,2,3\nb,3,4\n"))
        with pytest.raises(ParseError, match="header"):
            load_ensemble_csv(io.StringIO("name,x,y\na,1,2\n"))

    def test_too_few_rows(self):
        with pytest.raises(ParseError, match="at least 3"):
            load_ensemble_csv(io.StringIO("model,x,y\na,1,2\nb,2,3\n"))

    def test_round_trip_identity(self):
        e = cox_like_ensemble()
        text = save_ensemble_csv(e)
        e2 = load_ensemble_csv(io.StringIO(text))
        assert e2.labels == e.labels
        np.testing.assert_array_equal(e2.x, e.x)
        np.testing.assert_array_equal(e2.y, e.y)
        assert save_ensemble_csv(e2) == text


class TestSyntheticEnsembles:
    def test_engineered_statistics_are_exact(self):
        e = engineered_ensemble(0.5, -3.0, 0.25, n=40, x_mean=1.2,
                                x_sum_squares=7.5, seed=4)
        coef = np.polyfit(e.x, e.y, 1)
        assert coef[1] == pytest.approx(0.5, abs=1e-9)
        assert coef[0] == pytest.approx(-3.0, abs=1e-9)
        assert e.x.mean() == pytest.approx(1.2, abs=1e-12)
        resid = e.y - (0.5 - 3.0 * e.x)
        assert resid @ resid / (40 - 2) == pytest.approx(0.25 ** 2, rel=1e-9)

    def test_cox_like_ols_slope(self):
        e = cox_like_ensemble()
        slope = np.polyfit(e.x, e.y, 1)[0]
        assert slope == pytest.approx(12.06, abs=1e-6)


class TestConfig:
    def test_defaults_fill(self):
        cfg = parse_config({"observation": {"z": 0.13, "sigma_z": 0.016}})
        assert cfg.model_prior.kind == "reference"
        assert cfg.predictor_prior.kind == "flat"
        assert cfg.reality.kind == "collapsed"
        assert cfg.sampler.draws == 20000
        assert cfg.sampler.chains == 4
        assert cfg.levels == (0.66, 0.90, 0.95)

    def test_confidence_label_maps_to_alpha(self):
        cfg = parse_config({
            "observation": {"z": 1.0, "sigma_z": 0.5},
            "reality": {"kind": "guided", "confidence": "virtually_certain",
                        "mu_y_star": 3, "sigma_y_star": 1.5}})
        assert cfg.reality.judgements.confidence.alpha == 0.01

    def test_rejects_negative_sigma_z_with_pointer(self):
        with pytest.raises(ParseError, match="/observation"):
            parse_config({"observation": {"z": 1.0, "sigma_z": -0.5}})

    def test_rejects_unknown_field_and_bad_level(self):
        with pytest.raises(ParseError, match="/bogus"):
            parse_config({"observation": {"z": 1, "sigma_z": 1}, "bogus": 1})
        with pytest.raises(ParseError, match="/levels/1"):
            parse_config({"observation": {"z": 1, "sigma_z": 1},
                          "levels": [0.66, 1.5]})

    def test_load_config_from_file(self, tmp_path):
        doc = {"observation": {"z": 0.825, "sigma_z": 0.072},
               "sampler": {"draws": 5000, "chains": 2, "seed": 9},
               "reality": {"kind": "manual",
                           "Sigma_beta_star": [[1.0, 0.0], [0.0, 4.0]],
                           "xi": 0.2}}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(doc))
        cfg = load_config(path)
        assert cfg.sampler.seed == 9
        assert cfg.reality.xi == 0.2
        assert cfg.digest() == parse_config(doc).digest()

    def test_sampler_bounds(self):
        with pytest.raises(ParseError):
            parse_config({"observation": {"z": 1, "sigma_z": 1},
                          "sampler": {"draws": 10}})


class TestCatalog:
    def test_exactly_five_entries(self):
        names = [c.name for c in builtin_catalog()]
        assert names == ["cox", "sherwood", "brient_schneider", "tian", "zhai"]

    def test_published_observation_values(self):
        cox = catalog_lookup("cox")
        assert (cox.observation.z, cox.observation.sigma_z) == (0.13, 0.016)
        assert cox.predictor_prior.kind == "normal"
        assert (cox.predictor_prior.mu_x, cox.predictor_prior.sigma_x) == (0.15, 1.0)
        assert (catalog_lookup("sherwood").observation.z,
                catalog_lookup("sherwood").observation.sigma_z) == (0.825, 0.072)
        assert (catalog_lookup("brient_schneider").observation.z,
                catalog_lookup("brient_schneider").observation.sigma_z) == (-0.96, 0.22)
        assert (catalog_lookup("tian").observation.z,
                catalog_lookup("tian").observation.sigma_z) == (1.0, 0.5)
        assert (catalog_lookup("zhai").observation.z,
                catalog_lookup("zhai").observation.sigma_z) == (-1.285, 0.565)
        for name in ("sherwood", "brient_schneider", "tian", "zhai"):
            assert catalog_lookup(name).predictor_prior.kind == "flat"

    def test_unknown_name(self):
        with pytest.raises(LookupError, match="unknown dataset"):
            catalog_lookup("nope")


class TestEnsembleInvariants:
    def test_direct_construction_validation(self):
        from ecbayes import Ensemble
        with pytest.raises(DomainError):
            Ensemble(("a", "b", "c"), np.array([1.0, 1.0, 1.0]),
                     np.array([1.0, 2.0, 3.0]))
        with pytest.raises(DomainError):
            Ensemble(("a", "a", "b"), np.array([1.0, 2.0, 3.0]),
                     np.array([1.0, 2.0, 3.0]))
        with pytest.raises(DomainError):
            Ensemble(("a", "b", "c"), np.array([1.0, 2.0, np.inf]),
                     np.array([1.0, 2.0, 3.0]))
