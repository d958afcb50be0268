import json

import numpy as np
import pytest

from corput_lab.harness import (
    ConfigError,
    ExperimentConfig,
    InequalityReport,
    fit_constant,
    product_uniform_image_density,
    random_polynomial,
    random_step_density,
    run_suite,
    sigma_from_samples,
    sum_power_phase,
    tv_k_distances,
)
from corput_lab.measures import philox_rng


def test_fit_constant_examples():
    eps = [0.1, 0.2, 0.4]
    samples = [(2.0 * e**0.5, e**0.5) for e in eps]
    c, idx = fit_constant(samples)
    assert c == pytest.approx(2.0)
    assert fit_constant([(3.0, 1.5)]) == (2.0, 0)
    outlier = [(1.0, 1.0), (9.0, 1.0), (1.0, 1.0)]
    c, idx = fit_constant(outlier)
    assert (c, idx) == (9.0, 1)
    with pytest.raises(ValueError):
        fit_constant([])
    with pytest.raises(ValueError):
        fit_constant([(1.0, 0.0)])


def test_config_validation():
    cfg = ExperimentConfig.from_dict({"suite": "krug"})
    assert cfg.params["grid"] == 2001
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"suite": "nope"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"suite": "krug", "bogus": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"suite": "krug", "params": {"unknown_knob": 2}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"suite": "krug", "schema": 99})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"suite": "krug", "seed": "abc"})


def test_report_determinism(tmp_path):
    cfg = {"suite": "mixture", "seed": 5, "params": {"cases": 6}}
    r1 = run_suite(cfg, out_dir=tmp_path / "a")
    r2 = run_suite(cfg, out_dir=tmp_path / "b")
    assert (tmp_path / "a" / "report.json").read_bytes() == (
        tmp_path / "b" / "report.json"
    ).read_bytes()
    assert (tmp_path / "a" / "cases.csv").read_text() == (
        tmp_path / "b" / "cases.csv"
    ).read_text()
    payload = json.loads((tmp_path / "a" / "report.json").read_text())
    assert set(payload) == {"suite", "cases", "verdict", "constants", "seed", "version"}
    assert payload["verdict"] == "pass"
    assert payload["version"]["schema"] == 1


def test_report_identical_across_thread_counts(monkeypatch):
    cfg = {"suite": "t_equiv", "seed": 3, "params": {"cases": 8}}
    monkeypatch.setenv("CORPUT_LAB_THREADS", "1")
    serial = run_suite(cfg).to_json_bytes()
    monkeypatch.setenv("CORPUT_LAB_THREADS", "4")
    threaded = run_suite(cfg).to_json_bytes()
    assert serial == threaded


def test_small_suites_pass():
    assert run_suite({"suite": "t_equiv", "params": {"cases": 6}}).passed
    assert run_suite({"suite": "t_meas", "params": {"cases": 6}}).passed
    assert run_suite({"suite": "sublevel_8ek", "params": {"cases": 6}}).passed
    assert run_suite({"suite": "quantile_4e", "params": {"cases": 6}}).passed
    assert run_suite({"suite": "krug"}).passed
    assert run_suite({"suite": "mixture", "params": {"cases": 6}}).passed


def test_random_polynomial_family():
    rng = philox_rng(3)
    f = random_polynomial(rng, 3, 2)
    assert f.degree() == 2
    assert f.cube_variance() == pytest.approx(1.0)
    d, l2, linf = f.leading_data()
    assert l2 > 0


def test_sum_power_phase_anchor():
    f = sum_power_phase(4, 2, 3)
    assert f.degree() == 3
    assert f.cube_variance() == pytest.approx(1.0)
    assert f.n == 4
    with pytest.raises(ValueError):
        sum_power_phase(1, 2, 2)


def test_sigma_from_samples_tracks_exact():
    # image of U[0,1] under identity: sigma(eps) = 2 eps for the uniform
    rng = philox_rng(9)
    vals = rng.random(10**6)
    for eps in (0.01, 0.05):
        est = sigma_from_samples(vals, eps)
        assert est == pytest.approx(2.0 * eps, rel=0.05)


def test_product_image_density_oracle():
    rho = product_uniform_image_density(2)
    assert rho.mass == pytest.approx(1.0, abs=1e-7)
    xs = np.array([1e-6, 1e-3, 0.5])
    assert np.allclose(rho.eval_many(xs), -np.log(xs), rtol=1e-5)


def test_tv_k_distances_scaling():
    tv1, dk1 = tv_k_distances(0.01, grid=20001)
    tv2, dk2 = tv_k_distances(0.02, grid=20001)
    # both distances are linear in delta for this family
    assert tv1 == pytest.approx(0.01, rel=0.01)
    assert dk1 == pytest.approx(0.01 / 12.0, rel=0.01)
    assert tv2 / tv1 == pytest.approx(2.0, rel=0.02)
    assert dk2 / dk1 == pytest.approx(2.0, rel=0.02)


def test_ind_deg_suite_passes():
    report = run_suite({"suite": "ind_deg"})
    assert report.passed
    assert report.constants["d2_r2"] >= 0.95
    assert report.constants["d3_r2"] >= 0.95


def test_main_reg_suite_small():
    cfg = {
        "suite": "main_reg",
        "seed": 1,
        "params": {
            "ns": [1, 2],
            "ds": [2],
            "mc_count": 10**5,
            "eps_grid": {"min": 1e-2, "max": 1e-1, "points": 8},
            "random_members": 0,
        },
    }
    report = run_suite(cfg)
    assert report.passed
    assert report.constants["d2_stability"] <= 3.0


def test_osc_decay_suite_small():
    cfg = {
        "suite": "osc_decay",
        "seed": 1,
        "params": {
            "ns": [2],
            "ds": [2],
            "mc_count": 10**5,
            "t_grid": {"min": 10.0, "max": 100.0, "points": 10},
            "random_members": 0,
        },
    }
    report = run_suite(cfg)
    assert report.passed


def test_coeff_suites_small():
    cfg = {
        "suite": "coeff_t1",
        "seed": 2,
        "params": {"ns": [2], "cases": 1, "mc_count": 10**5},
    }
    assert run_suite(cfg).passed
    cfg2 = {
        "suite": "coeff_t2",
        "seed": 2,
        "params": {"mc_count": 10**5},
    }
    assert run_suite(cfg2).passed


def test_tv_k_suite_fails_as_analyzed():
    # the delta-family ratio grows like delta^(2/3); fitting the constant at
    # the smallest delta cannot be honored by larger deltas (ledger entry)
    report = run_suite({"suite": "tv_k", "params": {"grid": 20001}})
    assert not report.passed
    ratios = [c["ratio"] for c in report.cases]
    assert ratios == sorted(ratios)
    assert ratios[-1] / ratios[0] > 5.0
