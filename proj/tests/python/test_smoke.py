import math
import os
import subprocess

import numpy as np
import pytest

import umcmc


def test_rng_matches_numpy_philox():
    s = umcmc.RngStream(7, 0)
    ours = [s.raw() for _ in range(8)]
    ref = np.random.Philox(key=7, counter=0)
    theirs = list(ref.random_raw(8))
    assert s.position == 8
    assert ours[0] != ours[1]
    assert len(set(ours)) == 8
    # same key, same counter layout as the numpy bit generator
    assert ours == [int(v) for v in theirs]


def test_cost_and_estimator():
    assert umcmc.cost(1, 5) == 5
    assert umcmc.cost(4, 3) == 7
    value, mcmc, bc = umcmc.h_k_m(0, 2, 1, [1.0, 2.0, 6.0], [2.0, 6.0])
    assert value == pytest.approx(3.0)
    assert bc == 0.0
    value, mcmc, bc = umcmc.h_k_m(1, 2, 4, [0.0, 1.0, 2.0, 3.0, 4.0], [0.5, 1.0, 1.5, 4.0])
    assert value == pytest.approx(mcmc + bc, rel=1e-12)


def test_aggregate():
    out = umcmc.aggregate([0.0, 2.0], [10, 10])
    assert out["mean"][0] == 1.0
    assert out["variance"][0] == 2.0
    assert out["inefficiency"][0] == 20.0


def test_diagnostics():
    p = umcmc.empirical_survival([1, 2, 2, 5], 6)
    assert p[2] == 0.25
    surv = [1.0] + [n ** -2.0 for n in range(1, 201)]
    fit = umcmc.fit_polynomial_bound(surv, 20)
    assert fit["kappa"] == pytest.approx(2.0, abs=1e-6)
    rng = np.random.default_rng(3)
    assert 0.9 < umcmc.spectrum_variance(rng.standard_normal(100000).tolist()) < 1.1
    with pytest.raises(ValueError):
        umcmc.spectrum_variance([1.0] * 10)


def test_models():
    y = [0.3, -1.0, 0.8]
    exact = umcmc.kalman_log_lik(0.5, 1.0, y)
    ratios = [math.exp(umcmc.lgssm_pf_log_lik(0.5, 1.0, y, 64, 1, r) - exact) for r in range(2000)]
    assert abs(np.mean(ratios) - 1.0) < 4 * np.std(ratios) / math.sqrt(len(ratios))
    assert umcmc.toy_log_lik_hat(np.array([1.0, 2.0]), 0.0, 1, 0) == pytest.approx(-math.log(2 * math.pi))
    assert umcmc.bb_exact_log_lik(1.0, [1], 2.0) == pytest.approx(math.log(1 / 3))
    dist = umcmc.ising_exact_distribution(0.3, 2)
    assert sum(dist) == pytest.approx(1.0)
    sample = umcmc.ising_cftp_sample(0.3, 3, 1, 0)
    assert len(sample) == 9 and set(sample) <= {-1, 1}
    with pytest.raises(ValueError):
        umcmc.kalman_log_lik(0.5, -1.0, y)


def toy_text(out):
    return (
        "[experiment]\nmodel = toy\nkernel = pm\nk = 10\nm = 60\nreplicates = 40\n"
        f"record_timing = false\noutput = {out}\n[proposal]\nsd = 1\n[toy]\nsigma = 0.5\n"
    )


def test_run_pipeline(tmp_path):
    text = toy_text(tmp_path / "a")
    res = umcmc.run(text, "estimate")
    assert res["exit_code"] == 0
    report = res["report"]
    assert report["replicates"] == 40
    assert len(report["summary"]["mean"]) == 2
    assert os.path.exists(tmp_path / "a" / "estimates.csv")
    again = umcmc.run(toy_text(tmp_path / "b"), "estimate", ["experiment.workers=2"])
    for f in ("taus.csv", "estimates.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    assert umcmc.config_hash(text) == umcmc.config_hash(text, ["experiment.workers=4"])
    with pytest.raises(ValueError):
        umcmc.run(text, "estimate", ["experiment.k=100"])
    with pytest.raises(ValueError):
        umcmc.config_hash(text + "bogus = 1\n")


@pytest.mark.skipif("UMCMC_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_bad_config(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[experiment]\nmodel = nope\n")
    rc = subprocess.run([os.environ["UMCMC_CLI"], "meetings", "--config", str(cfg)], capture_output=True).returncode
    assert rc == 2
