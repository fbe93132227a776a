# SPDX-License-Identifier: Apache-2.0
import json
import math
import os
import subprocess

import numpy as np
import pytest

import gmc_lab


def small_config(**over):
    cfg = {
        "dimension": 1,
        "lambda2": 0.5,
        "scale": 1.0,
        "mollifier": {"kind": "gaussian", "epsilon": 1.0 / 256},
        "grid": {"n": 1024, "length": 4.0, "origin": [0.0]},
        "seed": 7,
        "replicas": 2,
    }
    cfg.update(over)
    return cfg


def test_zeta_and_p_star():
    assert gmc_lab.zeta(2.0, 1, 0.5) == pytest.approx(1.5)
    assert gmc_lab.zeta(1.0, 3, 1.7) == pytest.approx(3.0)
    assert gmc_lab.p_star(1, 0.5) == pytest.approx(4.0)
    # p* is the nontrivial root of zeta_p = d
    assert gmc_lab.zeta(gmc_lab.p_star(2, 1.3), 2, 1.3) == pytest.approx(2.0)


def test_kernel_is_log_in_d1():
    k = {"dimension": 1, "lambda2": 1.0, "scale": 2.0}
    assert gmc_lab.kernel_value(k, 0.5) == pytest.approx(math.log(4.0), rel=1e-8)
    assert gmc_lab.kernel_value(k, 3.0) == pytest.approx(0.0, abs=1e-12)
    assert math.isinf(gmc_lab.kernel_value(k, 0.0))


def test_logplus_hat_1d_matches_sine_integral():
    # d = 1: transform is Si(2 pi xi T) / (pi xi); compare with numpy quadrature of the sinc.
    xi, T = 0.7, 1.0
    t = np.linspace(0.0, 2 * np.pi * xi * T, 200001)
    si = np.trapezoid(np.sinc(t / np.pi), t)
    assert gmc_lab.logplus_hat(1, xi, T) == pytest.approx(si / (np.pi * xi), rel=1e-6)


@pytest.mark.parametrize("d,verdict", [(1, "nonnegative-on-grid"), (3, "nonnegative-on-grid"), (4, "sign-oscillating")])
def test_certificates(d, verdict):
    assert gmc_lab.certificate(d)["certificate"] == verdict


def test_gate_refuses_d4_and_critical():
    cfg = small_config(dimension=4, grid={"n": 8, "length": 4.0, "origin": [0.0] * 4})
    with pytest.raises(gmc_lab.GateError):
        gmc_lab.gate(cfg)
    with pytest.raises(ValueError):
        gmc_lab.gate(small_config(lambda2=2.0))
    with pytest.raises(gmc_lab.ConfigError):
        gmc_lab.gate({"dimension": 1})


def test_simulate_is_reproducible_and_normalized():
    a = gmc_lab.simulate(small_config())
    b = gmc_lab.simulate(small_config())
    assert len(a) == 2
    assert a[0]["field"].shape == (1024,)
    np.testing.assert_array_equal(a[1]["field"], b[1]["field"])
    assert not np.array_equal(a[0]["field"], a[1]["field"])
    h = 4.0 / 1024
    for r in a:
        np.testing.assert_allclose(r["measure"], h * np.exp(r["field"] - 0.5 * r["variance"]), rtol=1e-12)
    # unit mean density: E[X] = 0 and the pointwise variance is exact
    fields = np.concatenate([r["field"] for r in gmc_lab.simulate(small_config(replicas=64))])
    assert abs(fields.mean()) < 0.2
    assert fields.var() == pytest.approx(a[0]["variance"], rel=0.25)


def test_digest_ignores_threads():
    assert gmc_lab.config_digest(small_config(threads=1)) == gmc_lab.config_digest(small_config(threads=3))
    assert gmc_lab.config_digest(small_config(seed=1)) != gmc_lab.config_digest(small_config(seed=2))


def test_oracle_suite_small_budget():
    rep = gmc_lab.run_oracles(seed=3, mc_samples=20000, instances=2)
    assert rep["failed"] == 0
    assert rep["passed"] + rep["inconclusive"] == len(rep["verdicts"])


def test_read_grid_from_cli(tmp_path):
    exe = os.environ.get("GMC_LAB_BIN")
    if not exe:
        pytest.skip("GMC_LAB_BIN not set")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(small_config(replicas=1)))
    subprocess.run([exe, "--config", str(cfg), "--out", str(tmp_path / "out"), "simulate"], check=True,
                   capture_output=True)
    header, values = gmc_lab.read_grid(tmp_path / "out" / "field_r0.bin")
    assert header["kind"] == "field"
    np.testing.assert_array_equal(values, gmc_lab.simulate(small_config(replicas=1))[0]["field"])
