import math

import numpy as np
import pytest

import hmclab


def test_version():
    assert hmclab.__version__.startswith("v")


def test_coefficients_are_reproducible():
    a = hmclab.hmc_coeffs(64, seed=3)
    b = hmclab.hmc_coeffs(64, seed=3)
    c = hmclab.hmc_coeffs(64, seed=4)
    assert a.shape == (65,)
    assert a[0] == 1.0
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_split_identity():
    good, bad, c = hmclab.split(256, 3, 8, seed=11)
    assert abs(good + bad - c) <= 1e-10 * max(1.0, abs(c))


def test_cue_secular_invariants():
    c = hmclab.cue_secular(12, seed=5)
    assert c[0] == pytest.approx(1.0)
    assert abs(c[-1]) == pytest.approx(1.0)
    np.testing.assert_allclose(np.abs(c), np.abs(c[::-1]), atol=1e-10)


def test_dickman():
    t = hmclab.DickmanTable()
    assert t.rho(2.0) == pytest.approx(1.0 - math.log(2.0), abs=1e-8)
    assert t.total_integral() == pytest.approx(math.exp(np.euler_gamma), abs=1e-6)
    assert np.all(np.diff(t.rho(np.linspace(0.0, 10.0, 101))) <= 0.0)
    assert hmclab.limit_dickman_sum(2, t) == pytest.approx(math.exp(-np.euler_gamma) * math.log(2.0))


def test_limit_law():
    assert hmclab.moment_formula(1.0) == pytest.approx(math.pi**0.75 / 2.0)
    with pytest.raises(hmclab.DomainError):
        hmclab.moment_formula(2.0)
    w = hmclab.sample_limit(20000, seed=9)
    y = 1.3
    empirical = np.mean(np.abs(w) >= y)
    assert abs(empirical - hmclab.tail_formula(y)) < 0.02


def test_run_and_schema(tmp_path):
    manifest = hmclab.run(experiment="dickman", output_dir=str(tmp_path))
    assert manifest["config"]["experiment"] == "dickman"
    assert (tmp_path / "manifest.json").exists()
    assert manifest["reports"]
    with pytest.raises(hmclab.SchemaError, match="replica"):
        hmclab.run(replica=10)
