import math

import numpy as np
import pytest

import bsphere


def test_analytic_values():
    assert bsphere.min_tail(1.0, 0.0) == pytest.approx(1.5)
    assert bsphere.first_moment(1.0, 0.5) == pytest.approx(0.00178571, rel=1e-5)
    assert bsphere.second_moment(1.0, 0.5) == pytest.approx(5.92909e-6, rel=1e-5)
    assert bsphere.ito_tail(1.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi))


def test_sample_is_deterministic():
    a = bsphere.sample_snake(256, seed=3)
    b = bsphere.sample_snake(256, seed=3)
    assert a == b
    assert a.n_steps == 256
    assert a.duration == 1.0
    assert a.zeta.shape == (257,)
    assert np.all(a.zeta >= 0)
    value, index = a.w_star()
    assert value == a.tip.min()
    assert a.tip[index] == value


def test_trajectory_round_trip(tmp_path):
    w = bsphere.sample_snake(128, seed=5)
    path = str(tmp_path / "w.bsnk")
    bsphere.write_trajectory(w, path)
    assert bsphere.read_trajectory(path) == w
    with open(path, "r+b") as f:
        f.seek(40)
        byte = f.read(1)
        f.seek(40)
        f.write(bytes([byte[0] ^ 0x10]))
    with pytest.raises(bsphere.CorruptFileError):
        bsphere.read_trajectory(path)


def test_metric_from_minimum_is_exact():
    w = bsphere.sample_snake(512, seed=7)
    value, star = w.w_star()
    e = bsphere.approx_D(w, 64, star, 300)
    assert e["value"] == pytest.approx(w.tip[300] - value, abs=1e-12)
    assert e["lower"] <= e["value"] <= e["upper"] + 1e-12


def test_invalid_trajectory_rejected():
    with pytest.raises(Exception):
        bsphere.SnakeTrajectory(1.0, 0.0, np.zeros(3), np.zeros(2))


def test_run_reports_parameter_error(tmp_path):
    code, _, err = bsphere.run("moments", {"eps-list": "0.1", "output-dir": str(tmp_path)})
    assert code == 2
    assert err
    assert bsphere.run("nonsense", {"output-dir": str(tmp_path)})[0] == 1


def test_config_hash_ignores_workers():
    a = bsphere.config_hash("sample", {"workers": "1"})
    b = bsphere.config_hash("sample", {"workers": "4"})
    assert a == b
    assert a != bsphere.config_hash("sample", {"root-seed": "9"})
