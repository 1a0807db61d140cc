import numpy as np
import pytest

import lipfield


def test_presets_listed():
    assert "elas_soft_l05" in lipfield.bar_presets()
    assert "soft_elas" in lipfield.pointwise_presets()
    assert lipfield.preset("elas_soft_l05")["mesh"]["N"] == 128


def test_projections():
    d = np.array([0.0, 0.8, 0.0, 0.0])
    lo = lipfield.lower_projection(d, 2 * 0.25)
    up = lipfield.upper_projection(d, 2 * 0.25)
    assert np.all(lo <= d + 1e-15) and np.all(d <= up + 1e-15)
    assert lipfield.is_lip(lo, 0.5) and lipfield.is_lip(up, 0.5)
    assert not lipfield.is_lip(d, 0.5)
    assert lipfield.lip_constant([0.0, 0.5], 1.0) == pytest.approx(1.0)


def test_solve_damage_inside_bounds():
    model = {"kind": "softening_elasticity", "E": 1.0, "Yc": 1.0, "softening": {"kind": "h1"}}
    strain = [0.1, 3.0, 0.1, 0.1]
    s = lipfield.solve_damage(model, strain, np.zeros(4), l=0.5)
    assert np.all(s["lower"] - 1e-9 <= s["d"]) and np.all(s["d"] <= s["upper"] + 1e-9)
    assert s["kkt_residual"] <= 1e-6
    assert lipfield.is_lip(s["d"], 0.5, tol=1e-8)


def test_return_map_elastic():
    model = {"kind": "softening_plasticity", "E": 1.0, "sigma_y": 1.0, "k": 4.0}
    r = lipfield.return_map(model, 0.5, 0.0)
    assert not r["plastic"] and r["stress"] == pytest.approx(0.5)


def test_pointwise_matches_one_element_bar():
    p = lipfield.run_pointwise("soft_elas")
    c = p["curve"]
    assert c["stress"][0] == 0.0 and np.max(c["damage"]) > 0.5
    assert np.all(np.diff(c["damage"]) >= -1e-15)


def test_small_bar_run():
    cfg = lipfield.preset("elas_soft_l05")
    cfg["mesh"]["N"] = 16
    cfg["load"]["peaks"] = [1.6]
    cfg["load"]["steps_per_segment"] = [40]
    cfg["output"]["snapshot_steps"] = [40]
    r = lipfield.run_bar(cfg)
    assert len(r["curve"]["mean_stress"]) == 41
    assert r["lipschitz_feasible"] and r["irreversible"]
    assert r["max_kkt_violation"] <= 1e-6
    assert r["snapshots"][0]["damage"].shape == (16,)
    assert r["resolved_config"]["mesh"]["N"] == 16


def test_config_errors_raise():
    cfg = lipfield.preset("elas_soft_l05")
    cfg["mesh"]["M"] = 3
    with pytest.raises(lipfield.ConfigError, match="M"):
        lipfield.run_bar(cfg)
    with pytest.raises(lipfield.ConfigError):
        lipfield.preset("nope")


def test_quick_checks_pass():
    rep = lipfield.run_checks(quick=True)
    assert rep["passed"]
