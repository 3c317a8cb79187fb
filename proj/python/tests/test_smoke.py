import numpy as np
import pytest

import stochaction as sa


def small(name="free_gaussian"):
    cfg = sa.preset(name)
    cfg["grid"]["points"] = [512]
    cfg["stochastic"]["dt"] = 0.01
    cfg["t_final"] = 0.5
    cfg["snapshots"] = [0.0, 0.5]
    cfg["trajectories"] = 2000
    return cfg


def test_presets_listed():
    names = sa.preset_names()
    for required in ["free_gaussian", "oscillator_n0", "oscillator_n1", "superposition_phase",
                     "two_free_particles", "position_dependent_mass"]:
        assert required in names


def test_normalize_round_trip():
    cfg = sa.normalize({"initial": {"kind": "gaussian", "center": [0.0], "width": [1.0]}})
    assert cfg["hamiltonian"]["mass"] == 1.0
    assert sa.normalize(cfg) == cfg


def test_validation_error_names_field():
    with pytest.raises(sa.ValidationError, match="hamiltonian.mass"):
        sa.normalize({"hamiltonian": {"mass": -1.0}})
    with pytest.raises(ValueError, match="unknown key"):
        sa.normalize({"bogus": 1})


def test_initial_state_is_normalized():
    st = sa.initial_state("oscillator_n1")
    q = st["q"][:, 0]
    h = q[1] - q[0]
    assert np.sum(np.abs(st["psi"]) ** 2) * h == pytest.approx(1.0, abs=1e-12)


def test_deviation_mean():
    x = sa.sample_deviations(2.0, 200_000, seed=3)
    assert np.all(x >= 0)
    assert abs(x.mean() - 1.0) < 4 / np.sqrt(x.size)


def test_ensemble_is_reproducible():
    a = sa.ensemble(small(), seed=5)
    b = sa.ensemble(small(), seed=5)
    assert len(a) == 2
    np.testing.assert_array_equal(a[-1]["positions"], b[-1]["positions"])
    assert a[-1]["positions"].shape == (2000, 1)
    assert a[-1]["alive"].all()


def test_run_writes_artifacts(tmp_path):
    s1 = sa.run(small(), tmp_path / "a", seed=1)
    s2 = sa.run(small(), tmp_path / "b", seed=1)
    assert s1["manifest_hash"] == s2["manifest_hash"]
    assert (tmp_path / "a" / "manifest.json").exists()
    assert (tmp_path / "a" / "observables.csv").exists()
    assert all(r["z"] < 6 for r in s1["observables"])


def test_verify_single_criterion():
    report = sa.verify("quick", only=[1])
    assert report["all_passed"]
    assert report["criteria"][0]["id"] == 1
