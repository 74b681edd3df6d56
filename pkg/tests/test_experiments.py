import json

import numpy as np
import pytest

from kponet.experiments import (
    RunRecord,
    config_str,
    gen_random_instance,
    instance_hash,
    run_batch,
    run_key,
    run_once,
    run_sweep,
    uniform_af_instance,
)
from kponet.hamiltonian import SimParams


FAST = SimParams(levels=5, duration=20.0, dt=0.1, norm_tolerance=1e-2)


# --- instance generation ---

def test_generator_is_deterministic_per_seed():
    a = gen_random_instance(4, 7)
    b = gen_random_instance(4, 7)
    c = gen_random_instance(4, 8)
    assert a.couplings == b.couplings
    assert a.couplings != c.couplings


def test_generator_draws_from_the_hundredths_grid():
    for seed in range(30):
        inst = gen_random_instance(5, seed)
        for v in inst.couplings.values():
            assert -1.0 <= v <= 1.0
            assert round(v * 100) == pytest.approx(v * 100, abs=1e-9)


def test_generator_never_returns_the_zero_instance():
    for seed in range(200):
        inst = gen_random_instance(3, seed)
        assert any(v != 0.0 for v in inst.couplings.values())


def test_generator_coupling_marginal_is_uniform():
    # chi-square over the 201 grid values, pooled across seeds
    draws = []
    for seed in range(2000):
        draws.extend(gen_random_instance(4, seed).couplings.values())
    draws = np.round(np.array(draws) * 100).astype(int) + 100
    counts = np.bincount(draws, minlength=201)
    expected = len(draws) / 201.0
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    # 201 bins -> dof 200; the 99.9th percentile is about 268
    assert chi2 < 268.0


def test_generator_rejects_degenerate_sizes():
    with pytest.raises(ValueError):
        gen_random_instance(1, 0)


# --- hashing and keys ---

def test_run_key_separates_every_ingredient():
    inst = uniform_af_instance(3)
    other = gen_random_instance(3, 1)
    p = FAST
    base = run_key(inst, p, "split")
    assert base == run_key(inst, p, "split")
    assert base != run_key(other, p, "split")
    assert base != run_key(inst, p, "rk4")
    assert base != run_key(inst, SimParams(levels=6, duration=20.0, dt=0.1,
                                           norm_tolerance=1e-2), "split")


def test_instance_hash_ignores_dict_order():
    a = uniform_af_instance(3)
    b_c = dict(reversed(list(a.couplings.items())))
    from kponet.lhz import IsingInstance

    b = IsingInstance(3, b_c)
    assert instance_hash(a) == instance_hash(b)


def test_config_str():
    assert config_str((1, -1, -1, 1)) == "+--+"


# --- cached runs ---

def test_run_once_caches_and_replays(tmp_path):
    inst = uniform_af_instance(3)
    rec1 = run_once(inst, FAST, cache=tmp_path)
    assert (tmp_path / "runs" / f"{rec1.key}.json").exists()
    # poison the simulator path: a cache hit must not evolve again
    import kponet.experiments as exp

    real = exp.evolve
    exp.evolve = None
    try:
        rec2 = run_once(inst, FAST, cache=tmp_path)
    finally:
        exp.evolve = real
    assert rec2.key == rec1.key
    assert rec2.distribution == rec1.distribution
    assert rec2.mean_photons == rec1.mean_photons


def test_run_once_record_is_byte_identical_across_recomputes(tmp_path):
    inst = uniform_af_instance(3)
    rec1 = run_once(inst, FAST, cache=tmp_path / "a")
    rec2 = run_once(inst, FAST, cache=tmp_path / "b")
    d1 = json.loads(rec1.to_json())
    d2 = json.loads(rec2.to_json())
    d1.pop("meta")
    d2.pop("meta")  # wall time lives only here
    assert json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)


def test_run_once_saves_state_blob(tmp_path):
    from kponet.fock import load_state

    inst = uniform_af_instance(3)
    rec = run_once(inst, FAST, cache=tmp_path, save_final_state=True)
    state, t = load_state(tmp_path / "states" / f"{rec.key}.state")
    assert t == FAST.duration
    assert state.space.n_modes == 3
    got = [float(x) for x in rec.mean_photons]
    from kponet.fock import mean_photon

    assert np.allclose(got, [mean_photon(state, k) for k in range(3)], atol=1e-9)


def test_run_record_json_roundtrip(tmp_path):
    rec = run_once(uniform_af_instance(3), FAST, cache=tmp_path)
    back = RunRecord.from_json(rec.to_json())
    assert back == rec


# --- batches and sweeps ---

def test_run_batch_zero_instances(tmp_path):
    out = run_batch(n_instances=0, n_spins=3, params=FAST, cache=tmp_path)
    assert out["rows"] == [] and out["failures"] == []
    assert out["aggregates"] == {}


def test_run_batch_rows_and_aggregates(tmp_path):
    out = run_batch(
        n_instances=2, n_spins=3, base_seed=5, params=FAST, cache=tmp_path
    )
    assert len(out["rows"]) == 2
    for row in out["rows"]:
        assert {"seed", "instance_key", "success_uncorrected",
                "success_corrected", "residual_uncorrected",
                "residual_corrected", "improvement_rate"} <= set(row)
    ag = out["aggregates"]
    assert ag["mean_success_corrected"] == pytest.approx(
        np.mean([r["success_corrected"] for r in out["rows"]])
    )
    assert 0.0 <= ag["improved_fraction"] <= 1.0


def test_run_batch_quarantines_failures(tmp_path):
    # an absurd norm tolerance with coarse stepping makes every run fail
    bad = SimParams(levels=5, duration=20.0, dt=5.0, norm_tolerance=1e-16)
    out = run_batch(
        n_instances=2, n_spins=3, base_seed=5, params=bad, cache=tmp_path
    )
    assert out["rows"] == []
    assert len(out["failures"]) == 2
    assert all("IntegrationError" in f["error"] for f in out["failures"])


def test_run_sweep_grid_shape(tmp_path):
    rows = run_sweep(
        [0.2, 0.4], [0.3], n_instances=1, n_spins=3, params=FAST,
        cache=tmp_path
    )
    assert len(rows) == 2
    assert {r["four_body"] for r in rows} == {0.2, 0.4}
    for r in rows:
        assert 0.0 <= r["mean_success"] <= 1.0
        assert r["n_instances"] == 1
