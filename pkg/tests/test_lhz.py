import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kponet.lhz import (
    IsingInstance,
    broken_constraints,
    brute_force_ising,
    build_lhz,
    c_lower_bound,
    decode,
    encode,
    ising_energy,
    lhz_energy,
    load_instance,
    min_lhz_with_broken,
    save_instance,
)


def all_to_all(n, value=-1.0):
    return IsingInstance(n, {(i, j): value for i in range(n) for j in range(i + 1, n)})


def random_instance(n, rng):
    vals = rng.integers(-100, 101, size=n * (n - 1) // 2) / 100.0
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if not np.any(vals):
        vals[0] = 0.5
    return IsingInstance(n, dict(zip(pairs, vals)))


# --- published layout facts for the smallest inhomogeneous network (N=4) ---

def test_n4_layout_matches_published_network():
    lhz = build_lhz(all_to_all(4))
    assert lhz.n_modes == 6
    assert lhz.pair_of == ((0, 1), (1, 2), (2, 3), (0, 2), (1, 3), (0, 3))
    # one bulk four-body plaquette, two pumped three-body boundary plaquettes
    anc_counts = sorted(p.n_ancilla for p in lhz.plaquettes)
    assert anc_counts == [0, 1, 1]
    # 0-based mode sets: {0,1,3}, {1,2,4} with one ancilla; {1,3,4,5} bulk
    modesets = sorted(tuple(p.modes) for p in lhz.plaquettes)
    assert modesets == [(0, 1, 3), (1, 2, 4), (1, 3, 4, 5)]
    assert list(lhz.degree) == [1, 3, 1, 2, 2, 1]
    assert len(lhz.plaquettes) == lhz.n_modes - lhz.n_spins + 1


def test_constraint_count_general():
    for n in range(2, 8):
        lhz = build_lhz(all_to_all(n))
        assert lhz.n_modes == n * (n - 1) // 2
        assert len(lhz.plaquettes) == lhz.n_modes - n + 1
        assert int(np.sum(lhz.degree) + sum(p.n_ancilla for p in lhz.plaquettes)) == \
            4 * len(lhz.plaquettes)


def test_field_normalization():
    inst = IsingInstance(3, {(0, 1): 2.0, (0, 2): -1.0, (1, 2): 1.0})
    lhz = build_lhz(inst)
    assert np.isclose(np.sum(np.abs(lhz.fields)), 1.0)
    assert lhz.norm_scale == pytest.approx(4.0)
    assert np.allclose(lhz.fields * lhz.norm_scale,
                       [2.0, 1.0, -1.0])  # row-major: (0,1), (1,2), (0,2)


# --- encode / decode ---

@given(st.integers(2, 7), st.integers(0, 2 ** 6 - 1))
@settings(max_examples=60, deadline=None)
def test_decode_encode_roundtrip(n, bits):
    spins = np.array([1] + [1 if (bits >> i) & 1 else -1 for i in range(n - 1)])
    lhz = build_lhz(all_to_all(n))
    parity = encode(lhz, spins)
    row1 = parity[list(lhz.row1_modes)]
    assert np.array_equal(decode(lhz, row1), spins)


@given(st.integers(2, 6), st.integers(0, 2 ** 5 - 1))
@settings(max_examples=40, deadline=None)
def test_encoded_configs_satisfy_all_constraints(n, bits):
    spins = np.array([1] + [1 if (bits >> i) & 1 else -1 for i in range(n - 1)])
    lhz = build_lhz(all_to_all(n))
    assert broken_constraints(lhz, encode(lhz, spins)) == 0


def test_encoded_energy_matches_ising_energy():
    rng = np.random.default_rng(5)
    for n in (3, 4, 5):
        inst = random_instance(n, rng)
        lhz = build_lhz(inst)
        n_plq = len(lhz.plaquettes)
        for _ in range(10):
            spins = rng.choice([-1, 1], size=n)
            spins[0] = 1
            t = encode(lhz, spins)
            # encoded configs break nothing, so the constraint part is constant
            e_par = lhz_energy(lhz, t, constraint=0.7) + 0.7 * n_plq
            assert np.isclose(e_par * lhz.norm_scale, ising_energy(inst, spins))


# --- exhaustive oracles ---

def test_brute_force_uniform_af_n4_ground_set():
    e, configs = brute_force_ising(all_to_all(4))
    assert e == pytest.approx(-2.0)
    assert [tuple(c) for c in configs] == [
        (1, -1, -1, 1), (1, -1, 1, -1), (1, 1, -1, -1)]


def test_brute_force_matches_direct_enumeration():
    rng = np.random.default_rng(11)
    inst = random_instance(4, rng)
    e_min, configs = brute_force_ising(inst)
    energies = []
    for bits in range(8):
        s = np.array([1] + [1 if (bits >> i) & 1 else -1 for i in range(3)])
        energies.append(ising_energy(inst, s))
    assert e_min == pytest.approx(min(energies))
    for c in configs:
        assert ising_energy(inst, c) == pytest.approx(e_min)


def test_min_lhz_with_broken_consistency():
    lhz = build_lhz(all_to_all(4))
    e0, cfg0 = min_lhz_with_broken(lhz, constraint=0.3, n_broken=0)
    assert broken_constraints(lhz, cfg0) == 0
    assert e0 == pytest.approx(lhz_energy(lhz, cfg0, 0.3))
    for b in (1, 2, 3):  # every broken count is realizable on this network
        eb, cfgb = min_lhz_with_broken(lhz, constraint=0.3, n_broken=b)
        assert broken_constraints(lhz, cfgb) == b
        assert eb > e0  # C above the bound keeps the constrained branch lowest
    with pytest.raises(ValueError):
        min_lhz_with_broken(lhz, constraint=0.3, n_broken=4)


# --- constraint-strength bound ---

def test_uniform_af_bound_is_one_sixth():
    lhz = build_lhz(all_to_all(4))
    assert c_lower_bound(lhz) == pytest.approx(1.0 / 6.0, abs=1e-12)


def test_bound_never_exceeds_one():
    rng = np.random.default_rng(23)
    for _ in range(20):
        lhz = build_lhz(random_instance(4, rng))
        assert c_lower_bound(lhz) <= 1.0 + 1e-12


def test_bound_separates_constrained_minimum():
    # above the bound the unconstrained parity minimum satisfies all
    # plaquettes; below it at least one instance-minimizing config breaks one
    rng = np.random.default_rng(31)
    for _ in range(10):
        lhz = build_lhz(random_instance(4, rng))
        bound = c_lower_bound(lhz)
        for c_val, expect_ok in ((bound + 0.01, True), (max(bound - 0.01, 0.0), False)):
            if c_val == 0.0:
                continue
            e0, _ = min_lhz_with_broken(lhz, c_val, 0)
            e_best = e0
            broken_best = 0
            for b in range(1, len(lhz.plaquettes) + 1):
                eb, _ = min_lhz_with_broken(lhz, c_val, b)
                if eb is not None and eb < e_best - 1e-12:
                    e_best = eb
                    broken_best = b
            if expect_ok:
                assert broken_best == 0
            elif bound > 0.011:  # strictly inside the violating region
                assert broken_best > 0


# --- persistence ---

def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    inst = random_instance(5, rng)
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    back = load_instance(path)
    assert back.n_spins == inst.n_spins
    assert back.couplings == inst.couplings
