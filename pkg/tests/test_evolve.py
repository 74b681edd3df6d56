import numpy as np
import pytest
from scipy.integrate import solve_ivp

from kponet.evolve import (
    IntegrationError,
    evolve,
    stable_step,
    write_diagnostics,
)
from kponet.fock import FockSpace, vacuum
from kponet.hamiltonian import SimParams, build_terms
from kponet.lhz import IsingInstance, build_lhz
from tests.test_hamiltonian import dense_h


def lhz_pair():
    # two spins: a single parity mode, no plaquettes
    return build_lhz(IsingInstance(2, {(0, 1): -1.0}))


def lhz_triangle():
    return build_lhz(
        IsingInstance(3, {(0, 1): -1.0, (1, 2): 0.7, (0, 2): -0.4})
    )


def reference_state(params, lhz):
    """High-accuracy dense integration of the same schedule (oracle)."""
    space = FockSpace(lhz.n_modes, params.levels)
    psi0 = vacuum(space).amplitudes

    def rhs(t, y):
        h = dense_h(build_terms(params, lhz, min(t, params.duration)))
        return -1j * (h @ y)

    sol = solve_ivp(
        rhs,
        (0.0, params.duration),
        psi0,
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
    )
    assert sol.success
    return sol.y[:, -1]


def aligned_error(ref, got):
    """State error after removing the global phase (rk4 runs in a shifted
    gauge, so only the phase-invariant part of the state is comparable)."""
    ov = np.vdot(ref, got)
    if abs(ov) == 0:
        return 2.0
    return float(np.linalg.norm(got * (abs(ov) / ov) - ref))


# --- correctness against a dense high-order oracle ---

@pytest.mark.parametrize("method", ["rk4", "split"])
def test_single_mode_matches_dense_oracle(method):
    params = SimParams(levels=8, duration=8.0, dt=0.02)
    lhz = lhz_pair()
    ref = reference_state(params, lhz)
    rep = evolve(params, lhz, method=method)
    err = aligned_error(ref, rep.final_state.amplitudes)
    assert err < 5e-4
    assert rep.norm_drift < 1e-6


def test_three_spin_methods_agree():
    params = SimParams(levels=5, duration=6.0, dt=0.01)
    lhz = lhz_triangle()
    a = evolve(params, lhz, method="rk4").final_state.amplitudes
    b = evolve(params, lhz, method="split").final_state.amplitudes
    ov = abs(np.vdot(a, b))
    assert ov > 1.0 - 1e-6


# --- refinement (convergence order) ---

def refinement_slope(method, dts, params, lhz, ref):
    errs = []
    for dt in dts:
        rep = evolve(
            SimParams(**{**params.__dict__, "dt": dt}), lhz, method=method
        )
        errs.append(aligned_error(ref, rep.final_state.amplitudes))
    slope, _ = np.polyfit(np.log(dts), np.log(errs), 1)
    return float(slope), errs


def test_rk4_refinement_is_fourth_order():
    params = SimParams(levels=6, duration=4.0, dt=0.05)
    lhz = lhz_pair()
    ref = reference_state(params, lhz)
    slope, errs = refinement_slope("rk4", [0.04, 0.02, 0.01], params, lhz, ref)
    assert slope >= 3.5
    assert errs[-1] < errs[0]


def test_split_refinement_is_second_order():
    params = SimParams(levels=6, duration=4.0, dt=0.05)
    lhz = lhz_pair()
    ref = reference_state(params, lhz)
    slope, _ = refinement_slope("split", [0.08, 0.04, 0.02], params, lhz, ref)
    assert slope >= 1.8


# --- stability and norm control ---

def test_rk4_step_is_clamped_to_stability():
    params = SimParams(levels=9, duration=10.0, dt=1.0, norm_tolerance=0.5)
    lhz = lhz_pair()
    limit = stable_step(params, lhz)
    rep = evolve(params, lhz, method="rk4")
    assert rep.dt <= limit + 1e-12
    assert rep.n_steps * rep.dt == pytest.approx(params.duration)


def test_norm_conserved_tightly_at_reference_settings():
    params = SimParams(levels=6, duration=10.0, dt=0.01)
    lhz = lhz_triangle()
    for method in ("rk4", "split"):
        rep = evolve(params, lhz, method=method)
        assert rep.norm_drift < 1e-6


def test_norm_tolerance_violation_raises():
    params = SimParams(levels=6, duration=10.0, dt=0.5, norm_tolerance=1e-15)
    with pytest.raises(IntegrationError):
        evolve(params, lhz_triangle(), method="split", checkpoint_every=2)


def test_renormalize_suppresses_the_failure():
    params = SimParams(
        levels=6, duration=10.0, dt=0.5, norm_tolerance=1e-15, renormalize=True
    )
    rep = evolve(params, lhz_triangle(), method="split", checkpoint_every=2)
    assert rep.final_state.norm() == pytest.approx(1.0, abs=1e-12)


def test_unknown_method_rejected():
    with pytest.raises(ValueError):
        evolve(SimParams(levels=4, duration=1.0), lhz_pair(), method="euler")


# --- checkpointing and diagnostics ---

def test_split_checkpoint_cadence_does_not_change_the_result():
    params = SimParams(levels=5, duration=4.0, dt=0.05)
    lhz = lhz_triangle()
    a = evolve(params, lhz, method="split", checkpoint_every=3)
    b = evolve(params, lhz, method="split", checkpoint_every=10 ** 9)
    assert np.allclose(a.final_state.amplitudes, b.final_state.amplitudes,
                       atol=1e-12)
    assert len(a.checkpoints) > len(b.checkpoints)


def test_checkpoint_rows_are_monotone_in_time():
    params = SimParams(levels=5, duration=4.0, dt=0.05)
    rep = evolve(params, lhz_triangle(), method="split", checkpoint_every=10)
    times = [row.time for row in rep.checkpoints]
    assert times == sorted(times)
    assert times[-1] == pytest.approx(params.duration)
    assert all(abs(row.norm - 1.0) < 1e-9 for row in rep.checkpoints)


def test_diagnostics_csv(tmp_path):
    params = SimParams(levels=5, duration=4.0, dt=0.05)
    lhz = lhz_triangle()
    rep = evolve(params, lhz, method="split", checkpoint_every=20)
    path = tmp_path / "diag.csv"
    write_diagnostics(rep, path)
    import csv

    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["time", "norm", "mean_photon_0", "mean_photon_1",
                       "mean_photon_2", "top_level"]
    assert len(rows) == 1 + len(rep.checkpoints)
    assert float(rows[-1][0]) == pytest.approx(params.duration)


def test_photon_parity_conserved_without_any_coupling():
    # with the drive and plaquette strengths at zero the pump creates photons
    # in pairs only, so each mode keeps even photon parity from the vacuum
    params = SimParams(levels=6, duration=5.0, dt=0.05, coupling=0.0,
                       four_body=0.0)
    lhz = lhz_triangle()
    rep = evolve(params, lhz, method="split")
    amp = rep.final_state.amplitudes.reshape((6, 6, 6))
    odd = [1, 3, 5]
    assert np.allclose(amp[odd, :, :], 0.0, atol=1e-12)
    assert np.allclose(amp[:, odd, :], 0.0, atol=1e-12)
    assert np.allclose(amp[:, :, odd], 0.0, atol=1e-12)
    assert rep.final_state.norm() == pytest.approx(1.0, abs=1e-7)
