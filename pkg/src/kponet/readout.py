"""Sign readout of the final oscillator state and solution-quality metrics.

The parity spins live in the displacement sign of each mode, measured with
the spectral projectors of x = (a + a^dag)/2 on the truncated space.  Only
the first row of the triangular layout (modes 0 .. N-2, parity spins of
adjacent pairs) is needed to reconstruct a spin configuration, so pattern
probabilities are joint sign probabilities over those modes with the rest
traced out implicitly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .fock import StateVector, apply_single_mode, sign_projectors
from .lhz import IsingInstance, LhzInstance, brute_force_ising, decode, ising_energy

__all__ = [
    "ReadoutResult",
    "config_distribution",
    "improvement_rate",
    "improvement_rates",
    "parity_distribution",
    "residual_energy",
    "success_probability",
]


def parity_distribution(
    state: StateVector, modes: tuple[int, ...]
) -> dict[tuple[int, ...], float]:
    """Joint probabilities of the sign patterns on the given modes.

    Returns a dict keyed by tuples of +-1 of len(modes).  The projectors
    are complete, so the probabilities sum to the state norm.
    """
    d = state.space.levels
    proj = sign_projectors(d)
    out: dict[tuple[int, ...], float] = {}
    for pattern in itertools.product((1, -1), repeat=len(modes)):
        work = state
        for mode, sign in zip(modes, pattern):
            mat = proj.plus if sign > 0 else proj.minus
            work = apply_single_mode(mat, mode, work)
        out[pattern] = max(0.0, float(state.inner(work).real))
    return out


def config_distribution(
    state: StateVector, lhz: LhzInstance
) -> dict[tuple[int, ...], float]:
    """Probabilities of decoded spin configurations (first spin pinned +1)."""
    row1 = lhz.row1_modes
    parity = parity_distribution(state, row1)
    return {tuple(decode(lhz, pattern)): p for pattern, p in parity.items()}


def success_probability(
    dist: dict[tuple[int, ...], float], ground: list[tuple[int, ...]]
) -> float:
    return sum(dist.get(tuple(g), 0.0) for g in ground)


def residual_energy(dist: dict[tuple[int, ...], float], inst: IsingInstance) -> float:
    """Mean Ising energy above the ground energy, under the readout weights."""
    e_min, _ = brute_force_ising(inst)
    total = sum(dist.values())
    if total <= 0:
        return float("nan")
    mean = sum(p * ising_energy(inst, cfg) for cfg, p in dist.items()) / total
    return mean - e_min


def improvement_rate(p_success_without: float, p_success_with: float) -> float:
    """Ratio of failure probabilities, failure(without) / failure(with).

    Returns inf when the corrected run shows no failure weight at all
    (a "perfect" corrected run).
    """
    fail_with = 1.0 - p_success_with
    fail_without = 1.0 - p_success_without
    if fail_with <= 0.0:
        return float("inf")
    return fail_without / fail_with


def improvement_rates(without: "ReadoutResult", with_: "ReadoutResult") -> tuple[float, float]:
    """(failure-probability ratio, residual-energy ratio), without over with."""
    res_rate = (
        float("inf") if with_.residual <= 0.0 else without.residual / with_.residual
    )
    return improvement_rate(without.success, with_.success), res_rate


@dataclass
class ReadoutResult:
    distribution: dict[tuple[int, ...], float]
    success: float
    residual: float
    mean_photons: tuple[float, ...]

    @classmethod
    def from_state(
        cls,
        state: StateVector,
        lhz: LhzInstance,
        inst: IsingInstance,
        mean_photons: tuple[float, ...] | None = None,
    ) -> "ReadoutResult":
        from .fock import mean_photon

        dist = config_distribution(state, lhz)
        _, ground = brute_force_ising(inst)
        if mean_photons is None:
            mean_photons = tuple(
                mean_photon(state, k) for k in range(state.space.n_modes)
            )
        return cls(
            distribution=dist,
            success=success_probability(dist, ground),
            residual=residual_energy(dist, inst),
            mean_photons=mean_photons,
        )
