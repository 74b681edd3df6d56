"""Coherent-state mean-field analysis of the oscillator network.

A product of coherent states |alpha_1>...|alpha_L> with real amplitudes is
used as the trial wave function.  Stationarity of <H> gives L coupled cubic
equations; after every bifurcation the ground branch follows the parity
signs of the encoded solution, and to first order in the drive scale the
amplitudes (and hence photon numbers) admit closed forms.  These are the
analytics behind the detuning correction and the acceptance comparisons
against the full simulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import SimParams, schedule
from .lhz import IsingInstance, LhzInstance, brute_force_ising, encode

__all__ = [
    "MeanFieldSolution",
    "coherent_energy",
    "first_order_amplitudes",
    "ground_signs",
    "photon_prediction",
    "solve_meanfield",
    "vacuum_bracket",
    "vacuum_stable",
]


def ground_signs(lhz: LhzInstance, inst: IsingInstance) -> np.ndarray:
    """Parity signs of (one of) the encoded Ising ground configurations."""
    _, configs = brute_force_ising(inst)
    return encode(lhz, configs[0])


def _plaquette_products(lhz, alphas, beta, skip=None, also_skip=None):
    """Sum over plaquettes touching ``skip`` of the partner-amplitude products.

    Each fixed ancilla contributes a factor beta.  With ``also_skip`` set,
    that mode's factor is removed too (Jacobian entries).
    """
    total = 0.0
    for plq in lhz.plaquettes:
        if skip not in plq.modes:
            continue
        if also_skip is not None and also_skip not in plq.modes:
            continue
        prod = beta ** plq.n_ancilla
        for m in plq.modes:
            if m == skip or m == also_skip:
                continue
            prod *= alphas[m]
        total += prod
    return total


def coherent_energy(lhz: LhzInstance, params: SimParams, alphas, t: float) -> float:
    """<H> in the real-amplitude coherent trial state, units of K (hbar = 1)."""
    a = np.asarray(alphas, dtype=float)
    sch = schedule(params, lhz, t)
    xi = params.coupling
    e = float(
        np.sum(
            0.5 * a ** 4
            - sch.pump * a ** 2
            + sch.detunings * a ** 2
            - 2.0 * xi * sch.drive_amp * lhz.fields * a
        )
    )
    for plq in lhz.plaquettes:
        prod = sch.ancilla_amp ** plq.n_ancilla
        for m in plq.modes:
            prod *= a[m]
        e -= 2.0 * xi * params.four_body * prod
    return e


@dataclass
class MeanFieldSolution:
    amplitudes: np.ndarray
    residual: float
    iterations: int
    converged: bool

    @property
    def photons(self) -> np.ndarray:
        return self.amplitudes ** 2


def _residual(lhz, params, sch, alphas):
    xi = params.coupling
    out = np.empty_like(alphas)
    for k in range(lhz.n_modes):
        out[k] = (
            alphas[k] ** 3
            + (sch.detunings[k] - sch.pump) * alphas[k]
            - xi
            * (
                sch.drive_amp * lhz.fields[k]
                + params.four_body
                * _plaquette_products(lhz, alphas, sch.ancilla_amp, skip=k)
            )
        )
    return out


def solve_meanfield(
    lhz: LhzInstance,
    params: SimParams,
    signs,
    t: float | None = None,
    tol: float = 1e-13,
    max_iter: int = 100,
) -> MeanFieldSolution:
    """Newton solve of the stationarity equations on the given sign branch.

    Seeded at the zero-coupling bifurcation amplitudes alpha_0k * sign_k;
    the first few iterations are damped to keep the iterate on the branch.
    """
    t = params.duration if t is None else t
    sch = schedule(params, lhz, t)
    signs = np.asarray(signs, dtype=float)
    L = lhz.n_modes
    xi = params.coupling

    alphas = signs * np.sqrt(np.maximum(0.0, sch.pump - sch.detunings))
    if not np.any(alphas):
        # before every bifurcation the trivial branch is the solution
        alphas = alphas + 1e-3 * signs

    res = _residual(lhz, params, sch, alphas)
    it = 0
    for it in range(1, max_iter + 1):
        jac = np.zeros((L, L))
        for k in range(L):
            jac[k, k] = 3.0 * alphas[k] ** 2 + (sch.detunings[k] - sch.pump)
            for j in range(L):
                if j == k:
                    continue
                jac[k, j] = -xi * params.four_body * _plaquette_products(
                    lhz, alphas, sch.ancilla_amp, skip=k, also_skip=j
                )
        step = np.linalg.solve(jac, res)
        alphas = alphas - (0.5 if it <= 3 else 1.0) * step
        res = _residual(lhz, params, sch, alphas)
        if np.max(np.abs(res)) < tol:
            break
    return MeanFieldSolution(
        amplitudes=alphas,
        residual=float(np.max(np.abs(res))),
        iterations=it,
        converged=bool(np.max(np.abs(res)) < tol),
    )


def first_order_amplitudes(
    lhz: LhzInstance, params: SimParams, signs, t: float | None = None
) -> np.ndarray:
    """Closed-form amplitudes to first order in the drive scale.

    alpha_k ~ alpha_0k s_k + xi/(2 alpha_0^2) (A J_k + alpha_0^3 C s_k z_k),
    valid on an unbroken-constraint branch after all bifurcations.
    """
    t = params.duration if t is None else t
    sch = schedule(params, lhz, t)
    signs = np.asarray(signs, dtype=float)
    alpha_0k = np.sqrt(np.maximum(0.0, sch.pump - sch.detunings))
    alpha_0_sq = max(sch.pump - float(np.mean(sch.detunings)), 1e-12)
    alpha_0 = np.sqrt(alpha_0_sq)
    return alpha_0k * signs + (
        params.coupling / (2.0 * alpha_0_sq)
    ) * (
        sch.drive_amp * lhz.fields
        + alpha_0 ** 3 * params.four_body * signs * lhz.degree
    )


def photon_prediction(
    lhz: LhzInstance, params: SimParams, signs, t: float | None = None
) -> np.ndarray:
    """First-order mean photon numbers per mode.

    n_k ~ (p - Delta_k) + xi (A J_k s_k / alpha_0 + alpha_0^2 C z_k); with the
    correction switched on the Delta_k term cancels the z_k inhomogeneity and
    the prediction collapses towards p - Delta.
    """
    t = params.duration if t is None else t
    sch = schedule(params, lhz, t)
    signs = np.asarray(signs, dtype=float)
    alpha_0_sq = max(sch.pump - float(np.mean(sch.detunings)), 1e-12)
    alpha_0 = np.sqrt(alpha_0_sq)
    return (sch.pump - sch.detunings) + params.coupling * (
        sch.drive_amp * lhz.fields * signs / alpha_0
        + alpha_0_sq * params.four_body * lhz.degree
    )


def vacuum_bracket(params: SimParams, photons) -> float:
    """The stability bracket of the initial-time variational equations.

    prod(|a_k|^2 + Delta) - (xi C)^4 prod |a_k|^2 over the modes of the bulk
    plaquette; positive for every amplitude choice iff xi C <= 1.
    """
    n = np.asarray(photons, dtype=float)
    g = params.coupling * params.four_body
    return float(np.prod(n + params.detuning) - g ** 4 * np.prod(n))


def vacuum_stable(params: SimParams) -> bool:
    """Initial vacuum is the variational ground state iff xi C / K <= 1."""
    return params.coupling * params.four_body <= 1.0
