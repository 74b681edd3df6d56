"""Time-dependent network Hamiltonian and parameter schedules.

Per mode the Hamiltonian carries Kerr, parametric pump, detuning and local
drive terms; plaquettes contribute four-body (bulk) or pumped three-body
(boundary, fixed-ancilla) mixing terms.  Everything is expressed in units
of the Kerr coefficient: frequencies in K, times in 1/K.

The action H|psi> is evaluated term-by-term through the tensor structure.
Single-mode terms form a real symmetric banded matrix per mode (offsets 0,
+-1, +-2); plaquette monomials are shifted-index ladder products.  The flat
array form of the terms is what the compiled kernel consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .fock import FockSpace, StateVector
from .lhz import LhzInstance

__all__ = [
    "SimParams",
    "ScheduleSample",
    "HamiltonianTermSet",
    "schedule",
    "build_terms",
    "apply_H",
    "expectation",
    "spectral_bounds",
]


@dataclass(frozen=True)
class SimParams:
    """Scalar simulation parameters, all in units of the Kerr coefficient.

    ``correction`` switches the position-dependent detuning on;
    ``correction_tracks_pump`` selects whether that detuning follows the
    instantaneous pump (default) or is pinned to the final pump value.
    """

    pump_final: float = 4.0
    detuning: float = 1.0
    coupling: float = 0.3  # drive/interaction scale, in units of K
    four_body: float = 0.3  # dimensionless plaquette strength
    duration: float = 500.0
    levels: int = 13
    dt: float = 0.01
    correction: bool = False
    correction_tracks_pump: str = "instant"  # or "final"
    renormalize: bool = False
    norm_tolerance: float = 1e-6

    def validate(self, strict_vacuum: bool = False) -> None:
        if self.detuning <= 0:
            raise ValueError("initial detuning must be positive")
        if self.pump_final <= self.detuning:
            raise ValueError("final pump must exceed the detuning (no bifurcation)")
        if self.duration <= 0 or self.dt <= 0:
            raise ValueError("duration and dt must be positive")
        if self.levels < 2:
            raise ValueError("need at least two Fock levels")
        if self.coupling < 0 or self.four_body < 0:
            raise ValueError("coupling and four-body strengths must be nonnegative")
        if self.correction_tracks_pump not in ("instant", "final"):
            raise ValueError("correction_tracks_pump must be 'instant' or 'final'")
        if strict_vacuum and self.coupling * self.four_body > 1.0:
            raise ValueError(
                "coupling * four_body exceeds 1: initial vacuum not guaranteed stable"
            )

    def with_correction(self, on: bool) -> "SimParams":
        return replace(self, correction=on)


@dataclass(frozen=True)
class ScheduleSample:
    """Parameter values at one instant."""

    time: float
    pump: float
    drive_amp: float  # scales the local drives; ~ alpha^3 at the end
    ancilla_amp: float  # fixed-ancilla amplitude; ~ alpha at the end
    detunings: np.ndarray  # per-mode


def _bifurcation_amp(pump: float, detuning: float) -> float:
    return float(np.sqrt(max(0.0, pump - detuning)))


def schedule(params: SimParams, lhz: LhzInstance, t: float) -> ScheduleSample:
    """Evaluate the parameter ramps at time t in [0, duration].

    The pump ramps linearly; drive and ancilla amplitudes follow the
    instantaneous bifurcation amplitude (alpha^3 and alpha), so all start
    at zero and hit the required endpoint relations exactly at t = T.
    """
    if not 0.0 <= t <= params.duration + 1e-12:
        raise ValueError(f"time {t} outside [0, {params.duration}]")
    pump = params.pump_final * t / params.duration
    alpha = _bifurcation_amp(pump, params.detuning)
    detunings = np.full(lhz.n_modes, params.detuning)
    if params.correction:
        if params.correction_tracks_pump == "instant":
            level = alpha ** 2
        else:
            level = _bifurcation_amp(params.pump_final, params.detuning) ** 2
        detunings = detunings + level * params.coupling * params.four_body * lhz.degree
    return ScheduleSample(
        time=t,
        pump=pump,
        drive_amp=alpha ** 3,
        ancilla_amp=alpha,
        detunings=detunings,
    )


@dataclass
class LadderTerm:
    """w * (prod a^dag on raise_modes)(prod a on lower_modes) + h.c."""

    raise_modes: tuple[int, ...]
    lower_modes: tuple[int, ...]
    weight: float


@dataclass
class HamiltonianTermSet:
    """H(t) in kernel-ready form for one instant.

    Single-mode physics lives in the real symmetric per-mode bands
    (``diag``, ``off1``, ``off2``); ``ladders`` holds the plaquette
    monomials.  Hermiticity is structural: bands are symmetric and every
    ladder term is applied together with its transpose.
    """

    n_modes: int
    levels: int
    diag: np.ndarray  # (L, d)
    off1: np.ndarray  # (L, d-1), couples n <-> n+1
    off2: np.ndarray  # (L, d-2), couples n <-> n+2
    ladders: list[LadderTerm]

    def mode_matrix(self, mode: int) -> np.ndarray:
        """Dense d x d matrix of the single-mode part (diagnostics/oracles)."""
        d = self.levels
        m = np.diag(self.diag[mode])
        m += np.diag(self.off1[mode], 1) + np.diag(self.off1[mode], -1)
        m += np.diag(self.off2[mode], 2) + np.diag(self.off2[mode], -2)
        return m


def build_terms(params: SimParams, lhz: LhzInstance, t: float) -> HamiltonianTermSet:
    sample = schedule(params, lhz, t)
    d = params.levels
    L = lhz.n_modes
    ns = np.arange(d, dtype=float)

    diag = np.empty((L, d))
    off1 = np.empty((L, d - 1))
    off2 = np.empty((L, d - 2))

    kerr = 0.5 * ns * (ns - 1.0)
    pump_band = -0.5 * sample.pump * np.sqrt((ns[:-2] + 1.0) * (ns[:-2] + 2.0))
    drive_band = -params.coupling * sample.drive_amp * np.sqrt(ns[:-1] + 1.0)
    for k in range(L):
        diag[k] = kerr + sample.detunings[k] * ns
        off1[k] = drive_band * lhz.fields[k]
        off2[k] = pump_band

    ladders = []
    for plq in lhz.plaquettes:
        weight = -params.coupling * params.four_body * sample.ancilla_amp ** plq.n_ancilla
        if weight == 0.0:
            continue
        ladders.append(
            LadderTerm(
                raise_modes=plq.modes[:2],
                lower_modes=plq.modes[2:],
                weight=weight,
            )
        )
    return HamiltonianTermSet(n_modes=L, levels=d, diag=diag, off1=off1, off2=off2, ladders=ladders)


def _check_space(terms: HamiltonianTermSet, space: FockSpace) -> None:
    if space.n_modes != terms.n_modes or space.levels != terms.levels:
        raise ValueError("state dimension does not match the term set")


def apply_H(terms: HamiltonianTermSet, psi: StateVector) -> StateVector:
    """Return H|psi> (frequency units of K)."""
    _check_space(terms, psi.space)
    out = np.zeros_like(psi.amplitudes)
    _kernels.apply_terms(terms, psi.amplitudes, out)
    return StateVector(psi.space, out)


def expectation(terms: HamiltonianTermSet, psi: StateVector) -> float:
    """<psi|H|psi> / <psi|psi>."""
    hpsi = apply_H(terms, psi)
    nrm2 = float(np.vdot(psi.amplitudes, psi.amplitudes).real)
    return float(np.vdot(psi.amplitudes, hpsi.amplitudes).real) / nrm2


def spectral_bounds(terms: HamiltonianTermSet) -> tuple[float, float]:
    """Rigorous (outer) bounds on the spectrum of H.

    Sum of per-mode extremal eigenvalues plus a norm bound for every ladder
    term.  Used to pick a stable integrator step and energy shift.
    """
    lo = 0.0
    hi = 0.0
    for k in range(terms.n_modes):
        evals = np.linalg.eigvalsh(terms.mode_matrix(k))
        lo += float(evals[0])
        hi += float(evals[-1])
    top = np.sqrt(terms.levels - 1.0)
    for term in terms.ladders:
        bound = 2.0 * abs(term.weight) * top ** (len(term.raise_modes) + len(term.lower_modes))
        lo -= bound
        hi += bound
    return lo, hi
