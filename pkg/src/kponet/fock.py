"""Truncated multi-mode Fock-space linear algebra.

States live on L bosonic modes, each truncated to d levels (photon numbers
0..d-1), stored as a dense complex vector of length d**L.  The index is
mode-major: amplitude index = sum_k n_k * d**(L-1-k), i.e. mode 0 varies
slowest.  Operators are applied through the tensor structure with strided
reshapes; a d**L x d**L matrix is never materialized.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FockSpace",
    "StateVector",
    "ReducedDensity",
    "SignProjectors",
    "vacuum",
    "basis_state",
    "destroy_op",
    "create_op",
    "number_op",
    "position_op",
    "apply_single_mode",
    "apply_modes",
    "apply_ladder",
    "mean_photon",
    "top_level_population",
    "reduce",
    "sign_projectors",
    "coherent_amplitudes",
    "save_state",
    "load_state",
]

# Refuse to allocate states beyond this many amplitudes (~1.6 GB complex128).
MAX_STATE_DIM = 100_000_000

ORDERING_TAG = b"MODEMAJ1"


@dataclass(frozen=True)
class FockSpace:
    """L modes with d levels each (photon cutoff d-1)."""

    n_modes: int
    levels: int

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("need at least one mode")
        if self.levels < 2:
            raise ValueError("need at least two levels per mode")
        if self.levels ** self.n_modes > MAX_STATE_DIM:
            raise MemoryError(
                f"state dimension {self.levels}**{self.n_modes} exceeds "
                f"the {MAX_STATE_DIM} amplitude limit"
            )

    @property
    def dim(self) -> int:
        return self.levels ** self.n_modes

    def stride(self, mode: int) -> int:
        return self.levels ** (self.n_modes - 1 - mode)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.levels,) * self.n_modes


@dataclass
class StateVector:
    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.space.dim,):
            raise ValueError("amplitude vector does not match the space dimension")

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape(self.space.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.space, self.amplitudes.copy())


@dataclass
class ReducedDensity:
    """Reduced density matrix on a kept subset of modes."""

    modes: tuple[int, ...]
    levels: int
    matrix: np.ndarray

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class SignProjectors:
    """Projectors onto positive / negative quadrature sign for one mode."""

    plus: np.ndarray
    minus: np.ndarray


def vacuum(space: FockSpace) -> StateVector:
    amp = np.zeros(space.dim, dtype=np.complex128)
    amp[0] = 1.0
    return StateVector(space, amp)


def basis_state(space: FockSpace, occupations) -> StateVector:
    occ = tuple(int(n) for n in occupations)
    if len(occ) != space.n_modes:
        raise ValueError("occupation list length mismatch")
    if any(not 0 <= n < space.levels for n in occ):
        raise ValueError("occupation outside the truncation")
    idx = 0
    for n in occ:
        idx = idx * space.levels + n
    amp = np.zeros(space.dim, dtype=np.complex128)
    amp[idx] = 1.0
    return StateVector(space, amp)


def destroy_op(levels: int) -> np.ndarray:
    op = np.zeros((levels, levels))
    ns = np.arange(1, levels)
    op[ns - 1, ns] = np.sqrt(ns)
    return op


def create_op(levels: int) -> np.ndarray:
    return destroy_op(levels).T.copy()


def number_op(levels: int) -> np.ndarray:
    return np.diag(np.arange(levels, dtype=float))


def position_op(levels: int) -> np.ndarray:
    """Quadrature x = (a + a^dag)/2 in the truncated number basis."""
    return 0.5 * (destroy_op(levels) + create_op(levels))


def apply_single_mode(op: np.ndarray, mode: int, psi: StateVector) -> StateVector:
    """Apply a d x d operator to one mode (identity on the others)."""
    space = psi.space
    if not 0 <= mode < space.n_modes:
        raise ValueError(f"mode {mode} out of range")
    d = space.levels
    if op.shape != (d, d):
        raise ValueError("operator dimension mismatch")
    left = d ** mode
    right = space.stride(mode)
    block = psi.amplitudes.reshape(left, d, right)
    out = np.matmul(op, block)  # broadcasts over the leading axis
    return StateVector(space, np.ascontiguousarray(out).reshape(space.dim))


def apply_modes(ops: dict[int, np.ndarray], psi: StateVector) -> StateVector:
    """Apply a tensor product of single-mode operators on distinct modes."""
    modes = list(ops)
    if len(set(modes)) != len(modes):
        raise ValueError("repeated mode index")
    out = psi
    for mode, op in ops.items():
        out = apply_single_mode(op, mode, out)
    return out


def apply_ladder(psi: StateVector, raise_modes, lower_modes) -> StateVector:
    """Apply a product of creation (raise) and annihilation (lower) operators.

    Modes must be distinct across both lists.  Used for the four-body
    plaquette monomials; the action is a single shifted-slice pass.
    """
    modes = tuple(raise_modes) + tuple(lower_modes)
    if len(set(modes)) != len(modes):
        raise ValueError("repeated mode index in ladder product")
    space = psi.space
    d = space.levels
    src = [slice(None)] * space.n_modes
    dst = [slice(None)] * space.n_modes
    weight = np.ones((), dtype=float)
    for k in raise_modes:
        src[k] = slice(0, d - 1)
        dst[k] = slice(1, d)
        w = np.sqrt(np.arange(1, d))  # sqrt(n+1) for source occupation n
        shape = [1] * space.n_modes
        shape[k] = d - 1
        weight = weight * w.reshape(shape)
    for k in lower_modes:
        src[k] = slice(1, d)
        dst[k] = slice(0, d - 1)
        w = np.sqrt(np.arange(1, d))  # sqrt(n) for source occupation n
        shape = [1] * space.n_modes
        shape[k] = d - 1
        weight = weight * w.reshape(shape)
    out = np.zeros(space.shape, dtype=np.complex128)
    out[tuple(dst)] = weight * psi.tensor_view()[tuple(src)]
    return StateVector(space, out.reshape(space.dim))


def _mode_probabilities(psi: StateVector, mode: int) -> np.ndarray:
    space = psi.space
    block = psi.amplitudes.reshape(space.levels ** mode, space.levels, space.stride(mode))
    return np.einsum("anb->n", np.abs(block) ** 2)


def mean_photon(psi: StateVector, mode: int) -> float:
    """<n> for one mode; assumes an (approximately) normalized state."""
    probs = _mode_probabilities(psi, mode)
    return float(np.dot(probs, np.arange(psi.space.levels)))


def top_level_population(psi: StateVector) -> float:
    """Total weight on the highest retained Fock level, any mode (truncation diagnostic)."""
    return float(
        max(_mode_probabilities(psi, k)[-1] for k in range(psi.space.n_modes))
    )


def reduce(psi: StateVector, keep) -> ReducedDensity:
    """Partial trace of |psi><psi| keeping the given modes.

    The kept-side dimension d**|keep| is materialized densely; refuse when
    the resulting matrix would not fit comfortably in memory.
    """
    keep = tuple(sorted(set(int(k) for k in keep)))
    space = psi.space
    if not keep:
        raise ValueError("must keep at least one mode")
    if any(not 0 <= k < space.n_modes for k in keep):
        raise ValueError("kept mode out of range")
    dim_keep = space.levels ** len(keep)
    if dim_keep > 20_000:
        raise MemoryError(f"reduced density of dimension {dim_keep} is too large")
    traced = [k for k in range(space.n_modes) if k not in keep]
    tensor = np.transpose(psi.tensor_view(), keep + tuple(traced))
    mat = tensor.reshape(dim_keep, space.dim // dim_keep)
    rho = mat @ mat.conj().T
    return ReducedDensity(modes=keep, levels=space.levels, matrix=rho)


def sign_projectors(levels: int) -> SignProjectors:
    """Quadrature-sign projectors from the spectral decomposition of x.

    Eigenvectors of the truncated quadrature with positive (negative)
    eigenvalue go to the plus (minus) projector; for odd d the single zero
    eigenvalue is split half/half, preserving completeness and the x -> -x
    symmetry.  minus is computed as I - plus so completeness is exact.
    """
    evals, evecs = np.linalg.eigh(position_op(levels))
    tol = 1e-12
    occ = np.where(evals > tol, 1.0, np.where(evals < -tol, 0.0, 0.5))
    plus = (evecs * occ) @ evecs.T
    plus = 0.5 * (plus + plus.T)
    minus = np.eye(levels) - plus
    return SignProjectors(plus=plus, minus=minus)


def coherent_amplitudes(levels: int, alpha: complex) -> np.ndarray:
    """Truncated coherent-state amplitudes, renormalized on the kept levels."""
    ns = np.arange(levels)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, levels)))))
    amps = np.array([alpha ** n for n in ns], dtype=complex)
    amps *= np.exp(-0.5 * log_fact)
    amps /= np.linalg.norm(amps)
    return amps


def save_state(psi: StateVector, path, time: float = 0.0) -> None:
    """Binary snapshot: header (ordering tag, L, d, time) + raw little-endian amplitudes."""
    header = ORDERING_TAG + struct.pack("<iid", psi.space.n_modes, psi.space.levels, time)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(psi.amplitudes.astype("<c16").tobytes())


def load_state(path) -> tuple[StateVector, float]:
    with open(path, "rb") as fh:
        tag = fh.read(len(ORDERING_TAG))
        if tag != ORDERING_TAG:
            raise ValueError("unrecognized snapshot header")
        n_modes, levels, time = struct.unpack("<iid", fh.read(16))
        space = FockSpace(n_modes, levels)
        raw = np.frombuffer(fh.read(), dtype="<c16")
    return StateVector(space, raw.astype(np.complex128)), time
