"""Parity (LHZ) encoding of all-to-all Ising problems.

An N-spin Ising problem with pair couplings is mapped onto L = N(N-1)/2
parity spins, one per spin pair, arranged on a triangular lattice.  Pair
couplings become local fields and the redundancy is removed by four-body
plaquette constraints (boundary plaquettes close onto fixed ancilla legs).
Everything in this module is classical and exact; the exhaustive solvers
double as oracles for the simulator tests.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "IsingInstance",
    "Plaquette",
    "LhzInstance",
    "build_lhz",
    "encode",
    "decode",
    "ising_energy",
    "lhz_energy",
    "broken_constraints",
    "brute_force_ising",
    "min_lhz_with_broken",
    "c_lower_bound",
    "load_instance",
    "save_instance",
]

# Exhaustive enumeration is over 2**L configurations; keep it at oracle scale.
MAX_BRUTE_FORCE_N = 24
MAX_ENUM_L = 21


@dataclass(frozen=True)
class IsingInstance:
    """All-to-all Ising problem: minimize -sum_{i<j} J_ij s_i s_j.

    Spin indices are 0-based; couplings are keyed by pairs (i, j) with i < j.
    """

    n_spins: int
    couplings: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_spins < 2:
            raise ValueError(f"need at least 2 spins, got {self.n_spins}")
        for (i, j), val in self.couplings.items():
            if not (0 <= i < j < self.n_spins):
                raise ValueError(f"bad coupling pair ({i}, {j}) for N={self.n_spins}")
            if not np.isfinite(val):
                raise ValueError(f"non-finite coupling for pair ({i}, {j})")

    def coupling(self, i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        return self.couplings.get((i, j), 0.0)


@dataclass(frozen=True)
class Plaquette:
    """One parity constraint: product of member spins (ancillas = +1) is +1.

    ``modes`` are the participating real parity-spin indices in ascending
    order; ``n_ancilla`` counts fixed boundary legs (1 for the bottom-row
    triangles, 0 in the bulk).  In the oscillator Hamiltonian the first two
    modes carry creation operators and the rest annihilation operators,
    matching the explicit 6-oscillator form.
    """

    modes: tuple[int, ...]
    n_ancilla: int = 0

    def __post_init__(self):
        if len(self.modes) + self.n_ancilla != 4:
            raise ValueError("plaquette must have 4 legs including ancillas")
        if tuple(sorted(self.modes)) != self.modes:
            raise ValueError("plaquette modes must be sorted")


@dataclass(frozen=True)
class LhzInstance:
    """Parity-encoded problem on the triangular lattice.

    ``pair_of[k]`` maps parity index k to its Ising pair (i, j); the layout
    is row-major by pair distance: row r holds pairs (i, i+r) for ascending
    i, row 1 first.  ``fields`` is the normalized local-field vector
    (sum of absolute values = 1).
    """

    n_spins: int
    pair_of: tuple[tuple[int, int], ...]
    fields: np.ndarray
    plaquettes: tuple[Plaquette, ...]
    degree: np.ndarray  # per-mode count of touching plaquettes
    norm_scale: float = 1.0  # divisor applied to raw couplings

    @property
    def n_modes(self) -> int:
        return len(self.pair_of)

    def index_of(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return self.pair_of.index((i, j))

    @property
    def row1_modes(self) -> tuple[int, ...]:
        """Modes for nearest-neighbour pairs (i, i+1); these fix the decoding."""
        return tuple(range(self.n_spins - 1))


def _triangular_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, i + r) for r in range(1, n) for i in range(n - r)]


def build_lhz(instance: IsingInstance) -> LhzInstance:
    """Encode an Ising instance on the triangular parity lattice.

    Local fields are normalized to unit 1-norm.  Plaquettes sit between
    adjacent distance-rows: the constraint for pair (i, i+r+1) involves
    (i, i+r), (i+1, i+r+1) and (i+1, i+r), the last being a fixed ancilla
    when r = 1 would need distance-0 pairs.
    """
    n = instance.n_spins
    pairs = _triangular_pairs(n)
    index = {p: k for k, p in enumerate(pairs)}

    raw = np.array([instance.coupling(i, j) for (i, j) in pairs], dtype=float)
    scale = float(np.sum(np.abs(raw)))
    if scale > 0.0:
        fields = raw / scale
    else:
        fields = raw.copy()
        scale = 1.0

    plaquettes = []
    for r in range(1, n - 1):
        for i in range(n - r - 1):
            legs = [(i, i + r + 1), (i, i + r), (i + 1, i + r + 1)]
            if r == 1:
                modes = tuple(sorted(index[p] for p in legs))
                plaquettes.append(Plaquette(modes, n_ancilla=1))
            else:
                legs.append((i + 1, i + r))
                modes = tuple(sorted(index[p] for p in legs))
                plaquettes.append(Plaquette(modes, n_ancilla=0))

    degree = np.zeros(len(pairs), dtype=int)
    for plq in plaquettes:
        for k in plq.modes:
            degree[k] += 1

    lhz = LhzInstance(
        n_spins=n,
        pair_of=tuple(pairs),
        fields=fields,
        plaquettes=tuple(plaquettes),
        degree=degree,
        norm_scale=scale,
    )
    assert len(plaquettes) == lhz.n_modes - n + 1
    return lhz


def encode(lhz: LhzInstance, ising_spins) -> np.ndarray:
    """Map an Ising configuration to its parity-spin configuration."""
    s = np.asarray(ising_spins, dtype=int)
    if s.shape != (lhz.n_spins,):
        raise ValueError(f"expected {lhz.n_spins} Ising spins")
    return np.array([s[i] * s[j] for (i, j) in lhz.pair_of], dtype=int)


def decode(lhz: LhzInstance, row1_spins) -> np.ndarray:
    """Chain-product decode of the nearest-pair parity spins; s_0 fixed to +1."""
    r1 = np.asarray(row1_spins, dtype=int)
    if r1.shape != (lhz.n_spins - 1,):
        raise ValueError(f"expected {lhz.n_spins - 1} row-1 spins")
    out = np.empty(lhz.n_spins, dtype=int)
    out[0] = 1
    for i in range(1, lhz.n_spins):
        out[i] = out[i - 1] * r1[i - 1]
    return out


def ising_energy(instance: IsingInstance, ising_spins) -> float:
    s = np.asarray(ising_spins, dtype=int)
    if s.shape != (instance.n_spins,):
        raise ValueError(f"expected {instance.n_spins} spins")
    return -sum(val * s[i] * s[j] for (i, j), val in instance.couplings.items())


def broken_constraints(lhz: LhzInstance, parity_spins) -> int:
    """Number of plaquettes whose spin product (ancillas = +1) is -1."""
    t = np.asarray(parity_spins, dtype=int)
    return sum(1 for plq in lhz.plaquettes if np.prod(t[list(plq.modes)]) < 0)


def lhz_energy(lhz: LhzInstance, parity_spins, constraint: float) -> float:
    """Parity-encoded energy: field part plus constraint penalty.

    Equals -fields . spins - constraint * (n_plaquettes - 2 * broken).
    """
    t = np.asarray(parity_spins, dtype=int)
    if t.shape != (lhz.n_modes,):
        raise ValueError(f"expected {lhz.n_modes} parity spins")
    b = broken_constraints(lhz, t)
    return float(-np.dot(lhz.fields, t) - constraint * (len(lhz.plaquettes) - 2 * b))


def _ising_configs(n: int):
    """All configurations with the first spin fixed to +1."""
    for bits in itertools.product((1, -1), repeat=n - 1):
        yield np.array((1,) + bits, dtype=int)


def brute_force_ising(instance: IsingInstance):
    """Exhaustive minimum over the 2^(N-1) configurations with s_0 = +1.

    Returns (min_energy, configs); degenerate minimizers are all returned,
    sorted lexicographically for determinism.
    """
    n = instance.n_spins
    if n > MAX_BRUTE_FORCE_N:
        raise ValueError(f"N={n} too large for exhaustive search")
    best = np.inf
    winners: list[tuple[int, ...]] = []
    for s in _ising_configs(n):
        e = ising_energy(instance, s)
        if e < best - 1e-12:
            best = e
            winners = [tuple(s)]
        elif abs(e - best) <= 1e-12:
            winners.append(tuple(s))
    winners.sort()
    return float(best), winners


def min_lhz_with_broken(lhz: LhzInstance, constraint: float, n_broken: int):
    """Exhaustive minimum of the parity energy restricted to a broken count.

    Returns (energy, config) or (None, None) if no configuration has exactly
    ``n_broken`` broken plaquettes.
    """
    if not 0 <= n_broken <= len(lhz.plaquettes):
        raise ValueError(f"broken count {n_broken} out of range")
    if lhz.n_modes > MAX_ENUM_L:
        raise ValueError(f"L={lhz.n_modes} too large for enumeration")
    best = np.inf
    winner = None
    for bits in itertools.product((1, -1), repeat=lhz.n_modes):
        t = np.array(bits, dtype=int)
        if broken_constraints(lhz, t) != n_broken:
            continue
        e = lhz_energy(lhz, t, constraint)
        if e < best - 1e-12 or (abs(e - best) <= 1e-12 and (winner is None or bits < winner)):
            best = e
            winner = bits
    if winner is None:
        return None, None
    return float(best), np.array(winner, dtype=int)


def c_lower_bound(lhz: LhzInstance) -> float:
    """Tight lower bound on the constraint strength.

    Max over b >= 1 of (field(b-broken minimum) - field(0-broken minimum)) / 2b,
    where field(.) is the field part of the restricted minima.  Any constraint
    strength above this value makes the global optimum constraint-satisfying.
    Under unit-normalized fields the bound never exceeds 1.
    """
    e0, _ = min_lhz_with_broken(lhz, 0.0, 0)
    if e0 is None:
        return 0.0
    bound = 0.0
    for b in range(1, len(lhz.plaquettes) + 1):
        eb, _ = min_lhz_with_broken(lhz, 0.0, b)
        if eb is None:
            continue
        bound = max(bound, (e0 - eb) / (2.0 * b))
    return bound


def save_instance(instance: IsingInstance, path) -> None:
    """Write an instance as JSON: {"n_spins": N, "couplings": [[i, j, J], ...]}."""
    data = {
        "n_spins": instance.n_spins,
        "couplings": [[i, j, val] for (i, j), val in sorted(instance.couplings.items())],
    }
    Path(path).write_text(json.dumps(data, indent=1) + "\n")


def load_instance(path) -> IsingInstance:
    data = json.loads(Path(path).read_text())
    couplings = {(int(i), int(j)): float(v) for i, j, v in data["couplings"]}
    return IsingInstance(n_spins=int(data["n_spins"]), couplings=couplings)
