"""Kernel backend selection for the hot Hamiltonian-action loop.

The compiled Cython extension is used when it imported cleanly; otherwise a
vectorized numpy implementation with identical semantics takes over.  Set
KPONET_KERNEL=numpy or KPONET_KERNEL=compiled to force a choice (forcing
"compiled" raises if the extension is unavailable).
"""

from __future__ import annotations

import os

import numpy as np

from . import numpy_backend

try:
    from . import core as _core
except ImportError:
    _core = None

_forced = os.environ.get("KPONET_KERNEL", "").strip().lower()
if _forced == "numpy":
    _use_compiled = False
elif _forced == "compiled":
    if _core is None:
        raise ImportError("KPONET_KERNEL=compiled but the extension failed to import")
    _use_compiled = True
else:
    _use_compiled = _core is not None


def backend_name() -> str:
    return "compiled" if _use_compiled else "numpy"


def _ladder_arrays(terms):
    """Cache flat (modes, is_raise, weight-table) arrays on the term set."""
    cache = getattr(terms, "_ladder_arrays", None)
    if cache is not None:
        return cache
    d = terms.levels
    prepared = []
    for term in terms.ladders:
        modes = np.array(list(term.raise_modes) + list(term.lower_modes), dtype=np.int64)
        raising = np.array(
            [1] * len(term.raise_modes) + [0] * len(term.lower_modes), dtype=np.int64
        )
        # weight table indexed by source digit; entries outside the valid
        # digit range are never read (kernel masks on digit validity)
        wtab = np.zeros((len(modes), d))
        for row, is_raise in enumerate(raising):
            if is_raise:
                wtab[row, : d - 1] = np.sqrt(np.arange(1, d))
            else:
                wtab[row, 1:] = np.sqrt(np.arange(1, d))
        prepared.append((modes, raising, wtab, float(term.weight)))
    terms._ladder_arrays = prepared
    return prepared


def apply_terms(terms, src: np.ndarray, out: np.ndarray) -> None:
    """Accumulate H @ src into out (both complex128, length levels**n_modes)."""
    if _use_compiled:
        srcf = src.view(np.float64)
        outf = out.view(np.float64)
        _core.apply_banded(
            srcf, outf, terms.diag, terms.off1, terms.off2, terms.levels, terms.n_modes
        )
        for modes, raising, wtab, weight in _ladder_arrays(terms):
            _core.apply_ladder(
                srcf, outf, weight, modes, raising, wtab, terms.levels, terms.n_modes
            )
    else:
        numpy_backend.apply_terms(terms, src, out)


def apply_ladder_terms(terms, src: np.ndarray, out: np.ndarray) -> None:
    """Accumulate only the plaquette (ladder) part of H @ src into out."""
    if _use_compiled:
        srcf = src.view(np.float64)
        outf = out.view(np.float64)
        for modes, raising, wtab, weight in _ladder_arrays(terms):
            _core.apply_ladder(
                srcf, outf, weight, modes, raising, wtab, terms.levels, terms.n_modes
            )
    else:
        shape = (terms.levels,) * terms.n_modes
        src_t = src.reshape(shape)
        out_t = out.reshape(shape)
        for term in terms.ladders:
            numpy_backend._apply_ladder(terms, term, src_t, out_t)


def apply_mode_unitary(
    u: np.ndarray, mode: int, src: np.ndarray, out: np.ndarray, levels: int, n_modes: int
) -> None:
    """out = (dense single-mode matrix u on `mode`) @ src; src and out must differ."""
    if _use_compiled:
        _core.apply_dense_mode(
            src.view(np.float64),
            out.view(np.float64),
            np.ascontiguousarray(u.real),
            np.ascontiguousarray(u.imag),
            levels,
            n_modes,
            mode,
        )
    else:
        left = levels ** mode
        right = levels ** (n_modes - 1 - mode)
        np.einsum(
            "ij,ajb->aib",
            u,
            src.reshape(left, levels, right),
            out=out.reshape(left, levels, right),
        )
