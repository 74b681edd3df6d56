"""Pure-numpy reference implementation of the Hamiltonian action.

Same contract as the compiled kernel: accumulate H @ src into out.  All
operations are shifted-slice arithmetic on the (d,)*L tensor view; nothing
materializes a matrix in the full product space.
"""

from __future__ import annotations

import numpy as np


def _apply_banded_mode(terms, mode, src_t, out_t):
    d = terms.levels
    left = d ** mode
    right = d ** (terms.n_modes - 1 - mode)
    src3 = src_t.reshape(left, d, right)
    out3 = out_t.reshape(left, d, right)
    out3 += terms.diag[mode][None, :, None] * src3
    c1 = terms.off1[mode][None, :, None]
    out3[:, 1:, :] += c1 * src3[:, :-1, :]
    out3[:, :-1, :] += c1 * src3[:, 1:, :]
    c2 = terms.off2[mode][None, :, None]
    out3[:, 2:, :] += c2 * src3[:, :-2, :]
    out3[:, :-2, :] += c2 * src3[:, 2:, :]


def _apply_ladder(terms, term, src_t, out_t):
    d = terms.levels
    L = terms.n_modes
    src_sl = [slice(None)] * L
    dst_sl = [slice(None)] * L
    weight = np.ones((), dtype=float)
    for k in tuple(term.raise_modes) + tuple(term.lower_modes):
        src_sl[k] = slice(0, d - 1)
        dst_sl[k] = slice(1, d)
        shape = [1] * L
        shape[k] = d - 1
        weight = weight * np.sqrt(np.arange(1, d)).reshape(shape)
    for k in term.lower_modes:
        # annihilators shift downward: swap source and destination on that axis
        src_sl[k], dst_sl[k] = dst_sl[k], src_sl[k]
    src_sl = tuple(src_sl)
    dst_sl = tuple(dst_sl)
    out_t[dst_sl] += term.weight * weight * src_t[src_sl]
    out_t[src_sl] += term.weight * weight * src_t[dst_sl]


def apply_terms(terms, src: np.ndarray, out: np.ndarray) -> None:
    shape = (terms.levels,) * terms.n_modes
    src_t = src.reshape(shape)
    out_t = out.reshape(shape)
    for mode in range(terms.n_modes):
        _apply_banded_mode(terms, mode, src_t, out_t)
    for term in terms.ladders:
        _apply_ladder(terms, term, src_t, out_t)
