# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Hamiltonian-action kernels.

States are complex128 vectors viewed as float64 arrays (interleaved
real/imag), so a real coefficient acts uniformly on contiguous float runs.
The per-mode banded pass fuses all five band offsets into one sweep per
(block, level) row; plaquette ladder monomials walk the index space once
with incremented digit counters.
"""

import numpy as np

cimport cython

DEF MAX_MODES = 64
DEF MAX_LEGS = 8


def apply_banded(const double[::1] src, double[::1] out,
                 const double[:, ::1] diag, const double[:, ::1] off1,
                 const double[:, ::1] off2, int d, int L):
    """out += (sum over modes of the banded single-mode matrices) @ src."""
    cdef Py_ssize_t dim = src.shape[0]
    cdef Py_ssize_t k, a, n, i, base, row, s, span, nblocks
    cdef double c0, cm1, cp1, cm2, cp2

    for k in range(L):
        s = 2
        for a in range(L - 1 - k):
            s *= d
        span = d * s
        nblocks = dim // span
        for a in range(nblocks):
            base = a * span
            for n in range(d):
                row = base + n * s
                c0 = diag[k, n]
                if 2 <= n <= d - 3:
                    cm1 = off1[k, n - 1]
                    cp1 = off1[k, n]
                    cm2 = off2[k, n - 2]
                    cp2 = off2[k, n]
                    for i in range(s):
                        out[row + i] += (c0 * src[row + i]
                                         + cm1 * src[row - s + i]
                                         + cp1 * src[row + s + i]
                                         + cm2 * src[row - 2 * s + i]
                                         + cp2 * src[row + 2 * s + i])
                else:
                    for i in range(s):
                        out[row + i] += c0 * src[row + i]
                    if n >= 1:
                        cm1 = off1[k, n - 1]
                        for i in range(s):
                            out[row + i] += cm1 * src[row - s + i]
                    if n <= d - 2:
                        cp1 = off1[k, n]
                        for i in range(s):
                            out[row + i] += cp1 * src[row + s + i]
                    if n >= 2:
                        cm2 = off2[k, n - 2]
                        for i in range(s):
                            out[row + i] += cm2 * src[row - 2 * s + i]
                    if n <= d - 3:
                        cp2 = off2[k, n]
                        for i in range(s):
                            out[row + i] += cp2 * src[row + 2 * s + i]


def apply_dense_mode(const double[::1] src, double[::1] out,
                     const double[:, ::1] ure, const double[:, ::1] uim,
                     int d, int L, int mode):
    """out = (complex dense matrix u acting on one mode) @ src, other modes identity.

    src/out are float views of complex vectors and must not alias.
    """
    cdef Py_ssize_t dim = src.shape[0]
    cdef Py_ssize_t s = 2, span, nblocks, base, row_i, row_j
    cdef Py_ssize_t a, e, e0, chunk, stop
    cdef int i, j, k
    cdef double cre, cim, sre, sim

    for k in range(L - 1 - mode):
        s *= d
    span = d * s
    nblocks = dim // span

    if mode == L - 1:
        # innermost mode acts on contiguous complex groups; accumulate in
        # registers instead of read-modify-write on length-1 runs
        for a in range(nblocks):
            base = a * span
            for i in range(d):
                sre = 0.0
                sim = 0.0
                for j in range(d):
                    cre = ure[i, j]
                    cim = uim[i, j]
                    sre += cre * src[base + 2 * j] - cim * src[base + 2 * j + 1]
                    sim += cre * src[base + 2 * j + 1] + cim * src[base + 2 * j]
                out[base + 2 * i] = sre
                out[base + 2 * i + 1] = sim
        return

    # chunk the contiguous run so the d src chunks and the out chunk stay
    # cache-resident while the (i, j) loops sweep the mode matrix
    chunk = 8192
    out[:] = 0.0
    for a in range(nblocks):
        base = a * span
        for e0 in range(0, s, chunk):
            stop = s - e0
            if stop > chunk:
                stop = chunk
            for i in range(d):
                row_i = base + i * s + e0
                for j in range(d):
                    cre = ure[i, j]
                    cim = uim[i, j]
                    if cre == 0.0 and cim == 0.0:
                        continue
                    row_j = base + j * s + e0
                    for e in range(0, stop, 2):
                        sre = src[row_j + e]
                        sim = src[row_j + e + 1]
                        out[row_i + e] += cre * sre - cim * sim
                        out[row_i + e + 1] += cre * sim + cim * sre


def apply_ladder(const double[::1] src, double[::1] out, double weight,
                 const long long[::1] modes, const long long[::1] raising,
                 const double[:, ::1] wtab, int d, int L):
    """out += weight * (ladder monomial + its transpose) @ src.

    ``modes``/``raising`` describe the monomial legs; ``wtab[j, n]`` is the
    matrix element for leg j when the source digit of its mode is n.
    """
    cdef Py_ssize_t dim = 1
    cdef int j, k, m
    cdef Py_ssize_t[MAX_MODES] stride
    cdef int[MAX_MODES] digits
    cdef Py_ssize_t shift = 0
    cdef Py_ssize_t I, J
    cdef int dg, ok, jj
    cdef double c

    m = modes.shape[0]
    if L > MAX_MODES or m > MAX_LEGS:
        raise ValueError("too many modes for the compiled ladder kernel")

    for k in range(L):
        digits[k] = 0
    for k in range(L - 1, -1, -1):
        stride[k] = dim
        dim *= d
    for j in range(m):
        if raising[j]:
            shift += stride[modes[j]]
        else:
            shift -= stride[modes[j]]

    for I in range(dim):
        ok = 1
        c = weight
        for j in range(m):
            dg = digits[modes[j]]
            if raising[j]:
                if dg >= d - 1:
                    ok = 0
                    break
            else:
                if dg == 0:
                    ok = 0
                    break
            c *= wtab[j, dg]
        if ok:
            J = I + shift
            out[2 * J] += c * src[2 * I]
            out[2 * J + 1] += c * src[2 * I + 1]
            out[2 * I] += c * src[2 * J]
            out[2 * I + 1] += c * src[2 * J + 1]
        jj = L - 1
        while jj >= 0:
            digits[jj] += 1
            if digits[jj] < d:
                break
            digits[jj] = 0
            jj -= 1
