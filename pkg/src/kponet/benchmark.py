"""Timing comparison of the compiled and numpy Hamiltonian kernels.

Both backends are exercised on the same random state and term set; the
outputs are compared elementwise before timing, so the benchmark doubles
as an equivalence check at full production size.
"""

from __future__ import annotations

import time

import numpy as np

from ._kernels import _ladder_arrays, numpy_backend

try:
    from ._kernels import core as _core
except ImportError:
    _core = None

from .experiments import uniform_af_instance
from .hamiltonian import SimParams, build_terms
from .lhz import IsingInstance, build_lhz


def _compiled_apply(terms, src, out):
    srcf = src.view(np.float64)
    outf = out.view(np.float64)
    _core.apply_banded(
        srcf, outf, terms.diag, terms.off1, terms.off2, terms.levels, terms.n_modes
    )
    for modes, raising, wtab, weight in _ladder_arrays(terms):
        _core.apply_ladder(
            srcf, outf, weight, modes, raising, wtab, terms.levels, terms.n_modes
        )


def _time_apply(fn, terms, src, out, repeats):
    best = np.inf
    for _ in range(repeats):
        out[:] = 0.0
        t0 = time.perf_counter()
        fn(terms, src, out)
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmark(n_modes: int = 6, levels: int = 13, repeats: int = 5) -> dict:
    if n_modes == 6:
        inst = uniform_af_instance(4)
    elif n_modes == 3:
        inst = IsingInstance(3, {(0, 1): -1.0, (0, 2): -1.0, (1, 2): -1.0})
    else:
        raise ValueError("benchmark supports 3 or 6 modes (N=3 or N=4)")
    lhz = build_lhz(inst)
    params = SimParams(levels=levels)
    terms = build_terms(params, lhz, 0.5 * params.duration)

    dim = levels ** n_modes
    rng = np.random.default_rng(12345)
    src = (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / np.sqrt(dim)
    src = np.ascontiguousarray(src)
    out_np = np.zeros_like(src)

    numpy_backend.apply_terms(terms, src, out_np)
    result = {"dim": dim, "numpy_s": _time_apply(
        numpy_backend.apply_terms, terms, src, np.zeros_like(src), repeats)}

    print(f"state dimension {dim} ({n_modes} modes x {levels} levels)")
    print(f"numpy backend:    {result['numpy_s'] * 1e3:8.1f} ms per H|psi>")

    if _core is not None:
        out_c = np.zeros_like(src)
        _compiled_apply(terms, src, out_c)
        max_diff = float(np.max(np.abs(out_c - out_np)))
        result["max_diff"] = max_diff
        result["compiled_s"] = _time_apply(
            _compiled_apply, terms, src, np.zeros_like(src), repeats
        )
        print(f"compiled backend: {result['compiled_s'] * 1e3:8.1f} ms per H|psi>")
        print(f"speedup: {result['numpy_s'] / result['compiled_s']:.2f}x, "
              f"max elementwise diff {max_diff:.3e}")
    else:
        print("compiled backend unavailable (extension not built)")
    return result
