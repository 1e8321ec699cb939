"""Kernel backend selection.

The compiled extension is preferred when importable; set QCORR_BACKEND=python
(or =compiled) to force a choice.  Both backends export the same functions
with identical semantics; run benchmarks/bench_kernels.py to compare them.
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("QCORR_BACKEND", "").strip().lower()

if _requested in ("", "compiled", "c"):
    try:
        from . import _kernels_c as _impl
    except ImportError:
        if _requested:
            raise ImportError(
                "QCORR_BACKEND=compiled but the qcorr._kernels_c extension is "
                "not built; install with the C extension or unset the variable"
            )
        _impl = _kernels_py
elif _requested in ("python", "py", "pure"):
    _impl = _kernels_py
else:
    raise ImportError(f"unknown QCORR_BACKEND value: {_requested!r}")

backend_name: str = _impl.name

# The compiled eigensolver targets the hot small-dimension path; above the
# crossover (measured in benchmarks/bench_kernels.py) LAPACK wins, so
# larger matrices (big Choi or joint-state spectra) route to NumPy.
_COMPILED_DIM_LIMIT = 4

if _impl is _kernels_py:
    eigh = _kernels_py.eigh
    expi_hermitian = _kernels_py.expi_hermitian
else:

    def eigh(a):
        if a.shape[0] > _COMPILED_DIM_LIMIT:
            return _kernels_py.eigh(a)
        return _impl.eigh(a)

    def expi_hermitian(h):
        if h.shape[0] > _COMPILED_DIM_LIMIT:
            return _kernels_py.expi_hermitian(h)
        return _impl.expi_hermitian(h)


unpack_hermitian = _impl.unpack_hermitian
apply_kraus = _impl.apply_kraus
commutator_fro = _impl.commutator_fro
pair_violation = _impl.pair_violation
entangled_overlap = _impl.entangled_overlap
