"""Kernel selection: the compiled extension when available, numpy otherwise.

Set ``QWGATES_PURE_PYTHON=1`` to force the numpy fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("QWGATES_PURE_PYTHON") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "compiled"


def _backend(name: str | None):
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def exact_products(hi, lo, gconj, de, drive_s, t_eval, dt, n, sample_steps, backend=None):
    return _backend(backend).exact_products(
        np.ascontiguousarray(hi, dtype=np.int64),
        np.ascontiguousarray(lo, dtype=np.int64),
        np.ascontiguousarray(gconj, dtype=np.complex128),
        np.ascontiguousarray(de, dtype=np.float64),
        np.ascontiguousarray(drive_s, dtype=np.float64),
        np.ascontiguousarray(t_eval, dtype=np.float64),
        float(dt),
        int(n),
        np.ascontiguousarray(sample_steps, dtype=np.int64),
    )


def coined_steps(
    psi0, kphase, qm, lam_m, qp, lam_p, use_plus, phis, dt, boundary, sample_steps, backend=None
):
    return _backend(backend).coined_steps(
        np.ascontiguousarray(psi0, dtype=np.complex128),
        np.ascontiguousarray(kphase, dtype=np.complex128),
        np.asfortranarray(qm, dtype=np.complex128),
        np.ascontiguousarray(lam_m, dtype=np.float64),
        np.asfortranarray(qp, dtype=np.complex128),
        np.ascontiguousarray(lam_p, dtype=np.float64),
        bool(use_plus),
        np.ascontiguousarray(phis, dtype=np.float64),
        float(dt),
        np.ascontiguousarray(boundary, dtype=np.uint8),
        np.ascontiguousarray(sample_steps, dtype=np.int64),
    )
