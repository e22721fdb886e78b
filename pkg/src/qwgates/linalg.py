"""Small dense linear-algebra helpers shared by the propagators."""

from __future__ import annotations

import numpy as np

from .errors import HermiticityError

HERMITIAN_TOL = 1e-12


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise HermiticityError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    dev = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if dev > tol * scale:
        raise HermiticityError(f"matrix is not Hermitian (max deviation {dev:.3e})")


def expm_hermitian(h: np.ndarray, s: float) -> np.ndarray:
    """``exp(-i s H)`` through a full eigendecomposition of Hermitian ``H``."""
    h = np.asarray(h, dtype=complex)
    check_hermitian(h)
    h = 0.5 * (h + h.conj().T)
    w, q = np.linalg.eigh(h)
    return (q * np.exp(-1j * s * w)) @ q.conj().T


def is_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2) <= tol)


def global_phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_phi ||a - e^{i phi} b||_2`` for vectors."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ov = np.vdot(b, a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))
