"""Pure-numpy versions of the propagation kernels (same signatures as the compiled ones)."""

from __future__ import annotations

import numpy as np

_CHUNK = 4096


def _step_exponentials(hi, lo, gconj, de, drive_s, t_eval, dt, n):
    v = np.zeros((len(drive_s), n, n), dtype=complex)
    vals = drive_s[:, None] * gconj[None, :] * np.exp(-1j * np.outer(t_eval, de))
    v[:, hi, lo] = vals
    v[:, lo, hi] = np.conj(vals)
    w, q = np.linalg.eigh(v)
    return (q * np.exp(-1j * dt * w)[:, None, :]) @ np.conj(np.swapaxes(q, 1, 2))


def _ordered_product(mats: np.ndarray) -> np.ndarray:
    """``mats[-1] @ ... @ mats[0]`` by pairwise reduction."""
    n = mats.shape[-1]
    while len(mats) > 1:
        if len(mats) % 2:
            mats = np.concatenate([mats, np.eye(n, dtype=complex)[None]], axis=0)
        mats = mats[1::2] @ mats[0::2]
    return mats[0] if len(mats) else np.eye(n, dtype=complex)


def exact_products(hi, lo, gconj, de, drive_s, t_eval, dt, n, sample_steps):
    nsteps = len(drive_s)
    u = np.eye(n, dtype=complex)
    samples = np.empty((len(sample_steps), n, n), dtype=complex)
    bounds = sorted(set(int(s) for s in sample_steps) | {nsteps})
    done = 0
    by_step = {0: u.copy()}
    for stop in bounds:
        for start in range(done, stop, _CHUNK):
            end = min(start + _CHUNK, stop)
            e = _step_exponentials(
                hi, lo, gconj, de, drive_s[start:end], t_eval[start:end], dt, n
            )
            u = _ordered_product(e) @ u
        done = stop
        by_step[stop] = u.copy()
    for i, s in enumerate(sample_steps):
        samples[i] = by_step[int(s)]
    return u, samples


def coined_steps(psi0, kphase, qm, lam_m, qp, lam_p, use_plus, phis, dt, boundary, sample_steps):
    psi = np.array(psi0, dtype=complex)
    qm_h = qm.conj().T
    qp_h = qp.conj().T
    mask = np.asarray(boundary, dtype=bool)
    samples = np.empty((len(sample_steps), len(psi)), dtype=complex)
    wanted: dict[int, list[int]] = {}
    for i, s in enumerate(sample_steps):
        wanted.setdefault(int(s), []).append(i)
    worst = float(np.sum(np.abs(psi[mask]) ** 2))
    for i in wanted.get(0, []):
        samples[i] = psi
    for k, phi in enumerate(phis):
        psi = psi * kphase
        if use_plus:
            psi = qp @ (np.exp(-1j * dt * phi * lam_p) * (qp_h @ psi))
        psi = qm @ (np.exp(-1j * dt * phi * lam_m) * (qm_h @ psi))
        worst = max(worst, float(np.sum(np.abs(psi[mask]) ** 2)))
        for i in wanted.get(k + 1, []):
            samples[i] = psi
    return psi, samples, worst
