# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for step-by-step propagation.

Both kernels mirror ``_kernels_py`` exactly; the selector in ``kernels``
picks whichever is importable.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin
from scipy.linalg.cython_blas cimport zgemv
from scipy.linalg.cython_lapack cimport zheev

cnp.import_array()

ctypedef double complex zc


cdef inline zc cexpi(double x) nogil:
    return cos(x) + 1j * sin(x)


def exact_products(
    const long[::1] hi,
    const long[::1] lo,
    const zc[::1] gconj,
    const double[::1] de,
    const double[::1] drive_s,
    const double[::1] t_eval,
    double dt,
    int n,
    const long[::1] sample_steps,
):
    """Accumulate ``U = prod_k exp(-i dt V_k)`` with ``V_k[hi, lo] = s_k g* e^{-i dE t_k}``.

    Returns the final ``U`` and copies of ``U`` after each step count in
    ``sample_steps`` (sorted, in ``[0, len(drive_s)]``).
    """
    cdef Py_ssize_t nsteps = drive_s.shape[0]
    cdef Py_ssize_t nedge = hi.shape[0]
    cdef Py_ssize_t nsamp = sample_steps.shape[0]
    u_arr = np.eye(n, dtype=np.complex128, order="F")
    samples = np.empty((nsamp, n, n), dtype=np.complex128)
    cdef zc[::1, :] u = u_arr
    cdef zc[::1, :] a = np.zeros((n, n), dtype=np.complex128, order="F")
    cdef zc[::1, :] e = np.zeros((n, n), dtype=np.complex128, order="F")
    cdef zc[::1, :] tmp = np.zeros((n, n), dtype=np.complex128, order="F")
    cdef double[::1] w = np.zeros(n, dtype=np.float64)
    cdef double[::1] rwork = np.zeros(max(1, 3 * n - 2), dtype=np.float64)
    cdef int lwork = max(1, 4 * n)
    cdef zc[::1] work = np.zeros(lwork, dtype=np.complex128)
    cdef zc[::1] ph = np.zeros(n, dtype=np.complex128)
    cdef int info = 0
    cdef int nn = n
    cdef char jobz = b"V"
    cdef char uplo = b"U"
    cdef Py_ssize_t k, i, j, l, q, next_sample = 0
    cdef zc val, acc

    while next_sample < nsamp and sample_steps[next_sample] == 0:
        samples[next_sample] = u_arr
        next_sample += 1

    for k in range(nsteps):
        for j in range(n):
            for i in range(n):
                a[i, j] = 0
        for q in range(nedge):
            val = drive_s[k] * gconj[q] * cexpi(-de[q] * t_eval[k])
            i = hi[q]
            j = lo[q]
            # zheev reads the upper triangle only
            if i < j:
                a[i, j] = val
            else:
                a[j, i] = val.conjugate()
        zheev(&jobz, &uplo, &nn, &a[0, 0], &nn, &w[0], &work[0], &lwork, &rwork[0], &info)
        if info != 0:
            raise RuntimeError(f"zheev failed with info={info}")
        for l in range(n):
            ph[l] = cexpi(-dt * w[l])
        # e = a diag(ph) a^H
        for j in range(n):
            for i in range(n):
                acc = 0
                for l in range(n):
                    acc = acc + a[i, l] * ph[l] * a[j, l].conjugate()
                e[i, j] = acc
        # u <- e u
        for j in range(n):
            for i in range(n):
                acc = 0
                for l in range(n):
                    acc = acc + e[i, l] * u[l, j]
                tmp[i, j] = acc
        for j in range(n):
            for i in range(n):
                u[i, j] = tmp[i, j]
        while next_sample < nsamp and sample_steps[next_sample] == k + 1:
            samples[next_sample] = u_arr
            next_sample += 1
    return np.ascontiguousarray(u_arr), samples


cdef void _apply_exp(zc[::1, :] q, const double[::1] lam, double scale,
                     zc[::1] psi, zc[::1] tmp, int n) noexcept nogil:
    """psi <- q diag(exp(-i scale lam)) q^H psi"""
    cdef zc one = 1.0
    cdef zc zero = 0.0
    cdef int inc = 1
    cdef char tc = b"C"
    cdef char tn = b"N"
    cdef Py_ssize_t l
    zgemv(&tc, &n, &n, &one, &q[0, 0], &n, &psi[0], &inc, &zero, &tmp[0], &inc)
    for l in range(n):
        tmp[l] = tmp[l] * cexpi(-scale * lam[l])
    zgemv(&tn, &n, &n, &one, &q[0, 0], &n, &tmp[0], &inc, &zero, &psi[0], &inc)


def coined_steps(
    const zc[::1] psi0,
    const zc[::1] kphase,
    zc[::1, :] qm,
    const double[::1] lam_m,
    zc[::1, :] qp,
    const double[::1] lam_p,
    bint use_plus,
    const double[::1] phis,
    double dt,
    const unsigned char[::1] boundary,
    const long[::1] sample_steps,
):
    """Ladder-space stepping: frame phase, then the V+ and V- exponentials.

    Returns the final state, the states after each step count listed in
    ``sample_steps`` and the largest probability seen on boundary rungs.
    """
    cdef int n = psi0.shape[0]
    cdef Py_ssize_t nsteps = phis.shape[0]
    cdef Py_ssize_t nsamp = sample_steps.shape[0]
    psi_arr = np.array(psi0, dtype=np.complex128)
    samples = np.empty((nsamp, n), dtype=np.complex128)
    cdef zc[::1] psi = psi_arr
    cdef zc[::1] tmp = np.zeros(n, dtype=np.complex128)
    cdef Py_ssize_t k, i, next_sample = 0
    cdef double bmass, worst = 0.0

    for i in range(n):
        if boundary[i]:
            worst += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
    while next_sample < nsamp and sample_steps[next_sample] == 0:
        samples[next_sample] = psi_arr
        next_sample += 1

    for k in range(nsteps):
        with nogil:
            for i in range(n):
                psi[i] = psi[i] * kphase[i]
            if use_plus:
                _apply_exp(qp, lam_p, dt * phis[k], psi, tmp, n)
            _apply_exp(qm, lam_m, dt * phis[k], psi, tmp, n)
            bmass = 0.0
            for i in range(n):
                if boundary[i]:
                    bmass += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
            if bmass > worst:
                worst = bmass
        while next_sample < nsamp and sample_steps[next_sample] == k + 1:
            samples[next_sample] = psi_arr
            next_sample += 1
    return psi_arr, samples, worst
