# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for Kraus-channel evaluation on small matrices.

Same signatures and results as ``_kernels_py``; see that module for the
reference definitions.
"""

import numpy as np

ctypedef double complex cplx


def outcome_probabilities(const cplx[:, :, ::1] kraus,
                          const cplx[:, ::1] inputs,
                          const cplx[:, :, ::1] bases):
    """p[n, j] = sum_i |<bases[n, j]| K_i |inputs[n]>|^2."""
    cdef Py_ssize_t r = kraus.shape[0], d = kraus.shape[1]
    cdef Py_ssize_t n_in = inputs.shape[0], n_out = bases.shape[1]
    cdef Py_ssize_t i, n, j, a, b
    cdef cplx amp, acc
    out = np.zeros((n_in, n_out), dtype=np.float64)
    cdef double[:, ::1] p = out
    kpsi_arr = np.empty(d, dtype=np.complex128)
    cdef cplx[::1] kpsi = kpsi_arr
    with nogil:
        for n in range(n_in):
            for i in range(r):
                for a in range(d):
                    acc = 0
                    for b in range(d):
                        acc = acc + kraus[i, a, b] * inputs[n, b]
                    kpsi[a] = acc
                for j in range(n_out):
                    amp = 0
                    for a in range(d):
                        amp = amp + bases[n, j, a].conjugate() * kpsi[a]
                    p[n, j] += amp.real * amp.real + amp.imag * amp.imag
    return out


def apply_kraus(const cplx[:, :, ::1] kraus, const cplx[:, ::1] rho):
    """sum_i K_i rho K_i^dagger."""
    cdef Py_ssize_t r = kraus.shape[0], d = kraus.shape[1]
    cdef Py_ssize_t i, a, b, c
    cdef cplx acc
    out = np.zeros((d, d), dtype=np.complex128)
    cdef cplx[:, ::1] res = out
    tmp_arr = np.empty((d, d), dtype=np.complex128)
    cdef cplx[:, ::1] tmp = tmp_arr
    with nogil:
        for i in range(r):
            # tmp = K rho
            for a in range(d):
                for b in range(d):
                    acc = 0
                    for c in range(d):
                        acc = acc + kraus[i, a, c] * rho[c, b]
                    tmp[a, b] = acc
            # res += tmp K^dagger
            for a in range(d):
                for b in range(d):
                    acc = 0
                    for c in range(d):
                        acc = acc + tmp[a, c] * kraus[i, b, c].conjugate()
                    res[a, b] = res[a, b] + acc
    return out


def unitary_overlap(const cplx[:, :, ::1] kraus, const cplx[:, ::1] u):
    """sum_i |tr(U^dagger K_i)|^2."""
    cdef Py_ssize_t r = kraus.shape[0], d = kraus.shape[1]
    cdef Py_ssize_t i, a, b
    cdef cplx t
    cdef double total = 0
    with nogil:
        for i in range(r):
            t = 0
            for a in range(d):
                for b in range(d):
                    t = t + u[b, a].conjugate() * kraus[i, b, a]
            total += t.real * t.real + t.imag * t.imag
    return total
