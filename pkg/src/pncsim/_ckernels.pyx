# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled relay kernels; same contract as ``pncsim._kernels_py``."""
import numpy as np

from libc.math cimport exp

cdef double SA[16]
cdef double SB[16]
cdef double SC[16]
cdef double SD[16]
cdef int CLS[16]

cdef int _k
for _k in range(16):
    SA[_k] = 1.0 if (_k >> 3) & 1 == 0 else -1.0
    SB[_k] = 1.0 if (_k >> 2) & 1 == 0 else -1.0
    SC[_k] = 1.0 if (_k >> 1) & 1 == 0 else -1.0
    SD[_k] = 1.0 if _k & 1 == 0 else -1.0
    CLS[_k] = 2 * (SA[_k] * SC[_k] < 0) + (SB[_k] * SD[_k] < 0)

cdef double ALPHA_RE[4]
cdef double ALPHA_IM[4]
ALPHA_RE[:] = [1.0, 1.0, -1.0, -1.0]
ALPHA_IM[:] = [1.0, -1.0, 1.0, -1.0]


cdef inline void _points(double complex h13, double complex h23, double* pr, double* pi) noexcept nogil:
    cdef int k
    for k in range(16):
        pr[k] = h13.real * SA[k] - h13.imag * SB[k] + h23.real * SC[k] - h23.imag * SD[k]
        pi[k] = h13.real * SB[k] + h13.imag * SA[k] + h23.real * SD[k] + h23.imag * SC[k]


cdef inline void _weights(double yr, double yi, double* pr, double* pi, double* w) noexcept nogil:
    cdef int k
    cdef double dr, di, m = -1e308
    for k in range(16):
        dr = yr - pr[k]
        di = yi - pi[k]
        w[k] = -0.5 * (dr * dr + di * di)
        if w[k] > m:
            m = w[k]
    for k in range(16):
        w[k] = exp(w[k] - m)


def map_pncf(y, double complex h13, double complex h23):
    cdef double complex[::1] yv = np.ascontiguousarray(y, dtype=np.complex128).ravel()
    out = np.empty(yv.shape[0], dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double pr[16]
    cdef double pi[16]
    cdef double w[16]
    cdef double cs[4]
    cdef Py_ssize_t i
    cdef int k, best
    _points(h13, h23, pr, pi)
    with nogil:
        for i in range(yv.shape[0]):
            _weights(yv[i].real, yv[i].imag, pr, pi, w)
            cs[0] = 0.0; cs[1] = 0.0; cs[2] = 0.0; cs[3] = 0.0
            for k in range(16):
                cs[CLS[k]] += w[k]
            best = 0
            for k in range(1, 4):
                if cs[k] > cs[best]:
                    best = k
            ov[i] = ALPHA_RE[best] + 1j * ALPHA_IM[best]
    return out


def mmse_pncf(y, double complex h13, double complex h23):
    cdef double complex[::1] yv = np.ascontiguousarray(y, dtype=np.complex128).ravel()
    out = np.empty(yv.shape[0], dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double pr[16]
    cdef double pi[16]
    cdef double w[16]
    cdef double tot, nr, ni
    cdef Py_ssize_t i
    cdef int k
    _points(h13, h23, pr, pi)
    with nogil:
        for i in range(yv.shape[0]):
            _weights(yv[i].real, yv[i].imag, pr, pi, w)
            tot = 0.0; nr = 0.0; ni = 0.0
            for k in range(16):
                tot += w[k]
                nr += w[k] * SA[k] * SC[k]
                ni += w[k] * SB[k] * SD[k]
            ov[i] = nr / tot + 1j * (ni / tot)
    return out


def mmse_pnci(y, double complex h13, double complex h23):
    cdef double complex[::1] yv = np.ascontiguousarray(y, dtype=np.complex128).ravel()
    out = np.empty(yv.shape[0], dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double pr[16]
    cdef double pi[16]
    cdef double w[16]
    cdef double tot, nr, ni
    cdef Py_ssize_t i
    cdef int k
    _points(h13, h23, pr, pi)
    with nogil:
        for i in range(yv.shape[0]):
            _weights(yv[i].real, yv[i].imag, pr, pi, w)
            tot = 0.0; nr = 0.0; ni = 0.0
            for k in range(16):
                tot += w[k]
                nr += w[k] * pr[k]
                ni += w[k] * pi[k]
            ov[i] = nr / tot + 1j * (ni / tot)
    return out
