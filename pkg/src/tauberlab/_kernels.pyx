# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: divisor-pair and Cauchy convolutions, prime sieving,
polynomial and Dirichlet-series grid evaluation, truncated lattice
convolution, and the sequential averaging recursions.

The numpy fallback in ``_kernels_py`` mirrors every signature; the dispatcher
in ``kernels`` picks whichever is available.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex z)

BACKEND_NAME = "compiled"


def dirichlet_convolve(a, b):
    """c[i*j] += a[i] * b[j] over i*j < n; slot 0 unused."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    cdef double complex[::1] av = a
    cdef double complex[::1] bv = b
    cdef Py_ssize_t n = av.shape[0]
    if bv.shape[0] != n:
        raise ValueError("operands must share one horizon")
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] cv = out
    cdef Py_ssize_t i, j, m
    cdef double complex x
    with nogil:
        for i in range(1, n):
            x = av[i]
            if x == 0:
                continue
            m = (n - 1) // i
            for j in range(1, m + 1):
                if bv[j] != 0:
                    cv[i * j] = cv[i * j] + x * bv[j]
    return out


def cauchy_convolve(a, b):
    """Truncated polynomial product: c[i+j] += a[i] * b[j] for i+j < n."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    cdef double complex[::1] av = a
    cdef double complex[::1] bv = b
    cdef Py_ssize_t n = av.shape[0]
    if bv.shape[0] != n:
        raise ValueError("operands must share one horizon")
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] cv = out
    cdef Py_ssize_t i, j
    cdef double complex x
    with nogil:
        for i in range(n):
            x = av[i]
            if x == 0:
                continue
            for j in range(n - i):
                if bv[j] != 0:
                    cv[i + j] = cv[i + j] + x * bv[j]
    return out


def smallest_prime_factor(Py_ssize_t limit):
    """Smallest-prime-factor table for 0..limit (0 for n < 2)."""
    out = np.zeros(limit + 1, dtype=np.int64)
    cdef long long[::1] spf = out
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(2, limit + 1):
            if spf[i] == 0:
                j = i
                while j <= limit:
                    if spf[j] == 0:
                        spf[j] = i
                    j += i
    return out


def polyval_many(coeffs, zs):
    """Evaluate sum_k coeffs[k] z**k at each point (Horner)."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    zs = np.ascontiguousarray(zs, dtype=np.complex128)
    cdef double complex[::1] c = coeffs
    cdef double complex[::1] z = zs
    cdef Py_ssize_t nc = c.shape[0], m = z.shape[0]
    out = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t p, i
    cdef double complex acc, zp
    with nogil:
        for p in range(m):
            zp = z[p]
            acc = 0
            for i in range(nc - 1, -1, -1):
                acc = acc * zp + c[i]
            o[p] = acc
    return out


def dirichlet_grid(coefw, sigmas, ts):
    """Values of sum_n coefw[n] * n**(-(sigma + i t)) on a rectangular grid."""
    coefw = np.ascontiguousarray(coefw, dtype=np.complex128)
    sigmas = np.ascontiguousarray(sigmas, dtype=np.float64)
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    cdef double complex[::1] a = coefw
    cdef double[::1] sg = sigmas
    cdef double[::1] tg = ts
    cdef Py_ssize_t n = a.shape[0], ns = sg.shape[0], nt = tg.shape[0]
    out = np.zeros((ns, nt), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    phases = np.empty(nt, dtype=np.complex128)
    cdef double complex[::1] ph = phases
    cdef Py_ssize_t k, si, ti
    cdef double ln
    cdef double complex coef, row
    with nogil:
        for k in range(1, n):
            if a[k] == 0:
                continue
            ln = log(<double> k)
            for ti in range(nt):
                ph[ti] = cexp(-1j * tg[ti] * ln)
            for si in range(ns):
                row = a[k] * exp(-sg[si] * ln)
                for ti in range(nt):
                    o[si, ti] = o[si, ti] + row * ph[ti]
    return out


def lattice_conv(f, k):
    """Truncated lattice convolution c[i] = sum_{0<=j<=i} f[i-j] k[j], d <= 3."""
    f = np.ascontiguousarray(f, dtype=np.float64)
    k = np.ascontiguousarray(k, dtype=np.float64)
    if f.shape != k.shape:
        raise ValueError("grids must have identical shape")
    if f.ndim > 3:
        raise ValueError("at most 3 dimensions supported")
    shape = f.shape
    while f.ndim < 3:
        f = f[None, ...]
        k = k[None, ...]
    out = _lattice_conv3(f, np.ascontiguousarray(k))
    return out.reshape(shape)


def _lattice_conv3(cnp.ndarray[cnp.float64_t, ndim=3] f,
                   cnp.ndarray[cnp.float64_t, ndim=3] k):
    cdef Py_ssize_t n1 = f.shape[0], n2 = f.shape[1], n3 = f.shape[2]
    out = np.zeros((n1, n2, n3), dtype=np.float64)
    cdef double[:, :, ::1] c = out
    cdef double[:, :, ::1] fv = f
    cdef double[:, :, ::1] kv = k
    cdef Py_ssize_t j1, j2, j3, i1, i2, i3
    cdef double x
    with nogil:
        for j1 in range(n1):
            for j2 in range(n2):
                for j3 in range(n3):
                    x = kv[j1, j2, j3]
                    if x == 0:
                        continue
                    for i1 in range(j1, n1):
                        for i2 in range(j2, n2):
                            for i3 in range(j3, n3):
                                c[i1, i2, i3] += x * fv[i1 - j1, i2 - j2, i3 - j3]
    return out


def mercer_forward(x, double alpha):
    """y_n = alpha x_n + (1 - alpha) * mean(x_1..x_n), sequences 1-indexed."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] xv = x
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef double s = 0.0
    with nogil:
        for i in range(n):
            s += xv[i]
            y[i] = alpha * xv[i] + (1.0 - alpha) * s / (i + 1)
    return out


def mercer_invert(y, double alpha):
    """Inverse of ``mercer_forward`` by the forward recursion on prefix means."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] yv = y
    cdef Py_ssize_t m = yv.shape[0], i
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] x = out
    cdef double mean = 0.0, xi, n
    with nogil:
        for i in range(m):
            n = <double> (i + 1)
            xi = (yv[i] - (1.0 - alpha) * (n - 1.0) * mean / n) / (alpha + (1.0 - alpha) / n)
            x[i] = xi
            mean = ((n - 1.0) * mean + xi) / n
    return out
