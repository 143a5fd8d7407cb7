"""Pure-Python (numpy) implementations of the hot kernels.

Selected at import time by :mod:`tauberlab.kernels` when the compiled
extension is unavailable or disabled; signatures and semantics match
``_kernels.pyx`` exactly.  Each function is deterministic: summation order
depends only on the inputs.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def dirichlet_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Divisor-pair convolution of integer-indexed arrays.

    ``c[i*j] += a[i] * b[j]`` over all pairs with ``i*j < len(a)``; slot 0 is
    unused and stays zero.  Rows with ``a[i] == 0`` are skipped, so the cost
    is ``O(nnz(a) * n / i)``.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    n = a.shape[0]
    if b.shape[0] != n:
        raise ValueError("operands must share one horizon")
    c = np.zeros(n, dtype=np.complex128)
    for i in np.nonzero(a)[0]:
        if i == 0:
            continue
        m = (n - 1) // i
        c[i :: i] += a[i] * b[1 : m + 1]
    return c


def cauchy_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated polynomial product: ``c[i+j] += a[i] * b[j]`` for ``i+j < n``."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    n = a.shape[0]
    if b.shape[0] != n:
        raise ValueError("operands must share one horizon")
    nz = np.nonzero(a)[0]
    if len(nz) * 16 < n:
        # sparse first operand: shifted adds beat the dense product
        c = np.zeros(n, dtype=np.complex128)
        for i in nz:
            c[i:] += a[i] * b[: n - i]
        return c
    return np.convolve(a, b)[:n]


def smallest_prime_factor(limit: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..limit (0 for n < 2)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 2:
        spf[2::2] = 2
    i = 3
    while i * i <= limit:
        if spf[i] == 0:
            sl = spf[i * i :: i]
            sl[sl == 0] = i
        i += 2
    rest = np.nonzero(spf[2:] == 0)[0] + 2
    spf[rest] = rest
    return spf


def polyval_many(coeffs: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Evaluate sum_k coeffs[k] z**k at each point (Horner)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    zs = np.asarray(zs, dtype=np.complex128)
    acc = np.zeros_like(zs)
    for c in coeffs[::-1]:
        acc = acc * zs + c
    return acc


def dirichlet_grid(coefw: np.ndarray, sigmas: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Values of sum_n coefw[n] * n**(-(sigma + i t)) on a rectangular grid.

    ``coefw`` is indexed by the integer n (slot 0 ignored).  Returns an array
    of shape ``(len(sigmas), len(ts))``.
    """
    coefw = np.asarray(coefw, dtype=np.complex128)
    sigmas = np.asarray(sigmas, dtype=np.float64)
    ts = np.asarray(ts, dtype=np.float64)
    support = np.nonzero(coefw)[0]
    support = support[support >= 1]
    if len(support) == 0:
        return np.zeros((len(sigmas), len(ts)), dtype=np.complex128)
    logs = np.log(support.astype(np.float64))
    amp = coefw[support][None, :] * np.exp(-np.outer(sigmas, logs))  # (ns, m)
    phase = np.exp(-1j * np.outer(logs, ts))  # (m, nt)
    return amp @ phase


def lattice_conv(f: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Truncated lattice convolution ``c[i] = sum_{0<=j<=i} f[i-j] k[j]``.

    Works for 1-3 dimensional grids of equal shape; the caller applies the
    quadrature scaling h**d.  FFT-based, which is deterministic for fixed
    inputs.
    """
    f = np.asarray(f, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    if f.shape != k.shape:
        raise ValueError("grids must have identical shape")
    full = tuple(2 * n - 1 for n in f.shape)
    ff = np.fft.rfftn(f, full)
    kf = np.fft.rfftn(k, full)
    out = np.fft.irfftn(ff * kf, full)
    return np.ascontiguousarray(out[tuple(slice(0, n) for n in f.shape)])


def mercer_forward(x: np.ndarray, alpha: float) -> np.ndarray:
    """y_n = alpha x_n + (1 - alpha) * mean(x_1..x_n), sequences 1-indexed."""
    x = np.asarray(x, dtype=np.float64)
    y = np.empty_like(x)
    s = 0.0
    for i in range(len(x)):
        s += x[i]
        y[i] = alpha * x[i] + (1.0 - alpha) * s / (i + 1)
    return y


def mercer_invert(y: np.ndarray, alpha: float) -> np.ndarray:
    """Inverse of ``mercer_forward`` by the forward recursion on prefix means."""
    y = np.asarray(y, dtype=np.float64)
    x = np.empty_like(y)
    mean = 0.0
    for i in range(len(y)):
        n = i + 1
        xi = (y[i] - (1.0 - alpha) * (n - 1) * mean / n) / (alpha + (1.0 - alpha) / n)
        x[i] = xi
        mean = ((n - 1) * mean + xi) / n
    return x
