# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled hot kernels.

``hermitian_matvec`` is the inner loop of every Lanczos iteration: it applies
a Hermitian matrix stored as its strict upper triangle (row < col) to a
complex vector, mirroring each entry with its conjugate on the fly.
``accumulate_abs2`` fuses the squared-modulus accumulation used by the
blocked all-pairs affinity evaluation.

Complex data is passed as float64 views with interleaved real/imaginary
pairs (the native memory layout of complex128 arrays).
"""


def hermitian_matvec(const long long[::1] rows,
                     const long long[::1] cols,
                     const double[::1] values,
                     const double[::1] x,
                     double[::1] out):
    """out += A @ x for the half-stored Hermitian A, one fused pass.

    ``values``, ``x`` and ``out`` are interleaved (re, im) float64 views of
    complex128 arrays; ``rows``/``cols`` index complex elements.
    """
    cdef Py_ssize_t e, r2, c2
    cdef double vr, vi, ar, ai
    cdef Py_ssize_t nnz = rows.shape[0]
    for e in range(nnz):
        r2 = 2 * rows[e]
        c2 = 2 * cols[e]
        vr = values[2 * e]
        vi = values[2 * e + 1]
        ar = x[c2]
        ai = x[c2 + 1]
        out[r2] += vr * ar - vi * ai
        out[r2 + 1] += vr * ai + vi * ar
        ar = x[r2]
        ai = x[r2 + 1]
        out[c2] += vr * ar + vi * ai
        out[c2 + 1] += vr * ai - vi * ar


def accumulate_abs2(double[:, ::1] acc, const double[:, ::1] z2):
    """acc += |z|**2 elementwise; ``z2`` is the interleaved view of z."""
    cdef Py_ssize_t i, j
    cdef double re, im
    for i in range(acc.shape[0]):
        for j in range(acc.shape[1]):
            re = z2[i, 2 * j]
            im = z2[i, 2 * j + 1]
            acc[i, j] += re * re + im * im
