# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled SC kernels. Mirrors ``_pykernels`` operation for operation."""

import numpy as np

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy
from libc.math cimport fabs, log2


cdef inline void _store(double r0, double r1, double* d0, double* d1, Py_ssize_t j) noexcept nogil:
    cdef double s = r0 + r1
    if s > 0.0:
        d0[j] = r0 / s
        d1[j] = r1 / s
    else:
        d0[j] = 0.0
        d1[j] = 0.0


cdef int _walk(int n, const double* leaf0, const double* leaf1,
               const unsigned char* info, const unsigned char* msg,
               const double* unif, int mode, unsigned char* u, double* p0_out, double* p1_out,
               double* q0, double* q1, unsigned char* part, Py_ssize_t* off) noexcept nogil:
    # mode 0: random frozen bits, 1: greedy frozen bits, 2: u given (record p0)
    cdef Py_ssize_t N = (<Py_ssize_t>1) << n
    cdef Py_ssize_t i, j, h, m
    cdef int d, k, bit
    cdef double a0, a1, b0, b1, p0, p1
    cdef double *s0
    cdef double *s1
    cdef double *t0
    cdef double *t1
    cdef unsigned char *ps
    cdef unsigned char *pd

    memcpy(q0, leaf0, N * sizeof(double))
    memcpy(q1, leaf1, N * sizeof(double))
    for i in range(N):
        if i == 0:
            k = 0
        else:
            j = i ^ (i - 1)
            k = n
            while j:
                k -= 1
                j >>= 1
        for d in range(k, n):
            m = N >> d
            h = m >> 1
            s0 = q0 + off[d]
            s1 = q1 + off[d]
            t0 = q0 + off[d + 1]
            t1 = q1 + off[d + 1]
            if d == k and i > 0:
                ps = part + off[d]
                for j in range(h):
                    a0 = s0[j]
                    a1 = s1[j]
                    b0 = s0[h + j]
                    b1 = s1[h + j]
                    if ps[j]:
                        _store(a1 * b0, a0 * b1, t0, t1, j)
                    else:
                        _store(a0 * b0, a1 * b1, t0, t1, j)
            else:
                for j in range(h):
                    a0 = s0[j]
                    a1 = s1[j]
                    b0 = s0[h + j]
                    b1 = s1[h + j]
                    _store(a0 * b0 + a1 * b1, a0 * b1 + a1 * b0, t0, t1, j)
        p0 = q0[off[n]]
        p1 = q1[off[n]]
        if mode == 2:
            p0_out[i] = p0
            if p1_out:
                p1_out[i] = p1
            bit = u[i]
        elif info[i]:
            bit = msg[i]
        elif p0 == 0.0 and p1 == 0.0:
            return <int>i
        elif mode == 1:
            bit = 0 if p0 >= p1 else 1
        else:
            bit = 0 if unif[i] < p0 else 1
        u[i] = bit
        part[off[n]] = bit
        for d in range(n - 1, -1, -1):
            h = N >> (d + 1)
            ps = part + off[d + 1]
            pd = part + off[d]
            if (i >> (n - 1 - d)) & 1 == 0:
                memcpy(pd, ps, h)
                break
            for j in range(h):
                pd[j] ^= ps[j]
                pd[h + j] = ps[j]
    return -1


cdef class _Workspace:
    cdef int n
    cdef double* q0
    cdef double* q1
    cdef unsigned char* part
    cdef Py_ssize_t* off

    def __cinit__(self, int n):
        cdef Py_ssize_t N = (<Py_ssize_t>1) << n
        cdef int d
        self.n = n
        self.q0 = <double*>malloc(2 * N * sizeof(double))
        self.q1 = <double*>malloc(2 * N * sizeof(double))
        self.part = <unsigned char*>malloc(2 * N)
        self.off = <Py_ssize_t*>malloc((n + 2) * sizeof(Py_ssize_t))
        if not (self.q0 and self.q1 and self.part and self.off):
            raise MemoryError()
        self.off[0] = 0
        for d in range(n + 1):
            self.off[d + 1] = self.off[d] + (N >> d)

    def __dealloc__(self):
        free(self.q0)
        free(self.q1)
        free(self.part)
        free(self.off)


def _log2(Py_ssize_t N):
    cdef int n = 0
    if N < 1 or (N & (N - 1)):
        raise ValueError(f"length must be a power of two, got {N}")
    while ((<Py_ssize_t>1) << n) < N:
        n += 1
    return n


def encode_pass(leaf0, leaf1, info_mask, message, uniforms, greedy):
    cdef const double[::1] l0 = np.ascontiguousarray(leaf0, dtype=np.float64)
    cdef const double[::1] l1 = np.ascontiguousarray(leaf1, dtype=np.float64)
    cdef const unsigned char[::1] info = np.ascontiguousarray(info_mask, dtype=np.uint8)
    cdef const unsigned char[::1] msg = np.ascontiguousarray(message, dtype=np.uint8)
    cdef const double[::1] unif = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t N = l0.shape[0]
    cdef int n = _log2(N)
    if not (l1.shape[0] == info.shape[0] == msg.shape[0] == unif.shape[0] == N):
        raise ValueError("all kernel inputs must have the same length")
    u_arr = np.zeros(N, dtype=np.uint8)
    cdef unsigned char[::1] u = u_arr
    cdef _Workspace ws = _Workspace(n)
    cdef int mode = 1 if greedy else 0
    cdef int bad
    with nogil:
        bad = _walk(n, &l0[0], &l1[0], &info[0], &msg[0], &unif[0], mode, &u[0], NULL, NULL,
                    ws.q0, ws.q1, ws.part, ws.off)
    return u_arr, bad


def genie_pass(leaf0, leaf1, u):
    cdef const double[:, ::1] l0 = np.ascontiguousarray(leaf0, dtype=np.float64)
    cdef const double[:, ::1] l1 = np.ascontiguousarray(leaf1, dtype=np.float64)
    u_copy = np.array(u, dtype=np.uint8, order="C", copy=True)
    cdef unsigned char[:, ::1] uu = u_copy
    cdef Py_ssize_t B = uu.shape[0]
    cdef Py_ssize_t N = uu.shape[1]
    cdef int n = _log2(N)
    if l0.shape[0] != B or l1.shape[0] != B or l0.shape[1] != N or l1.shape[1] != N:
        raise ValueError("leaf and u arrays must share shape")
    out0_arr = np.empty((B, N), dtype=np.float64)
    out1_arr = np.empty((B, N), dtype=np.float64)
    cdef double[:, ::1] out0 = out0_arr
    cdef double[:, ::1] out1 = out1_arr
    cdef _Workspace ws = _Workspace(n)
    cdef Py_ssize_t b
    if B == 0:
        return out0_arr, out1_arr
    with nogil:
        for b in range(B):
            _walk(n, &l0[b, 0], &l1[b, 0], NULL, NULL, NULL, 2, &uu[b, 0], &out0[b, 0], &out1[b, 0],
                  ws.q0, ws.q1, ws.part, ws.off)
    return out0_arr, out1_arr


def genie_stats(y_rev, u, double t):
    """Per-index sums of ``a = |p0 - 1/2|``, ``a**2``, ``h(p0)``, ``h(p0)**2`` over rows.

    ``y_rev`` holds memory states already in bit-reversed order.
    """
    cdef const unsigned char[:, ::1] yy = np.ascontiguousarray(y_rev, dtype=np.uint8)
    u_copy = np.array(u, dtype=np.uint8, order="C", copy=True)
    cdef unsigned char[:, ::1] uu = u_copy
    cdef Py_ssize_t B = uu.shape[0]
    cdef Py_ssize_t N = uu.shape[1]
    cdef int n = _log2(N)
    if yy.shape[0] != B or yy.shape[1] != N:
        raise ValueError("state and u arrays must share shape")
    sums_arr = np.zeros((4, N), dtype=np.float64)
    cdef double[:, ::1] sums = sums_arr
    cdef _Workspace ws = _Workspace(n)
    cdef double* l0 = <double*>malloc(3 * N * sizeof(double))
    if not l0:
        raise MemoryError()
    cdef double* l1 = l0 + N
    cdef double* p0 = l0 + 2 * N
    cdef Py_ssize_t b, j
    cdef double a, h, p, q
    try:
        with nogil:
            for b in range(B):
                for j in range(N):
                    if yy[b, j]:
                        l0[j] = t
                        l1[j] = 1.0 - t
                    else:
                        l0[j] = 1.0
                        l1[j] = 0.0
                _walk(n, l0, l1, NULL, NULL, NULL, 2, &uu[b, 0], p0, NULL,
                      ws.q0, ws.q1, ws.part, ws.off)
                for j in range(N):
                    p = p0[j]
                    q = 1.0 - p
                    a = fabs(p - 0.5)
                    if p <= 0.0 or p >= 1.0:
                        h = 0.0
                    else:
                        h = -p * log2(p) - q * log2(q)
                    sums[0, j] += a
                    sums[1, j] += a * a
                    sums[2, j] += h
                    sums[3, j] += h * h
    finally:
        free(l0)
    return sums_arr
