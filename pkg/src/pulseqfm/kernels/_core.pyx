# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled evaluation kernels; mirrors ``numpy_backend`` (see its docstring
for the programme layout and qubit conventions)."""

import numpy as np

cimport cython
from libc.math cimport cos, sin

NAME = "compiled"

ctypedef double complex cplx


cdef void _apply_1q_rows(cplx[:, ::1] buf, int nrow, cplx m00, cplx m01,
                         cplx m10, cplx m11, int q, int dim) noexcept nogil:
    # state index on axis 1; every row is an independent vector
    cdef int stride = 1 << q
    cdef int r, base, j, i
    cdef cplx a, b
    for r in range(nrow):
        base = 0
        while base < dim:
            for j in range(stride):
                i = base + j
                a = buf[r, i]
                b = buf[r, i + stride]
                buf[r, i] = m00 * a + m01 * b
                buf[r, i + stride] = m10 * a + m11 * b
            base += stride << 1


cdef void _apply_2q_rows(cplx[:, ::1] buf, int nrow, cplx[:, :] g,
                         int q0, int q1, int dim) noexcept nogil:
    # local index l = 2*bit(q0) + bit(q1)
    cdef int s1 = 1 << q0
    cdef int s0 = 1 << q1
    cdef int r, i
    cdef cplx v0, v1, v2, v3
    for r in range(nrow):
        for i in range(dim):
            if (i & s0) or (i & s1):
                continue
            v0 = buf[r, i]
            v1 = buf[r, i + s0]
            v2 = buf[r, i + s1]
            v3 = buf[r, i + s0 + s1]
            buf[r, i] = g[0, 0] * v0 + g[0, 1] * v1 + g[0, 2] * v2 + g[0, 3] * v3
            buf[r, i + s0] = g[1, 0] * v0 + g[1, 1] * v1 + g[1, 2] * v2 + g[1, 3] * v3
            buf[r, i + s1] = g[2, 0] * v0 + g[2, 1] * v1 + g[2, 2] * v2 + g[2, 3] * v3
            buf[r, i + s0 + s1] = g[3, 0] * v0 + g[3, 1] * v1 + g[3, 2] * v2 + g[3, 3] * v3


cdef void _rx_vec(cplx[::1] psi, double half, int q, int dim) noexcept nogil:
    cdef double c = cos(half)
    cdef double s = sin(half)
    cdef cplx mis = -1j * s
    cdef int stride = 1 << q
    cdef int base = 0, j, i
    cdef cplx a, b
    while base < dim:
        for j in range(stride):
            i = base + j
            a = psi[i]
            b = psi[i + stride]
            psi[i] = c * a + mis * b
            psi[i + stride] = mis * a + c * b
        base += stride << 1


cdef void _matvec_ut(cplx[:, ::1] ut, cplx[::1] vin, cplx[::1] vout, int dim) noexcept nogil:
    # ut holds the transposed block unitary: out_r = sum_c ut[c, r] * in_c
    cdef int r, c
    cdef cplx a
    for r in range(dim):
        vout[r] = 0
    for c in range(dim):
        a = vin[c]
        if a == 0:
            continue
        for r in range(dim):
            vout[r] = vout[r] + ut[c, r] * a


cdef void _build_blocks(cplx[:, :, ::1] uts, cplx[:, :, :] mats,
                        int[::1] q0, int[::1] q1, int[::1] block,
                        int n_blocks, int dim, int n_gates) noexcept nogil:
    cdef int blk, g, r, c
    for blk in range(n_blocks):
        for r in range(dim):
            for c in range(dim):
                uts[blk, r, c] = 1 if r == c else 0
    for g in range(n_gates):
        blk = block[g]
        if q1[g] < 0:
            _apply_1q_rows(uts[blk], dim, mats[g, 0, 0], mats[g, 0, 1],
                           mats[g, 1, 0], mats[g, 1, 1], q0[g], dim)
        else:
            _apply_2q_rows(uts[blk], dim, mats[g], q0[g], q1[g], dim)


def forward_grid_batch(cplx[:, :, :, ::1] mats, q0, q1, block,
                       int n_blocks, int n_qubits, double[::1] enc_scales,
                       double[::1] xs, double[::1] obs_diag):
    cdef int[::1] q0v = np.ascontiguousarray(q0, dtype=np.int32)
    cdef int[::1] q1v = np.ascontiguousarray(q1, dtype=np.int32)
    cdef int[::1] blkv = np.ascontiguousarray(block, dtype=np.int32)
    cdef int batch = mats.shape[0]
    cdef int n_gates = mats.shape[1]
    cdef int dim = 1 << n_qubits
    cdef int nx = xs.shape[0]
    out_arr = np.empty((batch, nx), dtype=np.float64)
    uts_arr = np.empty((n_blocks, dim, dim), dtype=np.complex128)
    psi_arr = np.empty(dim, dtype=np.complex128)
    tmp_arr = np.empty(dim, dtype=np.complex128)
    cdef double[:, ::1] out = out_arr
    cdef cplx[:, :, ::1] uts = uts_arr
    cdef cplx[::1] psi = psi_arr
    cdef cplx[::1] tmp = tmp_arr
    cdef int b, k, blk, q, i
    cdef double acc, x
    cdef cplx a
    with nogil:
        for b in range(batch):
            _build_blocks(uts, mats[b], q0v, q1v, blkv, n_blocks, dim, n_gates)
            for k in range(nx):
                x = xs[k]
                for i in range(dim):
                    psi[i] = uts[0, 0, i]
                for blk in range(1, n_blocks):
                    for q in range(n_qubits):
                        _rx_vec(psi, 0.5 * enc_scales[q] * x, q, dim)
                    _matvec_ut(uts[blk], psi, tmp, dim)
                    for i in range(dim):
                        psi[i] = tmp[i]
                acc = 0.0
                for i in range(dim):
                    a = psi[i]
                    acc += obs_diag[i] * (a.real * a.real + a.imag * a.imag)
                out[b, k] = acc
    return out_arr


def final_states_batch(cplx[:, :, :, ::1] mats, q0, q1, block,
                       int n_blocks, int n_qubits, double[::1] enc_scales,
                       double[::1] xs):
    cdef int[::1] q0v = np.ascontiguousarray(q0, dtype=np.int32)
    cdef int[::1] q1v = np.ascontiguousarray(q1, dtype=np.int32)
    cdef int[::1] blkv = np.ascontiguousarray(block, dtype=np.int32)
    cdef int batch = mats.shape[0]
    cdef int n_gates = mats.shape[1]
    cdef int dim = 1 << n_qubits
    out_arr = np.empty((batch, dim), dtype=np.complex128)
    uts_arr = np.empty((n_blocks, dim, dim), dtype=np.complex128)
    tmp_arr = np.empty(dim, dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    cdef cplx[:, :, ::1] uts = uts_arr
    cdef cplx[::1] tmp = tmp_arr
    cdef int b, blk, q, i
    with nogil:
        for b in range(batch):
            _build_blocks(uts, mats[b], q0v, q1v, blkv, n_blocks, dim, n_gates)
            for i in range(dim):
                out[b, i] = uts[0, 0, i]
            for blk in range(1, n_blocks):
                for q in range(n_qubits):
                    _rx_vec(out[b], 0.5 * enc_scales[q] * xs[b], q, dim)
                _matvec_ut(uts[blk], out[b], tmp, dim)
                for i in range(dim):
                    out[b, i] = tmp[i]
    return out_arr


def apply_gate(state, gate, int q0, int q1):
    cdef cplx[::1] vin = np.ascontiguousarray(state, dtype=np.complex128)
    out_arr = np.array(vin, dtype=np.complex128, copy=True)
    cdef cplx[:, ::1] buf = out_arr[None, :]
    cdef cplx[:, :] g = np.ascontiguousarray(gate, dtype=np.complex128)
    cdef int dim = out_arr.shape[0]
    if q1 < 0:
        _apply_1q_rows(buf, 1, g[0, 0], g[0, 1], g[1, 0], g[1, 1], q0, dim)
    else:
        _apply_2q_rows(buf, 1, g, q0, q1, dim)
    return out_arr
