# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-node force kernel.

Computes attraction, repulsion and net-force energy for a contiguous block
of rows. The GIL is released for the whole block so several threads can
work on disjoint ranges of the same snapshot.
"""
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef void _block(const double[:, ::1] U,
                 const cnp.int64_t[::1] indptr,
                 const cnp.int64_t[::1] indices,
                 const double[::1] weights,
                 double p, double qw, double b,
                 Py_ssize_t start, Py_ssize_t stop,
                 double[:, ::1] f_att,
                 double[:, ::1] f_rep,
                 double[::1] energy) noexcept nogil:
    cdef Py_ssize_t N = U.shape[0]
    cdef Py_ssize_t n = U.shape[1]
    cdef Py_ssize_t k, i, m, pos
    cdef double d, t, d2, c, e

    for k in range(start, stop):
        for m in range(n):
            f_att[k, m] = 0.0
            f_rep[k, m] = 0.0

        for pos in range(indptr[k], indptr[k + 1]):
            i = indices[pos]
            c = -p * weights[pos]
            for m in range(n):
                f_att[k, m] += c * (U[k, m] - U[i, m])

        for i in range(N):
            if i == k:
                continue
            d2 = 0.0
            for m in range(n):
                t = fabs(U[k, m] - U[i, m]) + b
                d2 += t * t
            c = qw / d2
            for m in range(n):
                f_rep[k, m] += c * (U[k, m] - U[i, m])

        e = 0.0
        for m in range(n):
            t = f_att[k, m] + f_rep[k, m]
            e += t * t
        energy[k] = e


def node_forces(const double[:, ::1] U,
                const cnp.int64_t[::1] indptr,
                const cnp.int64_t[::1] indices,
                const double[::1] weights,
                double p, double q, double b, double w_rep,
                Py_ssize_t start, Py_ssize_t stop,
                double[:, ::1] f_att,
                double[:, ::1] f_rep,
                double[::1] energy):
    """Fill rows ``start:stop`` of ``f_att``, ``f_rep`` and ``energy``."""
    if stop > U.shape[0] or start < 0 or start > stop:
        raise IndexError("row range out of bounds")
    with nogil:
        _block(U, indptr, indices, weights, p, q * w_rep, b, start, stop,
               f_att, f_rep, energy)
