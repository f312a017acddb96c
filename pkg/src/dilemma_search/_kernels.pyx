# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the decision-tree and knapsack hot loops.

Every reduction mirrors ``_kernels_py`` operation for operation; build with
``-ffp-contract=off`` so no multiply-add gets fused.
"""
from libc.math cimport log2
from libc.stdlib cimport calloc, free

import numpy as np

NAME = "cython"


cdef double _entropy(const long long* counts, Py_ssize_t k, long long total) noexcept nogil:
    cdef double h = 0.0
    cdef double p
    cdef Py_ssize_t c
    for c in range(k):
        if counts[c]:
            p = <double>counts[c] / <double>total
            h -= p * log2(p)
    return h


def label_entropy(const long long[::1] y, const long long[::1] rows, long long n_classes):
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t r
    cdef double h
    if n == 0:
        return 0.0
    cdef long long* counts = <long long*>calloc(n_classes, sizeof(long long))
    if counts == NULL:
        raise MemoryError()
    try:
        for r in range(n):
            counts[y[rows[r]]] += 1
        h = _entropy(counts, n_classes, n)
    finally:
        free(counts)
    return h


def split_gains(const long long[:, ::1] X, const long long[::1] y, const long long[::1] rows,
                const long long[::1] attrs, const long long[::1] n_values, long long n_classes):
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t n_attrs = attrs.shape[0]
    cdef Py_ssize_t i, r, v, c, a, nv, row
    cdef long long nx, width = 1
    cdef double h, rem, gain
    out = []
    if n == 0:
        return [0.0] * n_attrs
    for i in range(n_attrs):
        if n_values[attrs[i]] > width:
            width = n_values[attrs[i]]
    cdef long long* parent = <long long*>calloc(n_classes, sizeof(long long))
    cdef long long* joint = <long long*>calloc(width * n_classes, sizeof(long long))
    if parent == NULL or joint == NULL:
        free(parent)
        free(joint)
        raise MemoryError()
    try:
        for r in range(n):
            parent[y[rows[r]]] += 1
        h = _entropy(parent, n_classes, n)
        for i in range(n_attrs):
            a = attrs[i]
            nv = n_values[a]
            for c in range(nv * n_classes):
                joint[c] = 0
            for r in range(n):
                row = rows[r]
                joint[X[row, a] * n_classes + y[row]] += 1
            rem = 0.0
            for v in range(nv):
                nx = 0
                for c in range(n_classes):
                    nx += joint[v * n_classes + c]
                if nx:
                    rem += (<double>nx / <double>n) * _entropy(joint + v * n_classes, n_classes, nx)
            gain = h - rem
            out.append(gain if gain > 0.0 else 0.0)
    finally:
        free(parent)
        free(joint)
    return out


def fitting_items(const long long[::1] order, const long long[::1] weights,
                  const unsigned char[::1] blocked, long long room):
    cdef Py_ssize_t k
    cdef long long i
    out = []
    for k in range(order.shape[0]):
        i = order[k]
        if not blocked[i] and weights[i] <= room:
            out.append(i)
    return out
