# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.

Two O(n^3)-ish kernels dominate the axiom validator and the causal-DAG
time separation; everything else in the package is numpy-vectorised and
gains nothing from C.
"""

import numpy as np

cimport cython
from libc.math cimport INFINITY


def masked_maxplus_square(double[:, ::1] tau, const unsigned char[:, ::1] causal):
    """max-plus square of tau restricted to causal arcs.

    out[i, k] = max over j with causal[i, j] and causal[j, k] of
    tau[i, j] + tau[j, k]; -inf when no admissible middle point exists.
    """
    cdef Py_ssize_t n = tau.shape[0]
    out_arr = np.full((n, n), -INFINITY)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double tij, s
    with nogil:
        for i in range(n):
            for j in range(n):
                if causal[i, j] == 0:
                    continue
                tij = tau[i, j]
                for k in range(n):
                    if causal[j, k] != 0:
                        s = tij + tau[j, k]
                        if s > out[i, k]:
                            out[i, k] = s
    return out_arr


def dag_all_pairs_longest(const long[::1] src,
                          const long[::1] dst,
                          const double[::1] wgt,
                          Py_ssize_t n):
    """All-pairs longest path weights of a weighted DAG.

    Edges are given as parallel (src, dst, wgt) arrays sorted by
    topological position of the source node, so a single in-order sweep
    per source is a complete longest-path DP. Returns an (n, n) matrix
    with -inf for unreachable pairs and 0 on the diagonal.
    """
    cdef Py_ssize_t m = src.shape[0]
    out_arr = np.full((n, n), -INFINITY)
    cdef double[:, ::1] dist = out_arr
    cdef Py_ssize_t s_idx, e, u, v
    cdef double cand
    for s_idx in range(n):
        dist[s_idx, s_idx] = 0.0
        with nogil:
            for e in range(m):
                u = src[e]
                if dist[s_idx, u] == -INFINITY:
                    continue
                v = dst[e]
                cand = dist[s_idx, u] + wgt[e]
                if cand > dist[s_idx, v]:
                    dist[s_idx, v] = cand
    return out_arr
