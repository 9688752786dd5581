# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Typed-loop transport kernel, the compiled twin of _transport_np.

Same interface scheme, same slotwise sweeps; single pass over the
interfaces with O(M) scratch per interface.
"""

from libc.math cimport fabs, sqrt

import numpy as np


def transport_step(W, double dx, double dt, double cmax, bint periodic):
    """Advance cell states W (n_cells, M+1) by one transport step."""
    W_arr = np.array(W, dtype=np.float64, order="C")
    cdef double[:, ::1] Wv = W_arr
    cdef Py_ssize_t n = Wv.shape[0]
    cdef Py_ssize_t m1 = Wv.shape[1]
    cdef Py_ssize_t M = m1 - 1

    ext_arr = np.empty((n + 2, m1))
    out_arr = W_arr.copy()
    flux_arr = np.empty(n + 1)
    wb_arr = np.empty(m1)
    dw_arr = np.empty(m1)
    v_arr = np.empty(m1)
    t_arr = np.empty(m1)
    s_arr = np.empty(m1)
    cdef double[:, ::1] ext = ext_arr
    cdef double[:, ::1] out = out_arr
    cdef double[::1] flux = flux_arr
    cdef double[::1] wb = wb_arr
    cdef double[::1] dw = dw_arr
    cdef double[::1] v = v_arr
    cdef double[::1] t = t_arr
    cdef double[::1] s = s_arr

    cdef Py_ssize_t i, j, a
    for i in range(n):
        for a in range(m1):
            ext[i + 1, a] = Wv[i, a]
    for a in range(m1):
        if periodic:
            ext[0, a] = Wv[n - 1, a]
            ext[n + 1, a] = Wv[0, a]
        else:
            ext[0, a] = Wv[0, a]
            ext[n + 1, a] = Wv[n - 1, a]

    cdef double r = dt / dx
    cdef double rho_b, u_b, th_b, acc, s_left, s_right, a_if
    for j in range(n + 1):
        for a in range(m1):
            wb[a] = 0.5 * (ext[j, a] + ext[j + 1, a])
            dw[a] = ext[j + 1, a] - ext[j, a]
        rho_b = wb[0]
        u_b = wb[1]
        th_b = wb[2]

        v[0] = dw[0]
        v[1] = rho_b * dw[1]
        v[2] = 0.5 * rho_b * dw[2]
        v[3] = dw[3]
        for a in range(4, m1):
            v[a] = dw[a] + wb[a - 1] * dw[1]
            if a >= 5:
                v[a] += 0.5 * wb[a - 2] * dw[2]

        for a in range(m1):
            acc = u_b * v[a]
            if a >= 1:
                acc += th_b * v[a - 1]
            if a < M:
                acc += (a + 1) * v[a + 1]
            t[a] = acc

        s[0] = t[0]
        s[1] = t[1] / rho_b
        s[2] = 2.0 * t[2] / rho_b
        s[3] = t[3]
        for a in range(4, m1):
            s[a] = t[a] - wb[a - 1] * s[1]
            if a >= 5:
                s[a] -= 0.5 * wb[a - 2] * s[2]

        s_left = fabs(ext[j, 1]) + cmax * sqrt(ext[j, 2])
        s_right = fabs(ext[j + 1, 1]) + cmax * sqrt(ext[j + 1, 2])
        a_if = s_left if s_left > s_right else s_right

        if j < n:
            for a in range(m1):
                out[j, a] -= r * 0.5 * (s[a] + a_if * dw[a])
        if j > 0:
            for a in range(m1):
                out[j - 1, a] -= r * 0.5 * (s[a] - a_if * dw[a])
        flux[j] = 0.5 * (ext[j, 0] * ext[j, 1] + ext[j + 1, 0] * ext[j + 1, 1]) \
            - 0.5 * a_if * dw[0]

    for i in range(n):
        out[i, 0] = Wv[i, 0] - r * (flux[i + 1] - flux[i])
    return out_arr
