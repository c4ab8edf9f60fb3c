# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: RK4 integration of LTI systems and the SMO dual solver.

Mirrors aeroshm._fallback; keep both implementations in lockstep.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def rk4_lti(A, forcing, steps_per_event, double dt, x0):
    """See aeroshm._fallback.rk4_lti."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A_ = np.ascontiguousarray(A, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] F_ = np.ascontiguousarray(np.atleast_2d(forcing), dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] S_ = np.ascontiguousarray(steps_per_event, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.array(x0, dtype=np.float64, copy=True)

    cdef Py_ssize_t n = A_.shape[0]
    cdef Py_ssize_t n_events = S_.shape[0]
    cdef Py_ssize_t total = 0
    cdef Py_ssize_t e, s, i, j, row
    for e in range(n_events):
        total += S_[e]

    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((total, n))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] k1 = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] k2 = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] k3 = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] k4 = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tmp = np.empty(n)
    cdef double acc, h6 = dt / 6.0

    row = 0
    for e in range(n_events):
        for s in range(S_[e]):
            for i in range(n):
                acc = F_[e, i]
                for j in range(n):
                    acc += A_[i, j] * x[j]
                k1[i] = acc
            for i in range(n):
                tmp[i] = x[i] + 0.5 * dt * k1[i]
            for i in range(n):
                acc = F_[e, i]
                for j in range(n):
                    acc += A_[i, j] * tmp[j]
                k2[i] = acc
            for i in range(n):
                tmp[i] = x[i] + 0.5 * dt * k2[i]
            for i in range(n):
                acc = F_[e, i]
                for j in range(n):
                    acc += A_[i, j] * tmp[j]
                k3[i] = acc
            for i in range(n):
                tmp[i] = x[i] + dt * k3[i]
            for i in range(n):
                acc = F_[e, i]
                for j in range(n):
                    acc += A_[i, j] * tmp[j]
                k4[i] = acc
            for i in range(n):
                x[i] = x[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                out[row, i] = x[i]
            row += 1
    return out


def smo_solve(K, double upper, double tol, long max_steps):
    """See aeroshm._fallback.smo_solve."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] K_ = np.ascontiguousarray(K, dtype=np.float64)
    cdef Py_ssize_t m = K_.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] alpha = np.zeros(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad

    cdef Py_ssize_t n_full = <Py_ssize_t>(1.0 / upper)
    cdef Py_ssize_t k
    for k in range(min(n_full, m)):
        alpha[k] = upper
    if n_full < m:
        alpha[n_full] = 1.0 - n_full * upper

    grad = K_ @ alpha

    cdef Py_ssize_t steps = 0, i, j, idx
    cdef double gap = np.inf
    cdef double gmin, gmax, denom, t, diff, eta, gain, best_gain
    while steps < max_steps:
        gmin = np.inf
        gmax = -np.inf
        i = -1
        for idx in range(m):
            if alpha[idx] < upper - 1e-15 and grad[idx] < gmin:
                gmin = grad[idx]
                i = idx
            if alpha[idx] > 1e-15 and grad[idx] > gmax:
                gmax = grad[idx]
        gap = gmax - gmin
        if gap <= tol:
            break
        # second-order choice of the partner coordinate
        j = -1
        best_gain = -np.inf
        for idx in range(m):
            if alpha[idx] > 1e-15:
                diff = grad[idx] - gmin
                if diff > 0.0:
                    eta = K_[idx, idx] + K_[i, i] - 2.0 * K_[idx, i]
                    if eta < 1e-12:
                        eta = 1e-12
                    gain = diff * diff / eta
                    if gain > best_gain:
                        best_gain = gain
                        j = idx
        denom = K_[i, i] + K_[j, j] - 2.0 * K_[i, j]
        if denom <= 1e-300:
            t = upper - alpha[i]
            if alpha[j] < t:
                t = alpha[j]
        else:
            t = (grad[j] - grad[i]) / denom
            if upper - alpha[i] < t:
                t = upper - alpha[i]
            if alpha[j] < t:
                t = alpha[j]
        alpha[i] += t
        alpha[j] -= t
        for idx in range(m):
            grad[idx] += t * (K_[idx, i] - K_[idx, j])
        steps += 1
    return np.asarray(alpha), float(gap), int(steps)
