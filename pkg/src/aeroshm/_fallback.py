"""Pure-numpy implementations of the hot kernels.

These mirror aeroshm._speedups exactly; aeroshm.kernels picks whichever is
available at import time. Keep the algorithms in the two files in lockstep.
"""

import numpy as np

BACKEND = "python"


def rk4_lti(A, forcing, steps_per_event, dt, x0):
    """Integrate x' = A x + b_e with classic RK4 at fixed step dt.

    Parameters
    ----------
    A : (n, n) ndarray
        Continuous-time state matrix.
    forcing : (E, n) ndarray
        Constant forcing vector b_e = B u_e for each event e.
    steps_per_event : (E,) int ndarray
        Number of dt steps to hold each event's forcing.
    dt : float
        Step size in seconds.
    x0 : (n,) ndarray
        Initial state.

    Returns
    -------
    (T, n) ndarray with T = sum(steps_per_event); row k is the state after
    step k+1, i.e. at time (k+1) * dt.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    forcing = np.atleast_2d(np.asarray(forcing, dtype=np.float64))
    steps_per_event = np.asarray(steps_per_event, dtype=np.int64)
    x = np.array(x0, dtype=np.float64, copy=True)

    total = int(steps_per_event.sum())
    out = np.empty((total, A.shape[0]))
    row = 0
    for e in range(len(steps_per_event)):
        b = forcing[e]
        for _ in range(int(steps_per_event[e])):
            k1 = A @ x + b
            k2 = A @ (x + 0.5 * dt * k1) + b
            k3 = A @ (x + 0.5 * dt * k2) + b
            k4 = A @ (x + dt * k3) + b
            x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            out[row] = x
            row += 1
    return out


def smo_solve(K, upper, tol, max_steps):
    """Solve min 0.5 a'Ka  s.t.  0 <= a_i <= upper, sum(a) = 1 by pairwise SMO.

    Pair selection is second order: i is the steepest feasible descent
    coordinate, j the feasible ascent coordinate with the largest predicted
    objective decrease (g_j - g_i)^2 / eta_ij. Returns (alpha, gap, steps)
    where gap is the final KKT violation max(g_shrinkable) - min(g_growable).
    """
    K = np.asarray(K, dtype=np.float64)
    m = K.shape[0]

    # Feasible start: fill 1/upper-sized boxes until the simplex budget is spent.
    alpha = np.zeros(m)
    n_full = int(np.floor(1.0 / upper))
    alpha[:n_full] = upper
    if n_full < m:
        alpha[n_full] = 1.0 - n_full * upper

    grad = K @ alpha
    diag = np.diag(K).copy()
    steps = 0
    gap = np.inf
    while steps < max_steps:
        can_grow = alpha < upper - 1e-15
        can_shrink = alpha > 1e-15
        i = int(np.argmin(np.where(can_grow, grad, np.inf)))
        gap = float(np.max(np.where(can_shrink, grad, -np.inf)) - grad[i])
        if gap <= tol:
            break
        diff = grad - grad[i]
        eta = np.maximum(diag + diag[i] - 2.0 * K[:, i], 1e-12)
        gain = np.where(can_shrink & (diff > 0.0), diff * diff / eta, -np.inf)
        j = int(np.argmax(gain))
        denom = diag[i] + diag[j] - 2.0 * K[i, j]
        if denom <= 1e-300:
            t = min(upper - alpha[i], alpha[j])
        else:
            t = min((grad[j] - grad[i]) / denom, upper - alpha[i], alpha[j])
        alpha[i] += t
        alpha[j] -= t
        grad += t * (K[:, i] - K[:, j])
        steps += 1
    return alpha, float(gap), steps
