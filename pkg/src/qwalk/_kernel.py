"""Compiled inner loops for likelihood evaluation and Metropolis annealing."""

import numpy as np
from numba import njit

COUNT_FLOOR = 0.5
P_STEP = 0.05
ANGLE_STEP = 0.1


@njit(cache=True)
def likelihood_kernel(p, phi, theta, delta, direct, shifted, shots):
    n = p.shape[0]
    a_h = np.empty(n, dtype=np.complex128)
    a_v = np.empty(n, dtype=np.complex128)
    for i in range(n):
        c = p[i] * np.exp(-1j * phi[i])
        a_h[i] = c * np.cos(theta[i] / 2)
        a_v[i] = c * np.exp(1j * delta[i]) * np.sin(theta[i] / 2)
    total = 0.0
    for i in range(n):
        qh = abs(a_h[i]) ** 2
        qv = abs(a_v[i]) ** 2
        qr = abs(a_h[i] + 1j * a_v[i]) ** 2 / 2
        qd = abs(a_h[i] + a_v[i]) ** 2 / 2
        for b, q in enumerate((qh, qv, qr, qd)):
            m = shots * q
            den = m if m > COUNT_FLOOR else COUNT_FLOOR
            total += (m - direct[i, b]) ** 2 / (2 * den)
    for i in range(n - 1):
        bh = a_h[i + 1]
        bv = a_v[i]
        qh = abs(bh) ** 2
        qv = abs(bv) ** 2
        qr = abs(bh + 1j * bv) ** 2 / 2
        qd = abs(bh + bv) ** 2 / 2
        for b, q in enumerate((qh, qv, qr, qd)):
            m = shots * q
            den = m if m > COUNT_FLOOR else COUNT_FLOOR
            total += (m - shifted[i, b]) ** 2 / (2 * den)
    return total


@njit(cache=True)
def anneal_kernel(p0, phi0, theta0, delta0, direct, shifted, shots, t0, alpha, iterations, seed):
    np.random.seed(seed)
    n = p0.shape[0]
    p = p0.copy()
    phi = phi0.copy()
    theta = theta0.copy()
    delta = delta0.copy()
    cur = likelihood_kernel(p, phi, theta, delta, direct, shifted, shots)
    best = cur
    bp, bphi, bth, bde = p.copy(), phi.copy(), theta.copy(), delta.copy()
    temp = t0
    nfree = 4 * n - 1  # p has a redundant norm dof handled by renormalisation
    for _ in range(iterations):
        j = np.random.randint(nfree)
        if j < n:
            saved = p.copy()
            p[j] += P_STEP * np.random.normal()
            norm = np.sqrt((p**2).sum())
            if norm < 1e-12:
                p = saved
                continue
            p /= norm
            new = likelihood_kernel(p, phi, theta, delta, direct, shifted, shots)
            accept = new <= cur or (temp > 0 and np.random.random() < np.exp((cur - new) / temp))
            if accept:
                cur = new
            else:
                p = saved
        else:
            jj = j - n
            if jj < n - 1:
                arr, idx = phi, jj + 1  # phi[0] is gauge-fixed
            elif jj < 2 * n - 1:
                arr, idx = theta, jj - (n - 1)
            else:
                arr, idx = delta, jj - (2 * n - 1)
            saved_v = arr[idx]
            arr[idx] += ANGLE_STEP * np.random.normal()
            new = likelihood_kernel(p, phi, theta, delta, direct, shifted, shots)
            accept = new <= cur or (temp > 0 and np.random.random() < np.exp((cur - new) / temp))
            if accept:
                cur = new
            else:
                arr[idx] = saved_v
        if cur < best:
            best = cur
            bp, bphi, bth, bde = p.copy(), phi.copy(), theta.copy(), delta.copy()
        temp *= alpha
    return bp, bphi, bth, bde, best
