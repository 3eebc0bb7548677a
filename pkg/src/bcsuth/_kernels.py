"""Compiled inner loops for the potential gradient and the leapfrog
integrator.

The scalar hyperbolic helpers clamp |argument| > 40: those contributions
sit below 1e-33 and vanish from the force anyway, and the clamp keeps
cosh/sinh quotients from overflowing to inf/inf = nan for far-separated
configurations.
"""

import math

import numpy as np
from numba import njit

# A potential term larger than this flags a near-singular configuration.
POTENTIAL_GUARD = 1e14

_CLAMP = 40.0


@njit(cache=True)
def _csch2(a):
    if abs(a) > _CLAMP:
        return 0.0
    s = math.sinh(a)
    return 1.0 / (s * s)


@njit(cache=True)
def _dcsch2(a):
    # d/da [1/sinh^2 a]
    if abs(a) > _CLAMP:
        return 0.0
    s = math.sinh(a)
    return -2.0 * math.cosh(a) / (s * s * s)


@njit(cache=True)
def _dsech2(a):
    # d/da [1/cosh^2 a]
    if abs(a) > _CLAMP:
        return 0.0
    c = math.cosh(a)
    return -2.0 * math.tanh(a) / (c * c)


@njit(cache=True)
def grad_q(q, m, kappa, x, y):
    """Position gradient of the potential, plus a singularity flag."""
    n = q.shape[0]
    g = np.zeros(n)
    k2 = kappa * kappa
    w2 = (x - y) * (x - y)
    singular = False
    for j in range(n):
        for k in range(j + 1, n):
            d = q[j] - q[k]
            s = q[j] + q[k]
            if k < m or j >= m:
                # same species: repulsive +kappa^2/sinh^2 pairs
                if k2 * _csch2(d) > POTENTIAL_GUARD or k2 * _csch2(s) > POTENTIAL_GUARD:
                    singular = True
                td = k2 * _dcsch2(d)
                ts = k2 * _dcsch2(s)
                g[j] += td + ts
                g[k] += -td + ts
            else:
                # cross species: attractive -kappa^2/cosh^2 pairs
                td = -k2 * _dsech2(d)
                ts = -k2 * _dsech2(s)
                g[j] += td + ts
                g[k] += -td + ts
    for j in range(n):
        if 0.5 * w2 * _csch2(2.0 * q[j]) > POTENTIAL_GUARD:
            singular = True
        g[j] += w2 * _dcsch2(2.0 * q[j])
        if j < m:
            if 0.5 * abs(x * y) * _csch2(q[j]) > POTENTIAL_GUARD:
                singular = True
            g[j] += 0.5 * x * y * _dcsch2(q[j])
        else:
            g[j] += -0.5 * x * y * _dsech2(q[j])
    return g, singular


@njit(cache=True)
def verlet_run(q0, p0, m, kappa, x, y, dt, nsamples, sample_every):
    """Fixed-step leapfrog with force reuse across the half-kicks.

    Records a sample every ``sample_every`` steps.  Returns
    (qs, ps, fail_sample, fail_step): fail_sample is -1 on success,
    otherwise the index of the sample interval in which the singularity
    guard tripped, with fail_step the 1-based microstep inside it.
    """
    n = q0.shape[0]
    qs = np.zeros((nsamples, n))
    ps = np.zeros((nsamples, n))
    q = q0.copy()
    p = p0.copy()
    qs[0] = q
    ps[0] = p
    g, singular = grad_q(q, m, kappa, x, y)
    if singular:
        return qs, ps, 0, 0
    for i in range(1, nsamples):
        for s in range(sample_every):
            for l in range(n):
                p[l] = p[l] - 0.5 * dt * g[l]
            for l in range(n):
                q[l] = q[l] + dt * p[l]
            g, singular = grad_q(q, m, kappa, x, y)
            if singular:
                return qs, ps, i, s + 1
            for l in range(n):
                p[l] = p[l] - 0.5 * dt * g[l]
        qs[i] = q
        ps[i] = p
    return qs, ps, -1, 0
