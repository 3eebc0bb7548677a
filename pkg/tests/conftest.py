"""Shared draw helpers for the randomized suites.

Draw ranges are deliberate: static (algebra/identity) tests sample
couplings broadly, while anything that runs the diagonalization solver
over long horizons starts from a relaxed potential minimum with small
momenta, keeping every coordinate below the double-precision validity
range of the e^{+-2q} spectrum (|q| <~ 8).
"""

import numpy as np
import pytest

from bcsuth import ModelParams, PhasePoint, random_chamber_point, relax_to_minimum


def draw_params(rng, n=None, m=None):
    """Broad random couplings for static identities (no dynamics)."""
    if n is None:
        n = int(rng.integers(2, 7))
    if m is None:
        m = int(rng.integers(1, n))
    kappa = float(rng.uniform(0.4, 2.0))
    while True:
        x = float(rng.uniform(-2.5, 2.5))
        y = float(rng.uniform(-2.5, 2.5))
        if abs(x * x - y * y) > 0.05:
            return ModelParams(n, m, kappa, x, y)


def draw_phase(rng, params, margin=0.15, spread=0.6, p_scale=0.5):
    return random_chamber_point(rng, params, margin=margin, spread=spread, p_scale=p_scale)


def draw_bounded_system(rng, n, m, p_scale=0.2):
    """Attractive-regime params plus a phase point near a potential
    minimum; trajectories stay bounded over the tested horizons."""
    kappa = float(rng.uniform(0.35, 0.6))
    x = float(rng.uniform(0.6, 0.95))
    y = float(rng.uniform(0.2, x - 0.3))
    params = ModelParams(n, m, kappa, x, y)
    seed_point = random_chamber_point(rng, params, margin=0.25, spread=0.4, p_scale=0.0)
    q_min = relax_to_minimum(params, seed_point.q)
    return params, PhasePoint(q=q_min, p=rng.normal(0.0, p_scale, size=n))


def random_algebra_element(rng, n, scale=1.0):
    """Random element of the split-signature algebra (form + traceless)."""
    dim = 2 * n
    raw = scale * (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    q = np.zeros((dim, dim), dtype=complex)
    q[:n, n:] = np.eye(n)
    q[n:, :n] = np.eye(n)
    v = 0.5 * (raw - q @ raw.conj().T @ q)
    return v - (np.trace(v) / dim) * np.eye(dim)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
