"""The two-species hyperbolic Sutherland model on the half-line.

An instance is three couplings (kappa, x, y) and a split of n particles
into m of species one and n - m of species two.  Same-species pairs
repel through 1/sinh^2 of both the difference and the sum of
coordinates, cross-species pairs attract through -1/cosh^2, and every
particle feels the one-body 1/sinh^2(2q), 1/sinh^2(q) (species one) and
-1/cosh^2(q) (species two) terms weighted by the x, y couplings.

The same data builds a 2n x 2n Lax matrix J(q, p) in su(n,n) whose even
power traces H_k = tr(J^2k)/(4k) Poisson-commute; H_1 reproduces the
Hamiltonian, which is where the integrability machinery of the dynamics
module hangs.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import POTENTIAL_GUARD, grad_q
from .errors import SingularConfiguration
from .structure import (
    build_structure,
    first_chamber_violation,
    in_weyl_chamber,
    is_regular,
    theta,
    u_kappa,
    xi,
)

COUPLING_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Discrete and coupling data of one model instance.

    Requires kappa > 0 and |x^2 - y^2| above a small threshold; the
    latter is what makes the one-body sector non-degenerate.  xy > 0 is
    the attractive regime (flagged, not enforced).
    """

    n: int
    m: int
    kappa: float
    x: float
    y: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not isinstance(self.m, (int, np.integer)) or not 1 <= self.m < self.n:
            raise ValueError(f"need 1 <= m < n, got m={self.m}, n={self.n}")
        for name in ("kappa", "x", "y"):
            val = getattr(self, name)
            if not np.isfinite(val):
                raise ValueError(f"coupling {name} must be finite, got {val}")
        if not self.kappa > 0:
            raise ValueError(f"coupling kappa must be positive, got {self.kappa}")
        if abs(self.x**2 - self.y**2) <= COUPLING_TOL:
            raise ValueError(
                "couplings violate x² ≠ y²: "
                f"|x² - y²| = {abs(self.x**2 - self.y**2):.3e}"
            )

    @property
    def attractive(self):
        """True when xy > 0 (opposite charges attract, origin repels)."""
        return self.x * self.y > 0


@dataclass(frozen=True)
class PhasePoint:
    """Positions q and momenta p, both real n-vectors.

    Construction only checks shape and finiteness; the dynamical entry
    points additionally require q regular and inside the open chamber.
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        p = np.asarray(self.p, dtype=np.float64)
        if q.ndim != 1 or p.shape != q.shape:
            raise ValueError(f"q and p must be 1-d vectors of equal length, got {q.shape} and {p.shape}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("phase point has non-finite entries")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class LaxMatrix:
    """The Lax matrix J and its Hermitian part L (the theta-odd piece)."""

    J: np.ndarray
    L: np.ndarray


@dataclass(frozen=True)
class ConstraintReport:
    """Frobenius residuals of the two moment-map constraint blocks."""

    residual_plus: float
    residual_gplus: float


def _require_valid(params, phi):
    q = phi.q
    if q.shape[0] != params.n:
        raise ValueError(f"phase point has {q.shape[0]} coordinates, model has n={params.n}")
    if not is_regular(q, params.m):
        raise ValueError("configuration is not regular (coincident or zero coordinates)")
    violation = first_chamber_violation(q, params.m)
    if violation is not None:
        raise ValueError(f"q is not in the open Weyl chamber: {violation}")


def _guard_singular(params, q):
    """Reject configurations whose guarded potential terms exceed 1e14."""
    with np.errstate(over="ignore"):
        csch2 = lambda a: 1.0 / np.sinh(a) ** 2  # noqa: E731
        m, n = params.m, params.n
        k2 = params.kappa**2
        terms = []
        for lo, hi in ((0, m), (m, n)):
            for j in range(lo, hi):
                for k in range(j + 1, hi):
                    terms.append(k2 * csch2(q[j] - q[k]))
                    terms.append(k2 * csch2(q[j] + q[k]))
        terms.extend(0.5 * (params.x - params.y) ** 2 * csch2(2.0 * q))
        terms.extend(0.5 * abs(params.x * params.y) * csch2(q[:m]))
    if np.any(np.asarray(terms) > POTENTIAL_GUARD):
        raise SingularConfiguration(
            "potential term exceeds the singularity guard (near-collision)"
        )


def hamiltonian(params, phi):
    """Total energy: kinetic term plus the pair and one-body potentials."""
    _require_valid(params, phi)
    _guard_singular(params, phi.q)
    q, p = phi.q, phi.p
    n, m = params.n, params.m
    k2 = params.kappa**2
    x, y = params.x, params.y

    h = 0.5 * float(p @ p)
    sinh2 = lambda a: np.sinh(a) ** 2  # noqa: E731
    cosh2 = lambda a: np.cosh(a) ** 2  # noqa: E731
    # cross-species attraction
    for j in range(m):
        for k in range(m, n):
            h -= k2 / cosh2(q[j] - q[k]) + k2 / cosh2(q[j] + q[k])
    # same-species repulsion
    for lo, hi in ((0, m), (m, n)):
        for j in range(lo, hi):
            for k in range(j + 1, hi):
                h += k2 / sinh2(q[j] - q[k]) + k2 / sinh2(q[j] + q[k])
    h += 0.5 * (x - y) ** 2 * float(np.sum(1.0 / sinh2(2.0 * q)))
    h += 0.5 * x * y * float(np.sum(1.0 / sinh2(q[:m])))
    h -= 0.5 * x * y * float(np.sum(1.0 / cosh2(q[m:])))
    return h


def grad_q_hamiltonian(params, phi):
    """Analytic position gradient of the Hamiltonian (momentum-free)."""
    _require_valid(params, phi)
    g, singular = grad_q(
        np.ascontiguousarray(phi.q),
        params.m,
        float(params.kappa),
        float(params.x),
        float(params.y),
    )
    if singular:
        raise SingularConfiguration(
            "potential term exceeds the singularity guard (near-collision)"
        )
    return g


def build_lax(params, phi):
    """Assemble the Lax matrix J(q, p) = -x Cl - xi(u_kappa) + L(q, p).

    L is Hermitian-sector data: diagonal (p, -p); same-species pairs get
    -i kappa coth of the coordinate difference/sum, cross-species pairs
    -i kappa tanh; the block-skew diagonal carries the one-body
    -+ i y/sinh(2q) - i x coth(2q) entries with the species sign.  All
    mirror entries are assigned from the same scalar, never recomputed.
    """
    _require_valid(params, phi)
    _guard_singular(params, phi.q)
    n, m = params.n, params.m
    q, p = phi.q, phi.p
    kappa, x, y = params.kappa, params.x, params.y
    struct = build_structure(n, m)

    coth = lambda a: 1.0 / np.tanh(a)  # noqa: E731
    csch = lambda a: 1.0 / np.sinh(a)  # noqa: E731

    L = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    for l in range(n):
        L[l, l] = p[l]
        L[l + n, l + n] = -p[l]
    for j in range(n):
        for k in range(j + 1, n):
            same = k < m or j >= m
            f = coth if same else np.tanh
            a = -1j * kappa * f(q[j] - q[k])
            b = -1j * kappa * f(q[j] + q[k])
            L[j, k] = a
            L[k, j] = -a
            L[j + n, k + n] = -a
            L[k + n, j + n] = a
            L[j, k + n] = b
            L[k, j + n] = b
            L[j + n, k] = -b
            L[k + n, j] = -b
    for l in range(n):
        sign = -1.0 if l < m else 1.0
        e = sign * 1j * y * csch(2.0 * q[l]) - 1j * x * coth(2.0 * q[l])
        L[l, l + n] = e
        L[l + n, l] = -e

    J = -x * struct.Cl - xi(u_kappa(kappa, n)) + L
    return LaxMatrix(J=J, L=L)


def _trace_real(t, what, tol=1e-10):
    if abs(t.imag) > tol * max(1.0, abs(t.real)):
        raise RuntimeError(
            f"{what} has imaginary part {t.imag:.3e}; the Lax construction is broken"
        )
    return t.real


def reduced_hamiltonian(params, phi, k):
    """Commuting charge H_k = tr(J^2k) / (4k), computed by binary
    powering of J^2.  The trace must come out real."""
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= params.n:
        raise ValueError(f"flow index must satisfy 1 <= k <= n, got {k}")
    J = build_lax(params, phi).J
    power = np.linalg.matrix_power(J @ J, int(k))
    t = complex(np.trace(power))
    return _trace_real(t, f"tr(J^{2 * k})") / (4.0 * k)


def reduced_hamiltonians(params, phi):
    """All charges H_1..H_n from a single Lax build (shared J^2 powers)."""
    J = build_lax(params, phi).J
    J2 = J @ J
    out = np.empty(params.n)
    power = np.eye(2 * params.n, dtype=np.complex128)
    for k in range(1, params.n + 1):
        power = power @ J2
        t = complex(np.trace(power))
        out[k - 1] = _trace_real(t, f"tr(J^{2 * k})") / (4.0 * k)
    return out


def _constraint_residuals(params, J):
    """Frobenius residuals of the two constraint blocks for a given J."""
    n = params.n
    struct = build_structure(n, params.m)
    zeta = params.x * struct.Cl + xi(u_kappa(params.kappa, n))
    residual_plus = float(np.linalg.norm(0.5 * (J + theta(J)) + zeta))
    return residual_plus, struct


def _gplus_residual(params, phi, J, struct):
    lam = np.concatenate([phi.q, -phi.q])
    conj = np.exp(-lam)[:, None] * J * np.exp(lam)[None, :]
    proj = 0.5 * (conj + struct.gamma(conj))
    return float(np.linalg.norm(proj - params.y * struct.Cr))


def verify_constraints(params, phi):
    """Residuals of the moment-map constraints at the gauge slice.

    The theta-even part of J must cancel x Cl + xi(u_kappa) exactly, and
    the gamma-even part of e^{-q} J e^{q} must equal y Cr.  Both vanish
    (to roundoff) when J comes out of build_lax with matching couplings;
    a large residual is diagnostic data, not an exception.
    """
    _require_valid(params, phi)
    J = build_lax(params, phi).J
    residual_plus, struct = _constraint_residuals(params, J)
    residual_gplus = _gplus_residual(params, phi, J, struct)
    return ConstraintReport(residual_plus=residual_plus, residual_gplus=residual_gplus)


def relax_to_minimum(params, q0, steps=6000, lr=2e-3):
    """Crude gradient descent toward a local potential minimum.

    Good enough to seed bounded trajectories; not a high-accuracy
    optimizer.  Returns the relaxed coordinates (still in the chamber;
    the repulsive walls keep descent paths away from the boundary).
    """
    q = np.array(q0, dtype=np.float64)
    for _ in range(steps):
        g, singular = grad_q(q, params.m, float(params.kappa), float(params.x), float(params.y))
        if singular:
            raise SingularConfiguration("descent walked into the singularity guard")
        q -= lr * g
    violation = first_chamber_violation(q, params.m)
    if violation is not None:
        raise ValueError(f"relaxed point left the chamber: {violation}")
    return q


def random_chamber_point(rng, params, margin=0.15, spread=0.6, p_scale=0.5):
    """Draw a phase point inside the open chamber.

    Within each species the coordinate gaps (and the distance of the
    smallest coordinate from zero) are uniform in [margin, margin +
    spread], so the point keeps distance >= margin from every chamber
    wall; momenta are centred normals with scale ``p_scale``.
    """
    n, m = params.n, params.m
    q = np.empty(n)
    for lo, hi in ((0, m), (m, n)):
        count = hi - lo
        gaps = rng.uniform(margin, margin + spread, size=count)
        q[lo:hi] = np.cumsum(gaps)[::-1]
    p = rng.normal(0.0, p_scale, size=n)
    return PhasePoint(q=q, p=p)
