"""Split-signature su(n,n) scaffolding.

The model lives inside the real Lie algebra

    su(n,n) = { V in sl(2n,C) : V^dagger Q + Q V = 0 },

where Q swaps the two n-blocks.  Two commuting involutions act on it:
the compact one theta(V) = -V^dagger and gamma(V) = -Dm V^dagger Dm,
built from the species-sign matrix Dm.  Their simultaneous eigenspaces
give a four-fold orthogonal split of the algebra; the diagonal Cartan
subspace diag(q, -q) sits in the (-,-) piece.

Index convention everywhere: the 2n slots split into two n-blocks, and
within a block the first m coordinates are species one, the remaining
n - m species two.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import as_matrix

_LABELS = ("++", "+-", "-+", "--")


def _parse_label(label):
    if label not in _LABELS:
        raise ValueError(f"subspace label must be one of {_LABELS}, got {label!r}")
    s = 1.0 if label[0] == "+" else -1.0
    r = 1.0 if label[1] == "+" else -1.0
    return s, r


def theta(v):
    """Compact involution on the algebra, V -> -V^dagger."""
    v = as_matrix(v)
    return -v.conj().T


@dataclass(frozen=True)
class AlgebraMembership:
    ok: bool
    form_residual: float
    trace_residual: float

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class GroupMembership:
    ok: bool
    form_residual: float
    det_residual: float

    def __bool__(self):
        return self.ok


def _q_form(dim2):
    if dim2 % 2 != 0:
        raise ValueError(f"matrix dimension must be even, got {dim2}")
    n = dim2 // 2
    q = np.zeros((dim2, dim2), dtype=np.complex128)
    q[:n, n:] = np.eye(n)
    q[n:, :n] = np.eye(n)
    return q


def is_in_algebra(v, tol=1e-10):
    """Membership test for su(n,n), with residuals.

    True iff ||V^dagger Q + Q V||_F and |tr V| both stay below
    tol * max(1, ||V||_F).
    """
    v = as_matrix(v)
    q = _q_form(v.shape[0])
    scale = max(1.0, float(np.linalg.norm(v)))
    form = float(np.linalg.norm(v.conj().T @ q + q @ v))
    trace = abs(complex(np.trace(v)))
    ok = form <= tol * scale and trace <= tol * scale
    return AlgebraMembership(ok=ok, form_residual=form, trace_residual=trace)


def is_in_group(g, tol=1e-10):
    """Membership test for SU(n,n), with residuals.

    True iff ||g^dagger Q g - Q||_F <= tol and |det g - 1| <= tol.
    """
    g = as_matrix(g)
    q = _q_form(g.shape[0])
    form = float(np.linalg.norm(g.conj().T @ q @ g - q))
    det = abs(complex(np.linalg.det(g)) - 1.0)
    ok = form <= tol and det <= tol
    return GroupMembership(ok=ok, form_residual=form, det_residual=det)


def scalar_product(v, w, tol=1e-10):
    """Invariant pairing (1/2) Re tr(V W).

    The trace is real for the algebra elements (and Hermitian/anti-
    Hermitian combinations) this package pairs; an imaginary part above
    tol * max(1, |tr|) signals misuse and raises.
    """
    v = as_matrix(v)
    w = as_matrix(w)
    if v.shape != w.shape:
        raise ValueError(f"dimension mismatch: {v.shape} vs {w.shape}")
    t = complex(np.trace(v @ w))
    if abs(t.imag) > tol * max(1.0, abs(t)):
        raise ValueError(f"trace picked up an imaginary part: {t.imag:.3e}")
    return 0.5 * t.real


def embed_cartan(q):
    """Embed a real n-vector as the Cartan element diag(q, -q)."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 1:
        raise ValueError("expected a 1-d coordinate vector")
    if not np.all(np.isfinite(q)):
        raise ValueError("coordinates must be finite")
    return np.diag(np.concatenate([q, -q])).astype(np.complex128)


def is_regular(q, m, tol=1e-12):
    """Regularity of a Cartan point: nonzero coordinates, and no
    same-species pair with q_j = +-q_k.  Cross-species coincidences are
    allowed."""
    q = np.asarray(q, dtype=np.float64)
    n = q.shape[0]
    if np.any(np.abs(q) <= tol):
        return False
    for lo, hi in ((0, m), (m, n)):
        for j in range(lo, hi):
            for k in range(j + 1, hi):
                if abs(q[j] - q[k]) <= tol or abs(q[j] + q[k]) <= tol:
                    return False
    return True


def in_weyl_chamber(q, m, tol=1e-12):
    """Open Weyl chamber: q_1 > ... > q_m > 0 and q_{m+1} > ... > q_n > 0,
    all inequalities strict with margin ``tol``."""
    return first_chamber_violation(q, m, tol=tol) is None


def first_chamber_violation(q, m, tol=1e-12):
    """Return a human-readable description of the first chamber violation,
    or None if q lies in the open chamber.  Indices in messages are 1-based."""
    q = np.asarray(q, dtype=np.float64)
    n = q.shape[0]
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    for lo, hi in ((0, m), (m, n)):
        for j in range(lo, hi - 1):
            if not q[j] - q[j + 1] > tol:
                return f"q{j + 1} <= q{j + 2} ({q[j]:.6g} <= {q[j + 1]:.6g})"
        if not q[hi - 1] > tol:
            return f"q{hi} <= 0 ({q[hi - 1]:.6g})"
    return None


def xi(u):
    """Rank-one orbit point built from a nonzero complex n-vector.

    Forms X(u) = i (u u^dagger - (u^dagger u / n) 1) and tiles X(u)/2
    into all four blocks.  The result is traceless and theta-fixed.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 1 or u.shape[0] < 1:
        raise ValueError("expected a nonempty 1-d vector")
    nrm2 = float(np.vdot(u, u).real)
    if nrm2 == 0.0:
        raise ValueError("orbit vector must be nonzero")
    n = u.shape[0]
    x = 1j * (np.outer(u, u.conj()) - (nrm2 / n) * np.eye(n))
    out = np.empty((2 * n, 2 * n), dtype=np.complex128)
    half = 0.5 * x
    out[:n, :n] = half
    out[:n, n:] = half
    out[n:, :n] = half
    out[n:, n:] = half
    return out


def u_kappa(kappa, n):
    """Orbit vector with every entry sqrt(2 kappa); satisfies
    u^dagger u = 2 kappa n and |u_j|^2 = 2 kappa."""
    if not kappa > 0:
        raise ValueError(f"coupling kappa must be positive, got {kappa}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return np.full(n, np.sqrt(2.0 * kappa), dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class Structure:
    """Constant matrices of the split (n, m) plus the involution toolkit.

    Q:  anti-diagonal block form defining the group.
    Im: species sign matrix diag(1_m, -1_{n-m}).
    Dm: diag(Im, Im), the conjugator behind gamma.
    Cl: i Q, generator of the centre of the compact fixed-point algebra.
    Cr: i times Im tiled anti-diagonally, spanning the centre of the
        non-compact one.
    Mbasis: n-1 sparse traceless generators i diag(e_k - e_{k+1},
        e_k - e_{k+1}) spanning the centralizer complement of the Cartan.
    """

    n: int
    m: int
    Q: np.ndarray
    Im: np.ndarray
    Dm: np.ndarray
    Cl: np.ndarray
    Cr: np.ndarray
    Mbasis: tuple

    def theta(self, v):
        return theta(v)

    def gamma(self, v):
        """Second involution, V -> -Dm V^dagger Dm."""
        v = as_matrix(v)
        self._check_dim(v)
        return -(self.Dm @ v.conj().T @ self.Dm)

    def project(self, v, label):
        """Projection onto the simultaneous eigenspace of (theta, gamma)
        with signs ``label`` in {"++", "+-", "-+", "--"} (theta first)."""
        v = as_matrix(v)
        self._check_dim(v)
        s, r = _parse_label(label)
        # theta o gamma is plain conjugation by Dm
        tg = self.Dm @ v @ self.Dm
        return 0.25 * (v + s * theta(v) + r * self.gamma(v) + (s * r) * tg)

    def _check_dim(self, v):
        if v.shape[0] != 2 * self.n:
            raise ValueError(
                f"dimension mismatch: structure is {2 * self.n}x{2 * self.n}, "
                f"matrix is {v.shape[0]}x{v.shape[0]}"
            )


def build_structure(n, m):
    """Assemble the constant matrices for a given split 1 <= m < n."""
    if not isinstance(n, (int, np.integer)) or not isinstance(m, (int, np.integer)):
        raise ValueError("n and m must be integers")
    n = int(n)
    m = int(m)
    if not (1 <= m < n):
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    q = _q_form(2 * n)
    im = np.diag(np.concatenate([np.ones(m), -np.ones(n - m)])).astype(np.complex128)
    dm = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    dm[:n, :n] = im
    dm[n:, n:] = im
    cl = 1j * q
    cr = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    cr[:n, n:] = 1j * im
    cr[n:, :n] = 1j * im
    mbasis = []
    for k in range(n - 1):
        d = np.zeros(n)
        d[k] = 1.0
        d[k + 1] = -1.0
        mbasis.append(1j * np.diag(np.concatenate([d, d])).astype(np.complex128))
    return Structure(n=n, m=m, Q=q, Im=im, Dm=dm, Cl=cl, Cr=cr, Mbasis=tuple(mbasis))
