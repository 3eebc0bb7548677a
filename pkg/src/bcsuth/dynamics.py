"""Two independent trajectory solvers plus conservation diagnostics.

The first solver integrates Hamilton's equations for the energy with a
fixed-step Stoermer-Verlet scheme (symplectic, second order; compiled
inner loop).  The second one exploits integrability: the flow of any
charge H_k linearizes upstairs, so the positions at time t are read off
from the eigenvalues of the Hermitian matrix

    W(t) = e^{t V_k} e^{2 q(0)} D_m e^{t V_k^dagger},

whose spectrum is a conjugation-invariant copy of e^{2 q(t)} D_m.  The
positive eigenvalues are {e^{+-2 q_j} : j species one} and the negative
ones {-e^{+-2 q_j} : j species two}; the chamber ordering makes the
assignment of the dominant half unambiguous.  Momenta come from the
eigenvector frame: with eta(t) the unitary aligning W(t) back to
diagonal form (eta(0) = 1, columns phase-matched for continuity in t),
p(t) is the first-block diagonal of the (-,-) projection of
eta L(0) eta^{-1}.

Both solvers sample the same time grid by default, which is what the
cross-validation harness diffs.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from ._kernels import grad_q, verlet_run
from .errors import ChamberExit, SingularConfiguration, SpectralBreakdown
from .model import build_lax, reduced_hamiltonians
from .numerics import eigh, matexp
from .structure import build_structure, first_chamber_violation, is_in_algebra, u_kappa, xi

log = logging.getLogger("bcsuth")

EIG_GAP_SCALE = 1e-10
OVERLAP_FLOOR = 0.5


@dataclass(frozen=True)
class SolverConfig:
    """Time step, horizon, flow index and record cadence for a run."""

    dt: float
    t_end: float
    k: int = 1
    sample_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError(f"flow index k must be a positive integer, got {self.k}")
        if not isinstance(self.sample_every, (int, np.integer)) or self.sample_every < 1:
            raise ValueError(f"sample_every must be a positive integer, got {self.sample_every}")

    def sample_times(self):
        """Recorded times j * dt * sample_every up to the horizon."""
        stride = self.dt * self.sample_every
        count = int(np.floor(self.t_end / stride + 1e-9)) + 1
        return np.arange(count) * stride


@dataclass
class Trajectory:
    """Time-stamped phase samples plus conserved-quantity diagnostics.

    ps is None for position-only spectral output until reconstruct_p
    fills it.  invariants_drift maps k -> {"abs": .., "rel": ..} maximum
    drift of H_k over the samples.  min_eig_gap / eig_gap_flagged and
    aux_residual are diagnostics of the spectral route.
    """

    times: np.ndarray
    qs: np.ndarray
    ps: np.ndarray | None = None
    invariants_drift: dict | None = None
    solver: str = ""
    k: int = 1
    min_eig_gap: float | None = None
    eig_gap_flagged: bool = False
    aux_residual: float | None = None

    def __len__(self):
        return self.times.shape[0]


@dataclass(frozen=True)
class FlowGenerator:
    """Constant algebra element generating the linearized flow of H_k."""

    Vk: np.ndarray
    k: int


def flow_generator(params, phi0, k):
    """V_k = J0^{2k-1} minus its trace part; traceless and in su(n,n)."""
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= params.n:
        raise ValueError(f"flow index must satisfy 1 <= k <= n, got {k}")
    J0 = build_lax(params, phi0).J
    dim = 2 * params.n
    V = np.linalg.matrix_power(J0, 2 * int(k) - 1)
    for _ in range(2):  # one repeat mops up roundoff in the trace
        V = V - (np.trace(V) / dim) * np.eye(dim)
    if abs(complex(np.trace(V))) > 1e-12:
        raise RuntimeError("flow generator failed to come out traceless")
    member = is_in_algebra(V, tol=1e-11)
    if not member:
        raise RuntimeError(
            f"flow generator left the algebra: form residual {member.form_residual:.3e}"
        )
    return FlowGenerator(Vk=V, k=int(k))


def _grad(params, q):
    g, singular = grad_q(
        np.ascontiguousarray(q), params.m, float(params.kappa), float(params.x), float(params.y)
    )
    if singular:
        raise SingularConfiguration(
            "potential term exceeds the singularity guard (near-collision)"
        )
    return g


def verlet_step(params, phi, dt):
    """One kick-drift-kick step; time-reversible, second order.

    Arithmetic mirrors the compiled trajectory loop exactly so that n
    single steps and one n-step run agree bitwise.
    """
    from .model import PhasePoint, _require_valid

    _require_valid(params, phi)
    p = phi.p - 0.5 * dt * _grad(params, phi.q)
    q = phi.q + dt * p
    p = p - 0.5 * dt * _grad(params, q)
    return PhasePoint(q=q, p=p)


def integrate_ode(params, phi0, config):
    """Fixed-step Verlet trajectory of the energy flow (k is ignored:
    the ODE route always integrates H_1).

    Samples every config.sample_every steps.  A tripped singularity
    guard or a recorded sample outside the chamber raises with the
    failure time and the partial trajectory attached.
    """
    from .model import _require_valid

    _require_valid(params, phi0)
    times = config.sample_times()
    nsamples = times.shape[0]
    qs, ps, fail_sample, fail_step = verlet_run(
        np.ascontiguousarray(phi0.q),
        np.ascontiguousarray(phi0.p),
        params.m,
        float(params.kappa),
        float(params.x),
        float(params.y),
        float(config.dt),
        nsamples,
        int(config.sample_every),
    )
    if fail_sample >= 0:
        t_fail = ((fail_sample - 1) * config.sample_every + fail_step) * config.dt
        partial = Trajectory(
            times=times[:fail_sample], qs=qs[:fail_sample], ps=ps[:fail_sample], solver="verlet"
        )
        raise SingularConfiguration(
            f"singular configuration at t = {t_fail:.6g}", time=t_fail, partial=partial
        )
    for i in range(nsamples):
        violation = first_chamber_violation(qs[i], params.m)
        if violation is not None:
            partial = Trajectory(times=times[:i], qs=qs[:i], ps=ps[:i], solver="verlet")
            raise ChamberExit(
                f"sample at t = {times[i]:.6g} left the chamber: {violation}",
                time=float(times[i]),
                partial=partial,
            )
    traj = Trajectory(times=times, qs=qs, ps=ps, solver="verlet", k=1)
    traj.invariants_drift = conservation_report(params, traj)
    return traj


def _sorted_eigensystem(params, t, V, g_diag):
    """Eigendecomposition of W(t), plus its minimum spectral gap.

    A consecutive pair is flagged near-degenerate when its gap drops
    below 1e-10 relative to the pair's own magnitude (floored at 1).
    """
    E = matexp(t * V)
    W = (E * g_diag[None, :]) @ E.conj().T
    W = 0.5 * (W + W.conj().T)
    try:
        eig = eigh(W)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise SpectralBreakdown(f"eigensolver failed at t = {t:.6g}: {exc}", time=t)
    lam = eig.eigenvalues
    gaps = np.diff(lam)
    min_gap = float(gaps.min()) if gaps.size else np.inf
    pair_scale = np.maximum(np.maximum(np.abs(lam[:-1]), np.abs(lam[1:])), 1.0)
    flagged = bool(np.any(gaps < EIG_GAP_SCALE * pair_scale))
    if flagged:
        log.debug("near-degenerate spectrum at t=%.6g: gap %.3e", t, min_gap)
    return lam, eig.eigenvectors, min_gap, flagged


def _classify(params, lam, t):
    """Split the spectrum by sign and map ascending indices to the
    natural slot layout of e^{2q} D_m.

    Returns (q, slots) where slots[i] is the slot (coordinate j for the
    e^{+2 q_j} branch, n + j for e^{-2 q_j}) of ascending eigenvalue i.
    """
    n, m = params.n, params.m
    neg = np.where(lam < 0)[0]
    pos = np.where(lam > 0)[0]
    if pos.size != 2 * m or neg.size != 2 * (n - m):
        raise SpectralBreakdown(
            f"eigenvalue count mismatch at t = {t:.6g}: {pos.size} positive "
            f"(expected {2 * m}), {neg.size} negative (expected {2 * (n - m)})",
            time=t,
        )
    nm = n - m
    slots = np.empty(2 * n, dtype=np.int64)
    q = np.empty(n)
    # negatives ascend from the largest magnitude: e^{2 q_{m+1}} .. e^{2 q_n},
    # then the e^{-2 q} branch in reverse coordinate order
    for i in range(nm):
        slots[neg[i]] = m + i
        q[m + i] = 0.5 * np.log(-lam[neg[i]])
    for i in range(nm):
        slots[neg[nm + i]] = n + (n - 1 - i)
    # positives ascend through the e^{-2 q} branch first
    for r in range(m):
        slots[pos[r]] = n + r
    for r in range(m):
        slots[pos[m + r]] = m - 1 - r
        q[m - 1 - r] = 0.5 * np.log(lam[pos[m + r]])
    violation = first_chamber_violation(q, m)
    if violation is not None:
        raise SpectralBreakdown(
            f"recovered coordinates left the chamber at t = {t:.6g}: {violation}", time=t
        )
    return q, slots


def spectral_solve_q(params, phi0, k, times):
    """Positions along the H_k flow by diagonalization, one Hermitian
    eigenproblem per sample; no time stepping, so no accumulation of
    integration error.

    times must be sorted ascending starting at 0.  Eigenvalue sign
    counts are checked at every sample; the minimum spectral gap over
    the run is recorded on the returned trajectory.
    """
    from .model import _require_valid

    _require_valid(params, phi0)
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or times.size < 1 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing and start at 0")
    V = flow_generator(params, phi0, k).Vk
    g_diag = _slice_diagonal(params, phi0.q)
    qs = np.empty((times.size, params.n))
    min_gap = np.inf
    flagged = False
    for i, t in enumerate(times):
        lam, _, gap, flag = _sorted_eigensystem(params, t, V, g_diag)
        min_gap = min(min_gap, gap)
        flagged = flagged or flag
        qs[i], _ = _classify(params, lam, t)
    if flagged:
        log.warning("near-degenerate spectra encountered; min gap %.3e", min_gap)
    return Trajectory(
        times=times,
        qs=qs,
        ps=None,
        solver="spectral",
        k=int(k),
        min_eig_gap=float(min_gap),
        eig_gap_flagged=flagged,
    )


def _slice_diagonal(params, q0):
    """Diagonal of e^{2 q(0)} D_m in the natural slot layout."""
    sign = np.concatenate([np.ones(params.m), -np.ones(params.n - params.m)])
    return np.concatenate([np.exp(2.0 * q0) * sign, np.exp(-2.0 * q0) * sign])


def reconstruct_p(params, phi0, trajectory, k, method="eigenframe"):
    """Fill in momenta along a spectral trajectory.

    Default method rebuilds the eigenvector frame of W(t) sample by
    sample: columns are permuted into the natural slot order, each
    column's phase is aligned by maximal overlap with the previous
    sample (identity at t = 0), eta(t) is that frame's inverse, and
    p(t) is the first-block diagonal of the (-,-) projection of
    eta L(0) eta^{-1}.  The stabilizer condition eta xi eta^{-1} = xi is
    monitored as a residual, not enforced.

    method="fd" (k = 1 only) instead differentiates q(t) numerically,
    which is exactly the momentum for the energy flow.
    """
    if trajectory.ps is not None:
        raise ValueError("trajectory already has momenta")
    times = trajectory.times
    if method == "fd":
        if k != 1:
            raise ValueError("finite-difference momenta only apply to the k = 1 flow")
        if times.size < 3:
            raise ValueError("need at least 3 samples for finite-difference momenta")
        ps = np.gradient(trajectory.qs, times, axis=0, edge_order=2)
        out = replace(trajectory, ps=ps)
        out.invariants_drift = conservation_report(params, out)
        return out
    if method != "eigenframe":
        raise ValueError(f"unknown method {method!r}")

    n = params.n
    struct = build_structure(n, params.m)
    lax0 = build_lax(params, phi0)
    orbit = xi(u_kappa(params.kappa, n))
    V = flow_generator(params, phi0, k).Vk
    g_diag = _slice_diagonal(params, phi0.q)

    ps = np.empty((times.size, n))
    prev = np.eye(2 * n, dtype=np.complex128)
    aux_max = 0.0
    min_gap = np.inf
    flagged = False
    for i, t in enumerate(times):
        lam, U, gap, flag = _sorted_eigensystem(params, t, V, g_diag)
        min_gap = min(min_gap, gap)
        flagged = flagged or flag
        q_rec, slots = _classify(params, lam, t)
        if not np.allclose(q_rec, trajectory.qs[i], rtol=1e-8, atol=1e-8):
            raise SpectralBreakdown(
                f"trajectory positions disagree with the recovered spectrum at t = {t:.6g} "
                "(was it produced by spectral_solve_q with the same k?)",
                time=t,
            )
        frame = np.empty_like(U)
        frame[:, slots] = U
        overlaps = np.sum(prev.conj() * frame, axis=0)
        small = np.abs(overlaps) < OVERLAP_FLOOR
        if np.any(small):
            raise SpectralBreakdown(
                f"eigenvector continuity lost at t = {t:.6g} "
                f"(min overlap {np.min(np.abs(overlaps)):.3f}); use denser sample times",
                time=t,
            )
        frame = frame * (overlaps.conj() / np.abs(overlaps))[None, :]
        eta = frame.conj().T
        conjugated = eta @ lax0.L @ frame
        proj = struct.project(conjugated, "--")
        ps[i] = np.diagonal(proj)[:n].real
        aux_max = max(aux_max, float(np.linalg.norm(eta @ orbit @ frame - orbit)))
        prev = frame

    if flagged:
        log.warning("near-degenerate spectra encountered; min gap %.3e", min_gap)
    out = replace(
        trajectory,
        ps=ps,
        min_eig_gap=float(min_gap),
        eig_gap_flagged=flagged,
        aux_residual=aux_max,
    )
    out.invariants_drift = conservation_report(params, out)
    return out


def conservation_report(params, trajectory):
    """Maximum drift of every charge H_k along the samples.

    Returns {k: {"abs": max |H_k(t) - H_k(0)|, "rel": abs / max(1, |H_k(0)|)}}.
    """
    if trajectory.ps is None:
        raise ValueError("trajectory has no momenta; reconstruct them first")
    from .model import PhasePoint

    values = np.empty((len(trajectory), params.n))
    for i in range(len(trajectory)):
        point = PhasePoint(q=trajectory.qs[i], p=trajectory.ps[i])
        values[i] = reduced_hamiltonians(params, point)
    drift = np.max(np.abs(values - values[0]), axis=0)
    return {
        k + 1: {"abs": float(drift[k]), "rel": float(drift[k] / max(1.0, abs(values[0, k])))}
        for k in range(params.n)
    }


def _fd_gradients(params, phi, h):
    """Central-difference gradients of all charges at once.

    Returns (Gq, Gp) with Gq[j, l] = dH_{j+1}/dq_l and likewise for p.
    """
    from .model import PhasePoint

    n = params.n
    Gq = np.empty((n, n))
    Gp = np.empty((n, n))
    for l in range(n):
        dq = np.zeros(n)
        dq[l] = h
        plus = reduced_hamiltonians(params, PhasePoint(q=phi.q + dq, p=phi.p))
        minus = reduced_hamiltonians(params, PhasePoint(q=phi.q - dq, p=phi.p))
        Gq[:, l] = (plus - minus) / (2.0 * h)
        plus = reduced_hamiltonians(params, PhasePoint(q=phi.q, p=phi.p + dq))
        minus = reduced_hamiltonians(params, PhasePoint(q=phi.q, p=phi.p - dq))
        Gp[:, l] = (plus - minus) / (2.0 * h)
    return Gq, Gp


def _check_bracket_args(params, h, *indices):
    for j in indices:
        if not isinstance(j, (int, np.integer)) or not 1 <= j <= params.n:
            raise ValueError(f"charge index must satisfy 1 <= k <= n, got {j}")
    if not 1e-6 <= h <= 1e-4:
        raise ValueError(f"finite-difference step must lie in [1e-6, 1e-4], got {h}")


def poisson_bracket_fd(params, phi, j, k, h=1e-5):
    """Canonical bracket {H_j, H_k} by central differences.

    Zero to finite-difference accuracy is the integrability signature;
    j = k returns exactly 0 because both factors share one gradient
    evaluation.
    """
    _check_bracket_args(params, h, j, k)
    Gq, Gp = _fd_gradients(params, phi, h)
    return float(Gq[j - 1] @ Gp[k - 1] - Gp[j - 1] @ Gq[k - 1])


def poisson_bracket_matrix(params, phi, h=1e-5):
    """All pairwise brackets at once; exactly antisymmetric by
    construction since every entry reuses the same gradient table."""
    _check_bracket_args(params, h)
    Gq, Gp = _fd_gradients(params, phi, h)
    return Gq @ Gp.T - Gp @ Gq.T
