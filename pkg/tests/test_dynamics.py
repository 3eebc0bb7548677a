import numpy as np
import pytest

from bcsuth import (
    ChamberExit,
    ModelParams,
    PhasePoint,
    SingularConfiguration,
    SolverConfig,
    SpectralBreakdown,
    Trajectory,
    build_lax,
    conservation_report,
    flow_generator,
    grad_q_hamiltonian,
    in_weyl_chamber,
    integrate_ode,
    is_in_algebra,
    poisson_bracket_fd,
    poisson_bracket_matrix,
    reconstruct_p,
    reduced_hamiltonian,
    reduced_hamiltonians,
    spectral_solve_q,
    verlet_step,
)
from conftest import draw_bounded_system, draw_params, draw_phase

BOUNDED = ModelParams(2, 1, 0.8, 1.2, 0.6)
BOUNDED_PHI = PhasePoint(q=np.array([1.4, 0.7]), p=np.array([0.15, -0.1]))


class TestSolverConfig:
    def test_sample_times_row_count(self):
        cfg = SolverConfig(dt=1e-3, t_end=1.0, sample_every=10)
        assert cfg.sample_times().shape[0] == 101

    def test_zero_horizon(self):
        cfg = SolverConfig(dt=1e-3, t_end=0.0)
        assert np.array_equal(cfg.sample_times(), [0.0])

    def test_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(dt=0.0, t_end=1.0)
        with pytest.raises(ValueError):
            SolverConfig(dt=1e-3, t_end=-1.0)
        with pytest.raises(ValueError):
            SolverConfig(dt=1e-3, t_end=1.0, sample_every=0)


class TestFlowGenerator:
    def test_k1_is_lax_matrix(self, rng):
        params = draw_params(rng, n=3)
        phi = draw_phase(rng, params)
        J = build_lax(params, phi).J
        V = flow_generator(params, phi, 1).Vk
        assert np.linalg.norm(V - J) <= 1e-13 * max(1.0, np.linalg.norm(J))

    def test_traceless_and_in_algebra(self, rng):
        for k in (1, 2, 3):
            params = draw_params(rng, n=3)
            phi = draw_phase(rng, params)
            V = flow_generator(params, phi, k).Vk
            assert abs(np.trace(V)) <= 1e-12
            assert is_in_algebra(V, tol=1e-11)

    def test_k2_matches_direct_cube(self, rng):
        params = draw_params(rng, n=2)
        phi = draw_phase(rng, params)
        J = build_lax(params, phi).J
        cube = J @ J @ J
        expected = cube - (np.trace(cube) / 4.0) * np.eye(4)
        V = flow_generator(params, phi, 2).Vk
        assert np.linalg.norm(V - expected) <= 1e-12 * max(1.0, np.linalg.norm(expected))

    def test_invalid_index(self, rng):
        params = draw_params(rng, n=2)
        phi = draw_phase(rng, params)
        with pytest.raises(ValueError):
            flow_generator(params, phi, 3)


class TestVerletStep:
    def test_free_motion_far_apart(self):
        params = ModelParams(2, 1, 1.0, 2.0, 1.0)
        phi = PhasePoint(q=np.array([90.0, 45.0]), p=np.array([0.3, -0.2]))
        dt = 1e-2
        out = verlet_step(params, phi, dt)
        assert np.array_equal(out.p, phi.p)  # clamped forces are exactly zero
        assert np.max(np.abs(out.q - (phi.q + dt * phi.p))) <= 1e-12

    def test_time_reversibility(self):
        dt = 1e-3
        forward = verlet_step(BOUNDED, BOUNDED_PHI, dt)
        back = verlet_step(BOUNDED, forward, -dt)
        assert np.max(np.abs(back.q - BOUNDED_PHI.q)) <= 1e-13
        assert np.max(np.abs(back.p - BOUNDED_PHI.p)) <= 1e-13

    def test_matches_compiled_trajectory_bitwise(self):
        cfg = SolverConfig(dt=1e-3, t_end=0.05, sample_every=1)
        traj = integrate_ode(BOUNDED, BOUNDED_PHI, cfg)
        phi = BOUNDED_PHI
        for i in range(1, len(traj)):
            phi = verlet_step(BOUNDED, phi, 1e-3)
            assert np.array_equal(phi.q, traj.qs[i])
            assert np.array_equal(phi.p, traj.ps[i])

    def test_energy_drift_bounded(self):
        # 1e4 steps at dt = 1e-3 on a bounded orbit
        traj = integrate_ode(BOUNDED, BOUNDED_PHI, SolverConfig(dt=1e-3, t_end=10.0, sample_every=10))
        assert traj.invariants_drift[1]["abs"] <= 1e-6


class TestIntegrateOde:
    def test_zero_horizon_single_sample(self):
        traj = integrate_ode(BOUNDED, BOUNDED_PHI, SolverConfig(dt=1e-3, t_end=0.0))
        assert len(traj) == 1
        assert np.array_equal(traj.qs[0], BOUNDED_PHI.q)

    def test_second_order_refinement(self):
        t_end = 2.0
        h = 5e-4
        ref = integrate_ode(BOUNDED, BOUNDED_PHI, SolverConfig(dt=h / 8, t_end=t_end, sample_every=int(t_end / (h / 8))))
        errs = []
        for fac in (2, 1):
            run = integrate_ode(BOUNDED, BOUNDED_PHI, SolverConfig(dt=fac * h, t_end=t_end, sample_every=int(t_end / (fac * h))))
            errs.append(np.max(np.abs(run.qs[-1] - ref.qs[-1])))
        assert 2.5 <= errs[0] / errs[1] <= 6.0

    def test_drift_table_filled_for_all_charges(self):
        traj = integrate_ode(BOUNDED, BOUNDED_PHI, SolverConfig(dt=1e-3, t_end=1.0, sample_every=100))
        assert set(traj.invariants_drift) == {1, 2}

    def test_chamber_exit_reported_with_partial(self):
        params = ModelParams(3, 1, 0.6, 1.0, 0.5)
        phi = PhasePoint(q=np.array([2.0, 1.0, 0.6]), p=np.array([0.0, -3.0, 3.0]))
        with pytest.raises((ChamberExit, SingularConfiguration)) as excinfo:
            integrate_ode(params, phi, SolverConfig(dt=0.05, t_end=2.0, sample_every=1))
        exc = excinfo.value
        assert exc.time is not None and exc.time > 0
        assert exc.partial is not None and len(exc.partial) >= 1

    def test_singular_initial_configuration(self):
        params = ModelParams(3, 1, 1.0, 2.0, 1.0)
        phi = PhasePoint(q=np.array([1.0, 0.5, 0.5 - 1e-9]), p=np.zeros(3))
        with pytest.raises(SingularConfiguration):
            integrate_ode(params, phi, SolverConfig(dt=1e-3, t_end=1.0))


class TestSpectralSolver:
    def test_t0_reproduces_initial_positions(self, rng):
        params, phi0 = draw_bounded_system(rng, 3, 1)
        traj = spectral_solve_q(params, phi0, 1, np.array([0.0]))
        assert np.max(np.abs(traj.qs[0] - phi0.q)) <= 1e-11

    def test_eigenvalue_counts_hold_along_run(self, rng):
        params, phi0 = draw_bounded_system(rng, 3, 2)
        times = np.linspace(0.0, 5.0, 51)
        traj = spectral_solve_q(params, phi0, 1, times)  # raises on count mismatch
        assert traj.min_eig_gap > 0
        assert all(in_weyl_chamber(q, params.m) for q in traj.qs)

    def test_matches_ode_route(self, rng):
        params, phi0 = draw_bounded_system(rng, 2, 1)
        ode = integrate_ode(params, phi0, SolverConfig(dt=1e-5, t_end=5.0, sample_every=10000))
        spec = spectral_solve_q(params, phi0, 1, ode.times)
        assert np.max(np.abs(spec.qs - ode.qs)) <= 1e-6

    def test_requires_times_from_zero(self, rng):
        params, phi0 = draw_bounded_system(rng, 2, 1)
        with pytest.raises(ValueError, match="start at 0"):
            spectral_solve_q(params, phi0, 1, np.array([0.5, 1.0]))

    def test_breakdown_reported_outside_validity_range(self):
        # a fast escaper pushes the spectrum of W past double precision
        params = ModelParams(3, 1, 1.0, 2.0, 1.0)
        phi0 = PhasePoint(q=np.array([1.6, 0.9, 0.4]), p=np.array([0.3, -0.2, 0.1]))
        with pytest.raises(SpectralBreakdown):
            spectral_solve_q(params, phi0, 1, np.linspace(0.0, 5.0, 51))


class TestReconstructP:
    def test_t0_momenta_exact(self, rng):
        params, phi0 = draw_bounded_system(rng, 3, 1)
        times = np.linspace(0.0, 1.0, 11)
        traj = reconstruct_p(params, phi0, spectral_solve_q(params, phi0, 1, times), 1)
        assert np.max(np.abs(traj.ps[0] - phi0.p)) <= 1e-13

    def test_momenta_match_position_derivative(self, rng):
        # for the energy flow p(t) is the time derivative of q(t)
        params, phi0 = draw_bounded_system(rng, 2, 1)
        times = np.arange(0.0, 1.0 + 1e-12, 1e-3)
        traj = reconstruct_p(params, phi0, spectral_solve_q(params, phi0, 1, times), 1)
        qdot = np.gradient(traj.qs, times, axis=0, edge_order=2)
        assert np.max(np.abs(traj.ps - qdot)) <= 1e-5

    def test_fd_method_agrees_with_eigenframe(self, rng):
        params, phi0 = draw_bounded_system(rng, 2, 1)
        times = np.arange(0.0, 1.0 + 1e-12, 1e-3)
        base = spectral_solve_q(params, phi0, 1, times)
        eigenframe = reconstruct_p(params, phi0, base, 1)
        fd = reconstruct_p(params, phi0, base, 1, method="fd")
        assert np.max(np.abs(eigenframe.ps - fd.ps)) <= 1e-5

    def test_momenta_match_ode(self, rng):
        params, phi0 = draw_bounded_system(rng, 3, 2)
        ode = integrate_ode(params, phi0, SolverConfig(dt=1e-5, t_end=3.0, sample_every=10000))
        spec = reconstruct_p(params, phi0, spectral_solve_q(params, phi0, 1, ode.times), 1)
        assert np.max(np.abs(spec.ps - ode.ps)) <= 1e-5

    def test_fd_requires_energy_flow(self, rng):
        params, phi0 = draw_bounded_system(rng, 2, 1)
        times = np.linspace(0.0, 1.0, 11)
        base = spectral_solve_q(params, phi0, 2, times)
        with pytest.raises(ValueError, match="k = 1"):
            reconstruct_p(params, phi0, base, 2, method="fd")

    def test_continuity_failure_on_sparse_times(self):
        # huge sample spacing rotates the frames too far to track
        params = ModelParams(3, 1, 1.0, 2.0, 1.0)
        phi0 = PhasePoint(q=np.array([1.6, 0.9, 0.4]), p=np.array([0.3, -0.2, 0.1]))
        times = np.array([0.0, 1.5, 3.0])
        base = spectral_solve_q(params, phi0, 1, times)
        with pytest.raises(SpectralBreakdown, match="denser"):
            reconstruct_p(params, phi0, base, 1)


class TestConservation:
    def test_spectral_route_conserves_all_charges(self, rng):
        params, phi0 = draw_bounded_system(rng, 3, 1)
        times = np.linspace(0.0, 10.0, 101)
        for k in (1, 2):
            traj = reconstruct_p(params, phi0, spectral_solve_q(params, phi0, k, times), k)
            worst = max(entry["rel"] for entry in traj.invariants_drift.values())
            assert worst <= 1e-9

    def test_ode_drift_scales_quadratically(self):
        drifts = []
        for dt in (2e-3, 1e-3):
            traj = integrate_ode(BOUNDED, BOUNDED_PHI, SolverConfig(dt=dt, t_end=2.0, sample_every=10))
            drifts.append(traj.invariants_drift[1]["abs"])
        assert 2.5 <= drifts[0] / drifts[1] <= 6.0

    def test_constant_trajectory_zero_drift(self):
        times = np.linspace(0.0, 1.0, 5)
        qs = np.tile(BOUNDED_PHI.q, (5, 1))
        ps = np.zeros((5, 2))
        traj = Trajectory(times=times, qs=qs, ps=ps)
        report = conservation_report(BOUNDED, traj)
        assert all(entry["abs"] == 0.0 for entry in report.values())

    def test_requires_momenta(self, rng):
        params, phi0 = draw_bounded_system(rng, 2, 1)
        traj = spectral_solve_q(params, phi0, 1, np.linspace(0.0, 1.0, 5))
        with pytest.raises(ValueError, match="momenta"):
            conservation_report(params, traj)


class TestPoissonBrackets:
    def test_diagonal_exactly_zero(self, rng):
        params = draw_params(rng, n=3)
        phi = draw_phase(rng, params, margin=0.3, p_scale=0.4)
        assert poisson_bracket_fd(params, phi, 2, 2) == 0.0

    def test_pairwise_brackets_vanish(self, rng):
        params = draw_params(rng, n=3)
        phi = draw_phase(rng, params, margin=0.3, spread=0.5, p_scale=0.4)
        charges = reduced_hamiltonians(params, phi)
        for j, k in ((1, 2), (1, 3), (2, 3)):
            scale = max(1.0, abs(charges[j - 1] * charges[k - 1]))
            assert abs(poisson_bracket_fd(params, phi, j, k)) <= 1e-6 * scale

    def test_matrix_antisymmetric_and_matches_entries(self, rng):
        params = draw_params(rng, n=3)
        phi = draw_phase(rng, params, margin=0.3, p_scale=0.4)
        matrix = poisson_bracket_matrix(params, phi)
        assert np.array_equal(matrix, -matrix.T)
        entry = poisson_bracket_fd(params, phi, 1, 2)
        assert abs(matrix[0, 1] - entry) <= 1e-10 * max(1.0, abs(entry))

    def test_canonical_momentum_derivative(self, rng):
        # dH_1/dp_l is the velocity p_l itself
        params = draw_params(rng, n=3)
        phi = draw_phase(rng, params, margin=0.3, p_scale=0.6)
        h = 1e-5
        for l in range(3):
            dp = np.zeros(3)
            dp[l] = h
            fd = (
                reduced_hamiltonian(params, PhasePoint(q=phi.q, p=phi.p + dp), 1)
                - reduced_hamiltonian(params, PhasePoint(q=phi.q, p=phi.p - dp), 1)
            ) / (2 * h)
            assert abs(fd - phi.p[l]) <= 1e-8 * max(1.0, abs(phi.p[l]))

    def test_step_size_validated(self, rng):
        params = draw_params(rng, n=2)
        phi = draw_phase(rng, params)
        with pytest.raises(ValueError, match="step"):
            poisson_bracket_fd(params, phi, 1, 2, h=1e-3)
