import numpy as np
import pytest

from isacnet.metrics import (comm_sinr_overall, evaluate_all,
                             min_sensing_sinr_overall, sensing_denominators)
from isacnet.optimizer import (OptConstraints, SubproblemState,
                               bisection_oracle, build_subproblem,
                               check_comm_feasible, dc_surrogate_rhs,
                               dump_subproblem_cbf, sca_solve,
                               solve_subproblem, _normalized_comm_rows,
                               _oracle_lp_feasible, _sensing_link_gains,
                               _sensing_scale, STATUS_CONVERGED,
                               STATUS_INFEASIBLE, STATUS_MAX_ITER,
                               STATUS_SENSING_INFEASIBLE)

from conftest import P_MAX_W, random_realization, synthetic_realization


def single_bs_instance(gnn=4e-13, beta_sq=5e-12, noise=2.5e-12):
    return synthetic_realization(
        h_comm_sq=[[1e-9]], g_mono_bi=[[gnn]], g_ue_echo=[[0.0]],
        h_bs_bs_sq=[[0.0]], beta_sq=[beta_sq], noise_ue=[1e-12],
        noise_bs=[noise])


def symmetric_instance():
    def mat(diag, off):
        m = np.full((3, 3), off)
        np.fill_diagonal(m, diag)
        return m
    return synthetic_realization(
        h_comm_sq=mat(1e-9, 1e-11), g_mono_bi=mat(4e-13, 1e-13),
        g_ue_echo=mat(2e-13, 5e-14), h_bs_bs_sq=mat(0.0, 8e-11),
        beta_sq=np.full(3, 5e-12), noise_ue=np.full(3, 1e-12),
        noise_bs=np.full(3, 2.5e-12))


class TestCommFeasibility:
    def test_zero_thresholds_full_power_witness(self):
        ch = symmetric_instance()
        cons = OptConstraints(gamma_comm=np.zeros(3), p_max=P_MAX_W)
        res = check_comm_feasible(ch, cons)
        assert res.feasible
        assert np.array_equal(res.witness, np.full(3, P_MAX_W))

    def test_huge_threshold_infeasible(self):
        ch = symmetric_instance()
        cons = OptConstraints(gamma_comm=np.full(3, 1e9), p_max=P_MAX_W)
        res = check_comm_feasible(ch, cons)
        assert not res.feasible
        assert res.witness is None
        assert res.max_slack < 0

    def test_witness_satisfies_constraints(self):
        rng = np.random.default_rng(17)
        for _ in range(15):
            ch = random_realization(rng)
            gamma = rng.uniform(0.5, 4.0)
            cons = OptConstraints(gamma_comm=np.full(3, gamma), p_max=P_MAX_W)
            res = check_comm_feasible(ch, cons)
            if res.feasible:
                for m in range(3):
                    assert comm_sinr_overall(res.witness, ch, m) >= \
                        gamma * (1 - 1e-9)

    def test_agrees_with_grid_search(self):
        # grid-feasible implies LP-feasible; LP verdicts carry a certificate
        rng = np.random.default_rng(4)
        grid = np.linspace(0.0, P_MAX_W, 101)
        g0, g1, g2 = np.meshgrid(grid, grid, grid, indexing="ij")
        points = np.column_stack([g0.ravel(), g1.ravel(), g2.ravel()])
        for _ in range(8):
            ch = random_realization(rng)
            gamma = rng.uniform(2.0, 12.0)  # around the feasibility knee
            cons = OptConstraints(gamma_comm=np.full(3, gamma), p_max=P_MAX_W)
            lhs, rhs = _normalized_comm_rows(ch, cons)
            ok = np.all(points @ lhs.T >= rhs[None, :], axis=1)
            grid_feasible = bool(ok.any())
            res = check_comm_feasible(ch, cons)
            if grid_feasible:
                assert res.feasible
            if not res.feasible:
                assert not grid_feasible


class TestSubproblemStructure:
    def _program(self, ch, cons):
        feas = check_comm_feasible(ch, cons)
        rho = feas.witness
        state = SubproblemState(sensing_denominators(rho, ch),
                                min_sensing_sinr_overall(rho, ch))
        return build_subproblem(ch, cons, state), state, rho

    def test_variable_and_row_counts(self):
        ch = symmetric_instance()
        cons = OptConstraints(gamma_comm=np.ones(3), p_max=P_MAX_W)
        prog, _, _ = self._program(ch, cons)
        assert prog.num_variables == 2 * 3 + 1
        assert prog.num_constraint_rows == 4 * 3
        assert prog.comm_lhs.shape == (3, 3)
        assert prog.denom_matrix.shape == (3, 3)
        assert prog.gnn.shape == (3,)

    def test_tangency_identity(self):
        # at the linearization point the convexified row collapses to
        # rho_n gamma_nn^2 >= eta_prev * xi_prev (in scaled units)
        ch = symmetric_instance()
        cons = OptConstraints(gamma_comm=np.ones(3), p_max=P_MAX_W)
        prog, state, _ = self._program(ch, cons)
        xi_scaled = state.xi_prev * prog.sensing_scale
        eta_scaled = state.eta_prev / prog.eta_scale
        rhs = dc_surrogate_rhs(xi_scaled, eta_scaled, xi_scaled, eta_scaled)
        assert np.allclose(rhs, eta_scaled * xi_scaled, rtol=1e-12)

    def test_majorization_random_triples(self):
        rng = np.random.default_rng(0)
        n = 100_000
        xi = rng.uniform(0.0, 10.0, n)
        eta = rng.uniform(0.0, 10.0, n)
        xi_prev = rng.uniform(0.0, 10.0, n)
        eta_prev = rng.uniform(0.0, 10.0, n)
        surrogate = dc_surrogate_rhs(xi, eta, xi_prev, eta_prev)
        assert np.all(surrogate >= eta * xi - 1e-12)
        at_point = dc_surrogate_rhs(xi, eta, xi, eta)
        assert np.allclose(at_point, eta * xi, rtol=1e-12, atol=1e-12)


def _brute_force_subproblem(prog, n_grid=41, refinements=3):
    """Grid-refined maximization of eta over the power box with tight slacks.

    For fixed rho the largest eta allowed by the convexified row n solves a
    quadratic: eta_n = -(xi_n + a_n) + 2 sqrt(a_n xi_n + rho_n g_n).
    """
    lo = np.zeros(3)
    hi = np.full(3, prog.p_max)
    best, best_rho = -np.inf, None
    for _ in range(refinements):
        axes = [np.linspace(lo[i], hi[i], n_grid) for i in range(3)]
        g0, g1, g2 = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([g0.ravel(), g1.ravel(), g2.ravel()])
        ok = np.all(pts @ prog.comm_lhs.T >= prog.comm_rhs[None, :], axis=1)
        pts = pts[ok]
        if pts.size == 0:
            break
        xi = pts @ prog.denom_matrix.T + prog.noise[None, :]
        radicand = prog.a[None, :] * xi + pts * prog.gnn[None, :]
        eta_n = np.where(radicand >= 0,
                         -(xi + prog.a[None, :]) + 2 * np.sqrt(np.maximum(radicand, 0)),
                         -np.inf)
        eta = np.clip(eta_n.min(axis=1), 0.0, None)
        k = int(np.argmax(eta))
        if eta[k] > best:
            best, best_rho = float(eta[k]), pts[k]
        span = (hi - lo) / (n_grid - 1)
        lo = np.maximum(best_rho - 2 * span, 0.0)
        hi = np.minimum(best_rho + 2 * span, prog.p_max)
    return best


class TestSolveSubproblem:
    def test_single_bs_closed_form(self):
        gnn, beta_sq, noise = 4e-13, 5e-12, 2.5e-12
        ch = single_bs_instance(gnn, beta_sq, noise)
        cons = OptConstraints(gamma_comm=np.zeros(1), p_max=P_MAX_W)
        eta_star = P_MAX_W * gnn / (P_MAX_W * beta_sq + noise)
        state = SubproblemState(
            xi_prev=np.array([P_MAX_W * beta_sq + noise]),
            eta_prev=eta_star)
        sol = solve_subproblem(build_subproblem(ch, cons, state))
        assert sol.rho is not None
        assert sol.rho[0] == pytest.approx(P_MAX_W, rel=1e-6)
        assert sol.eta == pytest.approx(eta_star, rel=1e-6)

    def test_solution_feasibility(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            ch = random_realization(rng)
            cons = OptConstraints(gamma_comm=np.full(3, 0.5), p_max=P_MAX_W)
            feas = check_comm_feasible(ch, cons)
            if not feas.feasible:
                continue
            state = SubproblemState(sensing_denominators(feas.witness, ch),
                                    min_sensing_sinr_overall(feas.witness, ch))
            prog = build_subproblem(ch, cons, state)
            sol = solve_subproblem(prog)
            assert sol.rho is not None
            tol = 1e-8
            assert np.all(sol.rho >= -tol * P_MAX_W)
            assert np.all(sol.rho <= P_MAX_W * (1 + tol))
            assert np.all(prog.comm_lhs @ sol.rho - prog.comm_rhs >= -1e-7)
            xi_s = sol.xi * prog.sensing_scale
            lower = prog.denom_matrix @ sol.rho + prog.noise
            assert np.all(xi_s >= lower - 1e-7)
            # convexified numerator rows hold at the returned point
            # (dc_surrogate_rhs(.., a, 0) linearizes at difference a)
            surrogate = dc_surrogate_rhs(xi_s, sol.eta / prog.eta_scale,
                                         prog.a, 0.0)
            assert np.all(surrogate <= sol.rho * prog.gnn + 1e-7)

    def test_matches_grid_refined_brute_force(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 50:
            ch = random_realization(rng)
            gamma = 0.0 if checked % 2 == 0 else 0.5
            cons = OptConstraints(gamma_comm=np.full(3, gamma), p_max=P_MAX_W)
            feas = check_comm_feasible(ch, cons)
            if not feas.feasible:
                continue
            state = SubproblemState(sensing_denominators(feas.witness, ch),
                                    min_sensing_sinr_overall(feas.witness, ch))
            prog = build_subproblem(ch, cons, state)
            sol = solve_subproblem(prog)
            assert sol.rho is not None
            brute = _brute_force_subproblem(prog)
            assert sol.eta / prog.eta_scale == pytest.approx(brute, rel=1e-3)
            checked += 1


class TestScaSolve:
    def test_symmetric_instance_balances(self):
        ch = symmetric_instance()
        cons = OptConstraints(gamma_comm=np.zeros(3), p_max=P_MAX_W)
        res = sca_solve(ch, cons)
        assert res.status == STATUS_CONVERGED
        assert np.all(np.abs(res.rho_opt / res.rho_opt[0] - 1) < 1e-4)
        rep = evaluate_all(res.rho_opt, ch)
        assert np.all(np.abs(rep.sensing_overall / rep.sensing_overall[0] - 1)
                      < 1e-4)

    def test_single_bs_closed_form(self):
        gnn, beta_sq, noise = 4e-13, 5e-12, 2.5e-12
        ch = single_bs_instance(gnn, beta_sq, noise)
        cons = OptConstraints(gamma_comm=np.zeros(1), p_max=P_MAX_W)
        res = sca_solve(ch, cons)
        assert res.status == STATUS_CONVERGED
        assert res.eta_opt == pytest.approx(
            P_MAX_W * gnn / (P_MAX_W * beta_sq + noise), rel=1e-6)

    def test_infeasible_reports_certificate(self):
        ch = symmetric_instance()
        cons = OptConstraints(gamma_comm=np.full(3, 1e9), p_max=P_MAX_W)
        res = sca_solve(ch, cons)
        assert res.status == STATUS_INFEASIBLE
        assert res.rho_opt is None
        assert res.infeasibility_certificate < 0

    def test_sensing_degenerate_short_circuit(self):
        ch = symmetric_instance()
        g = ch.g_mono_bi.copy()
        g[0, 0] = 0.0
        ch2 = synthetic_realization(
            h_comm_sq=np.abs(ch.h_comm) ** 2, g_mono_bi=g,
            g_ue_echo=ch.g_ue_echo, h_bs_bs_sq=np.abs(ch.h_bs_bs) ** 2,
            beta_sq=ch.beta_sq, noise_ue=ch.noise_ue, noise_bs=ch.noise_bs)
        cons = OptConstraints(gamma_comm=np.zeros(3), p_max=P_MAX_W)
        res = sca_solve(ch2, cons)
        assert res.status == STATUS_SENSING_INFEASIBLE
        assert res.eta_opt == 0.0
        assert res.rho_opt is not None  # comm-feasible witness

    def test_against_oracle_and_invariants(self, make_instance, constraints):
        solved = 0
        for i in range(60):
            _, ch = make_instance(1000 + i)
            res = sca_solve(ch, constraints)
            if res.status == STATUS_INFEASIBLE:
                continue
            assert res.status in (STATUS_CONVERGED, STATUS_MAX_ITER)
            solved += 1
            # safety: re-evaluated constraints hold
            rep = evaluate_all(res.rho_opt, ch)
            assert np.all(rep.comm_overall >= constraints.gamma_comm * (1 - 1e-6))
            assert np.all(res.rho_opt >= 0) and np.all(res.rho_opt <= P_MAX_W * (1 + 1e-9))
            assert res.eta_opt == pytest.approx(rep.sensing_overall.min(), rel=1e-12)
            # ascent up to solver tolerance
            tr = np.array(res.eta_trace)
            assert np.all(np.diff(tr) >= -1e-8 * np.maximum(tr[:-1], 1e-300))
            # soundness and closeness vs the global oracle
            eta_or, rho_or = bisection_oracle(ch, constraints)
            assert res.eta_opt <= eta_or * (1 + 1e-6)
            assert res.eta_opt >= 0.995 * eta_or
        assert solved >= 40

    def test_deterministic(self, make_instance, constraints):
        _, ch = make_instance(77)
        a = sca_solve(ch, constraints)
        b = sca_solve(ch, constraints)
        assert np.array_equal(a.rho_opt, b.rho_opt)
        assert a.eta_trace == b.eta_trace
        assert a.status == b.status


class TestBisectionOracle:
    def test_single_bs_closed_form(self):
        gnn, beta_sq, noise = 4e-13, 5e-12, 2.5e-12
        ch = single_bs_instance(gnn, beta_sq, noise)
        cons = OptConstraints(gamma_comm=np.zeros(1), p_max=P_MAX_W)
        eta, rho = bisection_oracle(ch, cons)
        assert eta == pytest.approx(P_MAX_W * gnn / (P_MAX_W * beta_sq + noise),
                                    rel=1e-6)
        assert rho[0] == pytest.approx(P_MAX_W, rel=1e-6)

    def test_monotone_feasibility(self, make_instance, constraints):
        _, ch = make_instance(5)
        gnn, cross = _sensing_link_gains(ch)
        s = _sensing_scale(gnn, cross, ch.beta_sq, ch.noise_bs, constraints.p_max)
        denom = cross * s
        denom[np.arange(3), np.arange(3)] = ch.beta_sq * s
        noise = ch.noise_bs * s
        lhs, rhs = _normalized_comm_rows(ch, constraints)
        eta_star, _ = bisection_oracle(ch, constraints)
        for f in (0.2, 0.5, 0.9, 0.99):
            assert _oracle_lp_feasible(f * eta_star, gnn * s, denom, noise,
                                       lhs, rhs, P_MAX_W) is not None
        assert _oracle_lp_feasible(1.5 * eta_star, gnn * s, denom, noise,
                                   lhs, rhs, P_MAX_W) is None

    def test_eta_zero_lp_equals_comm_feasibility(self):
        rng = np.random.default_rng(6)
        for gamma in (0.5, 2.0, 8.0, 1e9):
            ch = random_realization(rng)
            cons = OptConstraints(gamma_comm=np.full(3, gamma), p_max=P_MAX_W)
            gnn, cross = _sensing_link_gains(ch)
            s = _sensing_scale(gnn, cross, ch.beta_sq, ch.noise_bs, cons.p_max)
            denom = cross * s
            denom[np.arange(3), np.arange(3)] = ch.beta_sq * s
            lhs, rhs = _normalized_comm_rows(ch, cons)
            lp = _oracle_lp_feasible(0.0, gnn * s, denom, ch.noise_bs * s,
                                     lhs, rhs, P_MAX_W)
            assert (lp is not None) == check_comm_feasible(ch, cons).feasible

    def test_agrees_with_grid_search(self, make_instance, constraints):
        # 201-point-per-axis exhaustive max of the min sensing SINR
        _, ch = make_instance(9)
        grid = np.linspace(0.0, P_MAX_W, 201)
        gnn, cross = _sensing_link_gains(ch)
        lhs, rhs = _normalized_comm_rows(ch, constraints)
        hb = cross  # already includes both echo and direct terms
        best = 0.0
        chunk = 201 * 201
        g1, g2 = np.meshgrid(grid, grid, indexing="ij")
        for r0 in grid:
            pts = np.column_stack([np.full(chunk, r0), g1.ravel(), g2.ravel()])
            ok = np.all(pts @ lhs.T >= rhs[None, :], axis=1)
            pts = pts[ok]
            if pts.size == 0:
                continue
            den = pts @ hb.T + pts * ch.beta_sq[None, :] + ch.noise_bs[None, :]
            sinr = (pts * gnn[None, :]) / den
            best = max(best, float(sinr.min(axis=1).max(initial=-np.inf)))
        eta_or, _ = bisection_oracle(ch, constraints)
        assert best <= eta_or * (1 + 1e-9)
        assert eta_or - best <= 0.025 * eta_or

    def test_infeasible_raises(self):
        ch = symmetric_instance()
        cons = OptConstraints(gamma_comm=np.full(3, 1e9), p_max=P_MAX_W)
        with pytest.raises(ValueError):
            bisection_oracle(ch, cons)


def test_cbf_dump_structure(tmp_path, make_instance, constraints):
    _, ch = make_instance(3)
    feas = check_comm_feasible(ch, constraints)
    state = SubproblemState(sensing_denominators(feas.witness, ch),
                            min_sensing_sinr_overall(feas.witness, ch))
    prog = build_subproblem(ch, constraints, state)
    path = tmp_path / "sub.cbf"
    dump_subproblem_cbf(prog, path)
    text = path.read_text().splitlines()
    assert text[0] == "VER"
    i_var = text.index("VAR")
    assert text[i_var + 1].split()[0] == str(prog.num_variables)
    assert sum(1 for line in text if line == "QR 3") == 3
    i_a = text.index("ACOORD")
    n_a = int(text[i_a + 1])
    assert len([ln for ln in text[i_a + 2:i_a + 2 + n_a] if ln]) == n_a
