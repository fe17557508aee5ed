"""Min-max sensing-SINR power allocation.

Two independent solution routes:

* ``sca_solve`` — iterative convex approximation.  The max-min problem is
  rewritten with slack variables (eta for the min SINR, xi for the SINR
  denominators); the bilinear coupling eta*xi is expressed as a difference
  of squares and the concave half is replaced by its tangent at the previous
  iterate, yielding a small conic program per iteration.
* ``bisection_oracle`` — exact global reference.  For a fixed eta every
  constraint is linear in the powers, so feasibility is one LP; feasibility
  is monotone in eta, so bisection certifies the optimum.

Gains arrive in watts-per-watt around 1e-13 while noise sits near 1e-12;
both routes rescale the sensing quantities so the worst-case denominator is
O(1) (SINRs are ratios, so solutions are unaffected) and normalize the
communication constraint rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import clarabel
import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .channel import ChannelRealization
from .metrics import min_sensing_sinr_overall, sensing_denominators

# Solver statuses reported by sca_solve.
STATUS_CONVERGED = "converged"
STATUS_MAX_ITER = "max-iter"
STATUS_INFEASIBLE = "infeasible"
STATUS_SENSING_INFEASIBLE = "sensing-infeasible"
STATUS_SOLVER_ERROR = "solver-error"


@dataclass(frozen=True)
class OptConstraints:
    """Problem constraints: per-UE comm SINR floors and the power box."""

    gamma_comm: np.ndarray        # (K,) linear minimum overall comm SINRs
    p_max: float                  # watts
    epsilon: float = 1e-4         # relative convergence threshold on eta
    max_iterations: int = 50

    def __post_init__(self) -> None:
        g = np.asarray(self.gamma_comm, dtype=float)
        object.__setattr__(self, "gamma_comm", g)
        if np.any(g < 0):
            raise ValueError("gamma_comm must be >= 0")
        if self.p_max <= 0:
            raise ValueError("p_max must be > 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class SubproblemState:
    """Linearization point: previous slack vector and previous min SINR."""

    xi_prev: np.ndarray           # (K,) true (unscaled) linear power units
    eta_prev: float

    def __post_init__(self) -> None:
        xi = np.asarray(self.xi_prev, dtype=float)
        object.__setattr__(self, "xi_prev", xi)
        if np.any(xi <= 0):
            raise ValueError("xi_prev must be > 0 componentwise")
        if self.eta_prev < 0:
            raise ValueError("eta_prev must be >= 0")


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: np.ndarray | None    # strictly interior power vector when feasible
    max_slack: float              # optimum of the max-slack LP (normalized rows)


@dataclass(frozen=True)
class SubproblemProgram:
    """Plain-data description of one convex subproblem (scaled units).

    Variables are (rho in R^K, xi in R^K, eta), 2K+1 total.  Constraint rows:
    K communication rows, K power boxes, K denominator rows, and K convexified
    numerator rows (one rotated-cone each) -- 4K in all, plus the sign
    constraints xi >= 0, eta >= 0.

    Units: xi carries a factor of sensing_scale relative to true powers and
    eta a factor of 1/eta_scale relative to the true SINR, so every variable
    is O(1) for the conic solver.
    """

    gnn: np.ndarray               # (K,) own-echo gains, times scale/eta_scale
    denom_matrix: np.ndarray      # (K, K) scaled; cross gains + beta^2 diagonal
    noise: np.ndarray             # (K,) scaled BS noise powers
    comm_lhs: np.ndarray          # (K, K) normalized rows, comm_lhs @ rho >= comm_rhs
    comm_rhs: np.ndarray          # (K,)
    p_max: float
    a: np.ndarray                 # (K,) xi_prev_scaled - eta_prev_scaled
    sensing_scale: float          # multiply true powers by this to get scaled
    eta_scale: float              # multiply solver eta by this to get true SINR

    @property
    def num_bs(self) -> int:
        return self.gnn.shape[0]

    @property
    def num_variables(self) -> int:
        return 2 * self.num_bs + 1

    @property
    def num_constraint_rows(self) -> int:
        return 4 * self.num_bs


@dataclass(frozen=True)
class SubproblemSolution:
    rho: np.ndarray | None        # watts
    xi: np.ndarray | None         # true (unscaled) linear power units
    eta: float | None
    solver_status: str            # cvxpy status string


@dataclass
class SolverResult:
    rho_opt: np.ndarray | None
    eta_opt: float                # min overall sensing SINR achieved at rho_opt
    xi_opt: np.ndarray | None     # tight denominators at rho_opt
    eta_trace: list[float] = field(default_factory=list)
    iterations: int = 0
    status: str = STATUS_SOLVER_ERROR
    infeasibility_certificate: float | None = None


def dc_surrogate_rhs(xi, eta, xi_prev, eta_prev):
    """Convex majorant of eta*xi used on the numerator constraint.

    0.25 * ((xi+eta)^2 - 2 (xi_prev-eta_prev)(xi-eta) + (xi_prev-eta_prev)^2).
    Always >= eta*xi for nonnegative arguments, with equality at the
    linearization point.  Accepts scalars or broadcastable arrays.
    """
    a = np.asarray(xi_prev) - np.asarray(eta_prev)
    return 0.25 * ((np.asarray(xi) + np.asarray(eta)) ** 2
                   - 2.0 * a * (np.asarray(xi) - np.asarray(eta)) + a ** 2)


def _comm_link_gains(ch: ChannelRealization) -> tuple[np.ndarray, np.ndarray]:
    """Own-link and cross-link power gains of the overall comm SINR."""
    total = np.abs(ch.h_comm) ** 2 + ch.g_ue_echo
    own = np.diag(total).copy()
    cross = total.copy()
    np.fill_diagonal(cross, 0.0)
    return own, cross


def _sensing_link_gains(ch: ChannelRealization) -> tuple[np.ndarray, np.ndarray]:
    """Own-echo gains and the cross interference matrix (echo + direct DL)."""
    gnn = np.diag(ch.g_mono_bi).copy()
    cross = ch.g_mono_bi + np.abs(ch.h_bs_bs) ** 2
    np.fill_diagonal(cross, 0.0)
    return gnn, cross


def _normalized_comm_rows(ch: ChannelRealization, cons: OptConstraints
                          ) -> tuple[np.ndarray, np.ndarray]:
    """Comm constraints as normalized rows: lhs @ rho >= rhs.

    Row m: own_m * rho_m - Gamma_m * sum_k cross_mk rho_k >= Gamma_m sigma_m^2.
    Each row is divided by its largest entry (times p_max for coefficients) so
    LP/conic absolute tolerances are meaningful.
    """
    own, cross = _comm_link_gains(ch)
    K = ch.num_bs
    lhs = -cons.gamma_comm[:, None] * cross
    lhs[np.arange(K), np.arange(K)] = own
    rhs = cons.gamma_comm * ch.noise_ue
    scale = np.maximum(np.abs(lhs).max(axis=1) * cons.p_max, np.abs(rhs))
    scale = np.where(scale > 0, scale, 1.0)
    return lhs / scale[:, None], rhs / scale


def check_comm_feasible(ch: ChannelRealization, cons: OptConstraints) -> FeasibilityResult:
    """Decide feasibility of the comm SINR floors over the power box.

    Solves the max-slack LP max_t {t : row_m(rho) >= rhs_m + t}; t* > 0 gives
    a strictly interior witness, t* < 0 certifies infeasibility (rows are
    normalized, so t* is a meaningful margin).
    """
    K = ch.num_bs
    if np.all(cons.gamma_comm == 0):
        return FeasibilityResult(True, np.full(K, cons.p_max), 1.0)
    lhs, rhs = _normalized_comm_rows(ch, cons)
    # variables (rho, t); maximize t; constraints -lhs@rho + t <= -rhs
    c = np.zeros(K + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-lhs, np.ones((K, 1))])
    b_ub = -rhs
    bounds = [(0.0, cons.p_max)] * K + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"max-slack LP failed: {res.message}")
    t_star = float(res.x[-1])
    witness = np.clip(res.x[:K], 0.0, cons.p_max)
    return FeasibilityResult(t_star >= 0.0, witness if t_star >= 0.0 else None, t_star)


def _sensing_scale(gnn: np.ndarray, cross: np.ndarray, beta_sq: np.ndarray,
                   noise: np.ndarray, p_max: float) -> float:
    worst = np.max(cross @ np.full(gnn.shape, p_max) + p_max * beta_sq + noise)
    return 1.0 / worst


def _single_bs_sinr_bound(gnn: np.ndarray, beta_sq: np.ndarray,
                          noise: np.ndarray, p_max: float) -> float:
    """max_n of the interference-free full-power SINR, an upper bound on the
    achievable min sensing SINR."""
    return float(np.max(p_max * gnn / (p_max * beta_sq + noise)))


def build_subproblem(ch: ChannelRealization, cons: OptConstraints,
                     state: SubproblemState) -> SubproblemProgram:
    """Assemble one convex subproblem at the given linearization point.

    The eta variable is expressed in units of the linearization SINR (or the
    single-BS bound when that is zero), keeping the objective O(1); the
    optimum rarely exceeds the current point by more than one order.
    """
    gnn, cross = _sensing_link_gains(ch)
    s = _sensing_scale(gnn, cross, ch.beta_sq, ch.noise_bs, cons.p_max)
    e = (state.eta_prev if state.eta_prev > 0
         else _single_bs_sinr_bound(gnn, ch.beta_sq, ch.noise_bs, cons.p_max))
    denom = cross * s
    denom[np.arange(ch.num_bs), np.arange(ch.num_bs)] = ch.beta_sq * s
    comm_lhs, comm_rhs = _normalized_comm_rows(ch, cons)
    return SubproblemProgram(
        gnn=gnn * (s / e),
        denom_matrix=denom,
        noise=ch.noise_bs * s,
        comm_lhs=comm_lhs,
        comm_rhs=comm_rhs,
        p_max=cons.p_max,
        a=state.xi_prev * s - state.eta_prev / e,
        sensing_scale=s,
        eta_scale=e,
    )


def _clarabel_settings() -> "clarabel.DefaultSettings":
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.tol_gap_abs = 1e-10
    settings.tol_gap_rel = 1e-10
    settings.tol_feas = 1e-10
    return settings


_OK_STATUSES = ("Solved", "AlmostSolved")
_INFEASIBLE_STATUSES = ("PrimalInfeasible", "AlmostPrimalInfeasible")


def solve_subproblem(prog: SubproblemProgram) -> SubproblemSolution:
    """Solve one subproblem to conic-solver accuracy.

    The program is assembled directly in conic standard form
    (min q.x s.t. b - A x in K) and handed to a fresh interior-point solver,
    so the result is a pure function of the program data.  Each convexified
    numerator row becomes the second-order cone
    (L_n + 2, L_n - 2, sqrt(2)(xi_n + eta)) with
    L_n = rho_n g_n + a_n (xi_n - eta)/2 - a_n^2 / 4, which encodes
    (xi_n + eta)^2 <= 4 L_n.  A solver failure returns a typed status,
    never raises.
    """
    K = prog.num_bs
    nvar = prog.num_variables
    i_rho = np.arange(K)
    i_xi = np.arange(K, 2 * K)
    i_eta = 2 * K

    n_lin = 5 * K + 1
    rows = np.zeros((n_lin + 3 * K, nvar))
    b = np.zeros(n_lin + 3 * K)
    r = 0
    # comm rows: -lhs @ rho <= -rhs
    rows[r:r + K, :K] = -prog.comm_lhs
    b[r:r + K] = -prog.comm_rhs
    r += K
    # power box: rho <= p_max, -rho <= 0
    rows[r:r + K, :K] = np.eye(K)
    b[r:r + K] = prog.p_max
    r += K
    rows[r:r + K, :K] = -np.eye(K)
    r += K
    # denominators: denom @ rho - xi <= -noise
    rows[r:r + K, :K] = prog.denom_matrix
    rows[r:r + K, K:2 * K] = -np.eye(K)
    b[r:r + K] = -prog.noise
    r += K
    # xi >= 0, eta >= 0
    rows[r:r + K, K:2 * K] = -np.eye(K)
    r += K
    rows[r, i_eta] = -1.0
    r += 1
    # cone rows: s = b - A x must equal (L+2, L-2, sqrt(2)(xi+eta))
    for n in range(K):
        lin = np.zeros(nvar)
        lin[i_rho[n]] = prog.gnn[n]
        lin[i_xi[n]] = 0.5 * prog.a[n]
        lin[i_eta] = -0.5 * prog.a[n]
        const = -0.25 * prog.a[n] ** 2
        rows[r] = -lin
        b[r] = const + 2.0
        rows[r + 1] = -lin
        b[r + 1] = const - 2.0
        rows[r + 2, i_xi[n]] = -math.sqrt(2.0)
        rows[r + 2, i_eta] = -math.sqrt(2.0)
        r += 3

    q = np.zeros(nvar)
    q[i_eta] = -1.0
    cones = [clarabel.NonnegativeConeT(n_lin)]
    cones += [clarabel.SecondOrderConeT(3) for _ in range(K)]
    solver = clarabel.DefaultSolver(
        sparse.csc_matrix((nvar, nvar)), q, sparse.csc_matrix(rows), b,
        cones, _clarabel_settings())
    solution = solver.solve()
    status = str(solution.status)
    if status in _INFEASIBLE_STATUSES:
        return SubproblemSolution(None, None, None, "infeasible")
    if status not in _OK_STATUSES:
        return SubproblemSolution(None, None, None, status)
    x = np.asarray(solution.x, dtype=float)
    return SubproblemSolution(
        rho=x[:K],
        xi=x[K:2 * K] / prog.sensing_scale,
        eta=float(x[i_eta]) * prog.eta_scale,
        solver_status=status,
    )


def dump_subproblem_cbf(prog: SubproblemProgram, path) -> None:
    """Write one subproblem in CBF v1 for cross-checking with other solvers.

    Variable order is (rho, xi, eta), all in the nonnegative orthant.  The
    linear blocks are the comm rows, the power box and the denominator rows;
    each convexified numerator row becomes one rotated quadratic cone
    (2 x1 x2 >= x3^2) with x1 = rho_n g_n + a_n (xi_n - eta)/2 - a_n^2/4,
    x2 = 2 and x3 = xi_n + eta.  Data is in the program's scaled units.
    """
    K = prog.num_bs
    nvar = prog.num_variables
    i_rho, i_xi, i_eta = range(0, K), range(K, 2 * K), 2 * K

    acoord: list[tuple[int, int, float]] = []
    bcoord: list[tuple[int, float]] = []
    row = 0
    # comm rows: comm_lhs @ rho - comm_rhs >= 0
    for m in range(K):
        for k in range(K):
            if prog.comm_lhs[m, k] != 0.0:
                acoord.append((row, i_rho[k], prog.comm_lhs[m, k]))
        bcoord.append((row, -prog.comm_rhs[m]))
        row += 1
    # box rows: p_max - rho >= 0
    for k in range(K):
        acoord.append((row, i_rho[k], -1.0))
        bcoord.append((row, prog.p_max))
        row += 1
    # denominator rows: xi - denom @ rho - noise >= 0
    for n in range(K):
        acoord.append((row, i_xi[n], 1.0))
        for k in range(K):
            if prog.denom_matrix[n, k] != 0.0:
                acoord.append((row, i_rho[k], -prog.denom_matrix[n, k]))
        bcoord.append((row, -prog.noise[n]))
        row += 1
    # rotated cones, 3 rows each
    for n in range(K):
        acoord.append((row, i_rho[n], prog.gnn[n]))
        acoord.append((row, i_xi[n], 0.5 * prog.a[n]))
        acoord.append((row, i_eta, -0.5 * prog.a[n]))
        bcoord.append((row, -0.25 * prog.a[n] ** 2))
        bcoord.append((row + 1, 2.0))
        acoord.append((row + 2, i_xi[n], 1.0))
        acoord.append((row + 2, i_eta, 1.0))
        row += 3

    lines = ["VER", "1", "", "OBJSENSE", "MAX", "", "VAR", f"{nvar} 1",
             f"L+ {nvar}", "", "CON", f"{3 * K + 3 * K} {1 + K}", f"L+ {3 * K}"]
    lines += ["QR 3"] * K
    lines += ["", "OBJACOORD", "1", f"{i_eta} 1.0", "", "ACOORD", str(len(acoord))]
    lines += [f"{r} {c} {v!r}" for r, c, v in acoord]
    lines += ["", "BCOORD", str(len(bcoord))]
    lines += [f"{r} {v!r}" for r, v in bcoord]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


_EXTRAPOLATION_LADDER = (2.0, 4.0, 8.0, 16.0, 32.0)


def _comm_rows_satisfied(rho: np.ndarray, comm_lhs: np.ndarray,
                         comm_rhs: np.ndarray) -> bool:
    # Rows are normalized to O(1); allow conic-solver noise, which is three
    # orders below the 1e-6 relative violation the result contract permits.
    return bool(np.all(comm_lhs @ rho - comm_rhs >= -1e-9))


def sca_solve(ch: ChannelRealization, cons: OptConstraints,
              init: SubproblemState | None = None,
              on_subproblem=None) -> SolverResult:
    """Run the iterative power-allocation algorithm.

    Starts from a comm-feasible witness with exact denominators as the
    initial slacks, so the first surrogate admits the initial point; stops
    when the eta improvement falls below epsilon (relative to the previous
    eta) or the iteration cap is hit.  The trace is non-decreasing up to
    solver tolerance.

    Two refinements over the naive loop, both required for the iteration to
    actually reach the optimum within tens of rounds:

    * the linearization point of each round is restored to the exact
      denominators and achieved min SINR of the current powers (the same
      rule used for initialization) -- feeding the subproblem's own slack
      solution forward leaves the surrogate's quadratic penalty anchored at
      the initial slacks and stalls the ascent;
    * the subproblem step in rho is used as a search direction: geometric
      multiples of it are tried, and the candidate with the best exactly
      re-evaluated min SINR (among those satisfying the power box and comm
      rows exactly) is kept.  Every accepted point is verified through the
      true SINR expressions, so the guarantees are unaffected.
    """
    feas = check_comm_feasible(ch, cons)
    if not feas.feasible:
        return SolverResult(rho_opt=None, eta_opt=0.0,
                            xi_opt=None, eta_trace=[], iterations=0,
                            status=STATUS_INFEASIBLE,
                            infeasibility_certificate=feas.max_slack)

    gnn, _ = _sensing_link_gains(ch)
    if np.any(gnn <= 0.0):
        rho = feas.witness
        return SolverResult(rho_opt=rho, eta_opt=0.0,
                            xi_opt=sensing_denominators(rho, ch),
                            eta_trace=[0.0], iterations=0,
                            status=STATUS_SENSING_INFEASIBLE)

    comm_lhs, comm_rhs = _normalized_comm_rows(ch, cons)
    rho_cur = feas.witness
    eta_cur = min_sensing_sinr_overall(rho_cur, ch)
    if init is None:
        init = SubproblemState(xi_prev=sensing_denominators(rho_cur, ch),
                               eta_prev=eta_cur)
    state = init
    trace = [state.eta_prev]
    status = STATUS_MAX_ITER
    iterations = 0

    for iterations in range(1, cons.max_iterations + 1):
        prog = build_subproblem(ch, cons, state)
        if on_subproblem is not None:
            on_subproblem(iterations, prog)
        sol = solve_subproblem(prog)
        if sol.rho is None:
            return SolverResult(rho_opt=rho_cur, eta_opt=eta_cur,
                                xi_opt=sensing_denominators(rho_cur, ch),
                                eta_trace=trace, iterations=iterations,
                                status=STATUS_SOLVER_ERROR)
        rho_step = np.clip(sol.rho, 0.0, cons.p_max)
        best_rho, best_eta = rho_cur, eta_cur

        candidates = [rho_step]
        direction = rho_step - rho_cur
        if np.any(direction != 0.0):
            candidates += [rho_cur + t * direction for t in _EXTRAPOLATION_LADDER]
        # Uniform up-scaling keeps every comm SINR above its floor (noise is
        # the only fixed term), so rays through the origin escape the
        # surrogate's short steps when the optimum sits near the power box.
        rho_peak = float(np.max(rho_step))
        if rho_peak > 0:
            t_exact = cons.p_max / rho_peak
            for t in (t_exact,) + _EXTRAPOLATION_LADDER:
                if t > 1.0:
                    candidates.append(t * rho_step)
        for cand in candidates:
            cand = np.clip(cand, 0.0, cons.p_max)
            if not _comm_rows_satisfied(cand, comm_lhs, comm_rhs):
                continue
            cand_eta = min_sensing_sinr_overall(cand, ch)
            if cand_eta > best_eta:
                best_rho, best_eta = cand, cand_eta

        eta_cur_prev = eta_cur
        rho_cur, eta_cur = best_rho, best_eta
        prev = trace[-1]
        trace.append(sol.eta)
        state = SubproblemState(xi_prev=sensing_denominators(rho_cur, ch),
                                eta_prev=eta_cur)
        if (abs(sol.eta - prev) < cons.epsilon * max(prev, 1e-300)
                and abs(eta_cur - eta_cur_prev) < cons.epsilon * max(eta_cur_prev, 1e-300)):
            status = STATUS_CONVERGED
            break

    return SolverResult(rho_opt=rho_cur, eta_opt=eta_cur,
                        xi_opt=sensing_denominators(rho_cur, ch),
                        eta_trace=trace, iterations=iterations,
                        status=status)


def _oracle_lp_feasible(eta: float, gnn: np.ndarray, denom: np.ndarray,
                        noise: np.ndarray, comm_lhs: np.ndarray,
                        comm_rhs: np.ndarray, p_max: float
                        ) -> np.ndarray | None:
    """Feasibility LP of the fixed-eta problem; returns a witness or None.

    Row n: eta * (denom_n . rho + noise_n) <= gnn_n * rho_n, linear in rho.
    """
    K = gnn.shape[0]
    lhs = eta * denom
    lhs[np.arange(K), np.arange(K)] -= gnn
    rhs = -eta * noise
    scale = np.maximum(np.abs(lhs).max(axis=1) * p_max, np.abs(rhs))
    scale = np.where(scale > 0, scale, 1.0)
    a_ub = np.vstack([lhs / scale[:, None], -comm_lhs])
    b_ub = np.concatenate([rhs / scale, -comm_rhs])
    res = linprog(np.zeros(K), A_ub=a_ub, b_ub=b_ub,
                  bounds=[(0.0, p_max)] * K, method="highs")
    if res.status == 2:
        return None
    if not res.success:
        raise RuntimeError(f"oracle feasibility LP failed: {res.message}")
    return np.clip(res.x, 0.0, p_max)


def bisection_oracle(ch: ChannelRealization, cons: OptConstraints,
                     tol: float = 0.0, rel_tol: float = 1e-9
                     ) -> tuple[float, np.ndarray]:
    """Global optimum of the max-min sensing SINR problem by bisection.

    Feasibility of the fixed-eta LP is monotone non-increasing in eta, so the
    largest feasible eta on [0, eta_ub] is the optimum.  Returns the largest
    certified-feasible eta (within max(tol, rel_tol * eta)) and its witness.
    """
    feas = check_comm_feasible(ch, cons)
    if not feas.feasible:
        raise ValueError("comm-infeasible instance; the oracle requires a "
                         "nonempty feasible set")
    gnn_raw, cross = _sensing_link_gains(ch)
    if np.any(gnn_raw <= 0.0):
        return 0.0, feas.witness

    s = _sensing_scale(gnn_raw, cross, ch.beta_sq, ch.noise_bs, cons.p_max)
    K = ch.num_bs
    gnn = gnn_raw * s
    denom = cross * s
    denom[np.arange(K), np.arange(K)] = ch.beta_sq * s
    noise = ch.noise_bs * s
    comm_lhs, comm_rhs = _normalized_comm_rows(ch, cons)

    eta_ub = float(np.max(cons.p_max * gnn / (cons.p_max * np.diag(denom) + noise)))
    witness = _oracle_lp_feasible(eta_ub, gnn, denom, noise,
                                  comm_lhs, comm_rhs, cons.p_max)
    if witness is not None:
        return eta_ub, witness

    lo, hi = 0.0, eta_ub
    rho_lo = feas.witness
    floor = eta_ub * 1e-15
    for _ in range(256):
        if hi - lo <= max(tol, rel_tol * lo, floor):
            break
        mid = 0.5 * (lo + hi)
        witness = _oracle_lp_feasible(mid, gnn, denom, noise,
                                      comm_lhs, comm_rhs, cons.p_max)
        if witness is not None:
            lo, rho_lo = mid, witness
        else:
            hi = mid
    return lo, rho_lo
