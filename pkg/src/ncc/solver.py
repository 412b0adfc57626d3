"""Value-function iteration for the central government's dynamic program.

The state is (theta, l_tilde, omega) discretized on a uniform grid over the
unit cube; the control (p, m) lives on its own uniform grid over the unit
square. A backup evaluates, for every state/action pair, the period payoff in
expectation over the execution-cost draw plus the discounted continuation
value integrated over belief and execution noise with Gauss-Hermite
quadrature; the continuation value is interpolated multilinearly. Iterating
the backup from zero is a sup-norm contraction with modulus ``delta``.

Two conventions keep the solver well defined on the closed cube:

* the expected next state uses the cost-averaged ideal consistency, so the
  cost draw never becomes a fourth dimension;
* at the l_tilde = 1 node the raw stock is infinite; the carrying cost is
  evaluated with the stock capped at ``L_COST_CAP`` (exact for every state
  with stock below it) and the node is treated as absorbing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, InvariantError, NumericalError
from .model import PolicyAction, _central_cost, _investment_components, _one_step_variance, local_best_response, mean_best_response
from .numerics import gauss_hermite_normal, trilinear, uniform_grid
from .params import ModelParams

__all__ = [
    "GridSpec",
    "SolvedPolicy",
    "FocDiagnostics",
    "bellman_backup",
    "solve_value_iteration",
    "foc_residuals",
    "steady_state_credibility",
    "policy_table",
    "write_policy_csv",
    "read_policy_csv",
    "write_solve_manifest",
]

#: Stock level at which the solver caps the carrying cost; states whose raw
#: stock stays below this are evaluated exactly.
L_COST_CAP = 99.0


@dataclass(frozen=True)
class GridSpec:
    """Discretization of the state cube, the action square, and the noise law."""

    n_theta: int
    n_ltilde: int
    n_omega: int
    n_p: int
    n_m: int
    quad_nodes: int = 7
    tol: float = 1e-8
    max_iter: int = 5000

    def __post_init__(self):
        for name in ("n_theta", "n_ltilde", "n_omega", "n_p", "n_m"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 2:
                raise DomainError(f"{name} must be an integer >= 2, got {v!r}")
        if not isinstance(self.quad_nodes, int) or self.quad_nodes < 1:
            raise DomainError(f"quad_nodes must be a positive integer, got {self.quad_nodes!r}")
        if self.quad_nodes % 2 == 0:
            raise DomainError("quad_nodes must be odd so the zero noise node is included")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise DomainError(f"tol must be a finite positive real, got {self.tol!r}")
        if not isinstance(self.max_iter, int) or self.max_iter < 1:
            raise DomainError(f"max_iter must be a positive integer, got {self.max_iter!r}")

    @property
    def state_shape(self) -> tuple:
        return (self.n_theta, self.n_ltilde, self.n_omega)

    def to_mapping(self) -> dict:
        return {
            "n_theta": self.n_theta,
            "n_ltilde": self.n_ltilde,
            "n_omega": self.n_omega,
            "n_p": self.n_p,
            "n_m": self.n_m,
            "quad_nodes": self.quad_nodes,
            "tol": self.tol,
            "max_iter": self.max_iter,
        }


@dataclass
class SolvedPolicy:
    """Converged value and policy tables on the state grid."""

    value: np.ndarray
    policy_p: np.ndarray
    policy_m: np.ndarray
    iterations: int
    final_residual: float
    residual_history: list = field(default_factory=list)
    grid: GridSpec | None = None

    def policy_at(self, theta, l_tilde, omega):
        """Interpolated (p, m) at arbitrary state coordinates, clamped to [0, 1]."""
        p = np.clip(trilinear(self.policy_p, theta, l_tilde, omega), 0.0, 1.0)
        m = np.clip(trilinear(self.policy_m, theta, l_tilde, omega), 0.0, 1.0)
        return p, m


class BellmanOperator:
    """Precomputed backup operator for one (grid, params) pair.

    Everything that does not depend on the value table (period utilities,
    expected next-state coordinates per action and noise node, quadrature
    weights) is evaluated once at construction.
    """

    def __init__(self, grid: GridSpec, params: ModelParams):
        self.grid = grid
        self.params = params

        self.theta_axis = uniform_grid(grid.n_theta)
        self.ltilde_axis = uniform_grid(grid.n_ltilde)
        self.omega_axis = uniform_grid(grid.n_omega)
        self.p_axis = uniform_grid(grid.n_p)
        self.m_axis = uniform_grid(grid.n_m)

        # flattened state mesh, theta-major (C order)
        th, lt, om = np.meshgrid(
            self.theta_axis, self.ltilde_axis, self.omega_axis, indexing="ij"
        )
        self.theta = th.ravel()
        self.ltilde = lt.ravel()
        self.omega = om.ravel()
        self.n_states = self.theta.size

        # actions enumerated p-major so first-argmax tie-breaking picks the
        # lexicographically lowest (p, m)
        pp, mm = np.meshgrid(self.p_axis, self.m_axis, indexing="ij")
        self.action_p = pp.ravel()
        self.action_m = mm.ravel()
        self.n_actions = self.action_p.size

        # raw institutionalization stock; the top node is infinite, so the
        # carrying cost caps the stock at a fixed level to stay bounded
        finite = self.ltilde < 1.0
        raw_l = np.where(finite, self.ltilde / np.where(finite, 1.0 - self.ltilde, 1.0), np.inf)
        self.raw_l = raw_l
        self.cost_l = np.minimum(raw_l, L_COST_CAP)

        self.commit_mask = self.ltilde >= params.l_tilde_threshold

        # deterministic stock transition (independent of action and noise)
        accrues = self.theta >= params.theta_threshold
        l_next = raw_l + np.where(accrues, params.phi * self.theta, 0.0)
        with np.errstate(invalid="ignore"):
            self.ltilde_next = np.where(np.isinf(l_next), 1.0, l_next / (1.0 + l_next))

        eps_nodes, eps_w = gauss_hermite_normal(params.sigma_eps, grid.quad_nodes)
        nu_nodes, nu_w = gauss_hermite_normal(params.sigma_nu, grid.quad_nodes)
        self.eps_nodes = np.repeat(eps_nodes, nu_nodes.size)
        self.nu_nodes = np.tile(nu_nodes, eps_nodes.size)
        self.quad_w = np.repeat(eps_w, nu_w.size) * np.tile(nu_w, eps_w.size)

        self._precompute()

    def _precompute(self):
        params = self.params
        u = np.empty((self.n_actions, self.n_states))
        self._theta_next = []
        self._omega_next = []
        # overflow surfaces as a named NumericalError below, not as a warning
        with np.errstate(over="ignore", invalid="ignore"):
            for a in range(self.n_actions):
                p, m = self.action_p[a], self.action_m[a]
                action = PolicyAction(p=p, m=m)
                c_off = mean_best_response(params, action, commitment_active=False)
                c_on = mean_best_response(params, action, commitment_active=True)
                c_star = np.where(self.commit_mask, c_on, c_off)

                # period payoff; investment is evaluated algebraically so corner
                # grid states with alpha + omega > 1 stay well defined
                i_b, i_r, i_s = _investment_components(self.theta, self.omega, p, params)
                omega_after = np.maximum(self.omega - params.n_s * c_star, 0.0)
                var = _one_step_variance(omega_after, p, params)
                u[a] = (
                    params.lambda_ * (i_b + i_r + i_s)
                    - params.gamma * var
                    - _central_cost(p, m, params)
                    - params.psi * self.cost_l
                )

                # expected next state per noise node
                c_real = np.clip(c_star[:, None] + self.nu_nodes[None, :], 0.0, 1.0)
                theta_next = np.clip(
                    self.theta[:, None]
                    + params.eta * (c_real * p - self.theta[:, None])
                    + self.eps_nodes[None, :],
                    0.0,
                    1.0,
                )
                omega_next = np.clip(self.omega[:, None] - params.n_s * c_real, 0.0, 1.0)
                self._theta_next.append(theta_next)
                self._omega_next.append(omega_next)

        bad = ~np.isfinite(u)
        if bad.any():
            a, s = np.argwhere(bad)[0]
            raise NumericalError(
                f"non-finite period utility at state index {self._state_index(s)}, "
                f"action index {self._action_index(a)}"
            )
        self.u = u
        self.u_max = float(np.abs(u).max())

    def _state_index(self, flat: int) -> tuple:
        return tuple(int(i) for i in np.unravel_index(flat, self.grid.state_shape))

    def _action_index(self, flat: int) -> tuple:
        return tuple(int(i) for i in np.unravel_index(flat, (self.grid.n_p, self.grid.n_m)))

    def action_values(self, value: np.ndarray) -> np.ndarray:
        """Q[a, s]: payoff of each action at each state given continuation ``value``."""
        if value.shape != self.grid.state_shape:
            raise DomainError(
                f"value table shape {value.shape} does not match grid {self.grid.state_shape}"
            )
        if not np.isfinite(value).all():
            raise DomainError("value table must be finite everywhere")
        q = np.empty_like(self.u)
        lt_next = self.ltilde_next[:, None]
        for a in range(self.n_actions):
            cont = trilinear(value, self._theta_next[a], lt_next, self._omega_next[a])
            q[a] = self.u[a] + self.params.delta * (cont @ self.quad_w)
        return q

    def apply(self, value: np.ndarray):
        """One backup sweep: new value table plus greedy policy tables."""
        q = self.action_values(value)
        best = q.argmax(axis=0)  # first occurrence == lexicographically lowest action
        shape = self.grid.state_shape
        v_next = q[best, np.arange(self.n_states)].reshape(shape)
        policy_p = self.action_p[best].reshape(shape)
        policy_m = self.action_m[best].reshape(shape)
        return v_next, policy_p, policy_m


def bellman_backup(value: np.ndarray, grid: GridSpec, params: ModelParams):
    """Single application of the Bellman operator to ``value``.

    Returns ``(next_value, policy_p, policy_m)``. Building the operator does
    the heavy precomputation; reuse :class:`BellmanOperator` directly when
    applying repeatedly.
    """
    return BellmanOperator(grid, params).apply(np.asarray(value, dtype=float))


def solve_value_iteration(grid: GridSpec, params: ModelParams) -> SolvedPolicy:
    """Iterate the backup from V = 0 until the sup-norm update falls below tol.

    Every consecutive residual pair is checked against the discount-factor
    contraction inequality; a violation indicates numerical corruption and
    raises immediately. Failing to converge within ``max_iter`` raises
    :class:`ConvergenceError` carrying the residual history.
    """
    op = BellmanOperator(grid, params)
    value = np.zeros(grid.state_shape)
    history: list[float] = []
    policy_p = policy_m = value
    for iteration in range(1, grid.max_iter + 1):
        new_value, policy_p, policy_m = op.apply(value)
        residual = float(np.abs(new_value - value).max())
        if history and residual > params.delta * history[-1] + 1e-12:
            raise InvariantError(
                f"contraction violated at iteration {iteration}: "
                f"{residual} > {params.delta} * {history[-1]}"
            )
        history.append(residual)
        value = new_value
        if residual < grid.tol:
            return SolvedPolicy(
                value=value,
                policy_p=policy_p,
                policy_m=policy_m,
                iterations=iteration,
                final_residual=residual,
                residual_history=history,
                grid=grid,
            )
    raise ConvergenceError(
        f"value iteration did not reach tol={grid.tol} within {grid.max_iter} iterations "
        f"(last residual {history[-1]})",
        residual_history=history,
    )


@dataclass
class FocDiagnostics:
    """Finite-difference optimality diagnostics of a solved policy.

    All arrays live on the state grid. On each control axis the greedy action
    is either interior, in which case ``residual_*`` holds the central
    difference of the action-value function and ``bound_*`` the
    curvature-times-step bound it must not exceed, or on the boundary, where
    ``boundary_grad_*``
    holds the one-sided derivative whose sign certifies the corner
    (non-positive at the lower edge, non-negative at the upper edge).
    """

    argmax_p: np.ndarray
    argmax_m: np.ndarray
    interior_p: np.ndarray
    interior_m: np.ndarray
    residual_p: np.ndarray
    residual_m: np.ndarray
    bound_p: np.ndarray
    bound_m: np.ndarray
    boundary_grad_p: np.ndarray
    boundary_grad_m: np.ndarray
    step_p: float
    step_m: float

    def interior_ok(self, slack: float = 1e-12) -> bool:
        ok_p = np.all(np.abs(self.residual_p[self.interior_p]) <= self.bound_p[self.interior_p] + slack)
        ok_m = np.all(np.abs(self.residual_m[self.interior_m]) <= self.bound_m[self.interior_m] + slack)
        return bool(ok_p and ok_m)

    def boundary_ok(self, slack: float = 1e-12) -> bool:
        low_p = (~self.interior_p) & (self.argmax_p == 0)
        high_p = (~self.interior_p) & (self.argmax_p > 0)
        low_m = (~self.interior_m) & (self.argmax_m == 0)
        high_m = (~self.interior_m) & (self.argmax_m > 0)
        return bool(
            np.all(self.boundary_grad_p[low_p] <= slack)
            and np.all(self.boundary_grad_p[high_p] >= -slack)
            and np.all(self.boundary_grad_m[low_m] <= slack)
            and np.all(self.boundary_grad_m[high_m] >= -slack)
        )


def axis_diagnostics(q_grid: np.ndarray, step_p: float, step_m: float):
    """Per-axis finite-difference diagnostics of one state's action values.

    ``q_grid`` has shape (n_p, n_m). Returns a dict with the greedy indices,
    per-axis interior flags, central-difference residuals, curvature bounds
    and signed one-sided boundary derivatives (NaN where not applicable).
    """
    flat = int(q_grid.argmax())
    ip, im = np.unravel_index(flat, q_grid.shape)
    out = {"ip": int(ip), "im": int(im)}
    for axis, idx, other, step in (("p", ip, im, step_p), ("m", im, ip, step_m)):
        line = q_grid[:, other] if axis == "p" else q_grid[other, :]
        n = line.size
        interior = 0 < idx < n - 1
        out[f"interior_{axis}"] = interior
        if interior:
            out[f"residual_{axis}"] = (line[idx + 1] - line[idx - 1]) / (2.0 * step)
            curvature = abs(line[idx + 1] - 2.0 * line[idx] + line[idx - 1]) / step**2
            out[f"bound_{axis}"] = curvature * step
            out[f"boundary_grad_{axis}"] = math.nan
        else:
            out[f"residual_{axis}"] = math.nan
            out[f"bound_{axis}"] = math.nan
            if idx == 0:
                out[f"boundary_grad_{axis}"] = (line[1] - line[0]) / step
            else:
                out[f"boundary_grad_{axis}"] = (line[-1] - line[-2]) / step
    return out


def foc_residuals(solved: SolvedPolicy, grid: GridSpec, params: ModelParams) -> FocDiagnostics:
    """First-order-condition diagnostics of ``solved`` on a (possibly refined) action grid.

    ``grid`` must match the solved state grid; its ``n_p``/``n_m`` define the
    diagnostic action grid, which may be finer than the one used to solve.
    The greedy action of the Bellman objective (period payoff plus discounted
    interpolated continuation under ``solved.value``) is located per state and
    characterized by central differences (interior) or one-sided derivative
    signs (boundary).
    """
    if solved.value.shape != grid.state_shape:
        raise DomainError(
            f"solved value shape {solved.value.shape} does not match grid {grid.state_shape}"
        )
    op = BellmanOperator(grid, params)
    q = op.action_values(solved.value)  # [A, S]
    step_p = 1.0 / (grid.n_p - 1)
    step_m = 1.0 / (grid.n_m - 1)

    shape = grid.state_shape
    fields_ = {
        name: np.empty(shape)
        for name in ("residual_p", "residual_m", "bound_p", "bound_m", "boundary_grad_p", "boundary_grad_m")
    }
    argmax_p = np.empty(shape, dtype=int)
    argmax_m = np.empty(shape, dtype=int)
    interior_p = np.empty(shape, dtype=bool)
    interior_m = np.empty(shape, dtype=bool)

    for s in range(op.n_states):
        diag = axis_diagnostics(q[:, s].reshape(grid.n_p, grid.n_m), step_p, step_m)
        idx = np.unravel_index(s, shape)
        argmax_p[idx] = diag["ip"]
        argmax_m[idx] = diag["im"]
        interior_p[idx] = diag["interior_p"]
        interior_m[idx] = diag["interior_m"]
        for name in fields_:
            fields_[name][idx] = diag[name]

    return FocDiagnostics(
        argmax_p=argmax_p,
        argmax_m=argmax_m,
        interior_p=interior_p,
        interior_m=interior_m,
        step_p=step_p,
        step_m=step_m,
        **fields_,
    )


def steady_state_credibility(
    action: PolicyAction,
    kappa: float | None,
    params: ModelParams,
    commitment_active: bool = False,
) -> float:
    """Fixed point of the noiseless belief recursion under constant controls.

    Belief moves toward ``c* * p`` each period, so the unique rest point is
    exactly that product. ``kappa=None`` averages the ideal consistency over
    the cost distribution.
    """
    if kappa is None:
        c_star = mean_best_response(params, action, commitment_active)
    else:
        c_star = local_best_response(params, action, kappa, commitment_active)
    return c_star * action.p


# --- exports ----------------------------------------------------------------


def policy_table(solved: SolvedPolicy):
    """Solved tables as a tidy frame: one row per state grid node."""
    import pandas as pd

    grid = solved.grid
    if grid is None:
        raise DomainError("SolvedPolicy carries no grid metadata")
    th, lt, om = np.meshgrid(
        uniform_grid(grid.n_theta),
        uniform_grid(grid.n_ltilde),
        uniform_grid(grid.n_omega),
        indexing="ij",
    )
    return pd.DataFrame(
        {
            "theta": th.ravel(),
            "l_tilde": lt.ravel(),
            "omega": om.ravel(),
            "value": solved.value.ravel(),
            "p_star": solved.policy_p.ravel(),
            "m_star": solved.policy_m.ravel(),
        }
    )


def write_policy_csv(solved: SolvedPolicy, path) -> None:
    policy_table(solved).to_csv(path, index=False)


def read_policy_csv(path, grid: GridSpec) -> SolvedPolicy:
    """Rebuild solved tables from their CSV export given the grid they live on."""
    import pandas as pd

    frame = pd.read_csv(path, float_precision="round_trip")
    expected_cols = ["theta", "l_tilde", "omega", "value", "p_star", "m_star"]
    if list(frame.columns) != expected_cols:
        raise DomainError(f"{path}: expected columns {expected_cols}, found {list(frame.columns)}")
    shape = grid.state_shape
    if len(frame) != int(np.prod(shape)):
        raise DomainError(
            f"{path}: {len(frame)} rows do not match grid volume {int(np.prod(shape))}"
        )
    for col, axis in (("theta", uniform_grid(grid.n_theta)),
                      ("l_tilde", uniform_grid(grid.n_ltilde)),
                      ("omega", uniform_grid(grid.n_omega))):
        seen = np.unique(frame[col].to_numpy())
        if seen.size != axis.size or not np.allclose(seen, axis):
            raise DomainError(f"{path}: column {col!r} does not match the configured grid axis")
    return SolvedPolicy(
        value=frame["value"].to_numpy().reshape(shape),
        policy_p=frame["p_star"].to_numpy().reshape(shape),
        policy_m=frame["m_star"].to_numpy().reshape(shape),
        iterations=0,
        final_residual=math.nan,
        residual_history=[],
        grid=grid,
    )


def write_solve_manifest(solved: SolvedPolicy, path) -> None:
    """Plain-text solve report: grid metadata plus the residual history."""
    grid = solved.grid
    lines = ["solver: value iteration"]
    if grid is not None:
        for key, val in grid.to_mapping().items():
            lines.append(f"grid.{key}: {val}")
    lines.append(f"iterations: {solved.iterations}")
    lines.append(f"final_residual: {solved.final_residual!r}")
    lines.append("residual_history:")
    lines.extend(f"  {i + 1}: {r!r}" for i, r in enumerate(solved.residual_history))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
