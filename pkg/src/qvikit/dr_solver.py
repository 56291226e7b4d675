"""Douglas-Rachford splitting for projected solutions of quasi-variational
inequalities whose constraint set moves with the decision variable.

The problem data is a triple (C, S, T): a feasible set C, a moving set
x -> S(x), and a strongly monotone Lipschitz operator T.  A projected
solution is a pair (z*, x*) with

    z* = P_{S(x*)}(z* - xi * T(z*))   and   x* = P_C(z*),

found here as the fixed point of the triple map

    rho(z, y, x) = ( P_{S(x)}(y),
                     R_xi(2 * P_{S(x)}(y) - y),
                     P_C(z) ),

where R_xi is the reflected resolvent of T.  Under the parameter conditions
checked by ``validate_params``, rho is a delta-contraction in the weighted
norm alpha*||z|| + ||y|| + beta*||x|| with delta = alpha + 2*L_xi, which
gives linear convergence and uniqueness of the fixed point.  ``solve_dr``
iterates

    z_{k+1} = P_{S(x_k)}(y_k)
    y_{k+1} = R_xi(2*z_{k+1} - y_k)
    x_{k+1} = P_C(z_{k+1})

which is exactly the rho iteration on the staggered triple
(z_{k+1}, y_k, x_k); the error bound delta^k * (initial weighted error)
therefore applies to that staggered indexing, and trace recording follows
it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .operators import (MonotoneMap, contraction_modulus, optimal_stepsize,
                        reflected_resolvent)
from .sets import ConvexSet, MovingSet, as_point

_GAMMA_CAP = 5.0 / 3.0


@dataclass(frozen=True, eq=False)
class Problem:
    """Problem data (C, phi, T) in a common dimension."""

    C: ConvexSet
    phi: MovingSet
    T: MonotoneMap
    dim: int

    def __post_init__(self):
        for name, d in (("C", self.C.dim), ("phi", self.phi.dim),
                        ("T", self.T.dim)):
            if d != self.dim:
                raise ValueError(f"{name} has dimension {d}, expected {self.dim}")
        if self.phi.lipschitz_l < 0.0:
            raise ValueError("lipschitz_l must be nonnegative")
        if not (self.T.L >= self.T.mu > 0.0):
            raise ValueError("operator must satisfy L >= mu > 0")


@dataclass(frozen=True)
class DRParams:
    """Step xi, weighted-norm weights alpha/beta, and stopping controls."""

    xi: float
    alpha: float
    beta: float
    tol: float = 1e-8
    max_iter: int = 100_000

    def __post_init__(self):
        if min(self.xi, self.alpha, self.beta, self.tol) <= 0.0:
            raise ValueError("xi, alpha, beta, tol must all be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True, eq=False)
class TripleState:
    """The iterate triple w = (z, y, x)."""

    z: np.ndarray
    y: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        z = as_point(self.z, name="z")
        y = as_point(self.y, dim=z.shape[0], name="y")
        x = as_point(self.x, dim=z.shape[0], name="x")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    @property
    def dim(self) -> int:
        return self.z.shape[0]


def weighted_norm(w: TripleState, alpha: float, beta: float) -> float:
    """alpha*||z|| + ||y|| + beta*||x||."""
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError("alpha and beta must be positive")
    return float(alpha * np.linalg.norm(w.z) + np.linalg.norm(w.y)
                 + beta * np.linalg.norm(w.x))


def weighted_distance(w1: TripleState, w2: TripleState,
                      alpha: float, beta: float) -> float:
    return weighted_norm(TripleState(w1.z - w2.z, w1.y - w2.y, w1.x - w2.x),
                         alpha, beta)


@dataclass(frozen=True)
class ParamCheck:
    """Outcome of the parameter feasibility conditions.

    ``delta`` is alpha + 2*L_xi regardless of feasibility; it certifies
    contraction only when ``feasible`` is True.  Violations are data, not
    faults: the solver may still run, only the certificate is void.
    """

    feasible: bool
    delta: float
    modulus: float
    gamma: float
    violations: tuple[str, ...]


def validate_params(prob: Problem, p: DRParams) -> ParamCheck:
    """Check 2l <= beta <= alpha*L_xi, alpha + 2*L_xi < 1, and L/mu < 5/3."""
    modulus = contraction_modulus(prob.T.L, prob.T.mu, p.xi)
    gamma = prob.T.L / prob.T.mu
    l = prob.phi.lipschitz_l
    violations = []
    if 2.0 * l > p.beta:
        violations.append("2*l <= beta")
    if p.beta > p.alpha * modulus:
        violations.append("beta <= alpha * L_xi")
    if p.alpha + 2.0 * modulus >= 1.0:
        violations.append("alpha + 2*L_xi < 1")
    if gamma >= _GAMMA_CAP:
        violations.append("gamma < 5/3")
    return ParamCheck(
        feasible=not violations,
        delta=p.alpha + 2.0 * modulus,
        modulus=modulus,
        gamma=gamma,
        violations=tuple(violations),
    )


def default_params(prob: Problem, xi: float | None = None, tol: float = 1e-8,
                   max_iter: int = 100_000) -> DRParams:
    """Parameters from the canonical choice beta = 2l, alpha = L_xi, with
    alpha bumped to beta/L_xi when needed for beta <= alpha*L_xi; xi
    defaults to the modulus-minimizing 1/L."""
    if xi is None:
        xi = optimal_stepsize(prob.T.L, prob.T.mu)[0]
    modulus = contraction_modulus(prob.T.L, prob.T.mu, xi)
    beta = max(2.0 * prob.phi.lipschitz_l, 1e-12)
    if modulus > 0.0:
        alpha = max(modulus, beta / modulus)
    else:
        alpha = 0.5
    return DRParams(xi=xi, alpha=alpha, beta=beta, tol=tol, max_iter=max_iter)


def rho_map(prob: Problem, p: DRParams, w: TripleState) -> TripleState:
    """One application of the triple fixed-point map."""
    z_new = prob.phi.project(w.x, w.y)
    y_new = reflected_resolvent(prob.T, p.xi, 2.0 * z_new - w.y)
    x_new = prob.C.project(w.z)
    return TripleState(z_new, y_new, x_new)


def residual(prob: Problem, xi: float, z, x) -> float:
    """||z - P_{S(x)}(z - xi*T(z))|| + ||x - P_C(z)||; zero exactly at a
    projected-solution pair."""
    if xi <= 0.0:
        raise ValueError("xi must be positive")
    z = as_point(z, prob.dim)
    x = as_point(x, prob.dim)
    inner = prob.phi.project(x, z - xi * prob.T(z))
    return float(np.linalg.norm(z - inner) + np.linalg.norm(x - prob.C.project(z)))


def theoretical_bound(k, delta: float, initial_err: float):
    """delta**k * initial_err, the linear-rate error certificate."""
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    return delta ** np.asarray(k, dtype=float) * initial_err


@dataclass(frozen=True, eq=False)
class Trace:
    """Per-iteration detail, recorded on request.

    Row k (0-based) holds the staggered state (z_{k+1}, y_k, x_k) that the
    contraction certificate bounds, the step norms of pass k+1 (dz is NaN on
    the first pass, where no previous z exists), and the solution residual
    of the post-update pair (z_{k+1}, x_{k+1}).
    """

    z: np.ndarray
    y: np.ndarray
    x: np.ndarray
    dz: np.ndarray
    dy: np.ndarray
    dx: np.ndarray
    solution_residuals: np.ndarray

    def staggered_states(self) -> list[TripleState]:
        return [TripleState(self.z[k], self.y[k], self.x[k])
                for k in range(self.z.shape[0])]


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Solver outcome.

    residual_history[k] is the stopping-rule change ||dy|| + ||dx|| of pass
    k+1 (length equals iterations).  When the parameters are feasible,
    theoretical_bounds[k] bounds the weighted distance of staggered state
    k+1 to the fixed point, seeded by the computable Banach estimate
    ||v2 - v1||_1 / (1 - delta); delta is None when the certificate is void.
    """

    status: str
    iterations: int
    final: TripleState
    residual_history: np.ndarray
    delta: float | None
    theoretical_bounds: np.ndarray
    elapsed: float
    notes: tuple[str, ...] = ()
    outer_cycles: int | None = None
    trace: Trace | None = None


def _invalid_report(prob: Problem, note: str) -> SolveReport:
    zero = np.zeros(prob.dim)
    return SolveReport(
        status="invalid_params",
        iterations=0,
        final=TripleState(zero, zero.copy(), zero.copy()),
        residual_history=np.zeros(0),
        delta=None,
        theoretical_bounds=np.zeros(0),
        elapsed=0.0,
        notes=(note,),
    )


def solve_dr(prob: Problem, p: DRParams, x0, y0,
             record_trace: bool = False) -> SolveReport:
    """Run the splitting iteration from (x0, y0) until the combined step
    ||y_{k+1}-y_k|| + ||x_{k+1}-x_k|| drops to p.tol or max_iter is hit.

    x0 is projected onto C when it is not already a member (noted in the
    report); running with infeasible parameters is allowed but voids the
    delta certificate.
    """
    try:
        x = as_point(x0, prob.dim, name="x0")
        y = as_point(y0, prob.dim, name="y0")
    except ValueError as err:
        return _invalid_report(prob, str(err))

    notes = []
    check = validate_params(prob, p)
    if not check.feasible:
        notes.append("parameter conditions violated: "
                     + "; ".join(check.violations)
                     + " (contraction certificate void)")
    if not prob.C.contains(x):
        x = prob.C.project(x)
        notes.append("x0 was outside C and has been projected onto it")

    changes = []
    stag_z, stag_y, stag_x = [], [], []
    steps_z, steps_y, steps_x = [], [], []
    sol_residuals = []
    z_prev = None
    status = "max_iter"
    iterations = 0

    t0 = time.perf_counter()
    for _ in range(p.max_iter):
        z_new = prob.phi.project(x, y)
        y_new = reflected_resolvent(prob.T, p.xi, 2.0 * z_new - y)
        x_new = prob.C.project(z_new)
        iterations += 1

        dy = float(np.linalg.norm(y_new - y))
        dx = float(np.linalg.norm(x_new - x))
        changes.append(dy + dx)
        stag_z.append(z_new)
        stag_y.append(y)
        stag_x.append(x)
        if record_trace:
            steps_z.append(np.nan if z_prev is None
                           else float(np.linalg.norm(z_new - z_prev)))
            steps_y.append(dy)
            steps_x.append(dx)
            sol_residuals.append(residual(prob, p.xi, z_new, x_new))
        z_prev, y, x = z_new, y_new, x_new

        if changes[-1] <= p.tol:
            status = "converged"
            break
    elapsed = time.perf_counter() - t0

    # Banach-seeded bounds need the next staggered state (z_{K+1}, y_K, x_K)
    bounds = np.zeros(0)
    if check.feasible and iterations >= 1:
        if iterations >= 2:
            z2, y2, x2 = stag_z[1], stag_y[1], stag_x[1]
        else:
            z2, y2, x2 = prob.phi.project(x, y), y, x
        step1 = (p.alpha * np.linalg.norm(z2 - stag_z[0])
                 + np.linalg.norm(y2 - stag_y[0])
                 + p.beta * np.linalg.norm(x2 - stag_x[0]))
        seed = float(step1) / (1.0 - check.delta)
        bounds = check.delta ** np.arange(iterations) * seed

    trace = None
    if record_trace:
        trace = Trace(
            z=np.array(stag_z), y=np.array(stag_y), x=np.array(stag_x),
            dz=np.array(steps_z), dy=np.array(steps_y), dx=np.array(steps_x),
            solution_residuals=np.array(sol_residuals),
        )

    return SolveReport(
        status=status,
        iterations=iterations,
        final=TripleState(z_prev, y, x),
        residual_history=np.array(changes),
        delta=check.delta if check.feasible else None,
        theoretical_bounds=bounds,
        elapsed=elapsed,
        notes=tuple(notes),
        trace=trace,
    )
