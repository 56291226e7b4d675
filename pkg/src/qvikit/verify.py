"""Numerical certification of the structural assumptions behind the solver
certificate, plus the two canonical instances used across the test suite.

Whether a moving set actually has the declared projection-Lipschitz
property, whether an operator's declared constants hold, and whether the
parameter conditions are feasible cannot be taken on faith: every check
here samples the relevant inequality and reports the worst observed ratio
together with the witnessing points.  All checks are deterministic given
the sampler seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dr_solver import Problem, TripleState
from .operators import AffineMap
from .sets import (Box, ConvexSet, MovingSet, Polytope, SamplerConfig, Segment,
                   SegmentFamily, TranslatedSet, as_point, hausdorff_estimate)

PROJECTION_RATIO_SLACK = 1e-10
HAUSDORFF_RATIO_SLACK = 1e-6


@dataclass(frozen=True, eq=False)
class ProjectionGapReport:
    """Worst sampled ratio ||P_{S(x)}(z) - P_{S(y)}(z)|| / ||x - y|| against
    the declared constant l."""

    max_ratio: float
    witness_x: np.ndarray
    witness_y: np.ndarray
    witness_z: np.ndarray
    declared_l: float
    samples: int
    seed: int
    ok: bool

    def to_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "witness": {"x": self.witness_x.tolist(),
                        "y": self.witness_y.tolist(),
                        "z": self.witness_z.tolist()},
            "declared_l": self.declared_l,
            "samples": self.samples,
            "seed": self.seed,
            "ok": self.ok,
        }


def check_projection_lipschitz(phi: MovingSet, domain: ConvexSet, l: float,
                               sampler: SamplerConfig | None = None
                               ) -> ProjectionGapReport:
    """Sample x, y uniformly from the domain and z Gaussian (sampler.scale)
    around the domain's reference point; report the maximum projection-gap
    ratio and its witness triple.

    The Gaussian z-scale deliberately reaches far outside the sets so that
    the projection regimes where the gap is extremal (z beyond every face)
    are exercised, not just the interior.
    """
    sampler = sampler or SamplerConfig()
    rng = sampler.rng()
    n = sampler.count
    X = domain.sample_batch(rng, n)
    Y = domain.sample_batch(rng, n)
    Z = domain.reference_point() + sampler.scale * rng.standard_normal((n, phi.dim))

    sep = np.linalg.norm(X - Y, axis=1)
    keep = sep > 1e-12
    X, Y, Z, sep = X[keep], Y[keep], Z[keep], sep[keep]
    P = phi.project_batch(X, Z)
    Q = phi.project_batch(Y, Z)
    ratios = np.linalg.norm(P - Q, axis=1) / sep
    i = int(np.argmax(ratios)) if ratios.size else 0
    max_ratio = float(ratios[i]) if ratios.size else 0.0
    return ProjectionGapReport(
        max_ratio=max_ratio,
        witness_x=X[i] if ratios.size else np.zeros(phi.dim),
        witness_y=Y[i] if ratios.size else np.zeros(phi.dim),
        witness_z=Z[i] if ratios.size else np.zeros(phi.dim),
        declared_l=l,
        samples=n,
        seed=sampler.seed,
        ok=max_ratio <= l + PROJECTION_RATIO_SLACK,
    )


@dataclass(frozen=True, eq=False)
class HausdorffLipschitzReport:
    """Worst sampled ratio d_H(S(x), S(y)) / ||x - y|| against the constant
    l, using the seeded Hausdorff lower-bound estimator per pair."""

    max_ratio: float
    max_excess: float
    witness_x: np.ndarray
    witness_y: np.ndarray
    declared_l: float
    pairs: int
    seed: int
    ok: bool

    def to_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "max_excess": self.max_excess,
            "witness": {"x": self.witness_x.tolist(),
                        "y": self.witness_y.tolist()},
            "declared_l": self.declared_l,
            "pairs": self.pairs,
            "seed": self.seed,
            "ok": self.ok,
        }


def check_hausdorff_lipschitz(phi: MovingSet, domain: ConvexSet, l: float,
                              sampler: SamplerConfig | None = None,
                              probes_per_pair: int = 400
                              ) -> HausdorffLipschitzReport:
    """Sample domain pairs (x, y) and compare the estimated Hausdorff
    distance of S(x) and S(y) with l*||x - y||.

    This checks the one-way implication from the projection-Lipschitz
    property: set-distance ratios may stay below l even when projection-gap
    ratios exceed it (see the segment-family instance).
    """
    sampler = sampler or SamplerConfig(count=200)
    rng = sampler.rng()
    n = sampler.count
    X = domain.sample_batch(rng, n)
    Y = domain.sample_batch(rng, n)
    inner_seeds = rng.integers(0, 2**32, size=n)

    max_ratio = 0.0
    max_excess = -np.inf
    wx = wy = np.zeros(phi.dim)
    pairs = 0
    for i in range(n):
        sep = float(np.linalg.norm(X[i] - Y[i]))
        if sep <= 1e-6:
            continue
        pairs += 1
        est = hausdorff_estimate(
            phi.at(X[i]), phi.at(Y[i]),
            SamplerConfig(seed=int(inner_seeds[i]), count=probes_per_pair,
                          scale=sampler.scale),
        )
        max_excess = max(max_excess, est - l * sep)
        if est / sep > max_ratio:
            max_ratio = est / sep
            wx, wy = X[i], Y[i]
    return HausdorffLipschitzReport(
        max_ratio=max_ratio,
        max_excess=float(max_excess),
        witness_x=wx,
        witness_y=wy,
        declared_l=l,
        pairs=pairs,
        seed=sampler.seed,
        ok=max_excess <= HAUSDORFF_RATIO_SLACK,
    )


def _grid_cover(s: ConvexSet, points_per_axis: int) -> tuple[np.ndarray, float]:
    """Cover the set by projecting a regular bounding-box grid onto it.

    Every set point lies within half the grid diagonal of some cover point
    (projections are nonexpansive), which is the resolution returned.
    """
    lo, up = s.bounding_box()
    axes = [np.linspace(lo[j], up[j], points_per_axis) for j in range(s.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    grid = np.stack([m.ravel() for m in mesh], axis=1)
    spacing = float(np.linalg.norm(
        (up - lo) / max(points_per_axis - 1, 1))) * 0.5
    return s.project_batch(grid), spacing


def grid_localized_hausdorff(A: ConvexSet, B: ConvexSet, rho: float,
                             points_per_axis: int = 41
                             ) -> tuple[float, float]:
    """Grid evaluation of the rho-localized Hausdorff distance.

    Returns (estimate, resolution); the estimate is a lower bound and is
    within roughly the resolution of the true value for these bounded set
    kinds.  Intended for low dimensions (the grid is dense).
    """
    ua, ha = _grid_cover(A, points_per_axis)
    ub, hb = _grid_cover(B, points_per_axis)
    ua = ua[np.linalg.norm(ua, axis=1) <= rho]
    ub = ub[np.linalg.norm(ub, axis=1) <= rho]
    best = 0.0
    if ua.shape[0]:
        best = max(best, float(np.max(np.linalg.norm(ua - B.project_batch(ua),
                                                     axis=1))))
    if ub.shape[0]:
        best = max(best, float(np.max(np.linalg.norm(ub - A.project_batch(ub),
                                                     axis=1))))
    return best, max(ha, hb)


@dataclass(frozen=True, eq=False)
class ProjectionGapBoundReport:
    """The localized-Hausdorff bound ||P_A(x0) - P_B(x0)|| <=
    sqrt(rho * d_{H,rho}(A, B)) with rho = ||x0|| + d(x0,A) + d(x0,B),
    checked against a grid estimate with resolution-scaled slack."""

    lhs: float
    rho: float
    d_localized: float
    rhs: float
    resolution: float
    slack: float
    ok: bool

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs, "rho": self.rho,
            "d_localized": self.d_localized, "rhs": self.rhs,
            "resolution": self.resolution, "slack": self.slack, "ok": self.ok,
        }


def check_localized_hausdorff_bound(A: ConvexSet, B: ConvexSet, x0,
                                    points_per_axis: int = 41
                                    ) -> ProjectionGapBoundReport:
    """Evaluate both sides of the localized-Hausdorff projection bound at
    x0.  The grid estimate is a lower bound of the true localized distance,
    so the assertion carries slack sqrt(3 * rho * resolution)."""
    x0 = as_point(x0, A.dim)
    pa = A.project(x0)
    pb = B.project(x0)
    lhs = float(np.linalg.norm(pa - pb))
    rho = float(np.linalg.norm(x0)) + A.distance(x0) + B.distance(x0)
    d_est, resolution = grid_localized_hausdorff(A, B, rho, points_per_axis)
    rhs = float(np.sqrt(rho * d_est))
    slack = float(np.sqrt(3.0 * rho * resolution)) + 1e-9
    return ProjectionGapBoundReport(
        lhs=lhs, rho=rho, d_localized=d_est, rhs=rhs,
        resolution=resolution, slack=slack, ok=lhs <= rhs + slack,
    )


# ---------------------------------------------------------------------------
# canonical instances
# ---------------------------------------------------------------------------

def segment_family_instance() -> tuple[SegmentFamily, Segment]:
    """The counterexample family: over the flat domain [0,1] x {0}, S(x) is
    the segment from (0, x1) to (1, 0).

    Its set-distance Lipschitz constant is 1, yet projection gaps reach
    sqrt(2): P of (1, 2) jumps from (1, 0) at x = (0, 0) to (0, 1) at
    x = (1, 0).  The projection-Lipschitz property is strictly stronger
    than set-distance Lipschitz continuity.
    """
    phi = SegmentFamily(
        a_matrix=np.array([[0.0, 0.0], [1.0, 0.0]]),
        a_offset=np.zeros(2),
        b_matrix=np.zeros((2, 2)),
        b_offset=np.array([1.0, 0.0]),
        lipschitz_l=1.0,
    )
    domain = Segment(np.array([0.0, 0.0]), np.array([1.0, 0.0]))
    return phi, domain


def shifted_square_problem() -> Problem:
    """The benchmark instance: C is the triangle-with-square polytope
    {0 <= v1, v2 <= 1, v1 + v2 >= 1}, the moving set is the unit square
    shifted by x/64, and T is diag(0.22, 0.25) (so L = 0.25, mu = 0.22)."""
    C = Polytope(Box(np.zeros(2), np.ones(2)), ((np.array([1.0, 1.0]), 1.0),))
    phi = TranslatedSet(
        base=Box(np.zeros(2), np.ones(2)),
        shift=np.eye(2) / 64.0,
        lipschitz_l=1.0 / 64.0,
    )
    T = AffineMap(np.array([[0.22, 0.0], [0.0, 0.25]]))
    return Problem(C=C, phi=phi, T=T, dim=2)


def shifted_square_solution(xi: float = 4.0) -> TripleState:
    """The known fixed-point triple of the benchmark instance: z* =
    (1/128, 1/128), x* = (1/2, 1/2), and y* = z* - xi*T(z*)."""
    z = np.array([1.0 / 128.0, 1.0 / 128.0])
    x = np.array([0.5, 0.5])
    T = AffineMap(np.array([[0.22, 0.0], [0.0, 0.25]]))
    return TripleState(z=z, y=z - xi * T(z), x=x)


def table_starts() -> list[tuple[np.ndarray, np.ndarray]]:
    """The three benchmark starting pairs (x0, y0)."""
    return [
        (np.array([0.0, 1.0]), np.array([0.0, 1.0])),
        (np.array([1.0, 0.0]), np.array([1.0, 1.0])),
        (np.array([0.5, 0.75]), np.array([0.5, 1.0])),
    ]
