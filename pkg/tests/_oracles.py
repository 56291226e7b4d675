"""Brute-force oracles for the tests, kept independent of the library's
projection code paths."""

import numpy as np

from qvikit.sets import Box, Polytope, Segment


def grid_members(s, points_per_axis):
    """Exact members of the set on a regular grid; (N, dim) array."""
    if isinstance(s, Segment):
        t = np.linspace(0.0, 1.0, points_per_axis ** s.dim)
        return s.a + t[:, None] * (s.b - s.a)
    if isinstance(s, Box):
        lo, up = s.lower, s.upper
    elif isinstance(s, Polytope):
        lo, up = s.bounding_box()
    else:
        raise TypeError(type(s).__name__)
    axes = [np.linspace(lo[j], up[j], points_per_axis) for j in range(s.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    if isinstance(s, Polytope):
        G = np.stack([n for n, _ in s.halfspaces]) if s.halfspaces else None
        if G is not None:
            h = np.array([o for _, o in s.halfspaces])
            pts = pts[np.all(pts @ G.T >= h - 1e-12, axis=1)]
    return pts


def grid_project(s, z, points_per_axis=81):
    """Member grid point of minimal distance to z."""
    pts = grid_members(s, points_per_axis)
    return pts[np.argmin(np.linalg.norm(pts - np.asarray(z, float), axis=1))]


def grid_resolution(s, points_per_axis):
    """Half the grid diagonal: every set point is this close to the cover."""
    if isinstance(s, Segment):
        return 0.5 * float(np.linalg.norm(s.b - s.a)) / max(points_per_axis ** s.dim - 1, 1)
    lo, up = (s.lower, s.upper) if isinstance(s, Box) else s.bounding_box()
    return 0.5 * float(np.linalg.norm((up - lo) / max(points_per_axis - 1, 1)))


def assert_projection_matches_grid(s, z, points_per_axis=81):
    """Certify a library projection against the grid minimizer.

    Checks (all theorems when the projection is exact): the library point is
    feasible, at least as close as the best grid member, and within the
    strong-convexity ball sqrt(d_grid^2 - d_lib^2) of the grid minimizer.
    """
    z = np.asarray(z, float)
    p = s.project(z)
    q = grid_project(s, z, points_per_axis)
    d_lib = np.linalg.norm(z - p)
    d_grid = np.linalg.norm(z - q)
    assert s.contains(p, 1e-9), f"projection {p} infeasible"
    assert d_lib <= d_grid + 1e-12, (
        f"grid point {q} beats library projection: {d_grid} < {d_lib}")
    ball = np.sqrt(max(d_grid ** 2 - d_lib ** 2, 0.0))
    assert np.linalg.norm(p - q) <= ball + 1e-9, (
        f"projection {p} too far from grid minimizer {q}")


def power_iteration_norm(M, iters=500, seed=0):
    """Lower-bound estimate of the spectral norm of M."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = M.T @ (M @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    return float(np.linalg.norm(M @ v))


def random_strongly_monotone(rng, n):
    """Random affine map with mu > 0: spd symmetric part plus a skew part."""
    from qvikit.operators import AffineMap
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eigs = rng.uniform(0.2, 2.0, n)
    sym = Q @ np.diag(eigs) @ Q.T
    K = rng.standard_normal((n, n))
    M = sym + 0.5 * (K - K.T)
    return AffineMap(M, rng.standard_normal(n))


def random_set(rng, dim, kind=None):
    """A random box, segment, or nonempty polytope in the given dimension."""
    kind = kind or rng.choice(["box", "segment", "polytope"])
    if kind == "box":
        lo = rng.uniform(-2.0, 1.0, dim)
        return Box(lo, lo + rng.uniform(0.1, 2.0, dim))
    if kind == "segment":
        return Segment(rng.uniform(-2.0, 2.0, dim), rng.uniform(-2.0, 2.0, dim))
    lo = rng.uniform(-2.0, 0.0, dim)
    box = Box(lo, lo + rng.uniform(0.5, 2.5, dim))
    center = box.reference_point()
    halfspaces = []
    for _ in range(rng.integers(1, 3)):
        n = rng.standard_normal(dim)
        n /= np.linalg.norm(n)
        # passes below the box center, so the center stays feasible
        halfspaces.append((n, float(n @ center) - rng.uniform(0.05, 1.0)))
    return Polytope(box, tuple(halfspaces))
