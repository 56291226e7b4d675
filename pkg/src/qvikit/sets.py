"""Closed convex sets with exact Euclidean projections, moving constraint
sets, and sampled Hausdorff-distance estimators.

Three concrete set kinds are provided (boxes, segments, and polytopes given
as box-plus-halfspaces), each exposing ``project`` / ``project_batch`` with
the metric projection P_S(z) = argmin_{v in S} ||z - v||.  Moving sets model
a set-valued map x -> S(x); the translated kind S(x) = base + shift @ x
carries a projection-Lipschitz constant equal to ||shift||_2, i.e.

    ||P_{S(x)}(z) - P_{S(y)}(z)|| <= ||shift||_2 * ||x - y||   for all z,

which follows from firm nonexpansiveness of metric projections.  Hausdorff
distances of general convex bodies are not exactly computable here; the
estimators are seeded-sampling lower bounds (see ``SamplerConfig``).
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels

_FEAS_TOL = 1e-9
_DYKSTRA_TOL = 1e-12
_DYKSTRA_MAX_SWEEPS = 100_000
_ACTIVE_SET_MAX_DIM = 3


def as_point(x, dim=None, name="point") -> np.ndarray:
    """Validate and convert to a finite float64 vector."""
    p = np.asarray(x, dtype=float)
    if p.ndim == 0:
        p = p.reshape(1)
    if p.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} has non-finite coordinates: {p}")
    if dim is not None and p.shape[0] != dim:
        raise ValueError(f"{name} has dimension {p.shape[0]}, expected {dim}")
    return p


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def _as_batch(Z, dim) -> np.ndarray:
    Z = np.ascontiguousarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[1] != dim:
        raise ValueError(f"expected batch of shape (n, {dim}), got {Z.shape}")
    return Z


@dataclass(frozen=True)
class SamplerConfig:
    """Seeded sampling configuration shared by the estimators and checks.

    count is the number of probe points; scale is the standard deviation of
    Gaussian probes drawn around a set's reference point.  All consumers are
    deterministic given seed.
    """

    seed: int = 0
    count: int = 10_000
    scale: float = 10.0

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


class ConvexSet:
    """Interface shared by the concrete set kinds."""

    dim: int

    def project(self, z) -> np.ndarray:
        raise NotImplementedError

    def project_batch(self, Z) -> np.ndarray:
        raise NotImplementedError

    def distance(self, z) -> float:
        z = as_point(z, self.dim)
        return float(np.linalg.norm(z - self.project(z)))

    def contains(self, z, tol: float = _FEAS_TOL) -> bool:
        return self.distance(z) <= tol

    def reference_point(self) -> np.ndarray:
        raise NotImplementedError

    def sample_batch(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    """Axis-aligned box {v : lower <= v <= upper} (componentwise)."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_point(self.lower, name="lower")
        up = as_point(self.upper, dim=lo.shape[0], name="upper")
        if np.any(lo > up):
            raise ValueError("box needs lower[i] <= upper[i] for all i")
        object.__setattr__(self, "lower", _frozen(lo))
        object.__setattr__(self, "upper", _frozen(up))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def project(self, z) -> np.ndarray:
        z = as_point(z, self.dim)
        return np.minimum(np.maximum(z, self.lower), self.upper)

    def project_batch(self, Z) -> np.ndarray:
        Z = _as_batch(Z, self.dim)
        return kernels.box_project_batch(Z, self.lower, self.upper)

    def reference_point(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def sample_batch(self, rng, n) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(n, self.dim))

    def bounding_box(self):
        return self.lower, self.upper


@dataclass(frozen=True, eq=False)
class Segment(ConvexSet):
    """Line segment between endpoints a and b; a == b is allowed and
    projects everything to a (limit of the clamp formula)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_point(self.a, name="a")
        b = as_point(self.b, dim=a.shape[0], name="b")
        object.__setattr__(self, "a", _frozen(a))
        object.__setattr__(self, "b", _frozen(b))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def project(self, z) -> np.ndarray:
        z = as_point(z, self.dim)
        d = self.b - self.a
        denom = float(d @ d)
        if denom == 0.0:
            return self.a.copy()
        t = min(max(float((z - self.a) @ d) / denom, 0.0), 1.0)
        return self.a + t * d

    def project_batch(self, Z) -> np.ndarray:
        Z = _as_batch(Z, self.dim)
        n = Z.shape[0]
        A = np.broadcast_to(self.a, (n, self.dim))
        B = np.broadcast_to(self.b, (n, self.dim))
        return kernels.segment_project_batch(
            np.ascontiguousarray(A), np.ascontiguousarray(B), Z
        )

    def reference_point(self) -> np.ndarray:
        return 0.5 * (self.a + self.b)

    def sample_batch(self, rng, n) -> np.ndarray:
        t = rng.uniform(0.0, 1.0, size=n)
        return self.a + t[:, None] * (self.b - self.a)

    def bounding_box(self):
        return np.minimum(self.a, self.b), np.maximum(self.a, self.b)


def _subset_candidates(G: np.ndarray, h: np.ndarray, dim: int):
    """Affine candidate maps for exact projection by active-set enumeration.

    For every subset S of constraint rows with |S| <= dim and G_S of full row
    rank, projecting z onto the affine subspace {G_S v = h_S} is the affine
    map v = M_S z + c_S.  The true projection onto the polytope equals the
    feasible candidate of minimal distance: its active constraints admit a
    linearly independent subset reproducing the same multiplier combination,
    and that subset's equality-projection returns the projection itself.
    """
    m = G.shape[0]
    eye = np.eye(dim)
    mats = [eye]
    offs = [np.zeros(dim)]
    for size in range(1, dim + 1):
        for rows in itertools.combinations(range(m), size):
            Gs = G[list(rows)]
            gram = Gs @ Gs.T
            # skip rank-deficient subsets; their candidates are reproduced
            # by a smaller independent subset
            if np.linalg.cond(gram) > 1e12:
                continue
            K = Gs.T @ np.linalg.inv(gram)
            mats.append(eye - K @ Gs)
            offs.append(K @ h[list(rows)])
    return np.ascontiguousarray(mats), np.ascontiguousarray(offs)


@dataclass(frozen=True, eq=False)
class Polytope(ConvexSet):
    """Intersection of an optional box with halfspaces {v : n_i . v >= c_i}.

    Construction certifies nonemptiness by producing one feasible point and
    fails with ValueError otherwise.  Projection is exact by active-set
    enumeration for dim <= 3 and uses Dykstra's alternating projections
    (iterate-change tolerance 1e-12, sweep cap 1e5) above that.
    """

    box: Box | None
    halfspaces: tuple

    def __post_init__(self):
        normals = []
        offsets = []
        dim = self.box.dim if self.box is not None else None
        for normal, offset in self.halfspaces:
            nvec = as_point(normal, dim=dim, name="halfspace normal")
            if dim is None:
                dim = nvec.shape[0]
            if np.linalg.norm(nvec) == 0.0:
                raise ValueError("halfspace normal must be nonzero")
            normals.append(nvec)
            offsets.append(float(offset))
        if dim is None:
            raise ValueError("polytope needs a box or at least one halfspace")
        G_user = np.array(normals, dtype=float).reshape(len(normals), dim)
        h_user = np.array(offsets, dtype=float)
        object.__setattr__(self, "halfspaces",
                           tuple((_frozen(n), o) for n, o in zip(G_user, h_user)))
        object.__setattr__(self, "_dim", dim)
        object.__setattr__(self, "_G_user", _frozen(G_user))
        object.__setattr__(self, "_h_user", _frozen(h_user))

        # full constraint system including box facets, used by the exact path
        rows = [G_user]
        rhs = [h_user]
        if self.box is not None:
            eye = np.eye(dim)
            rows += [eye, -eye]
            rhs += [self.box.lower, -self.box.upper]
        G = np.vstack(rows) if rows else np.zeros((0, dim))
        h = np.concatenate(rhs) if rhs else np.zeros(0)
        object.__setattr__(self, "_G", _frozen(G))
        object.__setattr__(self, "_h", _frozen(h))

        if dim <= _ACTIVE_SET_MAX_DIM:
            mats, offs = _subset_candidates(G, h, dim)
            object.__setattr__(self, "_mats", _frozen(mats))
            object.__setattr__(self, "_offs", _frozen(offs))
        else:
            object.__setattr__(self, "_mats", None)
            object.__setattr__(self, "_offs", None)

        probe = self.box.reference_point() if self.box is not None else np.zeros(dim)
        feasible = self._project_uncertified(probe)
        if np.any(~np.isfinite(feasible)) or np.any(G @ feasible < h - 1e-8):
            raise ValueError("polytope is empty (no feasible point found)")
        object.__setattr__(self, "_feasible_point", _frozen(feasible))

    @property
    def dim(self) -> int:
        return self._dim

    def _project_uncertified(self, z: np.ndarray) -> np.ndarray:
        return self._project_batch_impl(z[None, :], check=False)[0]

    def _project_batch_impl(self, Z: np.ndarray, check: bool = True) -> np.ndarray:
        if self._mats is not None:
            out, ok = kernels.polytope_project_batch(
                Z, self._mats, self._offs, self._G, self._h, _FEAS_TOL
            )
            if check and not np.all(ok):
                raise RuntimeError("no feasible projection candidate found")
            return out
        if self.box is not None:
            lo, up = self.box.lower, self.box.upper
            use_box = True
        else:
            lo = np.zeros(self.dim)
            up = np.zeros(self.dim)
            use_box = False
        out, converged = kernels.dykstra_project_batch(
            Z, lo, up, use_box, self._G_user, self._h_user,
            _DYKSTRA_TOL, _DYKSTRA_MAX_SWEEPS,
        )
        if check and not np.all(converged):
            raise RuntimeError(
                "Dykstra projection did not converge within the sweep cap "
                "(badly scaled input?)"
            )
        return out

    def project(self, z) -> np.ndarray:
        z = as_point(z, self.dim)
        return self._project_batch_impl(z[None, :])[0]

    def project_batch(self, Z) -> np.ndarray:
        return self._project_batch_impl(_as_batch(Z, self.dim))

    def reference_point(self) -> np.ndarray:
        return self._feasible_point.copy()

    def sample_batch(self, rng, n) -> np.ndarray:
        """Uniform sampling by rejection from the bounding box."""
        if self.box is None:
            raise ValueError("sampling a polytope requires a bounding box")
        out = np.empty((n, self.dim))
        filled = 0
        for _ in range(10_000):
            draw = self.box.sample_batch(rng, max(2 * (n - filled), 16))
            keep = np.all(draw @ self._G_user.T >= self._h_user - _FEAS_TOL, axis=1)
            hits = draw[keep]
            take = min(hits.shape[0], n - filled)
            out[filled:filled + take] = hits[:take]
            filled += take
            if filled == n:
                return out
        raise RuntimeError("rejection sampling failed; polytope volume too small")

    def bounding_box(self):
        if self.box is None:
            raise ValueError("polytope has no bounding box")
        return self.box.bounding_box()


def translate(s: ConvexSet, t) -> ConvexSet:
    """The set s + t."""
    t = as_point(t, s.dim, name="translation")
    if isinstance(s, Box):
        return Box(s.lower + t, s.upper + t)
    if isinstance(s, Segment):
        return Segment(s.a + t, s.b + t)
    if isinstance(s, Polytope):
        box = None if s.box is None else Box(s.box.lower + t, s.box.upper + t)
        halfspaces = [(n, off + float(n @ t)) for n, off in s.halfspaces]
        return Polytope(box, tuple(halfspaces))
    raise TypeError(f"cannot translate {type(s).__name__}")


# ---------------------------------------------------------------------------
# moving sets
# ---------------------------------------------------------------------------

class MovingSet:
    """A set-valued map x -> S(x) with a declared projection-Lipschitz
    constant ``lipschitz_l``:  ||P_{S(x)}(z) - P_{S(y)}(z)|| <= l ||x - y||.

    The constant is part of the declaration; whether it actually holds is
    checked numerically by the verify module, never assumed.
    """

    kind: str
    dim: int
    lipschitz_l: float

    def at(self, x) -> ConvexSet:
        """The value S(x) as a concrete set."""
        raise NotImplementedError

    def project(self, x, z) -> np.ndarray:
        return self.at(x).project(z)

    def project_batch(self, X, Z) -> np.ndarray:
        X = _as_batch(X, self.dim)
        Z = _as_batch(Z, self.dim)
        out = np.empty_like(Z)
        for i in range(X.shape[0]):
            out[i] = self.at(X[i]).project(Z[i])
        return out


@dataclass(frozen=True, eq=False)
class TranslatedSet(MovingSet):
    """S(x) = base + shift @ x.  The projection-Lipschitz constant of this
    family is exactly ||shift||_2, so construction rejects a declared
    lipschitz_l below the operator norm of shift."""

    base: ConvexSet
    shift: np.ndarray
    lipschitz_l: float

    kind = "translated-base"

    def __post_init__(self):
        S = np.asarray(self.shift, dtype=float)
        d = self.base.dim
        if S.shape != (d, d):
            raise ValueError(f"shift must be {d}x{d}, got {S.shape}")
        snorm = float(np.linalg.norm(S, 2))
        if snorm > self.lipschitz_l + 1e-12:
            raise ValueError(
                f"declared lipschitz_l={self.lipschitz_l} below ||shift||_2={snorm}"
            )
        object.__setattr__(self, "shift", _frozen(S))

    @property
    def dim(self) -> int:
        return self.base.dim

    def at(self, x) -> ConvexSet:
        x = as_point(x, self.dim)
        return translate(self.base, self.shift @ x)

    def project(self, x, z) -> np.ndarray:
        x = as_point(x, self.dim)
        z = as_point(z, self.dim)
        t = self.shift @ x
        return self.base.project(z - t) + t

    def project_batch(self, X, Z) -> np.ndarray:
        X = _as_batch(X, self.dim)
        Z = _as_batch(Z, self.dim)
        T = X @ self.shift.T
        return self.base.project_batch(Z - T) + T


@dataclass(frozen=True, eq=False)
class SegmentFamily(MovingSet):
    """S(x) = segment between affine endpoints a(x) and b(x),
    a(x) = a_matrix @ x + a_offset and likewise for b."""

    a_matrix: np.ndarray
    a_offset: np.ndarray
    b_matrix: np.ndarray
    b_offset: np.ndarray
    lipschitz_l: float

    kind = "segment-family"

    def __post_init__(self):
        ao = as_point(self.a_offset, name="a_offset")
        d = ao.shape[0]
        bo = as_point(self.b_offset, dim=d, name="b_offset")
        Am = np.asarray(self.a_matrix, dtype=float)
        Bm = np.asarray(self.b_matrix, dtype=float)
        if Am.shape != (d, d) or Bm.shape != (d, d):
            raise ValueError("endpoint matrices must be square and match offsets")
        object.__setattr__(self, "a_matrix", _frozen(Am))
        object.__setattr__(self, "a_offset", _frozen(ao))
        object.__setattr__(self, "b_matrix", _frozen(Bm))
        object.__setattr__(self, "b_offset", _frozen(bo))

    @property
    def dim(self) -> int:
        return self.a_offset.shape[0]

    def at(self, x) -> ConvexSet:
        x = as_point(x, self.dim)
        return Segment(self.a_matrix @ x + self.a_offset,
                       self.b_matrix @ x + self.b_offset)

    def project(self, x, z) -> np.ndarray:
        return self.at(x).project(z)

    def project_batch(self, X, Z) -> np.ndarray:
        X = _as_batch(X, self.dim)
        Z = _as_batch(Z, self.dim)
        A = X @ self.a_matrix.T + self.a_offset
        B = X @ self.b_matrix.T + self.b_offset
        return kernels.segment_project_batch(
            np.ascontiguousarray(A), np.ascontiguousarray(B), Z
        )


@dataclass(frozen=True, eq=False)
class CustomMovingSet(MovingSet):
    """Caller-supplied rule x -> ConvexSet; lipschitz_l is asserted by the
    caller, not derived."""

    at_fn: Callable[[np.ndarray], ConvexSet]
    lipschitz_l: float
    dim: int

    kind = "custom"

    def at(self, x) -> ConvexSet:
        return self.at_fn(as_point(x, self.dim))


def constant_moving_set(base: ConvexSet) -> TranslatedSet:
    """S(x) = base for every x (lipschitz_l = 0)."""
    return TranslatedSet(base, np.zeros((base.dim, base.dim)), 0.0)


# ---------------------------------------------------------------------------
# Hausdorff estimators
# ---------------------------------------------------------------------------

def _boundary_probes(s: ConvexSet, rng: np.random.Generator,
                     count: int, scale: float) -> np.ndarray:
    E = s.reference_point() + scale * rng.standard_normal((count, s.dim))
    return s.project_batch(E)


def _directed_sup(U: np.ndarray, target: ConvexSet) -> float:
    if U.shape[0] == 0:
        return 0.0
    V = target.project_batch(U)
    return float(np.max(np.linalg.norm(U - V, axis=1)))


def hausdorff_estimate(A: ConvexSet, B: ConvexSet,
                       sampler: SamplerConfig | None = None) -> float:
    """Sampled lower bound on the Hausdorff distance
    max{sup_{u in A} d(u, B), sup_{v in B} d(v, A)}.

    Probe points are projections of Gaussian draws around each set's
    reference point, so extreme points (where the sup is attained for
    polyhedral sets) are reached exactly.  Deterministic given the seed.
    """
    if A.dim != B.dim:
        raise ValueError("sets must share a dimension")
    sampler = sampler or SamplerConfig()
    rng = sampler.rng()
    ua = _boundary_probes(A, rng, sampler.count, sampler.scale)
    ub = _boundary_probes(B, rng, sampler.count, sampler.scale)
    return max(_directed_sup(ua, B), _directed_sup(ub, A))


def _ball_points(rng: np.random.Generator, count: int, rho: float,
                 dim: int) -> np.ndarray:
    d = rng.standard_normal((count, dim))
    norms = np.linalg.norm(d, axis=1)
    norms[norms == 0.0] = 1.0
    r = rho * rng.uniform(0.0, 1.0, size=count) ** (1.0 / dim)
    return (r / norms)[:, None] * d


def localized_hausdorff_estimate(A: ConvexSet, B: ConvexSet, rho: float,
                                 sampler: SamplerConfig | None = None) -> float:
    """Sampled lower bound on the rho-localized Hausdorff distance, where
    each directed sup ranges only over the set's intersection with the
    closed ball of radius rho about the origin.

    Returns 0 with a RuntimeWarning when sampling finds no point of either
    set inside the ball.
    """
    if A.dim != B.dim:
        raise ValueError("sets must share a dimension")
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    sampler = sampler or SamplerConfig()
    rng = sampler.rng()

    def probes(s: ConvexSet) -> np.ndarray:
        u1 = _boundary_probes(s, rng, sampler.count, sampler.scale)
        u2 = s.project_batch(_ball_points(rng, sampler.count, rho, s.dim))
        u = np.vstack([u1, u2])
        return u[np.linalg.norm(u, axis=1) <= rho]

    ua = probes(A)
    ub = probes(B)
    if ua.shape[0] == 0 and ub.shape[0] == 0:
        warnings.warn(
            "no sampled point of either set lies in the localization ball; "
            "returning 0",
            RuntimeWarning,
        )
        return 0.0
    return max(_directed_sup(ua, B), _directed_sup(ub, A))
