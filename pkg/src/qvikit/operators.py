"""Lipschitz, strongly monotone operators and their (reflected) resolvents.

For an operator T with Lipschitz constant L and strong-monotonicity constant
mu (0 < mu <= L), the resolvent J(v) solves u + xi*T(u) = v and the reflected
resolvent is R = 2J - I.  R is a contraction with modulus

    L_xi = sqrt(1 - 4*xi*mu / (1 + 2*xi*mu + xi**2 * L**2)),

minimized at the step xi = 1/L, where it equals sqrt((g - 1)/(g + 1)) with
g = L/mu.  These moduli drive the solver's contraction certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .sets import SamplerConfig, as_point


class ConvergenceError(RuntimeError):
    """An iterative routine hit its cap before reaching tolerance."""


@dataclass(frozen=True, eq=False)
class AffineMap:
    """T(x) = matrix @ x + offset.

    L is the spectral norm of the matrix and mu the smallest eigenvalue of
    its symmetric part; both are computed at construction so the declared
    constants can never drift from the map itself.
    """

    matrix: np.ndarray
    offset: np.ndarray | None = None

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"matrix must be square, got shape {M.shape}")
        q = (np.zeros(M.shape[0]) if self.offset is None
             else as_point(self.offset, M.shape[0], name="offset"))
        M = np.array(M)
        M.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "offset", q)
        object.__setattr__(self, "_L", float(np.linalg.norm(M, 2)))
        sym = 0.5 * (M + M.T)
        object.__setattr__(self, "_mu", float(np.min(np.linalg.eigvalsh(sym))))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def L(self) -> float:
        return self._L

    @property
    def mu(self) -> float:
        return self._mu

    def __call__(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return self.matrix @ x + self.offset

    def evaluate_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return X @ self.matrix.T + self.offset


@dataclass(frozen=True, eq=False)
class GeneralMap:
    """A pointwise evaluation rule with caller-declared constants L and mu.

    Wrong constants silently break every contraction guarantee downstream,
    so they are declared explicitly here and probe-checked by the verify
    layer rather than inferred.
    """

    rule: Callable[[np.ndarray], np.ndarray]
    L: float
    mu: float
    dim: int

    def __post_init__(self):
        if not (self.L >= self.mu > 0.0):
            raise ValueError(f"need L >= mu > 0, got L={self.L}, mu={self.mu}")

    def __call__(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return as_point(self.rule(x), self.dim, name="T(x)")

    def evaluate_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.stack([self(x) for x in X])


MonotoneMap = AffineMap | GeneralMap

_DAMPED_TOL = 1e-12
_DAMPED_MAX_ITER = 1_000_000


def resolvent(T: MonotoneMap, xi: float, v) -> np.ndarray:
    """The point u with u + xi*T(u) = v.

    Affine maps are solved directly; general maps run the damped iteration
    u <- u - tau*(u + xi*T(u) - v) with tau = (1 + xi*mu)/(1 + xi*L)**2,
    a strict contraction for any declared 0 < mu <= L, to residual 1e-12.
    """
    if xi <= 0.0:
        raise ValueError("xi must be positive")
    v = as_point(v, T.dim)
    if isinstance(T, AffineMap):
        A = np.eye(T.dim) + xi * T.matrix
        try:
            return np.linalg.solve(A, v - xi * T.offset)
        except np.linalg.LinAlgError as exc:
            raise ValueError(
                "I + xi*T is singular; declared constants are inconsistent "
                "with strong monotonicity"
            ) from exc
    tau = (1.0 + xi * T.mu) / (1.0 + xi * T.L) ** 2
    u = v.copy()
    for _ in range(_DAMPED_MAX_ITER):
        res = u + xi * T(u) - v
        nrm = float(np.linalg.norm(res))
        if nrm <= _DAMPED_TOL:
            return u
        if not np.isfinite(nrm):
            break
        u = u - tau * res
    raise ConvergenceError(
        "damped resolvent iteration did not converge; declared L/mu are "
        "likely wrong for this rule"
    )


def resolvent_batch(T: AffineMap, xi: float, V) -> np.ndarray:
    """Vectorized resolvent for affine maps (one factorization, many v)."""
    if xi <= 0.0:
        raise ValueError("xi must be positive")
    V = np.asarray(V, dtype=float)
    A = np.eye(T.dim) + xi * T.matrix
    return np.linalg.solve(A, (V - xi * T.offset).T).T


def reflected_resolvent(T: MonotoneMap, xi: float, v) -> np.ndarray:
    """R(v) = 2*J(v) - v with J the resolvent at step xi."""
    v = as_point(v, T.dim)
    return 2.0 * resolvent(T, xi, v) - v


def contraction_modulus(L: float, mu: float, xi: float) -> float:
    """Lipschitz modulus of the reflected resolvent of a strongly monotone,
    Lipschitz operator; lies in [0, 1) whenever 0 < mu <= L and xi > 0."""
    if not (L >= mu > 0.0):
        raise ValueError(f"need L >= mu > 0, got L={L}, mu={mu}")
    if xi <= 0.0:
        raise ValueError("xi must be positive")
    radicand = 1.0 - 4.0 * xi * mu / (1.0 + 2.0 * xi * mu + xi * xi * L * L)
    if radicand < 0.0:
        # analytically >= 0 for L >= mu; tiny float noise at L == mu, xi == 1/L
        if radicand < -1e-12:
            raise ValueError("negative radicand; inputs violate L >= mu")
        return 0.0
    return math.sqrt(radicand)


def optimal_stepsize(L: float, mu: float) -> tuple[float, float]:
    """The modulus-minimizing step 1/L and its modulus sqrt((g-1)/(g+1)),
    g = L/mu."""
    if not (L >= mu > 0.0):
        raise ValueError(f"need L >= mu > 0, got L={L}, mu={mu}")
    g = L / mu
    return 1.0 / L, math.sqrt((g - 1.0) / (g + 1.0))


def estimate_constants(T: MonotoneMap, sampler: SamplerConfig | None = None,
                       scale: float = 1.0) -> tuple[float, float]:
    """Sampled estimates (L_hat, mu_hat) from Gaussian point pairs:
    L_hat = max ||T(x)-T(y)||/||x-y||, mu_hat = min <T(x)-T(y), x-y>/||x-y||^2.

    L_hat underestimates and mu_hat overestimates; both converge to the true
    constants as the sample grows.  Deterministic given the sampler seed.
    """
    sampler = sampler or SamplerConfig()
    rng = sampler.rng()
    X = scale * rng.standard_normal((sampler.count, T.dim))
    Y = scale * rng.standard_normal((sampler.count, T.dim))
    D = X - Y
    nrm2 = np.einsum("ij,ij->i", D, D)
    keep = nrm2 > 1e-24
    D = D[keep]
    nrm2 = nrm2[keep]
    TD = T.evaluate_batch(X[keep]) - T.evaluate_batch(Y[keep])
    ratios = np.linalg.norm(TD, axis=1) / np.sqrt(nrm2)
    inner = np.einsum("ij,ij->i", TD, D) / nrm2
    return float(np.max(ratios)), float(np.min(inner))
