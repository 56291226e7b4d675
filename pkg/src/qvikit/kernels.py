"""Batch projection kernels, with numba-compiled and pure-numpy backends.

The sampled verification scans (projection-Lipschitz checks, Hausdorff
probes) push 1e4-1e5 points through these kernels, which is where this
package spends its time.  The backend is chosen once at import:

* numba, when importable (the default), or
* vectorized numpy, when ``QVIKIT_DISABLE_NUMBA`` is set to a non-empty
  value other than ``"0"`` or numba is not installed.

Both implementations are always exported (``*_numpy`` and, when available,
``*_numba``) so ``benchmarks/bench_kernels.py`` can time them against each
other; the unsuffixed names are the active dispatch targets.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _numba_disabled_by_env() -> bool:
    flag = os.environ.get("QVIKIT_DISABLE_NUMBA", "")
    return flag not in ("", "0")


NUMBA_AVAILABLE = numba is not None
BACKEND = "numpy" if (_numba_disabled_by_env() or not NUMBA_AVAILABLE) else "numba"


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def box_project_batch_numpy(Z, lo, up):
    """Clamp each row of Z into the box [lo, up]."""
    return np.minimum(np.maximum(Z, lo), up)


def segment_project_batch_numpy(A, B, Z):
    """Project row i of Z onto the segment A[i]-B[i] (degenerate rows -> A[i])."""
    D = B - A
    denom = np.einsum("ij,ij->i", D, D)
    t = np.zeros(Z.shape[0])
    nz = denom > 0.0
    t[nz] = np.einsum("ij,ij->i", Z - A, D)[nz] / denom[nz]
    np.clip(t, 0.0, 1.0, out=t)
    return A + t[:, None] * D


def polytope_project_batch_numpy(Z, mats, offs, G, h, feas_tol):
    """Exact projection via precomputed active-set candidates.

    mats/offs hold one affine map per enumerated constraint subset
    (candidate = mats[s] @ z + offs[s]); the feasible candidate closest to
    z is the projection.  Returns (points, ok) where ok[i] is False when no
    candidate was feasible (cannot happen for a certified-nonempty set).
    """
    n = Z.shape[0]
    best_d2 = np.full(n, np.inf)
    out = np.full_like(Z, np.nan)
    for s in range(mats.shape[0]):
        V = Z @ mats[s].T + offs[s]
        feas = np.all(V @ G.T >= h - feas_tol, axis=1)
        d2 = np.einsum("ij,ij->i", V - Z, V - Z)
        better = feas & (d2 < best_d2)
        if np.any(better):
            best_d2[better] = d2[better]
            out[better] = V[better]
    return out, np.isfinite(best_d2)


def dykstra_project_batch_numpy(Z, lo, up, use_box, G, h, tol, max_sweeps):
    """Dykstra's alternating projections onto box ∩ halfspaces, per row.

    The stopping rule measures the sweep change of the full state, iterate
    plus correction vectors: the primal iterate alone can plateau for
    several sweeps while the corrections still move, which would fire a
    primal-only test long before convergence.  Returns (points, converged);
    converged[i] is False when the sweep cap was hit first.
    """
    n, d = Z.shape
    m = G.shape[0]
    nblocks = m + (1 if use_box else 0)
    gnorm2 = np.einsum("ij,ij->i", G, G) if m else np.empty(0)
    out = np.empty_like(Z)
    converged = np.zeros(n, dtype=bool)
    for i in range(n):
        x = Z[i].copy()
        corr = np.zeros((nblocks, d))
        for _ in range(max_sweeps):
            x_prev = x.copy()
            corr_prev = corr.copy()
            blk = 0
            if use_box:
                y = x + corr[0]
                x = np.minimum(np.maximum(y, lo), up)
                corr[0] = y - x
                blk = 1
            for r in range(m):
                y = x + corr[blk + r]
                gap = h[r] - G[r] @ y
                x = y + (gap / gnorm2[r]) * G[r] if gap > 0.0 else y
                corr[blk + r] = y - x
            change = np.sqrt(np.sum((x - x_prev) ** 2)
                             + np.sum((corr - corr_prev) ** 2))
            if change <= tol:
                converged[i] = True
                break
        out[i] = x
    return out, converged


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if NUMBA_AVAILABLE:

    @numba.njit(cache=True)
    def box_project_batch_numba(Z, lo, up):
        n, d = Z.shape
        out = np.empty((n, d))
        for i in range(n):
            for j in range(d):
                v = Z[i, j]
                if v < lo[j]:
                    v = lo[j]
                elif v > up[j]:
                    v = up[j]
                out[i, j] = v
        return out

    @numba.njit(cache=True)
    def segment_project_batch_numba(A, B, Z):
        n, d = Z.shape
        out = np.empty((n, d))
        for i in range(n):
            denom = 0.0
            num = 0.0
            for j in range(d):
                dj = B[i, j] - A[i, j]
                denom += dj * dj
                num += (Z[i, j] - A[i, j]) * dj
            t = 0.0
            if denom > 0.0:
                t = num / denom
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            for j in range(d):
                out[i, j] = A[i, j] + t * (B[i, j] - A[i, j])
        return out

    @numba.njit(cache=True)
    def polytope_project_batch_numba(Z, mats, offs, G, h, feas_tol):
        n, d = Z.shape
        nsub = mats.shape[0]
        m = G.shape[0]
        out = np.full((n, d), np.nan)
        ok = np.zeros(n, dtype=np.bool_)
        v = np.empty(d)
        for i in range(n):
            best = np.inf
            for s in range(nsub):
                for a in range(d):
                    acc = offs[s, a]
                    for b in range(d):
                        acc += mats[s, a, b] * Z[i, b]
                    v[a] = acc
                feasible = True
                for r in range(m):
                    g = 0.0
                    for a in range(d):
                        g += G[r, a] * v[a]
                    if g < h[r] - feas_tol:
                        feasible = False
                        break
                if not feasible:
                    continue
                d2 = 0.0
                for a in range(d):
                    diff = v[a] - Z[i, a]
                    d2 += diff * diff
                if d2 < best:
                    best = d2
                    for a in range(d):
                        out[i, a] = v[a]
            ok[i] = best < np.inf
        return out, ok

    @numba.njit(cache=True)
    def dykstra_project_batch_numba(Z, lo, up, use_box, G, h, tol, max_sweeps):
        n, d = Z.shape
        m = G.shape[0]
        nblocks = m + (1 if use_box else 0)
        gnorm2 = np.empty(m)
        for r in range(m):
            acc = 0.0
            for j in range(d):
                acc += G[r, j] * G[r, j]
            gnorm2[r] = acc
        out = np.empty((n, d))
        converged = np.zeros(n, dtype=np.bool_)
        x = np.empty(d)
        x_prev = np.empty(d)
        y = np.empty(d)
        for i in range(n):
            for j in range(d):
                x[j] = Z[i, j]
            corr = np.zeros((nblocks, d))
            corr_prev = np.zeros((nblocks, d))
            for _ in range(max_sweeps):
                for j in range(d):
                    x_prev[j] = x[j]
                for b in range(nblocks):
                    for j in range(d):
                        corr_prev[b, j] = corr[b, j]
                blk = 0
                if use_box:
                    for j in range(d):
                        y[j] = x[j] + corr[0, j]
                        v = y[j]
                        if v < lo[j]:
                            v = lo[j]
                        elif v > up[j]:
                            v = up[j]
                        x[j] = v
                        corr[0, j] = y[j] - v
                    blk = 1
                for r in range(m):
                    gy = 0.0
                    for j in range(d):
                        y[j] = x[j] + corr[blk + r, j]
                        gy += G[r, j] * y[j]
                    gap = h[r] - gy
                    if gap > 0.0:
                        step = gap / gnorm2[r]
                        for j in range(d):
                            x[j] = y[j] + step * G[r, j]
                    else:
                        for j in range(d):
                            x[j] = y[j]
                    for j in range(d):
                        corr[blk + r, j] = y[j] - x[j]
                # change of the full state (iterate + corrections); the
                # iterate alone can plateau while corrections still move
                change = 0.0
                for j in range(d):
                    diff = x[j] - x_prev[j]
                    change += diff * diff
                for b in range(nblocks):
                    for j in range(d):
                        diff = corr[b, j] - corr_prev[b, j]
                        change += diff * diff
                if np.sqrt(change) <= tol:
                    converged[i] = True
                    break
            for j in range(d):
                out[i, j] = x[j]
        return out, converged

else:  # pragma: no cover - numba is a declared dependency
    box_project_batch_numba = None
    segment_project_batch_numba = None
    polytope_project_batch_numba = None
    dykstra_project_batch_numba = None


if BACKEND == "numba":
    box_project_batch = box_project_batch_numba
    segment_project_batch = segment_project_batch_numba
    polytope_project_batch = polytope_project_batch_numba
    dykstra_project_batch = dykstra_project_batch_numba
else:
    box_project_batch = box_project_batch_numpy
    segment_project_batch = segment_project_batch_numpy
    polytope_project_batch = polytope_project_batch_numpy
    dykstra_project_batch = dykstra_project_batch_numpy
