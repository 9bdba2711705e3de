"""Closed-form projections onto simple convex sets and Dykstra's alternating method.

All projectors work on batches: points are the rows of an (N, d) array.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError, NumericalError
from .linalg import SIGMA_ZERO_REL_TOL, as_matrix, as_vector

DYKSTRA_TOL = 1e-11
DYKSTRA_MAX_CYCLES = 10000


class AffineSet:
    """{x : G x = h}, projected via the SVD of G (rank-tolerant)."""

    def __init__(self, g, h):
        self.g = as_matrix(g)
        self.h = as_vector(h, self.g.shape[0])
        u, s, vt = np.linalg.svd(self.g, full_matrices=False)
        keep = s > SIGMA_ZERO_REL_TOL * (s[0] if s.size else 1.0)
        self._vr = vt[keep]  # rows span the row space
        # min-norm particular solution; assumes the system is consistent
        self._x0 = vt[keep].T @ ((u[:, keep].T @ self.h) / s[keep])

    def project(self, pts):
        shift = pts - self._x0
        return pts - (shift @ self._vr.T) @ self._vr


class Halfspace:
    """{x : a . x <= b}."""

    def __init__(self, a, b):
        self.a = as_vector(a)
        nrm2 = float(self.a @ self.a)
        if nrm2 == 0.0:
            raise InputError("halfspace normal is zero")
        self.b = float(b)
        self._a_over = self.a / nrm2

    def project(self, pts):
        viol = np.maximum(pts @ self.a - self.b, 0.0)
        return pts - viol[:, None] * self._a_over[None, :]


class Box:
    """{x : lo <= x <= hi} componentwise; +-inf entries disable a side."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)

    def project(self, pts):
        return np.clip(pts, self.lo, self.hi)


def dykstra_batch(sets, pts, tol=DYKSTRA_TOL, max_cycles=DYKSTRA_MAX_CYCLES):
    """Project each row of ``pts`` onto the intersection of ``sets``.

    Runs Dykstra's alternating projections with one correction term per set,
    freezing rows once their per-cycle movement falls below ``tol``. Raises
    ``NumericalError`` (carrying the worst residual movement) if any row fails
    to settle within ``max_cycles``.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if len(sets) == 1:
        return sets[0].project(pts)
    x = pts.copy()
    corr = [np.zeros_like(x) for _ in sets]
    active = np.arange(x.shape[0])
    for _ in range(max_cycles):
        xa = x[active]
        start = xa.copy()
        for i, s in enumerate(sets):
            y = s.project(xa + corr[i][active])
            corr[i][active] = xa + corr[i][active] - y
            xa = y
        x[active] = xa
        move = np.linalg.norm(xa - start, axis=1)
        keep = move >= tol
        active = active[keep]
        if active.size == 0:
            return x
    worst = float(np.max(np.linalg.norm(x[active] - start[keep], axis=1)))
    raise NumericalError(
        f"Dykstra did not converge for {active.size} point(s) "
        f"within {max_cycles} cycles",
        residual=worst,
    )


def dykstra(sets, v, tol=DYKSTRA_TOL, max_cycles=DYKSTRA_MAX_CYCLES):
    """Single-point convenience wrapper around :func:`dykstra_batch`."""
    return dykstra_batch(sets, as_vector(v)[None, :], tol, max_cycles)[0]


EXACT_PROJECT_INEQ_CAP = 12


def polyhedron_project_exact(g_eq, h_eq, m_ineq, r_ineq, pts, feas_tol=1e-9):
    """Exact Euclidean projection onto {Gx=h, Mx<=r} by active-set enumeration.

    The projection of x is the affine projection onto the span of its active
    constraints, so scanning every inequality subset and keeping the nearest
    feasible candidate is exact. Cost is 2^(#inequalities); callers cap it.
    """
    import itertools

    if m_ineq.shape[0] > EXACT_PROJECT_INEQ_CAP:
        raise InputError(
            f"exact projection caps at {EXACT_PROJECT_INEQ_CAP} inequality rows"
        )
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    n, d = pts.shape
    best = np.full(n, np.inf)
    out = np.empty_like(pts)
    scale = max(float(np.max(np.abs(r_ineq), initial=0.0)),
                float(np.max(np.abs(h_eq), initial=0.0)), 1.0)
    stacked = np.vstack([g_eq, m_ineq])
    row_norm_max = float(np.max(np.linalg.norm(stacked, axis=1), initial=1.0)) \
        if stacked.size else 1.0
    for size in range(m_ineq.shape[0] + 1):
        for subset in itertools.combinations(range(m_ineq.shape[0]), size):
            b = np.vstack([g_eq, m_ineq[list(subset)]])
            c = np.concatenate([h_eq, r_ineq[list(subset)]])
            if b.shape[0] == 0:
                cand = pts.copy()
            else:
                # rank-tolerant affine projection; candidates from inconsistent
                # or irrelevant subsets are discarded by the feasibility check
                u, s, vt = np.linalg.svd(b, full_matrices=False)
                keep = s > 1e-12 * (s[0] if s.size else 1.0)
                resid = pts @ b.T - c
                cand = pts - ((resid @ u[:, keep]) / s[keep]) @ vt[keep]
            # tolerance grows with the point magnitude: projections of far-away
            # points carry proportional rounding in the affine solve
            tol = feas_tol * (scale + row_norm_max * np.linalg.norm(cand, axis=1))
            ok = np.ones(n, dtype=bool)
            if m_ineq.shape[0]:
                ok &= np.all(cand @ m_ineq.T - r_ineq <= tol[:, None], axis=1)
            if g_eq.shape[0]:
                ok &= np.all(np.abs(cand @ g_eq.T - h_eq) <= tol[:, None], axis=1)
            dist = np.linalg.norm(pts - cand, axis=1)
            better = ok & (dist < best)
            best[better] = dist[better]
            out[better] = cand[better]
    if not np.all(np.isfinite(best)):
        raise NumericalError("exact projection found no feasible candidate; "
                             "system may be infeasible")
    return out
