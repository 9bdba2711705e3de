"""Trajectory diagnostics for l1 problems: active sets, Jaccard similarity,
cone ratios, identification time, and KKT-side optimality data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClassificationError, InputError, NotOptimalError
from .linalg import as_vector
from .problems import CompositeProblem, L1Reg, PolyhedralSystem, gradient_f
from .solver import Trajectory


def active_set(x, tol=1e-10) -> frozenset:
    """Indices i with |x_i| > tol (0-based)."""
    if tol < 0:
        raise InputError("active-set tolerance must be nonnegative")
    return frozenset(np.flatnonzero(np.abs(np.asarray(x, dtype=float)) > tol).tolist())


def jaccard(a, b) -> float:
    """|a & b| / |a | b|; two empty sets count as identical (1)."""
    a, b = frozenset(a), frozenset(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def cone_ratio(x, beta_hat, support) -> float:
    """l1 mass of x - beta_hat off ``support`` relative to the mass on it."""
    support = sorted(frozenset(support))
    if not support:
        raise InputError("cone ratio needs a nonempty support")
    delta = np.abs(np.asarray(x, dtype=float) - np.asarray(beta_hat, dtype=float))
    on = float(np.sum(delta[support]))
    off = float(np.sum(delta)) - on
    if on > 0.0:
        return off / on
    return np.inf if off > 0.0 else 0.0


@dataclass
class ConeMetrics:
    """Per-iterate cone diagnostics for the iterated cone inequality
    ||delta_offsupport||_1 <= 3 ||delta_support||_1 + 2 (F_k - F_hat) / eta."""

    ks: np.ndarray
    cone_ratios: np.ndarray
    lemma_rhs: np.ndarray
    lemma_holds: np.ndarray


def cone_lemma_check(traj: Trajectory, beta_hat, eta, f_hat) -> ConeMetrics:
    """Evaluate the cone inequality at every recorded iterate that kept x."""
    beta_hat = as_vector(beta_hat)
    support = sorted(active_set(beta_hat))
    if eta <= 0:
        raise InputError("eta must be positive")
    if f_hat > float(np.min(traj.objectives())) + 1e-12:
        raise InputError("f_hat exceeds a recorded objective")
    on_mask = np.zeros(beta_hat.size, dtype=bool)
    on_mask[support] = True
    ks, ratios, rhs, holds = [], [], [], []
    for rec in traj.records:
        if rec.x is None:
            continue
        delta = np.abs(rec.x - beta_hat)
        on = float(np.sum(delta[on_mask]))
        off = float(np.sum(delta[~on_mask]))
        gap = max(rec.objective - f_hat, 0.0)
        bound = 3.0 * on + 2.0 * gap / eta
        ks.append(rec.k)
        ratios.append(off / on if on > 0 else (np.inf if off > 0 else 0.0))
        rhs.append(bound)
        holds.append(off <= bound + 1e-12)
    return ConeMetrics(np.array(ks), np.array(ratios), np.array(rhs), np.array(holds))


def identification_time(traj: Trajectory, reference_support) -> int | None:
    """Smallest recorded k from which every later active set equals the reference."""
    ref = frozenset(reference_support)
    ks = [r.k for r in traj.records]
    match = [r.active_set == ref for r in traj.records]
    t = None
    for k, ok in zip(ks, match):
        if ok:
            if t is None:
                t = k
        else:
            t = None
    return t


@dataclass
class LassoOptimalityData:
    """KKT-side optimality data for an l1 problem at a solution beta_hat.

    ``s_hat`` is the negative smooth gradient at beta_hat; on the positive
    (negative) active coordinates it equals +eta (-eta) up to the KKT
    tolerance, and ``delta_star`` is the smallest slack eta - |s_hat_i| over
    the inactive coordinates (+inf when every coordinate is active).
    """

    beta_hat: np.ndarray
    s_hat: np.ndarray
    i0: frozenset
    iplus: frozenset
    iminus: frozenset
    delta_star: float

    @property
    def support(self):
        return self.iplus | self.iminus


def lasso_optimality_data(p: CompositeProblem, beta_hat, kkt_tol=1e-7) -> LassoOptimalityData:
    """Classify coordinates into inactive/positive/negative sets at beta_hat."""
    if not isinstance(p.reg, L1Reg):
        raise InputError("lasso optimality data needs an l1 problem")
    beta_hat = as_vector(beta_hat, p.dim)
    eta = p.reg.eta
    res = lasso_kkt_residual(p, beta_hat)
    if float(np.max(res, initial=0.0)) > kkt_tol:
        raise NotOptimalError(
            f"beta_hat violates KKT by {float(np.max(res)):.3e} > kkt_tol={kkt_tol:g}"
        )
    s_hat = -gradient_f(p, beta_hat)
    i0, iplus, iminus = [], [], []
    for i, s in enumerate(s_hat):
        if beta_hat[i] > 0 and abs(s - eta) <= kkt_tol:
            iplus.append(i)
        elif beta_hat[i] < 0 and abs(s + eta) <= kkt_tol:
            iminus.append(i)
        elif beta_hat[i] == 0 and abs(s) < eta - kkt_tol:
            i0.append(i)
        else:
            # zero coordinate pinned at the dual boundary, or a sign mismatch:
            # strict complementarity fails and the sets are not trustworthy
            raise ClassificationError(
                f"coordinate {i}: s_hat={s:.6g} with beta_hat={beta_hat[i]:.6g} "
                f"is neither near +-eta nor strictly inside; degenerate instance"
            )
    delta_star = float(np.min(eta - np.abs(s_hat[i0]))) if i0 else np.inf
    return LassoOptimalityData(
        beta_hat, s_hat, frozenset(i0), frozenset(iplus), frozenset(iminus), delta_star
    )


def lasso_kkt_residual(p: CompositeProblem, beta) -> np.ndarray:
    """Componentwise norm of the minimum-norm element of grad f + eta d||.||_1."""
    if not isinstance(p.reg, L1Reg):
        raise InputError("KKT residual defined for l1 problems")
    beta = as_vector(beta, p.dim)
    eta = p.reg.eta
    grad = gradient_f(p, beta)
    res = np.empty_like(grad)
    nz = np.abs(beta) > 0
    res[nz] = np.abs(grad[nz] + eta * np.sign(beta[nz]))
    res[~nz] = np.maximum(np.abs(grad[~nz]) - eta, 0.0)
    return res


def lasso_b_matrix(data: LassoOptimalityData, dim) -> np.ndarray:
    """Rows of the sign-cone system B beta <= 0: +-e_i on the inactive set,
    -e_i on positives, +e_i on negatives. Operator norm is at most sqrt(2)."""
    rows = []
    eye = np.eye(dim)
    for i in sorted(data.i0):
        rows.append(eye[i])
        rows.append(-eye[i])
    for i in sorted(data.iplus):
        rows.append(-eye[i])
    for i in sorted(data.iminus):
        rows.append(eye[i])
    if not rows:
        return np.zeros((0, dim))
    return np.vstack(rows)


def lasso_optimal_set_system(p: CompositeProblem, data: LassoOptimalityData) -> PolyhedralSystem:
    """Polyhedral description {A beta = A beta_hat, B beta <= 0} of the optimal set."""
    y_hat = p.a @ data.beta_hat
    b = lasso_b_matrix(data, p.dim)
    if b.shape[0]:
        return PolyhedralSystem.build(p.a, y_hat, b, np.zeros(b.shape[0]))
    return PolyhedralSystem.build(p.a, y_hat)
