"""Composite objectives F(x) = f(Ax) + g(x): values, gradients, prox maps,
gradient mappings, and the generalized gradient size."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError, NumericalError
from .linalg import as_matrix, as_vector, smoothness_constant, singular_values
from .projections import AffineSet, Box, Halfspace, dykstra, dykstra_batch

INDICATOR_VIOLATION_TOL = 1e-9  # iterates satisfy constraints only to round-off
HYPERPLANE_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class PolyhedralSystem:
    """Polyhedron {x : g_eq x = h_eq, m_ineq x <= r_ineq}; either block may be empty."""

    g_eq: np.ndarray
    h_eq: np.ndarray
    m_ineq: np.ndarray
    r_ineq: np.ndarray

    @classmethod
    def build(cls, g_eq=None, h_eq=None, m_ineq=None, r_ineq=None, dim=None):
        g = as_matrix(g_eq) if g_eq is not None and np.size(g_eq) else None
        m = as_matrix(m_ineq) if m_ineq is not None and np.size(m_ineq) else None
        if g is None and m is None:
            raise InputError("polyhedral system needs at least one block")
        d = dim or (g.shape[1] if g is not None else m.shape[1])
        if g is None:
            g = np.zeros((0, d))
        if m is None:
            m = np.zeros((0, d))
        if g.shape[1] != d or m.shape[1] != d:
            raise InputError("equality and inequality blocks disagree on dimension")
        h = as_vector(h_eq, g.shape[0]) if g.shape[0] else np.zeros(0)
        r = as_vector(r_ineq, m.shape[0]) if m.shape[0] else np.zeros(0)
        return cls(g, h, m, r)

    @property
    def dim(self):
        return self.g_eq.shape[1]

    @property
    def n_rows(self):
        return self.g_eq.shape[0] + self.m_ineq.shape[0]

    def sets(self):
        """Decomposition into closed-form projectable sets for Dykstra.

        Inequality rows with a single nonzero entry are merged into one box,
        which keeps sign-cone systems (like the l1 optimal-set description) a
        two-set problem with fast alternating convergence.
        """
        out = []
        if self.g_eq.shape[0]:
            out.append(AffineSet(self.g_eq, self.h_eq))
        d = self.dim
        lo = np.full(d, -np.inf)
        hi = np.full(d, np.inf)
        boxed = False
        for a, b in zip(self.m_ineq, self.r_ineq):
            nz = np.flatnonzero(a)
            if nz.size == 1:
                i, c = int(nz[0]), a[nz[0]]
                if c > 0:
                    hi[i] = min(hi[i], b / c)
                else:
                    lo[i] = max(lo[i], b / c)
                boxed = True
                if lo[i] > hi[i] + 1e-12:
                    raise InputError("inequality block has contradictory bounds")
            else:
                out.append(Halfspace(a, b))
        if boxed:
            out.append(Box(lo, hi))
        if not out:
            raise InputError("empty polyhedral system")
        return out

    def residual(self, pts):
        """Euclidean norm of (g_eq x - h_eq ; [m_ineq x - r_ineq]_+) per row."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        sq = np.zeros(pts.shape[0])
        if self.g_eq.shape[0]:
            sq += np.sum((pts @ self.g_eq.T - self.h_eq) ** 2, axis=1)
        if self.m_ineq.shape[0]:
            sq += np.sum(np.maximum(pts @ self.m_ineq.T - self.r_ineq, 0.0) ** 2, axis=1)
        return np.sqrt(sq)

    def contains(self, x, tol=INDICATOR_VIOLATION_TOL):
        return float(self.residual(x)[0]) <= tol


# -- regularizers --------------------------------------------------------------


class ZeroReg:
    kind = "zero"

    def value(self, x):
        return 0.0

    def prox(self, v, lam):
        return np.array(v, dtype=float)


class L1Reg:
    kind = "l1"

    def __init__(self, eta):
        if eta <= 0:
            raise InputError("l1 weight eta must be positive")
        self.eta = float(eta)

    def value(self, x):
        return self.eta * float(np.sum(np.abs(x)))

    def prox(self, v, lam):
        t = lam * self.eta
        return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


class PolyhedralIndicator:
    kind = "polyhedral_indicator"

    def __init__(self, system: PolyhedralSystem):
        self.system = system
        self._sets = system.sets()

    def value(self, x):
        return 0.0 if self.system.contains(x) else np.inf

    def prox(self, v, lam):
        # indicator prox = Euclidean projection, independent of lam
        return dykstra(self._sets, v)


class BoxHyperplaneIndicator:
    """Indicator of {x : labels . x = 0, 0 <= x <= c_cap} with +-1 labels."""

    kind = "box_hyperplane_indicator"

    def __init__(self, labels, c_cap):
        self.labels = as_vector(labels)
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise InputError("labels must be +-1")
        if c_cap <= 0:
            raise InputError("box cap must be positive")
        self.c_cap = float(c_cap)

    def violation(self, x):
        box = max(float(np.max(-x, initial=0.0)), float(np.max(x - self.c_cap, initial=0.0)))
        return max(box, abs(float(self.labels @ x)))

    def value(self, x):
        return 0.0 if self.violation(x) <= INDICATOR_VIOLATION_TOL else np.inf

    def prox(self, v, lam):
        v = as_vector(v, self.labels.size)
        y = self.labels
        # residual tau -> y . clip(v - tau y, 0, C) is continuous, piecewise
        # linear, and nonincreasing, with kinks where a coordinate enters or
        # leaves the box; the root sits exactly on one linear segment
        t = y * v
        kinks = np.sort(np.concatenate([t, t - y * self.c_cap]))
        vals = np.clip(v[None, :] - kinks[:, None] * y[None, :], 0.0, self.c_cap) @ y
        idx = int(np.argmax(vals <= 0.0))
        if vals[idx] >= 0.0:
            tau = kinks[idx]
        else:
            h0, h1 = vals[idx - 1], vals[idx]
            tau = kinks[idx - 1] + (kinks[idx] - kinks[idx - 1]) * h0 / (h0 - h1)
        out = np.clip(v - tau * y, 0.0, self.c_cap)
        final = abs(float(y @ out))
        if final > HYPERPLANE_RESIDUAL_TOL:
            raise NumericalError(
                f"box-hyperplane prox left hyperplane residual {final:.3e}",
                residual=final,
            )
        return out


# -- composite problems --------------------------------------------------------

SMOOTH_KINDS = ("least_squares", "least_squares_normalized", "quadratic_form")


@dataclass
class CompositeProblem:
    """F(x) = f(Ax) + g(x).

    ``least_squares``            f(z) = ||z - y||^2 / 2
    ``least_squares_normalized`` f(z) = ||z - y||^2 / (2n)
    ``quadratic_form``           F(x) = x.Q x / 2 - linear.x + g(x)  (a is unused)

    ``strong_convexity_alpha`` is the strong-convexity modulus of f on the
    range of A when known (1 and 1/n for the least-squares kinds).
    """

    smooth_kind: str
    reg: object
    a: np.ndarray | None = None
    y: np.ndarray | None = None
    quadratic: tuple[np.ndarray, np.ndarray] | None = None
    strong_convexity_alpha: float | None = None
    _smooth_l: float = field(default=None, repr=False)

    def __post_init__(self):
        if self.smooth_kind not in SMOOTH_KINDS:
            raise InputError(f"unknown smooth kind {self.smooth_kind!r}")
        if self.smooth_kind == "quadratic_form":
            if self.quadratic is None:
                raise InputError("quadratic_form needs (Q, linear)")
            q, lin = self.quadratic
            q = as_matrix(q)
            lin = as_vector(lin, q.shape[0])
            if q.shape[0] != q.shape[1]:
                raise InputError("Q must be square")
            scale = max(float(np.max(np.abs(q))), 1.0)
            if float(np.max(np.abs(q - q.T))) > 1e-10 * scale:
                raise InputError("Q must be symmetric")
            if float(np.min(np.linalg.eigvalsh(0.5 * (q + q.T)))) < -1e-10 * scale:
                raise InputError("Q must be positive semidefinite")
            self.quadratic = (q, lin)
        else:
            self.a = as_matrix(self.a)
            self.y = as_vector(self.y, self.a.shape[0])
        if self.strong_convexity_alpha is None:
            if self.smooth_kind == "least_squares":
                self.strong_convexity_alpha = 1.0
            elif self.smooth_kind == "least_squares_normalized":
                self.strong_convexity_alpha = 1.0 / self.a.shape[0]

    @property
    def dim(self):
        if self.smooth_kind == "quadratic_form":
            return self.quadratic[0].shape[0]
        return self.a.shape[1]

    @property
    def normalized(self):
        return self.smooth_kind == "least_squares_normalized"

    def smooth_l(self) -> float:
        """Smoothness constant of the smooth part (largest curvature)."""
        if self._smooth_l is None:
            if self.smooth_kind == "quadratic_form":
                self._smooth_l = float(singular_values(self.quadratic[0])[0])
            else:
                self._smooth_l = smoothness_constant(self.a, self.normalized)
        return self._smooth_l


def lasso_problem(a, y, eta, normalized=False) -> CompositeProblem:
    kind = "least_squares_normalized" if normalized else "least_squares"
    return CompositeProblem(smooth_kind=kind, reg=L1Reg(eta), a=a, y=y)


def svm_dual_problem(q, labels, c_cap) -> CompositeProblem:
    q = as_matrix(q)
    return CompositeProblem(
        smooth_kind="quadratic_form",
        reg=BoxHyperplaneIndicator(labels, c_cap),
        quadratic=(q, np.ones(q.shape[0])),
    )


def objective(p: CompositeProblem, x) -> float:
    """F(x); +inf when an indicator regularizer is violated beyond tolerance."""
    x = as_vector(x, p.dim)
    if p.smooth_kind == "quadratic_form":
        q, lin = p.quadratic
        smooth = 0.5 * float(x @ q @ x) - float(lin @ x)
    else:
        res = p.a @ x - p.y
        smooth = 0.5 * float(res @ res)
        if p.normalized:
            smooth /= p.a.shape[0]
    return smooth + p.reg.value(x)


def gradient_f(p: CompositeProblem, x) -> np.ndarray:
    """Gradient of the smooth part: A^T grad f(Ax), or Qx - linear."""
    x = as_vector(x, p.dim)
    if p.smooth_kind == "quadratic_form":
        q, lin = p.quadratic
        return q @ x - lin
    g = p.a.T @ (p.a @ x - p.y)
    return g / p.a.shape[0] if p.normalized else g


def prox(p: CompositeProblem, v, lam) -> np.ndarray:
    """prox_{lam g}(v) for the problem's regularizer."""
    if lam <= 0:
        raise InputError("prox step lam must be positive")
    return p.reg.prox(as_vector(v, p.dim), lam)


def gradient_mapping(p: CompositeProblem, x, lam) -> np.ndarray:
    """G_lam(x) = (x - prox_{lam g}(x - lam grad f(x))) / lam."""
    if lam <= 0:
        raise InputError("gradient-mapping step lam must be positive")
    x = as_vector(x, p.dim)
    step = prox(p, x - lam * gradient_f(p, x), lam)
    return (x - step) / lam


def generalized_gradient_size(p: CompositeProblem, x, alpha) -> float:
    """D_g(x, alpha): predicted decrease of one proximal step of curvature alpha.

    D_g(x, a) = -2a * min_y [ <grad f(x), y-x> + (a/2)||y-x||^2 + g(y) - g(x) ],
    evaluated through the prox closed form of the inner minimizer. Monotonically
    nondecreasing in alpha and nonnegative.
    """
    if alpha <= 0:
        raise InputError("alpha must be positive")
    x = as_vector(x, p.dim)
    gx = p.reg.value(x)
    if not np.isfinite(gx):
        raise DomainError("generalized gradient size needs g(x) finite")
    grad = gradient_f(p, x)
    ystar = prox(p, x - grad / alpha, 1.0 / alpha)
    diff = ystar - x
    inner = float(grad @ diff) + 0.5 * alpha * float(diff @ diff) + p.reg.value(ystar) - gx
    return max(-2.0 * alpha * inner, 0.0)


def project_onto_polyhedron_batch(system: PolyhedralSystem, pts):
    """Euclidean projection of each row of ``pts`` onto ``system`` (Dykstra)."""
    return dykstra_batch(system.sets(), pts)
