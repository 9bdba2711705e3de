"""Instrumented proximal gradient method with per-iterate trajectory records."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalError
from .problems import (
    CompositeProblem,
    L1Reg,
    gradient_f,
    objective,
    prox,
)

ACTIVE_SET_TOL = 1e-10  # l1 prox emits exact zeros; this only guards round-off


@dataclass(frozen=True)
class SolverConfig:
    step_policy: str = "global_L"  # global_L | fixed
    step: float | None = None
    max_iter: int = 1000
    gradmap_tol: float = 1e-8
    record_every: int = 1

    def __post_init__(self):
        if self.step_policy not in ("global_L", "fixed"):
            raise InputError(f"unknown step policy {self.step_policy!r}")
        if self.step_policy == "fixed" and (self.step is None or self.step <= 0):
            raise InputError("fixed step policy needs step > 0")
        if self.max_iter < 1:
            raise InputError("max_iter must be at least 1")
        if self.gradmap_tol <= 0:
            raise InputError("gradmap_tol must be positive")
        if self.record_every < 1:
            raise InputError("record_every must be at least 1")


@dataclass
class IterateRecord:
    k: int
    objective: float
    gradmap_norm: float
    active_set: frozenset | None
    x: np.ndarray | None  # full iterate kept only every record_every steps


@dataclass
class Trajectory:
    records: list
    terminated_by: str  # tolerance | max_iter
    step: float
    final_x: np.ndarray = field(repr=False, default=None)

    def objectives(self):
        return np.array([r.objective for r in self.records])

    def gradmap_norms(self):
        return np.array([r.gradmap_norm for r in self.records])

    def recorded_x(self):
        """(iteration, x) pairs for records that kept the full iterate."""
        return [(r.k, r.x) for r in self.records if r.x is not None]


def run(p: CompositeProblem, cfg: SolverConfig, x0) -> Trajectory:
    """Run x_{k+1} = prox_{s g}(x_k - s grad f(x_k)) from ``x0``.

    Stops once the gradient-mapping norm at the current iterate falls to
    ``cfg.gradmap_tol`` or after ``cfg.max_iter`` steps. The trajectory is a
    pure function of (p, cfg, x0); repeat runs are bit-identical.
    """
    x = np.array(x0, dtype=float).reshape(-1)
    if x.size != p.dim:
        raise InputError(f"x0 has dimension {x.size}, problem has {p.dim}")
    g0 = p.reg.value(x)
    if not np.isfinite(g0):
        raise InputError("x0 is infeasible for the indicator regularizer")
    if cfg.step_policy == "global_L":
        smooth_l = p.smooth_l()
        if smooth_l <= 0:
            raise InputError("global_L step policy needs a positive smoothness constant")
        step = 1.0 / smooth_l
    else:
        step = cfg.step
    track_active = isinstance(p.reg, L1Reg)

    records = []
    terminated = "max_iter"
    for k in range(cfg.max_iter + 1):
        grad = gradient_f(p, x)
        x_next = prox(p, x - step * grad, step)
        gm_norm = float(np.linalg.norm(x - x_next)) / step
        obj = objective(p, x)
        if not np.isfinite(obj) or not np.all(np.isfinite(x_next)):
            raise NumericalError(f"non-finite objective or iterate at k={k}")
        active = frozenset(np.flatnonzero(np.abs(x) > ACTIVE_SET_TOL).tolist()) if track_active else None
        keep_x = x.copy() if (k % cfg.record_every == 0) else None
        records.append(IterateRecord(k, obj, gm_norm, active, keep_x))
        if gm_norm <= cfg.gradmap_tol:
            terminated = "tolerance"
            break
        if k == cfg.max_iter:
            break
        x = x_next
    if records[-1].x is None:
        records[-1].x = x.copy()
    return Trajectory(records, terminated, step, final_x=x.copy())


def contraction_factors(t: Trajectory, f_star: float) -> np.ndarray:
    """Per-step objective-gap ratios (F_{k+1}-F*)/(F_k-F*); 0/0 counts as 0."""
    obj = t.objectives()
    if f_star > float(np.min(obj)) + 1e-12:
        raise InputError("f_star exceeds a recorded objective")
    gaps = np.maximum(obj - f_star, 0.0)
    out = np.zeros(len(obj) - 1)
    nz = gaps[:-1] > 0.0
    out[nz] = gaps[1:][nz] / gaps[:-1][nz]
    return out


def identification_stable(t: Trajectory, reference_support, window=25) -> bool:
    """True if, once the active set matches ``reference_support`` for ``window``
    consecutive records, it never changes again before termination."""
    ref = frozenset(reference_support)
    sets = [r.active_set for r in t.records]
    streak = 0
    for i, s in enumerate(sets):
        streak = streak + 1 if s == ref else 0
        if streak >= window:
            return all(later == ref for later in sets[i:])
    return True  # never settled long enough to make a claim
