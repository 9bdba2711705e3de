"""Experiment harness: synthetic instances, the Hoffman-scaling and trajectory
studies, an SVM dual study, and CSV emission with seeded reproducibility."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analytics import (
    active_set,
    cone_ratio,
    jaccard,
    lasso_optimal_set_system,
    lasso_optimality_data,
)
from .constants import (
    ENUM_SIZE_CAP,
    Restriction,
    constants_report,
    hoffman_enumerated,
)
from .errors import ConfigError, InputError, NumericalError
from .linalg import (
    EnsembleSpec,
    read_matrix,
    read_vector,
    sample_ensemble,
    singular_values,
    smallest_nonzero_singular,
)
from .problems import (
    BoxHyperplaneIndicator,
    CompositeProblem,
    L1Reg,
    ZeroReg,
    lasso_problem,
    svm_dual_problem,
)
from .solver import SolverConfig, contraction_factors, run

TRAJECTORY_HEADER = "iter,objective,gap,gradmap_norm,active_size,jaccard,cone_ratio,contraction"
SCALING_HEADER = ("dim,ensemble,trial,H_support_closed,H_face_enumerated_or_NA,"
                  "sigma_min_support,L_global,L_support")
CONSTANTS_HEADER = ("restriction,L,L_K,H,H_method,H_K,HK_method,nu_K,nu_provenance,"
                    "mu_K,gamma_lb,delta_star,kappa,kappa_K,B_norm")

PLANT_STREAM = 1  # sub-seed for planted data, shared across ensembles per trial


@dataclass
class ExperimentConfig:
    experiment: str
    n: int = 100
    d: int = 200
    s: int = 5
    dims: list = field(default_factory=lambda: [100, 200, 400, 800])
    ensembles: list = field(default_factory=lambda: ["gaussian"])
    rho: float = 0.8
    eta_policy: str = "dual_condition"  # dual_condition | fixed
    eta: float | None = None
    eta_multiplier: float = 2.5
    trials: int = 10
    seed: int = 0
    max_iter: int = 20000
    gradmap_tol: float = 1e-8
    record_every: int = 1
    noise_sigma: float = 0.1
    normalized: bool = True
    c_cap: float = 1.0
    separation: float = 2.0
    n_samples: int = 4000
    restrictions: list = field(default_factory=lambda: ["global", "support"])
    out: str = "out.csv"
    timestamp: bool = False

    def __post_init__(self):
        if self.experiment not in ("hoffman_scaling", "trajectory", "svm", "solve", "constants"):
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.eta_policy not in ("dual_condition", "fixed"):
            raise ConfigError(f"unknown eta policy {self.eta_policy!r}")
        if self.eta_policy == "fixed" and (self.eta is None or self.eta <= 0):
            raise ConfigError("fixed eta policy needs eta > 0")
        if self.eta_multiplier < 2.0:
            raise ConfigError("dual-condition multiplier must be at least 2")
        if self.experiment in ("hoffman_scaling", "trajectory"):
            dmin = min(self.dims) if self.experiment == "hoffman_scaling" else self.d
            if self.s > min(self.n, dmin):
                raise ConfigError(f"sparsity s={self.s} exceeds min(n, d)={min(self.n, dmin)}")

    @staticmethod
    def hoffman_scaling_defaults():
        return ExperimentConfig(experiment="hoffman_scaling", n=50, s=5, trials=10)

    @staticmethod
    def trajectory_defaults():
        return ExperimentConfig(experiment="trajectory", n=100, d=200, s=5, trials=1)


# -- CSV helpers -----------------------------------------------------------------


def fmt(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path, header, rows, timestamp=False):
    """Write rows (sequences of cells run through :func:`fmt`) under ``header``.

    ``rows`` entries that are strings starting with '#' pass through verbatim
    as comment lines. The header is always written, even with zero data rows.
    """
    lines = []
    if timestamp:
        import datetime

        lines.append("# generated " + datetime.datetime.now().isoformat())
    lines.append(header)
    for row in rows:
        if isinstance(row, str):
            lines.append(row)
        else:
            lines.append(",".join(fmt(c) for c in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# -- synthetic instances ------------------------------------------------------------


@dataclass
class LassoInstance:
    problem: CompositeProblem
    beta_star: np.ndarray
    support_star: frozenset
    noise: np.ndarray
    eta: float


def synth_lasso_instance(cfg: ExperimentConfig, n, d, ensemble, seed) -> LassoInstance:
    """Plant an s-sparse +-1 signal, add Gaussian noise, pick eta per policy.

    The planted support, signs, and noise are drawn from a stream that depends
    only on (seed, d), so matched seeds give paired instances across ensembles.
    """
    spec = EnsembleSpec(kind=ensemble, n=n, d=d,
                        rho=cfg.rho if ensemble == "spiked" else 0.0, seed=seed)
    a = sample_ensemble(spec)
    plant = np.random.default_rng([seed, PLANT_STREAM, d])
    support = np.sort(plant.choice(d, size=cfg.s, replace=False))
    beta_star = np.zeros(d)
    beta_star[support] = plant.integers(0, 2, size=cfg.s) * 2.0 - 1.0
    noise = cfg.noise_sigma * plant.standard_normal(n)
    y = a @ beta_star + noise
    grad_scale = n if cfg.normalized else 1
    if cfg.eta_policy == "fixed":
        eta = cfg.eta
    else:
        eta = cfg.eta_multiplier * float(np.max(np.abs(a.T @ noise))) / grad_scale
    problem = lasso_problem(a, y, eta, normalized=cfg.normalized)
    return LassoInstance(problem, beta_star, frozenset(support.tolist()), noise, eta)


def reference_solve(problem, cfg: ExperimentConfig):
    """Long high-accuracy run used for F* and beta_hat; never from theory."""
    ref_cfg = SolverConfig(max_iter=10 * cfg.max_iter, gradmap_tol=1e-12,
                           record_every=max(cfg.max_iter // 2, 1))
    traj = run(problem, ref_cfg, np.zeros(problem.dim))
    if traj.terminated_by != "tolerance":
        raise NumericalError(
            "reference solve did not reach gradient-mapping tolerance 1e-12 "
            f"within {ref_cfg.max_iter} iterations"
        )
    return traj


# -- experiments ---------------------------------------------------------------------


def run_hoffman_scaling(cfg: ExperimentConfig):
    """Hoffman-constant scaling across ambient dimensions.

    One row per (dim, ensemble, trial) in lexicographic order. Rows whose
    identified support differs from the planted one are flagged with a
    trailing comment line, never dropped.
    """
    rows = []
    flagged = 0
    total = 0
    solver_cfg = SolverConfig(max_iter=cfg.max_iter, gradmap_tol=cfg.gradmap_tol,
                              record_every=max(cfg.max_iter, 1))
    for dim in sorted(cfg.dims):
        for ensemble in sorted(cfg.ensembles):
            for trial in range(cfg.trials):
                total += 1
                seed_trial = cfg.seed + 1000 * trial
                inst = synth_lasso_instance(cfg, cfg.n, dim, ensemble, seed_trial)
                traj = run(inst.problem, solver_cfg, np.zeros(dim))
                beta_hat = traj.final_x
                supp = sorted(active_set(beta_hat))
                identified = frozenset(supp) == inst.support_star
                if not identified:
                    flagged += 1
                if supp:
                    sub = inst.problem.a[:, supp]
                    sigma_min = smallest_nonzero_singular(sub)
                    h_support = 1.0 / sigma_min
                    l_support = float(singular_values(sub)[0]) ** 2
                    h_face = _face_enumerated_or_none(inst.problem, beta_hat)
                else:
                    sigma_min = h_support = l_support = h_face = None
                l_global = float(singular_values(inst.problem.a)[0]) ** 2
                rows.append([dim, ensemble, trial, h_support, h_face,
                             sigma_min, l_global, l_support])
                if not identified:
                    rows.append(f"# flagged dim={dim} ensemble={ensemble} trial={trial}:"
                                " identified support differs from planted support")
    write_csv(cfg.out, SCALING_HEADER, rows, cfg.timestamp)
    return {"flagged": flagged, "total": total}


def _face_enumerated_or_none(problem, beta_hat):
    try:
        data = lasso_optimality_data(problem, beta_hat, kkt_tol=1e-5)
    except Exception:
        return None
    system = lasso_optimal_set_system(problem, data)
    if system.n_rows > ENUM_SIZE_CAP:
        return None
    try:
        return hoffman_enumerated(system).value
    except Exception:
        return None


def _trajectory_rows(traj, beta_hat, f_hat, support):
    factors = contraction_factors(traj, f_hat)
    rows = []
    for i, rec in enumerate(traj.records):
        act = rec.active_set if rec.active_set is not None else (
            active_set(rec.x, 1e-8) if rec.x is not None else frozenset())
        jac = jaccard(act, support)
        ratio = cone_ratio(rec.x, beta_hat, support) if rec.x is not None and support else None
        contraction = float(factors[i]) if i < len(factors) else 0.0
        rows.append([rec.k, rec.objective, max(rec.objective - f_hat, 0.0),
                     rec.gradmap_norm, len(act), jac,
                     ratio if ratio is None or np.isfinite(ratio) else "inf",
                     contraction])
    return rows


def run_trajectory(cfg: ExperimentConfig):
    """Instrumented ISTA run against a high-accuracy reference solution."""
    inst = synth_lasso_instance(cfg, cfg.n, cfg.d, cfg.ensembles[0], cfg.seed)
    reference = reference_solve(inst.problem, cfg)
    beta_hat = reference.final_x
    f_hat = float(np.min(reference.objectives()))
    support = active_set(beta_hat)
    solver_cfg = SolverConfig(max_iter=cfg.max_iter, gradmap_tol=cfg.gradmap_tol,
                              record_every=cfg.record_every)
    traj = run(inst.problem, solver_cfg, np.zeros(cfg.d))
    rows = _trajectory_rows(traj, beta_hat, f_hat, support)
    write_csv(cfg.out, TRAJECTORY_HEADER, rows, cfg.timestamp)
    return {"instance": inst, "reference": reference, "trajectory": traj,
            "support": support, "f_hat": f_hat}


def two_blobs(n, seed, separation=2.0):
    """Two 2-D Gaussian blobs with +-1 labels; both classes always present."""
    rng = np.random.default_rng(seed)
    n_pos = n // 2
    if n_pos < 1 or n - n_pos < 1:
        raise InputError("need at least one point per class")
    center = separation / 2.0
    xs = np.vstack([
        center + 0.5 * rng.standard_normal((n_pos, 2)),
        -center + 0.5 * rng.standard_normal((n - n_pos, 2)),
    ])
    labels = np.concatenate([np.ones(n_pos), -np.ones(n - n_pos)])
    return xs, labels


def run_svm(cfg: ExperimentConfig):
    """Solve the SVM dual by proximal gradient; emit the per-iterate CSV and a
    constants report (written next to ``out`` with a ``.constants.csv`` suffix)
    restricted to the support-vector set."""
    xs, labels = two_blobs(cfg.n, cfg.seed, cfg.separation)
    if len(set(labels.tolist())) < 2:
        raise InputError("SVM needs both classes present")
    z = labels[:, None] * xs
    q = z @ z.T
    problem = svm_dual_problem(q, labels, cfg.c_cap)
    reference = reference_solve(problem, cfg)
    alpha_hat = reference.final_x
    f_hat = float(np.min(reference.objectives()))
    sv = active_set(alpha_hat, 1e-8)
    solver_cfg = SolverConfig(max_iter=cfg.max_iter, gradmap_tol=cfg.gradmap_tol,
                              record_every=cfg.record_every)
    traj = run(problem, solver_cfg, np.zeros(cfg.n))
    rows = _trajectory_rows(traj, alpha_hat, f_hat, sv)
    write_csv(cfg.out, TRAJECTORY_HEADER, rows, cfg.timestamp)
    report = constants_report(problem, Restriction.support_face(sv), reference,
                              n_samples=cfg.n_samples, seed=cfg.seed)
    constants_path = _sibling(cfg.out, ".constants.csv")
    write_csv(constants_path, CONSTANTS_HEADER, [constants_row(report)], cfg.timestamp)
    return {"problem": problem, "reference": reference, "trajectory": traj,
            "support_vectors": sv, "report": report, "constants_path": constants_path}


def _sibling(path, suffix):
    base = str(path)
    return (base[:-4] if base.endswith(".csv") else base) + suffix


def constants_row(report):
    return [
        report.restriction.label,
        report.L, report.L_K,
        report.H.value, report.H.method,
        report.H_K.value, report.H_K.method,
        report.nu_K, report.nu_provenance,
        report.mu_K, report.gamma_K_lb, report.delta_star,
        report.kappa, report.kappa_K, report.B_norm,
    ]


# -- problem files (solve / constants commands) ---------------------------------------


def load_problem(problem_cfg: dict) -> tuple[CompositeProblem, np.ndarray]:
    """Build a problem from a [problem] config section; returns (problem, x0)."""
    known = {"a", "y", "labels", "q", "linear", "smooth_kind", "reg_kind",
             "eta", "c_cap", "alpha", "x0"}
    for key in problem_cfg:
        if key not in known:
            raise ConfigError(f"unknown key {key!r} in [problem]")
    reg_kind = problem_cfg.get("reg_kind", "zero")
    smooth_kind = problem_cfg.get("smooth_kind", "least_squares")
    if reg_kind == "zero":
        reg = ZeroReg()
    elif reg_kind == "l1":
        if "eta" not in problem_cfg:
            raise ConfigError("reg_kind l1 needs key 'eta' in [problem]")
        reg = L1Reg(float(problem_cfg["eta"]))
    elif reg_kind == "box_hyperplane":
        if "labels" not in problem_cfg:
            raise ConfigError("reg_kind box_hyperplane needs key 'labels' in [problem]")
        reg = BoxHyperplaneIndicator(read_vector(problem_cfg["labels"]),
                                     float(problem_cfg.get("c_cap", 1.0)))
    else:
        raise ConfigError(f"unknown reg_kind {reg_kind!r} in [problem]")
    alpha = problem_cfg.get("alpha")
    if smooth_kind == "quadratic_form":
        if "q" not in problem_cfg:
            raise ConfigError("quadratic_form needs key 'q' in [problem]")
        q = read_matrix(problem_cfg["q"])
        linear = read_vector(problem_cfg["linear"]) if "linear" in problem_cfg \
            else np.ones(q.shape[0])
        problem = CompositeProblem(smooth_kind="quadratic_form", reg=reg,
                                   quadratic=(q, linear),
                                   strong_convexity_alpha=alpha)
    else:
        if "a" not in problem_cfg or "y" not in problem_cfg:
            raise ConfigError("least-squares problems need keys 'a' and 'y' in [problem]")
        problem = CompositeProblem(smooth_kind=smooth_kind, reg=reg,
                                   a=read_matrix(problem_cfg["a"]),
                                   y=read_vector(problem_cfg["y"]),
                                   strong_convexity_alpha=alpha)
    x0 = read_vector(problem_cfg["x0"]) if "x0" in problem_cfg else np.zeros(problem.dim)
    return problem, x0


def run_solve(cfg: ExperimentConfig, problem, x0):
    """Trajectory CSV for one problem; the solution vector rides in a comment."""
    reference = reference_solve(problem, cfg)
    x_hat = reference.final_x
    f_hat = float(np.min(reference.objectives()))
    support = active_set(x_hat, 1e-8)
    solver_cfg = SolverConfig(max_iter=cfg.max_iter, gradmap_tol=cfg.gradmap_tol,
                              record_every=cfg.record_every)
    traj = run(problem, solver_cfg, x0)
    rows = _trajectory_rows(traj, x_hat, f_hat, support)
    rows.append("# solution " + " ".join(fmt(v) for v in traj.final_x))
    write_csv(cfg.out, TRAJECTORY_HEADER, rows, cfg.timestamp)
    return {"trajectory": traj, "reference": reference}


def run_constants(cfg: ExperimentConfig, problem, x0):
    """Constants-report CSV: one row per requested restriction."""
    reference = reference_solve(problem, cfg)
    rows = []
    reports = []
    for name in cfg.restrictions:
        if name == "global":
            restriction = Restriction.global_()
        elif name == "support":
            support = active_set(reference.final_x, 1e-8)
            if not support:
                raise InputError("reference solution has empty support")
            restriction = Restriction.support_face(support)
        else:
            raise ConfigError(f"unknown restriction {name!r}")
        report = constants_report(problem, restriction, reference,
                                  n_samples=cfg.n_samples, seed=cfg.seed)
        reports.append(report)
        rows.append(constants_row(report))
    write_csv(cfg.out, CONSTANTS_HEADER, rows, cfg.timestamp)
    return {"reports": reports, "reference": reference}
