"""Dense small-matrix numerics, seeded random ensembles, and the matrix text format.

Matrices are plain 2-D float64 numpy arrays (row-major). Randomness comes from
``numpy.random.default_rng`` (PCG64), so every sample is a pure function of its
seed; repeat calls are bit-identical within one numpy version.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMatrixError, InputError

SIGMA_ZERO_REL_TOL = 1e-10  # relative rank tolerance: sigma > tol * sigma_max


def as_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a finite 2-D float64 array."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise InputError(f"expected a nonempty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m


def as_vector(v, dim=None) -> np.ndarray:
    """Validate and return ``v`` as a finite 1-D float64 array of length ``dim``."""
    x = np.asarray(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise InputError("vector has non-finite entries")
    if dim is not None and x.size != dim:
        raise InputError(f"expected a vector of length {dim}, got {x.size}")
    return x


def singular_values(m) -> np.ndarray:
    """Singular values of ``m``, nonincreasing, length min(rows, cols)."""
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def smallest_nonzero_singular(m, zero_tol=None) -> float:
    """Smallest singular value above ``zero_tol``.

    ``zero_tol`` defaults to ``1e-10 * sigma_max`` so the rank decision
    survives rescaling of the matrix.
    """
    sigma = singular_values(m)
    if zero_tol is None:
        zero_tol = SIGMA_ZERO_REL_TOL * sigma[0]
    above = sigma[sigma > zero_tol]
    if above.size == 0:
        raise DegenerateMatrixError(
            f"all singular values at or below zero_tol={zero_tol:g}"
        )
    return float(above[-1])


def smoothness_constant(a, normalized=False) -> float:
    """Largest squared singular value of ``a``; divided by the row count when normalized."""
    a = as_matrix(a)
    top = float(singular_values(a)[0]) ** 2
    return top / a.shape[0] if normalized else top


@dataclass(frozen=True)
class EnsembleSpec:
    """Seeded recipe for an n-by-d random design matrix.

    ``spiked`` draws rows from an equicorrelated Gaussian with pairwise column
    correlation ``rho``, i.e. row covariance (1-rho)*I + rho*ones.
    """

    kind: str  # gaussian | rademacher | spiked
    n: int
    d: int
    rho: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian", "rademacher", "spiked"):
            raise InputError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 1 or self.d < 1:
            raise InputError("ensemble dimensions must be at least 1")
        if not 0.0 <= self.rho < 1.0:
            raise InputError(f"rho must lie in [0, 1), got {self.rho}")


def sample_ensemble(spec: EnsembleSpec) -> np.ndarray:
    """Draw the matrix described by ``spec``; deterministic in ``spec.seed``."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "gaussian":
        return rng.standard_normal((spec.n, spec.d))
    if spec.kind == "rademacher":
        return rng.integers(0, 2, size=(spec.n, spec.d)).astype(float) * 2.0 - 1.0
    # spiked: x = sqrt(1-rho) g + sqrt(rho) z 1 gives cov (1-rho) I + rho 11^T
    g = rng.standard_normal((spec.n, spec.d))
    z = rng.standard_normal((spec.n, 1))
    return np.sqrt(1.0 - spec.rho) * g + np.sqrt(spec.rho) * z


# -- matrix text format -------------------------------------------------------
#
# First non-comment line: "rows cols". Then `rows` lines of `cols` decimal
# reals. Lines starting with '#' are ignored. Vectors are stored as n x 1.


def write_matrix(path, m) -> None:
    m = as_matrix(m)
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(format(x, ".17g") for x in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        rows = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InputError(f"{path}: empty matrix file")
    try:
        nr, nc = (int(tok) for tok in rows[0].split())
    except ValueError as exc:
        raise InputError(f"{path}: bad header line {rows[0]!r}") from exc
    if len(rows) - 1 != nr:
        raise InputError(f"{path}: expected {nr} data lines, found {len(rows) - 1}")
    try:
        data = [[float(tok) for tok in ln.split()] for ln in rows[1:]]
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric entry") from exc
    m = np.array(data, dtype=float) if nr else np.zeros((0, nc))
    if m.size and m.shape[1] != nc:
        raise InputError(f"{path}: row width does not match header cols={nc}")
    return as_matrix(m)


def read_vector(path) -> np.ndarray:
    m = read_matrix(path)
    if 1 not in m.shape:
        raise InputError(f"{path}: expected a vector (one row or one column)")
    return m.reshape(-1)
