import numpy as np
import pytest

from geomopt import (
    ClassificationError,
    InputError,
    NotOptimalError,
    SolverConfig,
    active_set,
    cone_lemma_check,
    cone_ratio,
    identification_time,
    jaccard,
    lasso_b_matrix,
    lasso_kkt_residual,
    lasso_optimal_set_system,
    lasso_optimality_data,
    lasso_problem,
    run,
    singular_values,
)
from geomopt.linalg import EnsembleSpec, sample_ensemble
from geomopt.solver import IterateRecord, Trajectory


def toy_lasso():
    return lasso_problem(np.eye(2), [3.0, 0.5], 1.0)


def synth_instance(n=40, d=80, s=4, seed=2, multiplier=2.5):
    a = sample_ensemble(EnsembleSpec("gaussian", n, d, seed=seed))
    rng = np.random.default_rng(seed + 17)
    beta = np.zeros(d)
    support = rng.choice(d, s, replace=False)
    beta[support] = rng.integers(0, 2, s) * 2.0 - 1.0
    noise = 0.1 * rng.standard_normal(n)
    y = a @ beta + noise
    eta = multiplier * float(np.max(np.abs(a.T @ noise))) / n
    return lasso_problem(a, y, eta, normalized=True), beta, noise


def fake_trajectory(active_sets, xs=None, objectives=None):
    records = []
    for k, act in enumerate(active_sets):
        x = None if xs is None else np.asarray(xs[k], dtype=float)
        obj = 0.0 if objectives is None else objectives[k]
        records.append(IterateRecord(k, obj, 0.0, frozenset(act), x))
    return Trajectory(records, "max_iter", 1.0,
                      final_x=records[-1].x if xs is not None else None)


class TestActiveSet:
    def test_direct(self):
        assert active_set([0.0, 2.0, 0.0, -1.0], 1e-10) == {1, 3}

    def test_empty(self):
        assert active_set(np.zeros(4), 1e-10) == frozenset()

    def test_one_ista_step_from_zero(self):
        # hand-executed soft-threshold step on the identity instance:
        # x1 = soft((3, 0.5), 1) = (2, 0) so only coordinate 0 activates
        p = toy_lasso()
        t = run(p, SolverConfig(max_iter=1, gradmap_tol=1e-16), np.zeros(2))
        assert active_set(t.records[1].x if len(t.records) > 1 else t.final_x) == {0}

    def test_negative_tol_rejected(self):
        with pytest.raises(InputError):
            active_set([1.0], -1.0)


class TestJaccard:
    def test_equal(self):
        assert jaccard({1, 2}, {1, 2}) == 1.0

    def test_disjoint(self):
        assert jaccard({1, 2}, {3, 4}) == 0.0

    def test_partial(self):
        assert jaccard({1, 2}, {2, 3}) == pytest.approx(1 / 3)

    def test_both_empty(self):
        assert jaccard(set(), set()) == 1.0

    def test_symmetry_and_range(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = frozenset(rng.choice(10, rng.integers(0, 6), replace=False).tolist())
            b = frozenset(rng.choice(10, rng.integers(0, 6), replace=False).tolist())
            assert jaccard(a, b) == jaccard(b, a)
            assert 0.0 <= jaccard(a, b) <= 1.0
            assert (jaccard(a, b) == 1.0) == (a == b)


class TestConeRatio:
    def test_supported_inside(self):
        assert cone_ratio([1.0, 0.0], [0.5, 0.0], {0}) == 0.0

    def test_direct(self):
        assert cone_ratio([0.2, 0.1], [0.0, 0.0], {0}) == pytest.approx(0.5)

    def test_infinite(self):
        assert cone_ratio([0.0, 0.1], [0.0, 0.0], {0}) == np.inf

    def test_scale_invariance(self):
        rng = np.random.default_rng(1)
        beta = rng.standard_normal(5)
        delta = rng.standard_normal(5)
        base = cone_ratio(beta + delta, beta, {0, 2})
        for c in (0.1, 2.0, 30.0):
            assert cone_ratio(beta + c * delta, beta, {0, 2}) == pytest.approx(base)

    def test_empty_support_rejected(self):
        with pytest.raises(InputError):
            cone_ratio([1.0], [0.0], set())

    def test_tail_ratio_below_one_on_seeded_run(self):
        p, _, _ = synth_instance()
        ref = run(p, SolverConfig(max_iter=200000, gradmap_tol=1e-12), np.zeros(80))
        beta_hat = ref.final_x
        support = active_set(beta_hat)
        t = run(p, SolverConfig(max_iter=2000, gradmap_tol=1e-10), np.zeros(80))
        tail = [cone_ratio(r.x, beta_hat, support) for r in t.records[-20:]]
        assert all(r <= 1.0 for r in tail)


class TestConeLemma:
    def test_zero_error_vector(self):
        p = toy_lasso()
        beta_hat = np.array([2.0, 0.0])
        t = fake_trajectory([{0}], xs=[beta_hat], objectives=[4.625 - 2.0])
        metrics = cone_lemma_check(t, beta_hat, 1.0, f_hat=4.625 - 2.0)
        assert metrics.lemma_holds.all()
        assert metrics.lemma_rhs[0] >= 0.0

    def test_constructed_violation_detected(self):
        beta_hat = np.array([1.0, 0.0, 0.0])
        x = beta_hat + np.array([0.5, 2.0, 0.0])  # off-support mass 4x on-support
        t = fake_trajectory([{0, 1}], xs=[x], objectives=[1.0])
        metrics = cone_lemma_check(t, beta_hat, eta=1.0, f_hat=1.0)  # delta = 0
        assert not metrics.lemma_holds.any()

    def test_holds_along_run_under_dual_condition(self):
        p, _, _ = synth_instance(seed=7)
        ref = run(p, SolverConfig(max_iter=200000, gradmap_tol=1e-12), np.zeros(80))
        f_hat = float(np.min(ref.objectives()))
        t = run(p, SolverConfig(max_iter=3000, gradmap_tol=1e-10), np.zeros(80))
        metrics = cone_lemma_check(t, ref.final_x, p.reg.eta, f_hat)
        assert metrics.lemma_holds.all()

    def test_rhs_margin_nonincreasing(self):
        p, _, _ = synth_instance(seed=8)
        ref = run(p, SolverConfig(max_iter=200000, gradmap_tol=1e-12), np.zeros(80))
        f_hat = float(np.min(ref.objectives()))
        t = run(p, SolverConfig(max_iter=500, gradmap_tol=1e-10), np.zeros(80))
        metrics = cone_lemma_check(t, ref.final_x, p.reg.eta, f_hat)
        support = sorted(active_set(ref.final_x))
        on_norms = np.array([
            float(np.sum(np.abs((r.x - ref.final_x)[support]))) for r in t.records
        ])
        margin = metrics.lemma_rhs - 3.0 * on_norms  # equals 2 (F_k - f_hat) / eta
        assert np.all(np.diff(margin) <= 1e-12)

    def test_f_hat_validated(self):
        t = fake_trajectory([{0}], xs=[[1.0, 0.0]], objectives=[1.0])
        with pytest.raises(InputError):
            cone_lemma_check(t, np.array([1.0, 0.0]), 1.0, f_hat=2.0)


class TestIdentificationTime:
    def test_matches_everywhere(self):
        t = fake_trajectory([{1}, {1}, {1}])
        assert identification_time(t, {1}) == 0

    def test_never_matches(self):
        t = fake_trajectory([{1}, {2}, {1, 2}])
        assert identification_time(t, {3}) is None

    def test_seeded_run_identifies(self):
        p, _, _ = synth_instance(seed=9)
        ref = run(p, SolverConfig(max_iter=200000, gradmap_tol=1e-12), np.zeros(80))
        support = active_set(ref.final_x)
        t = run(p, SolverConfig(max_iter=3000, gradmap_tol=1e-10), np.zeros(80))
        ident = identification_time(t, support)
        assert ident is not None and ident > 0
        before = [r.active_set for r in t.records if r.k == ident - 1]
        assert before and jaccard(before[0], support) < 1.0


class TestLassoOptimalityData:
    def test_identity_instance(self):
        p = toy_lasso()
        data = lasso_optimality_data(p, [2.0, 0.0])
        assert np.allclose(data.s_hat, [1.0, 0.5])
        assert data.iplus == {0} and data.i0 == {1} and data.iminus == frozenset()
        assert data.delta_star == pytest.approx(0.5)

    def test_all_active_gives_infinite_margin(self):
        # A = I2, y large on both coordinates: both coordinates active
        p = lasso_problem(np.eye(2), [3.0, -4.0], 1.0)
        data = lasso_optimality_data(p, [2.0, -3.0])
        assert data.i0 == frozenset()
        assert data.delta_star == np.inf

    def test_partition_and_independent_recompute(self):
        p, _, _ = synth_instance(seed=11)
        ref = run(p, SolverConfig(max_iter=200000, gradmap_tol=1e-12), np.zeros(80))
        data = lasso_optimality_data(p, ref.final_x)
        all_idx = data.i0 | data.iplus | data.iminus
        assert all_idx == frozenset(range(80))
        assert not (data.i0 & data.iplus) and not (data.i0 & data.iminus)
        # independent recomputation of the margin by direct scan
        s = -(p.a.T @ (p.a @ ref.final_x - p.y)) / p.a.shape[0]
        inactive = sorted(data.i0)
        assert data.delta_star == pytest.approx(
            float(np.min(p.reg.eta - np.abs(s[inactive]))), rel=1e-9
        )

    def test_not_optimal_rejected(self):
        p = toy_lasso()
        with pytest.raises(NotOptimalError):
            lasso_optimality_data(p, [1.0, 1.0])

    def test_degenerate_classification_rejected(self):
        # s_hat lands within kkt_tol of the boundary but the coordinate is inactive
        p = lasso_problem(np.eye(2), [3.0, 1.0 - 1e-9], 1.0)
        with pytest.raises(ClassificationError):
            lasso_optimality_data(p, [2.0, 0.0], kkt_tol=1e-7)


class TestBMatrix:
    def test_rows_are_signed_basis_vectors(self):
        p, _, _ = synth_instance(seed=13)
        ref = run(p, SolverConfig(max_iter=200000, gradmap_tol=1e-12), np.zeros(80))
        data = lasso_optimality_data(p, ref.final_x)
        b = lasso_b_matrix(data, 80)
        assert b.shape[0] == 2 * len(data.i0) + len(data.iplus) + len(data.iminus)
        for row in b:
            assert np.sum(row != 0) == 1 and abs(row[np.flatnonzero(row)[0]]) == 1.0
        assert float(singular_values(b)[0]) <= np.sqrt(2.0) + 1e-12

    def test_optimal_set_system_contains_solution(self):
        p, _, _ = synth_instance(seed=14)
        ref = run(p, SolverConfig(max_iter=200000, gradmap_tol=1e-12), np.zeros(80))
        data = lasso_optimality_data(p, ref.final_x)
        system = lasso_optimal_set_system(p, data)
        assert float(system.residual(ref.final_x)[0]) <= 1e-9


class TestKktResidual:
    def test_zero_at_solution(self):
        p = toy_lasso()
        assert np.max(lasso_kkt_residual(p, [2.0, 0.0])) <= 1e-12

    def test_positive_away_from_solution(self):
        p = toy_lasso()
        assert np.max(lasso_kkt_residual(p, [0.0, 0.0])) > 0.1
