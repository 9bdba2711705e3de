import numpy as np
import pytest

from geomopt import (
    BoxHyperplaneIndicator,
    CompositeProblem,
    DomainError,
    InputError,
    L1Reg,
    PolyhedralIndicator,
    PolyhedralSystem,
    ZeroReg,
    generalized_gradient_size,
    gradient_f,
    gradient_mapping,
    lasso_problem,
    objective,
    prox,
    svm_dual_problem,
)

from _oracles import central_diff_gradient, grid_min_2d, grid_project_2d


def toy_lasso():
    return lasso_problem(np.eye(2), [3.0, 0.5], 1.0)


def seeded_lasso(n=5, d=3, seed=10, eta=0.7):
    rng = np.random.default_rng(seed)
    return lasso_problem(rng.standard_normal((n, d)), rng.standard_normal(n), eta)


def box_polytope_problem():
    # random-ish 2-D polytope: a shifted box cut by a diagonal halfspace
    system = PolyhedralSystem.build(
        m_ineq=[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [1.0, 1.0]],
        r_ineq=[1.0, 1.0, 1.0, 1.0, 1.2],
    )
    return system


class TestObjective:
    def test_half_norm_squared(self):
        p = CompositeProblem("least_squares", ZeroReg(), a=np.eye(2), y=[0.0, 0.0])
        assert objective(p, [3.0, 4.0]) == pytest.approx(12.5)

    def test_lasso_direct(self):
        assert objective(toy_lasso(), [0.0, 0.0]) == pytest.approx(4.625)

    def test_indicator_infeasible(self):
        p = svm_dual_problem(np.eye(2), [1.0, -1.0], 1.0)
        assert objective(p, [0.5, 0.1]) == np.inf  # hyperplane violated
        assert np.isfinite(objective(p, [0.5, 0.5]))

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            objective(toy_lasso(), [1.0, 2.0, 3.0])


class TestGradient:
    def test_identity_least_squares(self):
        p = CompositeProblem("least_squares", ZeroReg(), a=np.eye(3), y=np.zeros(3))
        x = np.array([1.0, -2.0, 0.5])
        assert np.allclose(gradient_f(p, x), x)

    def test_quadratic_form_affine(self):
        p = svm_dual_problem(np.eye(2), [1.0, -1.0], 1.0)
        assert np.allclose(gradient_f(p, np.zeros(2)), [-1.0, -1.0])

    def test_finite_differences_seeded(self):
        p = seeded_lasso()
        x = np.random.default_rng(1).standard_normal(3)
        smooth = lambda z: objective(p, z) - p.reg.value(z)
        fd = central_diff_gradient(smooth, x)
        assert np.max(np.abs(gradient_f(p, x) - fd)) <= 1e-5

    def test_finite_differences_all_kinds(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((4, 3))
        y = rng.standard_normal(4)
        q = a.T @ a
        problems = [
            CompositeProblem("least_squares", ZeroReg(), a=a, y=y),
            CompositeProblem("least_squares_normalized", ZeroReg(), a=a, y=y),
            CompositeProblem("quadratic_form", ZeroReg(), quadratic=(q, rng.standard_normal(3))),
        ]
        for p in problems:
            for _ in range(5):
                x = rng.standard_normal(3)
                fd = central_diff_gradient(lambda z: objective(p, z), x)
                g = gradient_f(p, x)
                assert np.max(np.abs(g - fd)) <= 1e-5 * max(1.0, np.max(np.abs(g)))


class TestProx:
    def test_soft_threshold(self):
        out = prox(toy_lasso(), [3.0, -0.5], 1.0)
        assert np.allclose(out, [2.0, 0.0])

    def test_box_hyperplane_closed_form(self):
        p = svm_dual_problem(np.eye(2), [1.0, -1.0], 1.0)
        out = prox(p, [0.5, 0.3], 1.0)
        assert np.allclose(out, [0.4, 0.4], atol=1e-10)

    def test_polyhedral_matches_grid_projection(self):
        system = box_polytope_problem()
        reg = PolyhedralIndicator(system)
        rng = np.random.default_rng(3)
        for _ in range(3):
            v = rng.standard_normal(2) * 2.0
            got = reg.prox(v, 1.0)
            want = grid_project_2d(
                lambda pts: system.residual(pts) <= 1e-9, v, (-1.0, -1.0), (1.0, 1.0),
                steps=4001,
            )
            assert np.linalg.norm(got - want) <= 1e-3

    def test_nonexpansive_all_kinds(self):
        rng = np.random.default_rng(4)
        regs = [
            ZeroReg(),
            L1Reg(0.8),
            PolyhedralIndicator(box_polytope_problem()),
            BoxHyperplaneIndicator([1.0, -1.0], 1.0),
        ]
        for reg in regs:
            for _ in range(20):
                v1, v2 = rng.standard_normal(2), rng.standard_normal(2)
                d_out = np.linalg.norm(reg.prox(v1, 0.7) - reg.prox(v2, 0.7))
                assert d_out <= np.linalg.norm(v1 - v2) + 1e-10

    def test_soft_threshold_optimality(self):
        # 0 in u - v + t * subgradient(|u|) componentwise
        rng = np.random.default_rng(5)
        reg = L1Reg(1.3)
        for _ in range(50):
            v = rng.standard_normal(4) * 2
            lam = float(rng.uniform(0.1, 2.0))
            u = reg.prox(v, lam)
            t = lam * reg.eta
            for ui, vi in zip(u, v):
                if ui != 0.0:
                    assert abs(ui - vi + t * np.sign(ui)) <= 1e-10
                else:
                    assert abs(vi) <= t + 1e-10

    def test_box_hyperplane_feasible_and_idempotent(self):
        rng = np.random.default_rng(6)
        labels = np.array([1.0, -1.0, 1.0, -1.0, -1.0])
        reg = BoxHyperplaneIndicator(labels, 2.0)
        for _ in range(40):
            v = rng.standard_normal(5) * 3
            u = reg.prox(v, 1.0)
            assert np.all(u >= -1e-10) and np.all(u <= 2.0 + 1e-10)
            assert abs(labels @ u) <= 1e-10
            again = reg.prox(u, 1.0)
            assert np.linalg.norm(again - u) <= 1e-9

    def test_single_class_labels_project_to_zero(self):
        reg = BoxHyperplaneIndicator([1.0, 1.0], 1.0)
        assert np.allclose(reg.prox([0.4, 0.9], 1.0), [0.0, 0.0], atol=1e-10)


class TestGradientMapping:
    def test_zero_reg_equals_gradient(self):
        p = CompositeProblem("least_squares", ZeroReg(), a=np.eye(2), y=[1.0, -1.0])
        x = np.array([2.0, 3.0])
        assert np.allclose(gradient_mapping(p, x, 0.3), gradient_f(p, x))

    def test_zero_at_lasso_solution(self):
        p = toy_lasso()
        assert np.linalg.norm(gradient_mapping(p, [2.0, 0.0], 1.0)) <= 1e-9

    def test_gradmap_squared_below_dg(self):
        # cross-operation bound at step 1/L on a seeded instance
        p = seeded_lasso(n=6, d=4, seed=20)
        smooth_l = p.smooth_l()
        rng = np.random.default_rng(21)
        for _ in range(100):
            x = rng.standard_normal(4) * 2
            gm = np.linalg.norm(gradient_mapping(p, x, 1.0 / smooth_l))
            dg = generalized_gradient_size(p, x, smooth_l)
            assert gm**2 <= dg + 1e-9 * max(1.0, dg)


class TestGeneralizedGradientSize:
    def test_zero_reg_reduces_to_gradient_norm(self):
        p = CompositeProblem("least_squares", ZeroReg(), a=np.eye(2), y=[1.0, 0.0])
        rng = np.random.default_rng(7)
        for _ in range(10):
            x = rng.standard_normal(2)
            alpha = float(rng.uniform(0.2, 3.0))
            g = gradient_f(p, x)
            assert generalized_gradient_size(p, x, alpha) == pytest.approx(float(g @ g))

    def test_zero_at_optimum(self):
        assert generalized_gradient_size(toy_lasso(), [2.0, 0.0], 1.0) <= 1e-12

    def test_matches_grid_minimization(self):
        p = lasso_problem(np.array([[1.0, 0.3], [0.1, 0.8]]), [0.7, -0.4], 0.3)
        x = np.array([0.5, -0.2])
        alpha = 1.1
        grad = gradient_f(p, x)
        gx = p.reg.value(x)

        def inner(y):
            return float(grad @ (y - x)) + 0.5 * alpha * float((y - x) @ (y - x)) \
                + p.reg.value(y) - gx

        best, _ = grid_min_2d(inner, (-1.5, -1.5), (1.5, 1.5), steps=901)
        want = -2.0 * alpha * best
        got = generalized_gradient_size(p, x, alpha)
        assert abs(got - want) <= 1e-4

    def test_monotone_in_alpha(self):
        p = seeded_lasso(seed=30)
        rng = np.random.default_rng(31)
        for _ in range(200):
            x = rng.standard_normal(3) * 2
            a1 = float(rng.uniform(0.05, 2.0))
            a2 = a1 + float(rng.uniform(0.0, 3.0))
            d1 = generalized_gradient_size(p, x, a1)
            d2 = generalized_gradient_size(p, x, a2)
            assert d1 <= d2 + 1e-12

    def test_infeasible_point_rejected(self):
        p = svm_dual_problem(np.eye(2), [1.0, -1.0], 1.0)
        with pytest.raises(DomainError):
            generalized_gradient_size(p, [0.9, 0.1], 1.0)


class TestValidation:
    def test_q_must_be_psd(self):
        with pytest.raises(InputError):
            CompositeProblem("quadratic_form", ZeroReg(),
                             quadratic=(np.array([[-1.0, 0.0], [0.0, 1.0]]), np.zeros(2)))

    def test_q_must_be_symmetric(self):
        with pytest.raises(InputError):
            CompositeProblem("quadratic_form", ZeroReg(),
                             quadratic=(np.array([[1.0, 0.5], [0.0, 1.0]]), np.zeros(2)))

    def test_labels_validated(self):
        with pytest.raises(InputError):
            BoxHyperplaneIndicator([1.0, 0.5], 1.0)
