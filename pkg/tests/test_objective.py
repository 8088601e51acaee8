import numpy as np
import pytest

from rankgauge import (
    OptimConfig,
    RankParams,
    TrialConfig,
    UsageError,
    basis_state,
    central_difference,
    finite_diff_gradient,
    from_spanning_set,
    haar_random_state,
    loss,
    loss_and_gradient,
    random_init,
    run_certification,
    span_of,
)
from rankgauge.objective import LossKernel
from rankgauge.catalog import StripParams, strip_subspace

from test_rank_param import make_params


def random_subspace(dims, d_s, rng):
    return from_spanning_set([haar_random_state(dims, rng) for _ in range(d_s)])


def rel_linf(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-30)


class TestLossValues:
    def test_orthogonal_state_gives_one(self):
        sub = span_of(basis_state((2, 2), (0, 0)))
        p = make_params((2, 2), 1, [(0.0, [([0, 1], [0, 0]), ([0, 1], [0, 0])])])
        assert loss(p, sub) == pytest.approx(1.0, abs=1e-14)

    def test_member_state_gives_zero(self):
        sub = span_of(basis_state((2, 2), (0, 0)))
        p = make_params((2, 2), 1, [(0.0, [([1, 0], [0, 0]), ([1, 0], [0, 0])])])
        assert loss(p, sub) == pytest.approx(0.0, abs=1e-14)

    def test_matches_explicit_projector(self, rng):
        from rankgauge import build_state

        sub = random_subspace((2, 3), 2, rng)
        p_perp = np.eye(6) - sub.basis.T @ sub.basis.conj()
        for seed in range(5):
            p = random_init((2, 3), 2, TrialConfig(seed=seed))
            st = build_state(p)
            direct = float(np.real(st.amp.conj() @ p_perp @ st.amp))
            assert loss(p, sub) == pytest.approx(direct, abs=1e-12)

    def test_value_in_range(self, rng):
        sub = random_subspace((2, 2, 2), 3, rng)
        for seed in range(10):
            p = random_init((2, 2, 2), 2, TrialConfig(seed=seed))
            assert -1e-12 <= loss(p, sub) <= 1.0 + 1e-12

    def test_dims_mismatch(self, rng):
        sub = random_subspace((2, 2), 2, rng)
        p = random_init((2, 3), 1, TrialConfig(seed=0))
        with pytest.raises(UsageError):
            loss(p, sub)

    def test_term_permutation_invariance(self, rng):
        sub = random_subspace((2, 3), 2, rng)
        p = random_init((2, 3), 3, TrialConfig(seed=8))
        x = p.x.reshape(3, -1)
        for perm in ([1, 0, 2], [2, 1, 0], [1, 2, 0]):
            q = RankParams((2, 3), 3, x[perm].ravel())
            assert abs(loss(p, sub) - loss(q, sub)) < 1e-14


class TestLossAndGradient:
    def test_value_is_bitwise_identical_to_loss(self, rng):
        sub = random_subspace((2, 2, 2), 2, rng)
        for seed in range(20):
            p = random_init((2, 2, 2), 2, TrialConfig(seed=seed))
            assert loss_and_gradient(p, sub).value == loss(p, sub)

    def test_matches_finite_differences(self, rng):
        configs = [((2, 2), 1), ((2, 2), 2), ((2, 3, 2), 2), ((3, 3, 3), 3)]
        for dims, budget in configs:
            sub = random_subspace(dims, 2, rng)
            for seed in range(3):
                p = random_init(dims, budget, TrialConfig(seed=seed))
                ev = loss_and_gradient(p, sub)
                fd = finite_diff_gradient(p, sub, step=1e-5)
                assert rel_linf(ev.gradient, fd) < 1e-5

    def test_gradient_finite(self, rng):
        sub = random_subspace((2, 2), 2, rng)
        p = random_init((2, 2), 3, TrialConfig(seed=2))
        ev = loss_and_gradient(p, sub)
        assert np.all(np.isfinite(ev.gradient))

    def test_stationary_at_loss_maximum(self):
        # a state orthogonal to S maximizes the loss; the gradient vanishes
        # there, and directions staying inside the complement are flat
        sub = span_of(basis_state((2, 2), (0, 0)))
        p = make_params((2, 2), 1, [(0.2, [([0, 1], [0, 0]), ([0, 1], [0, 0])])])
        ev = loss_and_gradient(p, sub)
        assert np.max(np.abs(ev.gradient)) < 1e-12
        # directional finite differences along flat directions: scaling theta
        # and rotating |1> toward |0> on party 2 both keep the state in S_perp
        kernel = LossKernel((2, 2), 1, sub)
        for direction in (
            np.array([1.0, 0, 0, 0, 0, 0, 0, 0, 0]),
            np.array([0.0, 0, 0, 0, 0, 1.0, 0, 0, 0]),
        ):
            h = 1e-5
            der = (kernel.value(p.x + h * direction) - kernel.value(p.x - h * direction)) / (2 * h)
            assert abs(der) < 1e-9

    def test_gradient_small_at_converged_minimum(self):
        params = StripParams(3, np.pi / 2)
        sub = strip_subspace(params)
        report = run_certification(sub, 2, OptimConfig(seed=3))
        ev = loss_and_gradient(report.best_params, sub)
        assert np.linalg.norm(ev.gradient) < 1e-8


class TestCentralDifference:
    def test_linear_exact(self):
        a = np.array([1.0, -2.0, 3.0])
        grad = central_difference(lambda x: float(a @ x), np.array([0.3, 0.1, -0.5]), 1e-5)
        np.testing.assert_allclose(grad, a, atol=1e-10)

    def test_quadratic_second_order(self):
        q = np.diag([1.0, 4.0, 9.0])
        x0 = np.array([1.0, -1.0, 0.5])
        grad = central_difference(lambda x: float(x @ q @ x) / 2, x0, 1e-4)
        np.testing.assert_allclose(grad, q @ x0, atol=1e-7)

    def test_step_must_be_positive(self):
        with pytest.raises(UsageError):
            central_difference(lambda x: 0.0, np.zeros(2), 0.0)
