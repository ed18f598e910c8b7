import numpy as np
import pytest
from scipy import integrate

from pushift.baselines import (
    logistic_loss,
    nnpu_risk,
    sigmoid_loss,
    train_baseline,
    upu_risk,
)
from pushift.data import SplitDataset, case1_mixture, synth_case1, synth_from_mixture
from pushift.divergence import Branch
from pushift.errors import ConfigError
from pushift.models import GaussianBasisLinear
from pushift.trainer import TrainConfig


class TestSurrogateLosses:
    def test_values_at_zero(self):
        sig, log = sigmoid_loss(), logistic_loss()
        assert sig.loss(1, 0.0) == 0.5 and sig.loss(-1, 0.0) == 0.5
        assert log.loss(1, 0.0) == pytest.approx(np.log(2))

    def test_sigmoid_bounded(self):
        v = np.linspace(-50, 50, 1001)
        sig = sigmoid_loss()
        for y in (1, -1):
            vals = sig.loss(y, v)
            assert np.all((vals >= 0) & (vals <= 1))

    def test_logistic_convex_in_v(self):
        log = logistic_loss()
        v = np.linspace(-10, 10, 2001)
        for y in (1, -1):
            second = np.diff(log.loss(y, v), 2)
            assert np.all(second >= -1e-12)

    def test_derivatives_match_finite_differences(self):
        v = np.linspace(-5, 5, 101)
        h = 1e-6
        for loss in (sigmoid_loss(), logistic_loss()):
            for y in (1, -1):
                fd = (loss.loss(y, v + h) - loss.loss(y, v - h)) / (2 * h)
                np.testing.assert_allclose(loss.dloss_dv(y, v), fd, atol=1e-8)


class TestRiskEstimators:
    def test_upu_sigmoid_at_zero(self):
        assert upu_risk(sigmoid_loss(), 0.3, np.zeros(5), np.zeros(7)) == pytest.approx(0.5)

    def test_prior_zero_collapse(self):
        rng = np.random.default_rng(0)
        g_pos, g_unl = rng.normal(size=10), rng.normal(size=20)
        loss = sigmoid_loss()
        assert upu_risk(loss, 0.0, g_pos, g_unl) == pytest.approx(
            float(np.mean(loss.loss(-1, g_unl)))
        )

    def test_nnpu_sigmoid_at_zero(self):
        value, branch = nnpu_risk(sigmoid_loss(), 0.3, np.zeros(5), np.zeros(7))
        assert value == pytest.approx(0.5)
        assert branch is Branch.NORMAL

    def test_nnpu_equals_upu_when_bracket_nonnegative(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            prior = rng.uniform(0.05, 0.95)
            g_pos = rng.normal(size=rng.integers(1, 30))
            g_unl = rng.normal(size=rng.integers(1, 30))
            loss = sigmoid_loss() if rng.random() < 0.5 else logistic_loss()
            u = upu_risk(loss, prior, g_pos, g_unl)
            n, branch = nnpu_risk(loss, prior, g_pos, g_unl)
            if branch is Branch.NORMAL:
                assert n == pytest.approx(u, abs=1e-12)
            else:
                assert n > u and n >= 0

    def test_adversarial_bracket_goes_negative(self):
        """Overconfident fits push the unbiased risk negative, nnPU clips it."""
        g_pos = np.full(20, 10.0)
        g_unl = np.full(40, -10.0)
        loss = sigmoid_loss()
        u = upu_risk(loss, 0.8, g_pos, g_unl)
        n, branch = nnpu_risk(loss, 0.8, g_pos, g_unl)
        assert u < 0
        assert branch is Branch.CORRECTED
        assert n >= 0

    def test_empty_lists_rejected(self):
        with pytest.raises(ValueError):
            upu_risk(sigmoid_loss(), 0.5, [], [0.0])

    def test_upu_unbiasedness_monte_carlo(self):
        """Mean of PU estimates matches the supervised risk by quadrature."""
        mix = case1_mixture(prior=0.4)
        loss = sigmoid_loss()

        def g(x):
            return x - 0.2

        risk_pos = integrate.quad(lambda x: loss.loss(1, g(x)) * mix.pdf_pos(x), -12, 12)[0]
        risk_neg = integrate.quad(lambda x: loss.loss(-1, g(x)) * mix.pdf_neg(x), -12, 12)[0]
        population = 0.4 * risk_pos + 0.6 * risk_neg

        estimates = []
        for seed in range(1000):
            ds = synth_from_mixture(mix, 50, 250, 0.4, (seed, 123))
            estimates.append(
                upu_risk(loss, 0.4, g(ds.positives.ravel()), g(ds.unlabeled.ravel()))
            )
        estimates = np.asarray(estimates)
        stderr = estimates.std(ddof=1) / np.sqrt(len(estimates))
        assert abs(estimates.mean() - population) < 3 * stderr


def overfit_split(seed=0):
    """Tiny positive set, flexible model: the classic negative-risk setup."""
    return SplitDataset(
        train=synth_case1(20, 100, 0.4, seed),
        val=synth_case1(20, 100, 0.4, seed + 1),
    )


class TestTrainBaseline:
    def test_upu_risk_goes_negative_when_overparameterized(self):
        split = overfit_split()
        model = GaussianBasisLinear(split.train.unlabeled, bandwidth=0.3, clamp=False)
        cfg = TrainConfig(epochs=150, batch_size=100, learning_rate=5e-2, l2_reg=0.0, seed=0)
        model, report = train_baseline("upu", logistic_loss(), 0.4, model, split, cfg)
        assert min(report.train_objective) < 0

    def test_nnpu_risk_stays_nonnegative(self):
        split = overfit_split()
        model = GaussianBasisLinear(split.train.unlabeled, bandwidth=0.3, clamp=False)
        cfg = TrainConfig(epochs=150, batch_size=100, learning_rate=5e-2, l2_reg=0.0, seed=0)
        model, report = train_baseline("nnpu", sigmoid_loss(), 0.4, model, split, cfg)
        assert min(report.train_objective) >= 0
        assert max(report.corrected_fraction) > 0  # the defensive branch fired

    def test_method_and_prior_validation(self):
        split = overfit_split()
        model = GaussianBasisLinear(split.train.unlabeled, clamp=False)
        with pytest.raises(ConfigError):
            train_baseline("vpu", sigmoid_loss(), 0.4, model, split, TrainConfig(epochs=1))
        with pytest.raises(ConfigError):
            train_baseline("upu", sigmoid_loss(), 1.2, model, split, TrainConfig(epochs=1))

    def test_zero_epochs_noop(self):
        split = overfit_split()
        model = GaussianBasisLinear(split.train.unlabeled, clamp=False)
        before = model.params.copy()
        model, report = train_baseline(
            "nnpu", sigmoid_loss(), 0.4, model, split, TrainConfig(epochs=0, batch_size=50)
        )
        np.testing.assert_array_equal(model.params, before)

    def test_deterministic(self):
        split = overfit_split()
        cfg = TrainConfig(epochs=10, batch_size=50, learning_rate=1e-2, seed=4)
        m1 = GaussianBasisLinear(split.train.unlabeled, clamp=False)
        m2 = GaussianBasisLinear(split.train.unlabeled, clamp=False)
        train_baseline("nnpu", sigmoid_loss(), 0.4, m1, split, cfg)
        train_baseline("nnpu", sigmoid_loss(), 0.4, m2, split, cfg)
        np.testing.assert_array_equal(m1.params, m2.params)
