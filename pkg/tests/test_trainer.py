import numpy as np
import pytest

from pushift.data import SplitDataset, synth_case1
from pushift.errors import ConfigError, TrainingDiverged
from pushift.generators import lsif_generator
from pushift.models import gaussian_basis_linear
from pushift.trainer import AdamState, TrainConfig, _epoch_batches, adam_step, train

LSIF = lsif_generator()


def small_split(seed=0, n=(40, 200), v=(20, 100)):
    return SplitDataset(
        train=synth_case1(n[0], n[1], 0.4, seed),
        val=synth_case1(v[0], v[1], 0.4, seed + 1),
    )


class TestAdam:
    def test_zero_gradient_fixed_point(self):
        state = AdamState.zeros(5)
        delta = adam_step(state, np.zeros(5), lr=0.1)
        np.testing.assert_array_equal(delta, np.zeros(5))

    def test_constant_gradient_step_approaches_lr(self):
        """With a constant gradient the normalized step tends to lr * sign(g)."""
        state = AdamState.zeros(3, beta1=0.9, beta2=0.999)
        g = np.array([2.5, -0.3, 1e-3])
        lr = 0.01
        for _ in range(5000):
            delta = adam_step(state, g, lr)
        np.testing.assert_allclose(np.abs(delta), lr, rtol=1e-3)
        np.testing.assert_array_equal(np.sign(delta), -np.sign(g))

    def test_dimension_mismatch(self):
        state = AdamState.zeros(3)
        with pytest.raises(ValueError):
            adam_step(state, np.zeros(4), lr=0.1)


class TestBatching:
    def test_epoch_covers_unlabeled_once(self):
        rng = np.random.default_rng(0)
        batches = _epoch_batches(rng, n_pos=40, n_unl=200, batch_size=50)
        unl = np.concatenate([u for _, u in batches])
        assert sorted(unl.tolist()) == list(range(200))
        for pos_idx, unl_idx in batches:
            assert pos_idx.size == round(unl_idx.size * 40 / 200)

    def test_positive_pool_smaller_than_draw(self):
        rng = np.random.default_rng(1)
        batches = _epoch_batches(rng, n_pos=3, n_unl=100, batch_size=100)
        (pos_idx, unl_idx), = batches
        assert pos_idx.size == 3 and unl_idx.size == 100


class TestTrain:
    def test_zero_epochs_noop(self):
        split = small_split()
        model = gaussian_basis_linear(split.train.unlabeled)
        before = model.params.copy()
        model, report = train(model, split, LSIF, TrainConfig(epochs=0))
        np.testing.assert_array_equal(model.params, before)
        assert report.train_objective == [] and report.best_epoch == -1

    def test_validation_selection_is_argmin(self):
        split = small_split()
        model = gaussian_basis_linear(split.train.unlabeled)
        cfg = TrainConfig(epochs=30, batch_size=40, learning_rate=1e-3, seed=3)
        model, report = train(model, split, LSIF, cfg)
        assert report.best_epoch == int(np.argmin(report.val_objective))
        # the returned snapshot actually attains the reported minimum
        from pushift.divergence import empirical_objective

        returned_val = empirical_objective(
            LSIF, model.predict(split.val.positives), model.predict(split.val.unlabeled)
        )
        assert returned_val == pytest.approx(min(report.val_objective), abs=1e-12)

    def test_reproducible_reports(self):
        split = small_split()
        cfg = TrainConfig(epochs=10, batch_size=40, learning_rate=1e-3, seed=7)
        m1 = gaussian_basis_linear(split.train.unlabeled)
        m2 = gaussian_basis_linear(split.train.unlabeled)
        _, r1 = train(m1, split, LSIF, cfg)
        _, r2 = train(m2, split, LSIF, cfg)
        assert r1.val_objective == r2.val_objective
        assert r1.train_objective == r2.train_objective
        np.testing.assert_array_equal(m1.params, m2.params)

    def test_alpha_zero_never_corrects(self):
        split = small_split()
        model = gaussian_basis_linear(split.train.unlabeled)
        cfg = TrainConfig(alpha=0.0, epochs=20, batch_size=40, learning_rate=1e-3, seed=0)
        _, report = train(model, split, LSIF, cfg)
        assert report.corrected_fraction == [0.0] * 20

    def test_alpha_zero_matches_plain_descent(self):
        """With the corrected branch unreachable the loop is plain descent."""
        split = small_split()
        cfg = TrainConfig(alpha=0.0, epochs=8, batch_size=40, learning_rate=1e-3, seed=5)
        model = gaussian_basis_linear(split.train.unlabeled)
        model, report = train(model, split, LSIF, cfg)
        assert report.best_epoch == cfg.epochs - 1  # monotone improvement here

        # reference loop: same batches, always the plain-objective gradient
        ref = gaussian_basis_linear(split.train.unlabeled)
        rng = np.random.default_rng(cfg.seed)
        state = AdamState.zeros(ref.n_params, beta1=cfg.adam_beta1, beta2=cfg.adam_beta2)
        tr = split.train
        for _ in range(cfg.epochs):
            for pos_idx, unl_idx in _epoch_batches(rng, tr.n_pos, tr.n_unl, cfg.batch_size):
                xp, xu = tr.positives[pos_idx], tr.unlabeled[unl_idx]
                rp, ru = ref.predict(xp), ref.predict(xu)
                grad = ref.grad_dot(xp, -LSIF.f_prime2(rp) / rp.size) + ref.grad_dot(
                    xu, ru * LSIF.f_prime2(ru) / ru.size
                )
                grad = grad + cfg.l2_reg * ref.params
                ref.params = ref.params + adam_step(state, grad, cfg.learning_rate)
        # trainer returns the best-validation snapshot; with monotone improvement
        # on this easy problem that is the final epoch, same as the reference
        np.testing.assert_allclose(model.params, ref.params, atol=1e-12)

    def test_case1_objective_improves(self):
        """Reference configuration: validation objective drops during training."""
        split = SplitDataset(
            train=synth_case1(200, 1000, 0.4, 11),
            val=synth_case1(100, 500, 0.4, 12),
        )
        model = gaussian_basis_linear(split.train.unlabeled, bandwidth=1.0)
        cfg = TrainConfig(
            alpha=0.0, epochs=200, batch_size=200, learning_rate=2e-5,
            adam_beta1=0.5, adam_beta2=0.999, l2_reg=0.1, seed=11,
        )
        model, report = train(model, split, LSIF, cfg)
        assert report.val_objective[-1] < report.val_objective[0]
        assert min(report.val_objective) == report.val_objective[report.best_epoch]

    def test_lr_halving_changes_trajectory(self):
        split = small_split()
        cfg_flat = TrainConfig(epochs=12, batch_size=40, learning_rate=1e-3, seed=1)
        cfg_halved = TrainConfig(
            epochs=12, batch_size=40, learning_rate=1e-3, seed=1, lr_halving_period=4
        )
        m1 = gaussian_basis_linear(split.train.unlabeled)
        m2 = gaussian_basis_linear(split.train.unlabeled)
        train(m1, split, LSIF, cfg_flat)
        train(m2, split, LSIF, cfg_halved)
        assert not np.array_equal(m1.params, m2.params)

    def test_batch_size_exceeds_pool(self):
        split = small_split()
        model = gaussian_basis_linear(split.train.unlabeled)
        with pytest.raises(ConfigError):
            train(model, split, LSIF, TrainConfig(batch_size=10_000))

    def test_empty_split_rejected(self):
        split = small_split()
        bad = SplitDataset(
            train=split.train,
            val=type(split.val)(split.val.positives[:0], split.val.unlabeled),
        )
        model = gaussian_basis_linear(split.train.unlabeled)
        with pytest.raises(ConfigError):
            train(model, bad, LSIF, TrainConfig(epochs=1, batch_size=10))

    def test_divergence_detected(self):
        split = small_split()
        model = gaussian_basis_linear(split.train.unlabeled)
        cfg = TrainConfig(epochs=3, batch_size=40, learning_rate=1e200, seed=0)
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(TrainingDiverged):
                train(model, split, LSIF, cfg)

    def test_config_validation(self):
        for bad in (
            dict(alpha=1.0),
            dict(epochs=-1),
            dict(batch_size=0),
            dict(learning_rate=0),
            dict(adam_beta1=1.0),
            dict(l2_reg=-0.1),
            dict(lr_halving_period=0),
        ):
            with pytest.raises(ConfigError):
                TrainConfig(**bad).validate()
