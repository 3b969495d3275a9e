import numpy as np
import pytest

from deepopt.core import BudgetAccountant, EvaluatedSample, SamplePool, ScalingConfig
from deepopt.model import (
    Adam,
    LandscapeModel,
    ModelFrozenError,
    TrainConfig,
    draw_validation,
    pearson,
    train_cycle,
)

H = 1e-6


def fd_input_gradient(model, x, h=H):
    grad = np.zeros_like(x)
    for i in range(x.size):
        hi = x.copy(); hi[i] += h
        lo = x.copy(); lo[i] -= h
        grad[i] = ((1 - model.forward_one(hi)) ** 2 - (1 - model.forward_one(lo)) ** 2) / (2 * h)
    return grad


def kink_free(model, x, h=H, margin=50.0):
    """Central differences are invalid within h of a rectifier kink."""
    _, _, zs = model._forward_full(np.atleast_2d(x))
    return all(np.abs(z).min() > margin * h for z in zs)


def draw_case(arch, dim, seed):
    """Deterministic (net, input) pair with all pre-activations clear of kinks."""
    for attempt in range(64):
        rng = np.random.default_rng((seed + 1) * 1000 + attempt)
        model = LandscapeModel(arch, dim, rng)
        x = rng.random(dim)
        if kink_free(model, x):
            return model, x
    raise AssertionError("could not draw a kink-free case")


def rel_err(a, b):
    return np.abs(a - b) / np.maximum.reduce([np.abs(a), np.abs(b),
                                              np.full_like(a, 1e-6)])


class TestForward:
    def test_zero_weights_give_half(self):
        model = LandscapeModel("deep5", 4, np.random.default_rng(0))
        for w, b in zip(model.weights, model.biases):
            w[:] = 0.0
            b[:] = 0.0
        assert model.forward_one(np.array([0.2, 0.4, 0.6, 0.8])) == 0.5

    def test_purity(self):
        model = LandscapeModel("deep10", 6, np.random.default_rng(1))
        x = np.random.default_rng(2).random(6)
        assert model.forward_one(x) == model.forward_one(x)

    def test_output_in_open_unit_interval(self):
        model = LandscapeModel("deep5", 6, np.random.default_rng(3))
        preds = model.forward(np.random.default_rng(4).random((64, 6)))
        assert ((preds > 0.0) & (preds < 1.0)).all()

    def test_dimension_check(self):
        model = LandscapeModel("deep5", 6, np.random.default_rng(5))
        with pytest.raises(ValueError):
            model.forward(np.zeros((2, 7)))

    def test_unknown_architecture(self):
        with pytest.raises(ValueError):
            LandscapeModel("deep7", 4)


class TestInputGradients:
    @pytest.mark.parametrize("arch,dim", [("deep5", 7), ("deep10", 9)])
    def test_against_central_differences(self, arch, dim):
        for seed in range(10):
            model, x = draw_case(arch, dim, seed)
            model.freeze()
            analytic = model.input_gradient(x)
            numeric = fd_input_gradient(model, x)
            assert rel_err(analytic, numeric).max() < 1e-4

    def test_requires_frozen_model(self):
        model = LandscapeModel("deep5", 4, np.random.default_rng(6))
        with pytest.raises(ModelFrozenError):
            model.input_gradient(np.zeros(4))

    def test_single_precision_kernel_agrees(self):
        model = LandscapeModel("deep5", 12, np.random.default_rng(7))
        model.freeze()
        X = np.random.default_rng(8).random((32, 12))
        g64, p64 = model.input_gradients(X)
        g32, p32 = model.input_gradients(X, single_precision=True)
        assert np.abs(p64 - p32).max() < 1e-5
        assert np.abs(g64 - g32).max() < 1e-6

    def test_saturated_prediction_has_vanishing_gradient(self):
        model = LandscapeModel("deep5", 4, np.random.default_rng(9))
        model.biases[-1][:] = 50.0  # drive the sigmoid to 1.0
        model.freeze()
        x = np.full(4, 0.5)
        assert model.forward_one(x) == 1.0
        assert np.abs(model.input_gradient(x)).max() == 0.0


class TestWeightGradients:
    @pytest.mark.parametrize("arch", ["deep5", "deep10"])
    def test_against_central_differences(self, arch):
        model, _ = draw_case(arch, 5, 20)
        rng = np.random.default_rng(21)
        X = rng.random((6, 5))
        y = rng.random(6)
        pred, acts, zs = model._forward_full(X)
        g_out = ((2.0 / 6) * (pred - y) * pred * (1 - pred))[:, None]
        w_grads, b_grads, _ = model._backward(acts, zs, g_out)
        for layer in (0, len(model.weights) - 1):
            numeric = np.zeros_like(model.weights[layer])
            it = np.nditer(numeric, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                orig = model.weights[layer][idx]
                model.weights[layer][idx] = orig + H
                hi = model.loss_on(X, y)
                model.weights[layer][idx] = orig - H
                lo = model.loss_on(X, y)
                model.weights[layer][idx] = orig
                numeric[idx] = (hi - lo) / (2 * H)
            assert rel_err(w_grads[layer], numeric).max() < 1e-4


class TestDeep10Wiring:
    def test_layer_input_widths(self):
        model = LandscapeModel("deep10", 11, np.random.default_rng(22))
        widths = [w.shape[0] for w in model.weights]
        assert widths == [11 + 20 * k for k in range(11)]

    def test_zeroing_hidden_inputs_leaves_pure_input_function(self):
        model = LandscapeModel("deep10", 7, np.random.default_rng(23))
        d = 7
        for k in range(1, len(model.weights) - 1):
            model.weights[k][d:, :] = 0.0  # keep only the raw-input block
        x = np.random.default_rng(24).random((3, 7))
        _, acts, _ = model._forward_full(x)
        for k in range(1, model.spec.hidden_layers + 1):
            direct = np.maximum(x @ model.weights[k - 1][:d] + model.biases[k - 1], 0.0)
            assert np.allclose(acts[k], direct)


class TestTraining:
    def make_pool(self, n=300, dim=6, seed=30):
        rng = np.random.default_rng(seed)
        X = rng.random((n, dim))
        scores = X.sum(axis=1)
        pool = SamplePool(n + 10)
        pool.insert([EvaluatedSample(values=row, raw_score=float(s))
                     for row, s in zip(X, scores)])
        return pool

    def test_full_batch_loss_non_increasing(self):
        pool = self.make_pool()
        X, _ = pool.as_arrays()
        from deepopt.core import scale_scores
        y = scale_scores(pool, ScalingConfig())
        model = LandscapeModel("deep5", 6, np.random.default_rng(31))
        rng = np.random.default_rng(32)
        losses = [model.loss_on(X, y)]
        for _ in range(40):
            model.train_epoch(X, y, batch_size=len(y), rng=rng, weight_decay=1.0)
            losses.append(model.loss_on(X, y))
        diffs = np.diff(losses)
        assert (diffs <= 1e-6).all()

    def test_weight_decay_shrinks_weights(self):
        model = LandscapeModel("deep5", 6, np.random.default_rng(33))
        X = np.random.default_rng(34).random((32, 6))
        y = np.zeros(32)
        before = [w.copy() for w in model.weights]
        model.train_epoch(X, y, batch_size=64, rng=np.random.default_rng(35),
                          weight_decay=0.5)
        # decay applies after the gradient step; magnitudes shrink roughly in half
        for w_before, w_after in zip(before, model.weights):
            assert np.abs(w_after).sum() < 0.75 * np.abs(w_before).sum()

    def test_frozen_model_rejects_training(self):
        model = LandscapeModel("deep5", 4, np.random.default_rng(36))
        model.freeze()
        with pytest.raises(ModelFrozenError):
            model.train_epoch(np.zeros((4, 4)), np.zeros(4), 2, np.random.default_rng(0))


class Identity1D:
    kind = "identity"
    dimension = 1

    def evaluate(self, values, rng=None):
        return float(values[0])


class Flat1D:
    kind = "flat"
    dimension = 1

    def evaluate(self, values, rng=None):
        return 1.0


class Inverted1D:
    kind = "inverted"
    dimension = 1

    def evaluate(self, values, rng=None):
        return -float(values[0])


def pool_1d(problem, n=500, seed=40):
    rng = np.random.default_rng(seed)
    pool = SamplePool(n + 10)
    samples = []
    for _ in range(n):
        x = rng.random(1)
        samples.append(EvaluatedSample(values=x, raw_score=problem.evaluate(x)))
    pool.insert(samples)
    return pool


class TestTrainCycle:
    def test_learnable_function_reaches_high_correlation(self):
        problem = Identity1D()
        pool = pool_1d(problem)
        model = LandscapeModel("deep5", 1, np.random.default_rng(41))
        cfg = TrainConfig(max_epochs=80)
        report = train_cycle(model, pool, ScalingConfig(), pool.best(), problem,
                             BudgetAccountant(10_000), cfg, np.random.default_rng(42))
        corr, defined = pearson(model.forward(report.validation.X),
                                report.validation.true_scores)
        assert defined and corr >= 0.95

    def test_constant_scores_stop_after_min_epochs(self):
        problem = Flat1D()
        pool = pool_1d(problem, n=100)
        model = LandscapeModel("deep5", 1, np.random.default_rng(43))
        cfg = TrainConfig(min_epochs=3, max_epochs=50)
        report = train_cycle(model, pool, ScalingConfig(), pool.best(), problem,
                             BudgetAccountant(10_000), cfg, np.random.default_rng(44))
        assert report.stop_reason == "degenerate-validation"
        assert report.epochs == 3

    def test_negative_first_correlation_restarts_up_to_cap(self):
        # pool says +x is good while the objective rewards -x, so the first
        # measured correlation stays negative and every restart is consumed
        identity_pool = pool_1d(Identity1D())
        model = LandscapeModel("deep5", 1, np.random.default_rng(45))
        cfg = TrainConfig(max_epochs=10, max_restarts=3)
        report = train_cycle(model, identity_pool, ScalingConfig(),
                             identity_pool.best(), Inverted1D(),
                             BudgetAccountant(10_000), cfg, np.random.default_rng(46))
        assert report.restarts == 3

    def test_budget_short_falls_back_to_previous_validation(self):
        problem = Identity1D()
        pool = pool_1d(problem, n=60)
        model = LandscapeModel("deep5", 1, np.random.default_rng(47))
        cfg = TrainConfig(max_epochs=4, validation_size=50)
        prev = draw_validation(pool.best(), problem, BudgetAccountant(100), cfg,
                               np.random.default_rng(48))
        short = BudgetAccountant(10)
        report = train_cycle(model, pool, ScalingConfig(), pool.best(), problem,
                             short, cfg, np.random.default_rng(49), prev_validation=prev)
        assert report.validation is prev
        assert short.spent == 0

    def test_discrete_validation_flips_bits(self):
        class Bits:
            kind = "bits"
            dimension = 10

            def evaluate(self, values, rng=None):
                return float((values > 0.5).sum())

        problem = Bits()
        best = EvaluatedSample(values=np.ones(10), raw_score=10.0)
        cfg = TrainConfig(validation_size=50, validation_perturbation_scale=0.2)
        got = draw_validation(best, problem, BudgetAccountant(100), cfg,
                              np.random.default_rng(50), discrete=True)
        assert set(np.unique(got.X)) <= {0.0, 1.0}
        assert len(np.unique(got.true_scores)) > 1


class TestPearson:
    def test_degenerate_inputs(self):
        assert pearson(np.ones(5), np.arange(5.0)) == (0.0, False)
        assert pearson(np.arange(5.0), np.ones(5)) == (0.0, False)
        assert pearson(np.array([1.0]), np.array([2.0])) == (0.0, False)

    def test_perfect_correlation(self):
        corr, defined = pearson(np.arange(10.0), 2 * np.arange(10.0) + 3)
        assert defined and corr == pytest.approx(1.0)


class TestAdam:
    def test_matches_reference_update(self):
        adam = Adam([(1,)], learning_rate=0.1)
        grads = [np.array([2.0])]
        update = adam.step(grads)[0]
        # first step: m-hat = g, v-hat = g^2 -> update ~= lr * sign(g)
        assert update[0] == pytest.approx(0.1, rel=1e-6)

    def test_state_accumulates(self):
        adam = Adam([(1,)], learning_rate=0.1)
        adam.step([np.array([1.0])])
        second = adam.step([np.array([-1.0])])[0]
        assert abs(second[0]) < 0.1  # momentum damps the sign flip


class TestStateManagement:
    def test_freeze_contract_checksum(self):
        model = LandscapeModel("deep5", 5, np.random.default_rng(51))
        model.freeze()
        before = model.checksum()
        model.input_gradients(np.random.default_rng(52).random((16, 5)))
        model.input_gradients(np.random.default_rng(53).random((16, 5)),
                              single_precision=True)
        assert model.checksum() == before

    def test_reinitialize_requires_thaw(self):
        model = LandscapeModel("deep5", 5, np.random.default_rng(54))
        model.freeze()
        with pytest.raises(ModelFrozenError):
            model.reinitialize(np.random.default_rng(55))

    def test_snapshot_roundtrip(self, tmp_path):
        for arch in ("deep5", "deep10"):
            model = LandscapeModel(arch, 7, np.random.default_rng(56))
            path = tmp_path / f"{arch}.net"
            model.save(path)
            clone = LandscapeModel.load(path)
            X = np.random.default_rng(57).random((8, 7))
            assert np.array_equal(model.forward(X), clone.forward(X))
            assert clone.checksum() == model.checksum()
