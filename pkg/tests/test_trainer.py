import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_sample
from ctlab.corpus import Corpus, split
from ctlab.errors import ValidationError
from ctlab.trainer import (
    ModelConfig,
    compute_class_weights,
    decide,
    predict,
    simulate_early_stopping,
    train,
)
from ctlab.trainer.tune import SearchSpace, tune
from ctlab.trainer.weights import weights_from_counts


class TestClassWeights:
    def test_uniform_counts_yield_ones(self):
        w = weights_from_counts(
            {"religio": 100, "ethno": 100, "nondenominational": 100, "noncommunal": 100},
            400,
        )
        assert w.w == (1.0, 1.0, 1.0, 1.0)

    def test_arithmetic_oracle(self):
        # N / (4 * n_c), computed independently
        counts = {"religio": 800, "ethno": 100, "nondenominational": 50, "noncommunal": 50}
        w = weights_from_counts(counts, 1000)
        assert w.w == (0.3125, 2.5, 5.0, 5.0)

    def test_product_constant_property(self):
        rng = random.Random(0)
        for _ in range(200):
            counts = {
                name: rng.randint(1, 5000)
                for name in ("religio", "ethno", "nondenominational", "noncommunal")
            }
            total = rng.randint(1, 20000)
            w = weights_from_counts(counts, total)
            products = [wc * counts[name] for wc, name in zip(w.w, counts)]
            assert max(products) - min(products) < 1e-9

    def test_zero_count_directs_to_augmentation(self):
        counts = {"religio": 10, "ethno": 0, "nondenominational": 5, "noncommunal": 5}
        with pytest.raises(ValidationError, match="augment"):
            weights_from_counts(counts, 20)

    def test_from_corpus(self):
        corpus = Corpus(
            [make_sample(i, labels) for i, labels in enumerate(
                [(1, 0, 0, 0)] * 2 + [(0, 1, 0, 0)] * 2
                + [(0, 0, 1, 0)] * 2 + [(0, 0, 0, 1)] * 2
            )]
        )
        assert compute_class_weights(corpus).w == (1.0, 1.0, 1.0, 1.0)


def stop_oracle(metrics, patience):
    """Brute-force oracle: scan every epoch, tracking strict-min best."""
    best = float("inf")
    best_epoch = 0
    for e, v in enumerate(metrics, start=1):
        if v < best:
            best, best_epoch = v, e
        if e - best_epoch >= patience:
            return e, best_epoch
    return len(metrics), best_epoch


class TestEarlyStopping:
    def test_strictly_improving_runs_full(self):
        metrics = [1.0 / (e + 1) for e in range(30)]
        stop, best = simulate_early_stopping(metrics, patience=2)
        assert (stop, best) == (30, 30)

    def test_peak_then_flat(self):
        metrics = [0.5, 0.4, 0.3, 0.3, 0.3, 0.3]
        stop, best = simulate_early_stopping(metrics, patience=2)
        assert (stop, best) == (5, 3)

    @settings(max_examples=100, deadline=None)
    @given(
        metrics=st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=40),
        patience=st.integers(0, 5),
    )
    def test_matches_oracle(self, metrics, patience):
        assert simulate_early_stopping(metrics, patience) == stop_oracle(metrics, patience)


class TestDecide:
    def test_all_below_threshold_is_nonviolent(self):
        assert decide([0.1, 0.2, 0.1, 0.3], 0.5) == "NonViolent"

    def test_argmax(self):
        assert decide([0.9, 0.1, 0.1, 0.1]) == "Religio"

    def test_noncommunal_argmax_wins(self):
        # argmax enforces the decision even with another class above threshold
        assert decide([0.6, 0.1, 0.1, 0.7]) == "Noncommunal"

    def test_tie_breaks_by_class_priority(self):
        assert decide([0.8, 0.8, 0.1, 0.1]) == "Religio"

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            decide([1.2, 0.1, 0.1, 0.1])

    @settings(max_examples=100, deadline=None)
    @given(
        row=st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4),
        threshold=st.floats(0.0, 1.0),
    )
    def test_nonviolent_iff_all_below_threshold(self, row, threshold):
        decision = decide(row, threshold)
        if all(v < threshold for v in row):
            assert decision == "NonViolent"
        else:
            assert decision != "NonViolent"
            assert row[np.argmax(row)] == max(row)


def separable_corpus(n=200, seed=0):
    """Synthetic 4-class corpus with a distinctive keyword per class."""
    keywords = {
        (1, 0, 0, 0): "alphafaith",
        (0, 1, 0, 0): "betatribe",
        (0, 0, 1, 0): "gammatongue",
        (0, 0, 0, 1): "deltabrawl",
    }
    rng = random.Random(seed)
    fillers = ["river", "market", "evening", "letter", "window"]
    samples = []
    for i in range(n):
        labels = list(keywords)[i % 4]
        words = [keywords[labels]] + rng.sample(fillers, 3)
        rng.shuffle(words)
        samples.append(make_sample(i, labels, text=" ".join(words)))
    return Corpus(samples)


@pytest.fixture(scope="module")
def smoke_checkpoint(tmp_path_factory):
    corpus = separable_corpus()
    splits = split(corpus, seed=0)
    config = ModelConfig(
        encoder_id="tiny", epochs=10, batch_size=16, learning_rate=1e-3,
        patience=10, seed=0,
    )
    ckpt_dir = tmp_path_factory.mktemp("ckpt")
    checkpoint, history = train(config, splits, corpus, ckpt_dir)
    return corpus, splits, checkpoint, history


class TestTrain:
    def test_smoke_macro_f1(self, smoke_checkpoint):
        _, _, checkpoint, _ = smoke_checkpoint
        assert checkpoint.val_metric_at_best >= 0.9

    def test_first_epoch_loss_decreases(self, smoke_checkpoint):
        _, _, _, history = smoke_checkpoint
        assert history.epochs[1]["train_loss"] < history.epochs[0]["train_loss"]

    def test_best_checkpoint_metadata(self, smoke_checkpoint):
        _, _, checkpoint, history = smoke_checkpoint
        assert 1 <= checkpoint.best_epoch <= len(history.epochs)
        losses = [e["val_loss"] for e in history.epochs]
        assert losses[checkpoint.best_epoch - 1] == min(losses)


class TestPredict:
    def test_empty_input(self, smoke_checkpoint):
        _, _, checkpoint, _ = smoke_checkpoint
        assert predict(checkpoint, []).shape == (0, 4)

    def test_determinism(self, smoke_checkpoint):
        _, _, checkpoint, _ = smoke_checkpoint
        texts = ["alphafaith river", "deltabrawl window"]
        a = predict(checkpoint, texts)
        b = predict(checkpoint, texts)
        np.testing.assert_array_equal(a, b)

    def test_batched_matches_unbatched(self, smoke_checkpoint):
        _, _, checkpoint, _ = smoke_checkpoint
        texts = [f"alphafaith word{i} river evening" for i in range(37)]
        batched = predict(checkpoint, texts, batch_size=8)
        unbatched = predict(checkpoint, texts, batch_size=64)
        np.testing.assert_allclose(batched, unbatched, atol=1e-5)

    def test_reload_roundtrip(self, smoke_checkpoint, tmp_path):
        from ctlab.trainer import Checkpoint

        _, _, checkpoint, _ = smoke_checkpoint
        reloaded = Checkpoint.load(checkpoint.path)
        texts = ["betatribe market letter"]
        np.testing.assert_allclose(
            predict(checkpoint, texts), predict(reloaded, texts), atol=1e-6
        )


class TestTune:
    def stub_objective(self, config):
        # peaks at high learning rate, batch size 32
        return -abs(config.learning_rate - 5e-4) - 0.001 * abs(config.batch_size - 32)

    def test_budget_one_returns_single_config(self):
        best = tune(SearchSpace(), budget=1, objective=self.stub_objective, seed=1)
        assert isinstance(best, ModelConfig)

    def test_dominant_config_wins(self):
        calls = []

        def objective(config):
            calls.append(config)
            return 1.0 if config.batch_size == 32 else 0.0

        best = tune(
            SearchSpace(batch_size=(16, 32)), budget=12, objective=objective, seed=0
        )
        assert best.batch_size == 32

    def test_deterministic_trials(self, tmp_path):
        log1, log2 = tmp_path / "t1.jsonl", tmp_path / "t2.jsonl"
        tune(SearchSpace(), budget=6, objective=self.stub_objective, seed=7, trial_log=log1)
        tune(SearchSpace(), budget=6, objective=self.stub_objective, seed=7, trial_log=log2)
        assert log1.read_text() == log2.read_text()

    def test_all_failures_aggregate(self):
        def bad(config):
            raise RuntimeError("boom")

        with pytest.raises(Exception, match="boom"):
            tune(SearchSpace(), budget=2, objective=bad, seed=0)
