from __future__ import annotations

import numpy as np
import pytest

from cimcall.device import RngStream
from cimcall.nn import (
    Adam,
    ExactBackend,
    GradientSet,
    NnConfigurationError,
    Sgd,
    TrainingOptions,
    make_optimizer,
    pad_batch,
)


class MutedOutput(ExactBackend):
    def matmul(self, name, x, w, x_scale):
        product = super().matmul(name, x, w, x_scale)
        return 0.0 * product if name == "out.w" else product


@pytest.fixture
def batch():
    rng = np.random.default_rng(21)
    lengths = [9, 6, 8, 7]
    signals = [rng.normal(size=n) for n in lengths]
    labels = [rng.integers(0, 5, size=n) for n in lengths]
    return pad_batch(signals, labels, min_frames=3)


def test_pad_batch_marks_padding(batch):
    assert batch.signals.shape == (4, 9)
    assert np.all(batch.labels[1, 6:] == -1)
    np.testing.assert_array_equal(batch.lengths, [9, 6, 8, 7])


def test_adam_leaves_zero_gradient_untouched(tiny_model):
    grads = tiny_model.zeros_like()
    grads.grads["out.b"] = np.ones_like(grads.grads["out.b"])
    updated = Adam(0.1).step(tiny_model, grads)
    np.testing.assert_array_equal(updated.params["conv.w"], tiny_model.params["conv.w"])
    assert not np.array_equal(updated.params["out.b"], tiny_model.params["out.b"])


def test_sgd_step_direction(tiny_model):
    grads = GradientSet({k: np.ones_like(v) for k, v in tiny_model.params.items()})
    updated = Sgd(0.5).step(tiny_model, grads)
    np.testing.assert_allclose(
        updated.params["out.b"], tiny_model.params["out.b"] - 0.5
    )


def test_unknown_optimizer():
    with pytest.raises(NnConfigurationError):
        make_optimizer("rmsprop", 0.1)


def test_training_reduces_loss(tiny_model, batch):
    options = TrainingOptions(epochs=15, batch_size=4, learning_rate=0.05)
    result = options.trainer(RngStream(seed=1)).fit(tiny_model, batch)
    assert result.epochs == 15
    assert result.final_loss < result.losses[0]


def test_training_is_deterministic(tiny_model, batch):
    options = TrainingOptions(epochs=3, batch_size=2)
    a = options.trainer(RngStream(seed=4)).fit(tiny_model, batch)
    b = options.trainer(RngStream(seed=4)).fit(tiny_model, batch)
    assert a.losses == b.losses
    for name, value in a.model.params.items():
        np.testing.assert_array_equal(b.model.params[name], value)


def test_grad_masks_freeze_parameters(tiny_model, batch):
    masks = {
        name: np.zeros(v.shape, dtype=bool) for name, v in tiny_model.params.items()
    }
    masks["out.b"] = np.ones(tiny_model.params["out.b"].shape, dtype=bool)
    trainer = TrainingOptions(epochs=2, batch_size=2).trainer(
        RngStream(seed=0), grad_masks=masks
    )
    result = trainer.fit(tiny_model, batch)
    for name in ("conv.w", "rec.wx", "rec.wh", "out.w"):
        np.testing.assert_array_equal(
            result.model.params[name], tiny_model.params[name]
        )


def test_trainer_rejects_bad_mix():
    with pytest.raises(NnConfigurationError):
        TrainingOptions().trainer(RngStream(seed=0), mix=1.5)


def test_forward_backend_drives_the_loss(tiny_model, batch):
    seen = []

    def muted(view, rng):
        seen.append(rng.stream_id)
        return MutedOutput()

    options = TrainingOptions(epochs=1, batch_size=4)
    stream = RngStream(seed=3)
    _, exact_loss = options.trainer(stream).step(tiny_model, batch, stream)
    trainer = options.trainer(stream, forward_backend=muted)
    updated, loss = trainer.step(tiny_model, batch, stream)
    assert seen == [(0, 0, 1)]
    assert loss != pytest.approx(exact_loss)
    assert not np.array_equal(updated.params["out.w"], tiny_model.params["out.w"])
