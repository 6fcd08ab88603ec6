from __future__ import annotations

import numpy as np
import pytest

from cimcall.nn import (
    BLANK,
    IGNORE_LABEL,
    DistillationTargets,
    ModelShape,
    NetworkModel,
    ShapeMismatchError,
    forward,
    forward_logits,
    loss_and_grads,
    loss_from_logits,
)


@pytest.fixture
def signal() -> np.ndarray:
    return np.random.default_rng(11).normal(size=(2, 7))


@pytest.fixture
def labels() -> np.ndarray:
    labels = np.random.default_rng(12).integers(0, BLANK + 1, size=(2, 7))
    labels[1, 5:] = IGNORE_LABEL
    return labels


def test_forward_is_a_distribution_per_frame(tiny_model, signal):
    probs = forward(tiny_model, signal)
    assert probs.shape == (2, 7, BLANK + 1)
    np.testing.assert_allclose(probs.sum(axis=-1), 1.0)


def test_forward_accepts_single_signal(tiny_model, signal):
    single = forward(tiny_model, signal[0])
    np.testing.assert_allclose(single[0], forward(tiny_model, signal)[0])


def test_forward_rejects_short_signal(tiny_model):
    with pytest.raises(ShapeMismatchError):
        forward(tiny_model, np.zeros(2))


def test_model_rejects_wrong_parameter_shape(tiny_model):
    params = dict(tiny_model.params)
    params["out.w"] = np.zeros((3, 3))
    with pytest.raises(ShapeMismatchError):
        tiny_model.with_params(params)


def test_ignored_frames_do_not_contribute(tiny_model, signal, labels):
    logits = forward_logits(tiny_model, signal)
    _, d_logits = loss_from_logits(logits, labels)
    np.testing.assert_array_equal(d_logits[1, 5:], 0.0)


def test_distillation_with_full_mix_is_plain_cross_entropy(tiny_model, signal, labels):
    logits = forward_logits(tiny_model, signal)
    plain, _ = loss_from_logits(logits, labels)
    distill = DistillationTargets(logits=np.zeros_like(logits), mix=1.0)
    mixed, _ = loss_from_logits(logits, labels, distill)
    assert mixed == pytest.approx(plain)


@pytest.mark.parametrize("distill", [False, True])
def test_gradients_match_finite_differences(signal, labels, distill):
    model = NetworkModel.initialize(
        np.random.default_rng(5),
        ModelShape(kernel=3, channels=3, hidden=3),
        activation="tanh",
    )
    targets = None
    if distill:
        teacher_logits = np.random.default_rng(6).normal(size=(2, 7, BLANK + 1))
        targets = DistillationTargets(logits=teacher_logits, temperature=2.0, mix=0.3)

    _, grads = loss_and_grads(model, signal, labels, distill=targets)
    pick = np.random.default_rng(13)
    eps = 1e-6
    for name, value in model.params.items():
        for _ in range(3):
            index = tuple(pick.integers(0, dim) for dim in value.shape)
            plus, minus = dict(model.params), dict(model.params)
            plus[name] = value.copy()
            minus[name] = value.copy()
            plus[name][index] += eps
            minus[name][index] -= eps
            up, _ = loss_and_grads(
                model.with_params(plus), signal, labels, distill=targets
            )
            down, _ = loss_and_grads(
                model.with_params(minus), signal, labels, distill=targets
            )
            numeric = (up - down) / (2 * eps)
            expected = pytest.approx(numeric, rel=1e-4, abs=1e-8)
            assert grads[name][index] == expected, name
