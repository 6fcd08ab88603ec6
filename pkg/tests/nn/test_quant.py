from __future__ import annotations

import numpy as np
import pytest

from cimcall.nn import (
    VMM_PARAMETERS,
    NnConfigurationError,
    QuantSpec,
    fake_quantize,
    integer_weights,
    quantize_model,
    quantize_tensor,
    tensor_scale,
)


@pytest.mark.parametrize(
    ("text", "bits"),
    [("16-16", (16, 16)), ("8-8", (8, 8)), ("4-2", (4, 2)), (" 4 - 4 ", (4, 4))],
)
def test_parse_fixed_formats(text, bits):
    spec = QuantSpec.parse(text)
    assert (spec.weight_bits, spec.activation_bits) == bits
    assert not spec.is_float


def test_parse_float_format():
    assert QuantSpec.parse("32-32").is_float


@pytest.mark.parametrize("text", ["8", "6-6", "32-8", "x-y"])
def test_parse_rejects_bad_formats(text):
    with pytest.raises(NnConfigurationError):
        QuantSpec.parse(text)


def test_zero_tensor_stays_zero():
    assert tensor_scale(np.zeros(4), 8) == 1.0
    q, _ = quantize_tensor(np.zeros(4), 8)
    np.testing.assert_array_equal(q, 0)


def test_quantize_tensor_hits_peak_level():
    w = np.array([-0.5, 0.25, 1.0])
    q, scale = quantize_tensor(w, 4)
    assert q.max() == 7
    assert scale == pytest.approx(1.0 / 7)
    np.testing.assert_allclose(fake_quantize(w, 4), q * scale)


def test_quantize_error_bounded_by_half_step():
    w = np.random.default_rng(0).normal(size=200)
    q, scale = quantize_tensor(w, 8)
    assert np.max(np.abs(q * scale - w)) <= scale / 2 + 1e-12


def test_quantize_model_keeps_biases(tiny_model):
    spec = QuantSpec.parse("4-4")
    quantized = quantize_model(tiny_model, spec)
    assert set(quantized.weight_scales) == set(VMM_PARAMETERS)
    np.testing.assert_array_equal(
        quantized.params["conv.b"], tiny_model.params["conv.b"]
    )
    for name in VMM_PARAMETERS:
        assert np.abs(integer_weights(quantized, name)).max() <= spec.weight_levels


def test_float_quantization_is_identity(tiny_model):
    same = quantize_model(tiny_model, QuantSpec())
    for name, value in tiny_model.params.items():
        np.testing.assert_array_equal(same.params[name], value)
    assert same.weight_scales == {}
