from __future__ import annotations

import numpy as np
import pytest

from cimcall.device import NonIdeality, NonIdealityProfile, RngStream
from cimcall.mitigate import (
    DeviceNoiseForward,
    MitigationConfigurationError,
    MitigationRecipe,
    kd_train,
    noise_forward,
    prepare_recipe,
    vat_train,
)
from cimcall.mitigate.vat import vat_trainer
from cimcall.nn import (
    VMM_PARAMETERS,
    fake_quant_transform,
    forward_logits,
    integer_weights,
)


def assert_on_grid(model):
    for name in VMM_PARAMETERS:
        q = integer_weights(model, name)
        np.testing.assert_allclose(
            model.params[name], q * model.weight_scales[name], atol=1e-12
        )


def first_step_loss(context, profile):
    trainer = vat_trainer(
        context.model,
        profile,
        1,
        RngStream(seed=0),
        device=context.device,
        array_size=16,
        options=context.training,
    )
    _, loss = trainer.step(context.model, context.data, RngStream(seed=0))
    return loss


def test_ideal_profile_trains_without_noise(context):
    ideal = noise_forward(
        context.spec, VMM_PARAMETERS, context.profile.ideal(), context.device, 16
    )
    noisy = noise_forward(
        context.spec, VMM_PARAMETERS, context.profile, context.device, 16
    )
    assert ideal is None
    assert isinstance(noisy, DeviceNoiseForward)


def test_disabled_profile_reduces_to_plain_training(context):
    vat = vat_trainer(
        context.model,
        context.profile.ideal(),
        1,
        RngStream(seed=0),
        options=context.training,
    )
    plain = context.training.trainer(
        RngStream(seed=0),
        epochs=1,
        param_transform=fake_quant_transform(context.spec, VMM_PARAMETERS),
    )
    expected = plain.fit(context.model, context.data).losses
    assert vat.fit(context.model, context.data).losses == expected


def test_noisy_forward_depends_only_on_stream(context):
    build = noise_forward(
        context.spec, VMM_PARAMETERS, context.profile, context.device, 16
    )
    signals = context.data.signals[:2]

    def logits(seed):
        backend = build(context.model, RngStream(seed=seed))
        return forward_logits(context.model, signals, backend)

    np.testing.assert_array_equal(logits(1), logits(1))
    assert not np.array_equal(logits(1), logits(2))


def test_adc_error_alone_changes_training_noise(context):
    adc_only = NonIdealityProfile(
        write_variation_rate=0.0,
        enabled=frozenset({NonIdeality.SENSE_ADC}),
        sense_vmin=0.0,
        adc_ref_error=0.25,
    )
    build = noise_forward(context.spec, VMM_PARAMETERS, adc_only, context.device, 16)
    assert isinstance(build, DeviceNoiseForward)
    exact = first_step_loss(context, context.profile.ideal())
    assert first_step_loss(context, adc_only) != pytest.approx(exact)


@pytest.mark.slow
def test_vat_returns_quantised_model(context):
    model = vat_train(
        context.model,
        context.data,
        context.profile,
        1,
        RngStream(seed=0),
        device=context.device,
        array_size=16,
        options=context.training,
    )
    assert model.quant == context.model.quant
    assert_on_grid(model)


@pytest.mark.slow
def test_kd_returns_quantised_model(context):
    model = kd_train(
        context.model,
        context.teacher,
        context.data,
        2.0,
        0.5,
        1,
        RngStream(seed=0),
        options=context.training,
    )
    assert model.quant == context.model.quant
    assert_on_grid(model)


def test_kd_rejects_non_positive_temperature(context):
    with pytest.raises(MitigationConfigurationError):
        kd_train(
            context.model, context.teacher, context.data, 0.0, 0.5, 1, RngStream(seed=0)
        )


def test_vat_rejects_zero_epochs(context):
    with pytest.raises(MitigationConfigurationError):
        vat_train(context.model, context.data, context.profile, 0, RngStream(seed=0))


@pytest.mark.slow
def test_offline_phase_leaves_chip_unprogrammed(context):
    recipe = MitigationRecipe.parse("vat+kd+rvw", vat={"epochs": 1}, kd={"epochs": 1})
    prepared = prepare_recipe(recipe, context)
    assert prepared.chip is None
    assert prepared.programming_mode == "one_shot"
    assert {"vat_seconds", "kd_seconds"} <= set(prepared.ledger.notes)
