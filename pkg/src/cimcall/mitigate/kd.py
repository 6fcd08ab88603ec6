from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING, override

from cimcall.device import DeviceParams
from cimcall.mitigate.base import Phase, Technique
from cimcall.mitigate.exceptions import MitigationConfigurationError
from cimcall.mitigate.models import MitigationTechnique
from cimcall.mitigate.registry import register
from cimcall.mitigate.vat import noise_forward, noise_transform, training_engine
from cimcall.nn import TrainingOptions, quantize_model

if TYPE_CHECKING:
    from cimcall.device import NonIdealityProfile, RngStream
    from cimcall.mitigate.models import MitigationContext, MitigationRecipe
    from cimcall.nn import Batch, NetworkModel, Trainer
    from cimcall.xbar import VmmEngine

_log = logging.getLogger(__name__)


def kd_trainer(
    student: NetworkModel,
    teacher: NetworkModel,
    temperature: float,
    mix: float,
    epochs: int,
    rng: RngStream,
    *,
    profile: NonIdealityProfile | None = None,
    device: DeviceParams | None = None,
    array_size: int | tuple[int, int] = 64,
    options: TrainingOptions | None = None,
    engine: VmmEngine | None = None,
) -> Trainer:
    if temperature <= 0.0:
        raise MitigationConfigurationError(
            issue=f"temperature {temperature} must be positive",
            stage="kd_train",
        )
    if epochs < 1:
        raise MitigationConfigurationError(
            issue=f"epochs={epochs} must be >= 1", stage="kd_train"
        )

    options = options or TrainingOptions()
    names = student.vmm_layers()
    return options.trainer(
        rng,
        epochs=epochs,
        param_transform=noise_transform(student.quant, names, profile),
        forward_backend=noise_forward(
            student.quant,
            names,
            profile,
            device or DeviceParams(),
            array_size,
            engine=engine,
        ),
        teacher=teacher,
        temperature=temperature,
        mix=mix,
    )


def kd_train(
    student: NetworkModel,
    teacher: NetworkModel,
    data: Batch,
    temperature: float,
    mix: float,
    epochs: int,
    rng: RngStream,
    *,
    profile: NonIdealityProfile | None = None,
    device: DeviceParams | None = None,
    array_size: int | tuple[int, int] = 64,
    options: TrainingOptions | None = None,
    engine: VmmEngine | None = None,
) -> NetworkModel:
    """Distil a float teacher into a quantised student.

    The loss mixes hard-label cross-entropy (weight ``mix``) with the
    temperature-softened teacher distribution scaled by ``T^2``. When a
    profile is given, every batch runs through virtually programmed tiles
    on ``engine``, as in variation-aware training.

    Raises:
        MitigationConfigurationError: If ``temperature`` is not positive or
            ``epochs`` is below one.
        TrainingDivergenceError: If the loss becomes non-finite.
    """
    trainer = kd_trainer(
        student,
        teacher,
        temperature,
        mix,
        epochs,
        rng,
        profile=profile,
        device=device,
        array_size=array_size,
        options=options,
        engine=engine,
    )
    result = trainer.fit(student, data)
    _log.info(
        "KD finished after %d epochs (T=%.2f, mix=%.2f)", epochs, temperature, mix
    )
    return quantize_model(result.model, student.quant)


@register(MitigationTechnique.KD)
class KnowledgeDistillation(Technique):
    phase = Phase.OFFLINE

    @override
    def apply(
        self, context: MitigationContext, recipe: MitigationRecipe
    ) -> MitigationContext:
        model = kd_train(
            context.model,
            context.teacher,
            context.data,
            recipe.kd.temperature,
            recipe.kd.mix,
            recipe.kd.epochs,
            context.rng.child(2),
            profile=context.profile,
            device=context.device,
            array_size=context.array_size,
            options=context.training,
            engine=training_engine(context.library),
        )
        context.ledger.retrain_epochs += recipe.kd.epochs
        return dataclasses.replace(context, model=model)
