from __future__ import annotations

import dataclasses
import logging
from functools import partial
from typing import TYPE_CHECKING, override

from cimcall.device import DeviceParams, apply_write_variation
from cimcall.mapper import (
    ProgrammedChip,
    ProgrammingStats,
    TileBackend,
    TilePlan,
    map_matrix,
)
from cimcall.mitigate.base import Phase, Technique
from cimcall.mitigate.exceptions import MitigationConfigurationError
from cimcall.mitigate.models import MitigationTechnique
from cimcall.mitigate.registry import register
from cimcall.nn import (
    TrainingOptions,
    fake_quant_transform,
    quantize_model,
    quantize_tensor,
)
from cimcall.xbar import get_default_vmm_engine_factory

if TYPE_CHECKING:
    import numpy as np

    from cimcall.device import NonIdealityProfile, RngStream
    from cimcall.mitigate.models import MitigationContext, MitigationRecipe
    from cimcall.nn import (
        BackendFactory,
        Batch,
        NetworkModel,
        ParamTransform,
        QuantSpec,
        Trainer,
    )
    from cimcall.xbar import MeasurementLibrary, TileBlock, TileState, VmmEngine

_log = logging.getLogger(__name__)


def training_engine(library: MeasurementLibrary | None = None) -> VmmEngine:
    """Engine supplying training-time VMM errors.

    With a library, characterised tiles draw stored deviations and the rest
    fall back to the analytical model.
    """
    factory = get_default_vmm_engine_factory()
    if library is None:
        return factory.create("analytical")
    return factory.create("hybrid", library=library)


def _virtual_write(block: TileBlock, *, rate: float, rng: RngStream) -> TileState:
    tile = block.tile
    stream = rng.child(tile.tile_id)
    return tile.with_conductance(
        apply_write_variation(tile.targets, rate, stream, tile.device)
    )


class DeviceNoiseForward:
    """Forward backend that runs every VMM of a step on freshly written tiles.

    Each call snaps the view's weight matrices to the integer grid, slices
    them onto virtual tiles and writes every tile once with write variation.
    The returned backend reads the tiles through ``engine``, which adds the
    profile's DAC, wire, read-noise and ADC errors (or a stored library
    deviation). Tile ``t`` is written from ``rng.child(0, t)``; engine draws
    come from ``rng.child(1)``.
    """

    def __init__(
        self,
        names: tuple[str, ...],
        profile: NonIdealityProfile,
        device: DeviceParams,
        array_size: int | tuple[int, int],
        engine: VmmEngine,
        noise_scale: float = 1.0,
    ) -> None:
        self.names = names
        self.rate = min(1.0, profile.write_variation_rate * noise_scale)
        self.profile = profile.model_copy(update={"write_variation_rate": self.rate})
        self.device = device
        self.array_size = (
            (array_size, array_size)
            if isinstance(array_size, int)
            else tuple(array_size)
        )
        self.engine = engine

    def chip(self, model: NetworkModel, rng: RngStream) -> ProgrammedChip:
        """Virtually program ``model``'s VMM weights."""
        spec = model.quant
        layers = []
        scales: dict[str, float] = {}
        next_tile = 0
        for stage, name in enumerate(self.names):
            q, scale = quantize_tensor(model.params[name], spec.weight_bits)
            mapping = map_matrix(
                name,
                q,
                self.array_size,
                self.device,
                spec,
                self.profile,
                stage=stage,
                first_tile_id=next_tile,
            )
            next_tile += len(mapping.group)
            layers.append(mapping)
            scales[name] = scale

        write = partial(_virtual_write, rate=self.rate, rng=rng)
        return ProgrammedChip(
            plan=TilePlan(
                array_size=self.array_size,
                device=self.device,
                spec=spec,
                layers=tuple(layers),
            ),
            groups={m.name: m.group.map_tiles(write) for m in layers},
            scales=scales,
            stats=ProgrammingStats(),
        )

    def __call__(self, model: NetworkModel, rng: RngStream) -> TileBackend:
        return TileBackend(self.chip(model, rng.child(0)), self.engine, rng.child(1))


def _weight_noise(names: tuple[str, ...], rate: float) -> ParamTransform:
    def transform(
        params: dict[str, np.ndarray], rng: RngStream
    ) -> dict[str, np.ndarray]:
        out = dict(params)
        for index, name in enumerate(names):
            w = params[name]
            out[name] = w * (1.0 + rng.child(index).normal(rate, w.shape))
        return out

    return transform


def noise_transform(
    spec: QuantSpec,
    names: tuple[str, ...],
    profile: NonIdealityProfile | None,
    noise_scale: float = 1.0,
) -> ParamTransform:
    """Training-time view of the weights.

    Fixed-point models see fake quantisation; their device errors come from
    ``noise_forward``. Floating-point models cannot be sliced onto tiles and
    get multiplicative weight noise at the write-variation rate instead.
    """
    if spec.is_float and profile is not None and not profile.is_ideal:
        rate = min(1.0, profile.write_variation_rate * noise_scale)
        if rate > 0.0:
            return _weight_noise(names, rate)
    return fake_quant_transform(spec, names)


def noise_forward(
    spec: QuantSpec,
    names: tuple[str, ...],
    profile: NonIdealityProfile | None,
    device: DeviceParams,
    array_size: int | tuple[int, int],
    *,
    engine: VmmEngine | None = None,
    noise_scale: float = 1.0,
) -> BackendFactory | None:
    """Forward backend injecting the active error model, if there is one.

    An absent or ideal profile, a zero ``noise_scale`` or a floating-point
    spec leave the forward pass exact.
    """
    if spec.is_float or profile is None or profile.is_ideal or noise_scale == 0.0:
        return None
    return DeviceNoiseForward(
        names,
        profile,
        device,
        array_size,
        engine or training_engine(),
        noise_scale,
    )


def vat_trainer(
    model: NetworkModel,
    profile: NonIdealityProfile,
    epochs: int,
    rng: RngStream,
    *,
    device: DeviceParams | None = None,
    array_size: int | tuple[int, int] = 64,
    options: TrainingOptions | None = None,
    noise_scale: float = 1.0,
    engine: VmmEngine | None = None,
) -> Trainer:
    """Trainer whose every step runs on freshly perturbed hardware."""
    if epochs < 1:
        raise MitigationConfigurationError(
            issue=f"epochs={epochs} must be >= 1",
            stage="vat_train",
        )
    options = options or TrainingOptions()
    names = model.vmm_layers()
    return options.trainer(
        rng,
        epochs=epochs,
        param_transform=noise_transform(model.quant, names, profile, noise_scale),
        forward_backend=noise_forward(
            model.quant,
            names,
            profile,
            device or DeviceParams(),
            array_size,
            engine=engine,
            noise_scale=noise_scale,
        ),
    )


def vat_train(
    model: NetworkModel,
    data: Batch,
    profile: NonIdealityProfile,
    epochs: int,
    rng: RngStream,
    *,
    device: DeviceParams | None = None,
    array_size: int | tuple[int, int] = 64,
    options: TrainingOptions | None = None,
    noise_scale: float = 1.0,
    engine: VmmEngine | None = None,
) -> NetworkModel:
    """Variation-aware fine-tuning.

    Every minibatch programs the current weights onto virtual tiles with
    fresh write variation and runs its forward pass through ``engine``, so
    each VMM of every layer carries the active error model. Gradients flow
    straight through to the unperturbed master weights, which are
    re-quantised at the end.

    Args:
        model: Quantised (or float) model to fine-tune.
        data: Training batch.
        profile: Error model to inject.
        epochs: Fine-tuning epochs, at least one.
        rng: Training stream.
        device: Device used to slice the virtual tiles.
        array_size: Virtual tile size.
        options: Optimiser settings.
        noise_scale: Multiplier on the write-variation rate.
        engine: VMM engine of the noisy forward pass; analytical by default.

    Returns:
        The fine-tuned model in the same number format.

    Raises:
        MitigationConfigurationError: If ``epochs`` is below one.
        TrainingDivergenceError: If the loss becomes non-finite.
    """
    trainer = vat_trainer(
        model,
        profile,
        epochs,
        rng,
        device=device,
        array_size=array_size,
        options=options,
        noise_scale=noise_scale,
        engine=engine,
    )
    result = trainer.fit(model, data)
    _log.info(
        "VAT finished after %d epochs at rate %.3f",
        epochs,
        profile.write_variation_rate,
    )
    return quantize_model(result.model, model.quant)


@register(MitigationTechnique.VAT)
class VariationAwareTraining(Technique):
    phase = Phase.OFFLINE

    @override
    def apply(
        self, context: MitigationContext, recipe: MitigationRecipe
    ) -> MitigationContext:
        model = vat_train(
            context.model,
            context.data,
            context.profile,
            recipe.vat.epochs,
            context.rng.child(1),
            device=context.device,
            array_size=context.array_size,
            options=context.training,
            noise_scale=recipe.vat.noise_scale,
            engine=training_engine(context.library),
        )
        context.ledger.retrain_epochs += recipe.vat.epochs
        return dataclasses.replace(context, model=model)
