from __future__ import annotations

import dataclasses
import logging
from functools import partial
from typing import TYPE_CHECKING, override

import numpy as np

from cimcall.mapper import analog_group, cell_mask, effective_weights
from cimcall.mitigate.base import Phase, Technique
from cimcall.mitigate.exceptions import (
    MaskMismatchError,
    MitigationConfigurationError,
    NoTrainableParametersError,
)
from cimcall.mitigate.models import MitigationTechnique, RsaMask
from cimcall.mitigate.registry import register
from cimcall.nn import TrainingOptions, fake_quantize, integer_weights
from cimcall.xbar import bit_sliced_vmm

if TYPE_CHECKING:
    from cimcall.device import RngStream
    from cimcall.mapper import ProgrammedChip
    from cimcall.mitigate.models import (
        MitigationContext,
        MitigationRecipe,
        SelectionMode,
    )
    from cimcall.nn import Batch, NetworkModel, QuantSpec
    from cimcall.xbar import (
        MeasurementLibrary,
        TileBlock,
        TileGroup,
        TileState,
        VmmEngine,
    )

_log = logging.getLogger(__name__)


def _library_spread(group: TileGroup, library: MeasurementLibrary) -> np.ndarray:
    """Per-weight read spread, in integer weight units, from measured columns.

    A column's measured deviation is shared evenly by its driven cells; the
    spread of a weight combines its slice columns by their place value.
    Tiles missing from the library contribute nothing.
    """
    layout = group.layout

    def per_cell(tile: TileState) -> np.ndarray:
        if tile.fingerprint not in library:
            return np.zeros((tile.rows, tile.cols))
        unit = tile.profile.dac_full_scale * tile.device.window / (layout.levels - 1)
        spread = np.sqrt(library.column_variance(tile.fingerprint)) / unit
        per_row = spread / np.sqrt(tile.active_rows)
        return np.broadcast_to(per_row, (tile.rows, tile.cols))

    cells = group.assemble(per_cell)
    pairs = cells.reshape(group.in_dim, group.out_dim, layout.slices, 2)
    place = float(layout.levels) ** np.arange(layout.slices)
    return np.sqrt(np.sum((pairs * place[:, None]) ** 2, axis=(2, 3)))


def cell_errors(
    chip: ProgrammedChip,
    model: NetworkModel,
    library: MeasurementLibrary | None = None,
) -> dict[str, np.ndarray]:
    """Expected error magnitude of every mapped weight, in integer units.

    Combines the read-back deviation of the programmed chip from the model's
    integer weights with the measured column spread when a library is given.
    """
    errors: dict[str, np.ndarray] = {}
    for name, group in chip.groups.items():
        error = np.abs(analog_group(group) - integer_weights(model, name))
        if library is not None:
            error = error + _library_spread(group, library)
        errors[name] = error
    return errors


def rsa_select(
    errors: dict[str, np.ndarray],
    fraction: float,
    mode: SelectionMode,
    rng: RngStream,
) -> RsaMask:
    """Pick the weights to move into SRAM.

    ``round(fraction * N)`` weights are chosen over all matrices together.
    Ranked mode takes the largest errors, ties broken by position; random
    mode samples uniformly without replacement from ``rng``.

    Raises:
        MitigationConfigurationError: If ``fraction`` is outside [0, 1] or the
            mode is unknown.
    """
    if not 0.0 <= fraction <= 1.0:
        raise MitigationConfigurationError(
            issue=f"fraction {fraction} not in [0, 1]",
            stage="rsa_select",
        )
    if mode not in ("ranked", "random"):
        raise MitigationConfigurationError(
            issue=f"unknown selection mode '{mode}'", stage="rsa_select"
        )

    names = list(errors)
    flat = (
        np.concatenate([np.ravel(errors[name]) for name in names])
        if names
        else np.zeros(0)
    )
    k = round(fraction * flat.size)
    if mode == "ranked":
        chosen = np.argsort(-flat, kind="stable")[:k]
    else:
        chosen = rng.generator().choice(flat.size, size=k, replace=False)

    selected = np.zeros(flat.size, dtype=bool)
    selected[chosen] = True

    masks: dict[str, np.ndarray] = {}
    offset = 0
    for name in names:
        shape = np.shape(errors[name])
        size = int(np.prod(shape))
        masks[name] = selected[offset : offset + size].reshape(shape)
        offset += size

    mask = RsaMask(masks=masks, fraction=fraction, selection_mode=mode)
    _log.info("RSA selected %d of %d weights (%s)", mask.count, mask.total, mode)
    return mask


def _reset_block(block: TileBlock, *, cells: np.ndarray) -> TileState:
    tile = block.tile
    local = np.zeros((tile.rows, tile.cols), dtype=bool)
    local[: block.row1 - block.row0, : block.col1 - block.col0] = cells[
        block.row0 : block.row1, block.col0 : block.col1
    ]
    hrs = tile.device.g_hrs
    conductance = np.where(local, hrs, tile.programmed())
    targets = np.where(local, hrs, tile.targets)
    return tile.with_targets(targets).with_conductance(conductance)


def reset_group(group: TileGroup, mask: np.ndarray) -> TileGroup:
    """Return ``group`` with the cells of masked weights parked at HRS.

    Both columns of a masked differential pair then carry the same current,
    so the crossbar contributes nothing for those weights.

    Raises:
        MaskMismatchError: If the mask does not match the group's weights.
    """
    expected = (group.in_dim, group.out_dim)
    if np.shape(mask) != expected:
        raise MaskMismatchError(group.name, expected, np.shape(mask))
    return group.map_tiles(partial(_reset_block, cells=cell_mask(mask, group)))


def reset_masked_cells(chip: ProgrammedChip, mask: RsaMask) -> ProgrammedChip:
    """Park every masked weight's cells at HRS and attach the masks to the chip.

    Raises:
        MaskMismatchError: If a mask names a matrix the chip does not hold or
            has the wrong shape.
    """
    groups = dict(chip.groups)
    for name, layer_mask in mask.masks.items():
        if name not in groups:
            raise MaskMismatchError(name, sorted(groups), name)
        groups[name] = reset_group(groups[name], layer_mask)
    return dataclasses.replace(chip, groups=groups, masks=dict(mask.masks))


def rsa_vmm(
    x_int: np.ndarray,
    group: TileGroup,
    mask: np.ndarray,
    digital_weights: np.ndarray,
    spec: QuantSpec,
    rng: RngStream,
    *,
    engine: VmmEngine,
) -> np.ndarray:
    """Dual-path integer VMM: crossbar for unmasked weights, SRAM for the rest.

    ``group`` must already have its masked cells reset (see
    ``reset_group``). The digital path multiplies the inputs by the exact
    integer weights under the mask and is added after the ADC.

    Raises:
        MaskMismatchError: If the mask or digital weights do not match the
            group.
    """
    expected = (group.in_dim, group.out_dim)
    if np.shape(mask) != expected:
        raise MaskMismatchError(group.name, expected, np.shape(mask))
    if np.shape(digital_weights) != expected:
        raise MaskMismatchError(group.name, expected, np.shape(digital_weights))

    x_int = np.rint(np.asarray(x_int, dtype=np.float64))
    analog = bit_sliced_vmm(x_int, group, spec, rng, engine=engine)
    return analog + x_int @ np.where(mask, digital_weights, 0)


class _MaskedView:
    """Forward-pass weights of a partially SRAM-resident chip.

    Masked weights come from the master copy snapped to the chip's grid;
    every other weight is what the programmed cells actually realise.
    """

    def __init__(self, chip: ProgrammedChip, mask: RsaMask) -> None:
        self.mask = mask
        self.scales = chip.scales
        self.bits = chip.spec.weight_bits
        self.analog = effective_weights(chip)

    def snap(self, name: str, w: np.ndarray) -> np.ndarray:
        return fake_quantize(w, self.bits, self.scales[name])

    def __call__(
        self, params: dict[str, np.ndarray], rng: RngStream
    ) -> dict[str, np.ndarray]:
        out = dict(params)
        for name, m in self.mask.masks.items():
            out[name] = np.where(m, self.snap(name, params[name]), self.analog[name])
        return out

    def reload(self, model: NetworkModel, epoch: int) -> NetworkModel:
        params = dict(model.params)
        for name, m in self.mask.masks.items():
            params[name] = np.where(m, self.snap(name, params[name]), params[name])
        return model.with_params(params)


def rsa_online_retrain(
    student: NetworkModel,
    teacher: NetworkModel,
    mask: RsaMask,
    data: Batch,
    epochs: int,
    rng: RngStream,
    *,
    chip: ProgrammedChip,
    temperature: float = 2.0,
    mix: float = 0.5,
    options: TrainingOptions | None = None,
) -> NetworkModel:
    """Retrain only the SRAM-resident weights against the programmed chip.

    The forward pass uses the chip's realised weights for every crossbar
    cell and the master copy for masked weights, trained with the
    distillation loss. Crossbar weights receive no update; biases live in
    the digital periphery and stay trainable. Masked weights are snapped
    back to the chip grid after every epoch, as when reloading SRAM.

    Raises:
        NoTrainableParametersError: If the mask selects nothing.
        MaskMismatchError: If the mask does not fit the student.
    """
    if mask.is_empty:
        raise NoTrainableParametersError()
    for name, m in mask.masks.items():
        if name not in student.params or np.shape(m) != student.params[name].shape:
            raise MaskMismatchError(
                name,
                student.params[name].shape if name in student.params else None,
                np.shape(m),
            )

    view = _MaskedView(chip, mask)
    grad_masks = {
        name: mask.masks.get(name, np.zeros(value.shape, dtype=bool))
        if name in student.vmm_layers()
        else np.ones(value.shape, dtype=bool)
        for name, value in student.params.items()
    }
    options = options or TrainingOptions()
    trainer = options.trainer(
        rng,
        epochs=epochs,
        param_transform=view,
        grad_masks=grad_masks,
        teacher=teacher,
        temperature=temperature,
        mix=mix,
        after_epoch=view.reload,
    )
    result = trainer.fit(student, data)
    _log.info(
        "RSA retraining of %d weights finished after %d epochs",
        mask.count,
        result.epochs,
    )
    return result.model


class _SramAssignment(Technique):
    phase = Phase.ONLINE
    retrain = False

    @override
    def apply(
        self, context: MitigationContext, recipe: MitigationRecipe
    ) -> MitigationContext:
        if context.chip is None:
            raise MitigationConfigurationError(
                issue="RSA needs a programmed chip",
                stage="rsa_apply",
            )
        params = recipe.rsa
        mask = rsa_select(
            cell_errors(context.chip, context.model, context.library),
            params.fraction,
            params.selection_mode,
            context.rng.child(4),
        )
        chip = reset_masked_cells(context.chip, mask)
        model = context.model
        if self.retrain and not mask.is_empty:
            model = rsa_online_retrain(
                model,
                context.teacher,
                mask,
                context.data,
                params.retrain_epochs,
                context.rng.child(5),
                chip=chip,
                temperature=recipe.kd.temperature,
                mix=recipe.kd.mix,
                options=context.training,
            )
            context.ledger.retrain_epochs += params.retrain_epochs

        ledger = context.ledger
        ledger.sram_weights = mask.count
        ledger.sram_bits = mask.count * context.spec.weight_bits
        ledger.masked_per_layer = chip.masked_per_layer()
        return dataclasses.replace(context, model=model, chip=chip, mask=mask)


@register(MitigationTechnique.RSA)
class SramAssignment(_SramAssignment):
    """Moves error-prone weights to SRAM without retraining."""


@register(MitigationTechnique.RSA_KD)
class SramAssignmentWithRetraining(_SramAssignment):
    """Moves error-prone weights to SRAM, then retrains them online."""

    retrain = True
