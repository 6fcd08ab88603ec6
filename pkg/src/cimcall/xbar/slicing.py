from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from cimcall.device import conductance_quantize
from cimcall.xbar.exceptions import DimensionMismatchError, SlicingConfigurationError
from cimcall.xbar.models import TileState

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator

    from cimcall.device import DeviceParams, NonIdealityProfile, RngStream
    from cimcall.nn import QuantSpec
    from cimcall.xbar.base import VmmEngine

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SliceLayout:
    """How signed integer weights spread over differential cell slices.

    Logical column ``(o * slices + s) * 2 + p`` holds digit ``s`` of output
    ``o``; ``p = 0`` is the positive column and ``p = 1`` the negative one.
    """

    weight_bits: int
    bits_per_cell: int

    def __post_init__(self) -> None:
        if self.bits_per_cell < 1:
            raise SlicingConfigurationError(
                issue="cell level count must be a power of two for bit slicing"
            )
        if self.weight_bits % self.bits_per_cell:
            raise SlicingConfigurationError(
                issue=f"weight bits {self.weight_bits} not divisible by "
                f"{self.bits_per_cell} bits per cell"
            )

    @property
    def slices(self) -> int:
        return self.weight_bits // self.bits_per_cell

    @property
    def levels(self) -> int:
        return 1 << self.bits_per_cell

    @property
    def columns_per_output(self) -> int:
        return 2 * self.slices

    def logical_column(self, output: int, slice_index: int, polarity: int) -> int:
        return (output * self.slices + slice_index) * 2 + polarity

    def encode(self, w_int: np.ndarray) -> np.ndarray:
        """Spread an integer weight matrix into per-cell state indices."""
        w_int = np.asarray(w_int, dtype=np.int64)
        if np.abs(w_int).max(initial=0) >= 1 << self.weight_bits:
            raise SlicingConfigurationError(
                issue=f"weights exceed {self.weight_bits}-bit magnitude"
            )
        in_dim, out_dim = w_int.shape
        magnitude = np.abs(w_int)
        states = np.zeros((in_dim, out_dim, self.slices, 2), dtype=np.int64)
        for s in range(self.slices):
            digit = (magnitude >> (self.bits_per_cell * s)) & (self.levels - 1)
            states[:, :, s, 0] = np.where(w_int > 0, digit, 0)
            states[:, :, s, 1] = np.where(w_int < 0, digit, 0)
        return states.reshape(in_dim, out_dim * self.columns_per_output)

    def decode(self, states: np.ndarray) -> np.ndarray:
        """Inverse of ``encode`` for (possibly noisy) integer state read-backs."""
        in_dim, logical = states.shape
        outputs = logical // self.columns_per_output
        pairs = states.reshape(in_dim, outputs, self.slices, 2)
        signed = pairs[..., 0] - pairs[..., 1]
        weights = self.levels ** np.arange(self.slices)
        return signed @ weights


@dataclass(frozen=True)
class TileBlock:
    """One tile and the logical sub-matrix ``[row0:row1, col0:col1]`` it holds."""

    row0: int
    row1: int
    col0: int
    col1: int
    tile: TileState


@dataclass(frozen=True)
class TileGroup:
    """All tiles of one weight matrix, laid out block row-major."""

    name: str
    in_dim: int
    out_dim: int
    layout: SliceLayout
    blocks: tuple[TileBlock, ...]
    array_size: tuple[int, int]
    meta: dict[str, object] = field(default_factory=dict, compare=False)

    @property
    def logical_cols(self) -> int:
        return self.out_dim * self.layout.columns_per_output

    @property
    def tiles(self) -> list[TileState]:
        return [block.tile for block in self.blocks]

    def __iter__(self) -> Iterator[TileBlock]:
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def map_tiles(self, fn: Callable[[TileBlock], TileState]) -> TileGroup:
        """Return a copy whose tiles are replaced by ``fn(block)``."""
        blocks = tuple(
            TileBlock(b.row0, b.row1, b.col0, b.col1, fn(b)) for b in self.blocks
        )
        return TileGroup(
            name=self.name,
            in_dim=self.in_dim,
            out_dim=self.out_dim,
            layout=self.layout,
            blocks=blocks,
            array_size=self.array_size,
            meta=self.meta,
        )

    def assemble(self, per_tile: Callable[[TileState], np.ndarray]) -> np.ndarray:
        """Stitch a per-tile cell matrix back into the logical layout."""
        full = np.zeros((self.in_dim, self.logical_cols), dtype=np.float64)
        for block in self.blocks:
            rows, cols = block.row1 - block.row0, block.col1 - block.col0
            full[block.row0 : block.row1, block.col0 : block.col1] = per_tile(
                block.tile
            )[:rows, :cols]
        return full


def tile_matrix(
    name: str,
    w_int: np.ndarray,
    layout: SliceLayout,
    array_size: tuple[int, int],
    device: DeviceParams,
    profile: NonIdealityProfile,
    *,
    first_tile_id: int = 0,
) -> TileGroup:
    """Greedily tile an integer weight matrix into fixed-size crossbars.

    Unused cells of edge tiles sit at HRS and are neither driven nor sensed.

    Raises:
        SlicingConfigurationError: If the tile width cannot hold whole
            differential pairs.
    """
    rows, cols = array_size
    if cols % 2:
        raise SlicingConfigurationError(
            issue=f"tile width {cols} must be even to keep differential pairs together"
        )

    states = layout.encode(w_int)
    targets = conductance_quantize(states / (layout.levels - 1), device)
    in_dim, logical = targets.shape

    blocks: list[TileBlock] = []
    tile_id = first_tile_id
    for row0 in range(0, in_dim, rows):
        row1 = min(row0 + rows, in_dim)
        for col0 in range(0, logical, cols):
            col1 = min(col0 + cols, logical)
            cells = np.full((rows, cols), device.g_hrs, dtype=np.float64)
            cells[: row1 - row0, : col1 - col0] = targets[row0:row1, col0:col1]
            tile = TileState(
                rows=rows,
                cols=cols,
                targets=cells,
                device=device,
                profile=profile,
                active_rows=row1 - row0,
                active_cols=col1 - col0,
                tile_id=tile_id,
            )
            blocks.append(TileBlock(row0, row1, col0, col1, tile))
            tile_id += 1

    _log.debug(
        "Tiled %s (%dx%d logical cells) into %d tiles of %dx%d",
        name,
        in_dim,
        logical,
        len(blocks),
        rows,
        cols,
    )
    return TileGroup(
        name=name,
        in_dim=in_dim,
        out_dim=w_int.shape[1],
        layout=layout,
        blocks=tuple(blocks),
        array_size=array_size,
    )


def input_cycles(activation_bits: int, dac_bits: int) -> int:
    if activation_bits % dac_bits:
        raise SlicingConfigurationError(
            issue=f"activation bits {activation_bits} not divisible by "
            f"{dac_bits} DAC bits"
        )
    return activation_bits // dac_bits


def _input_digits(x_int: np.ndarray, cycles: int, dac_bits: int) -> np.ndarray:
    """Sign-split bit-serial digits, shape ``(2, cycles, *batch, in_dim)``."""
    mask = (1 << dac_bits) - 1
    digits = np.empty((2, cycles, *x_int.shape), dtype=np.int64)
    for p, part in enumerate((np.maximum(x_int, 0), np.maximum(-x_int, 0))):
        for c in range(cycles):
            digits[p, c] = (part >> (dac_bits * c)) & mask
    return digits


def bit_sliced_vmm(
    x_int: np.ndarray,
    group: TileGroup,
    spec: QuantSpec,
    rng: RngStream,
    *,
    engine: VmmEngine,
    requantize_scale: float | None = None,
) -> np.ndarray:
    """Integer VMM across weight slices and bit-serial input cycles.

    Each input digit drives the tiles as a DAC voltage; every tile's ADC
    outputs are decoded to signed slice counts per differential pair, summed
    over row blocks and recombined by shift-add.

    Args:
        x_int: Integer activations, shape ``(..., in_dim)``.
        group: Programmed tiles of one weight matrix.
        spec: Fixed-point format; its activation bits set the cycle count.
        rng: Stream for engine noise; tile ``t`` reads from ``rng.child(t)``.
        engine: VMM engine run on every tile.
        requantize_scale: Optional factor mapping the accumulator back onto
            activation precision.

    Returns:
        Integer accumulator ``x_int @ w_int`` as float64, or the requantised
        activations when ``requantize_scale`` is given.

    Raises:
        SlicingConfigurationError: If bit-widths do not divide evenly or the
            spec is floating point.
        DimensionMismatchError: If ``x_int`` does not match the group's rows.
    """
    if spec.is_float:
        raise SlicingConfigurationError(issue="float formats cannot be bit-sliced")
    if spec.weight_bits != group.layout.weight_bits:
        raise SlicingConfigurationError(
            issue=f"group sliced for {group.layout.weight_bits}-bit weights, "
            f"got {spec.weight_bits}"
        )

    x_int = np.asarray(np.rint(x_int), dtype=np.int64)
    if x_int.shape[-1] != group.in_dim:
        raise DimensionMismatchError(
            expected=group.in_dim,
            actual=x_int.shape[-1],
            operation="bit_sliced_vmm",
        )

    profile = group.blocks[0].tile.profile
    device = group.blocks[0].tile.device
    dac_levels = (1 << profile.dac_bits) - 1
    cycles = input_cycles(spec.activation_bits, profile.dac_bits)

    batch_shape = x_int.shape[:-1]
    digits = _input_digits(x_int.reshape(-1, group.in_dim), cycles, profile.dac_bits)
    n_vectors = digits.shape[2]
    volts = digits.reshape(-1, group.in_dim) * (profile.dac_full_scale / dac_levels)

    layout = group.layout
    unit = profile.dac_full_scale / dac_levels * device.window / (layout.levels - 1)
    pair_counts = np.zeros((volts.shape[0], group.logical_cols // 2), dtype=np.float64)
    for block in group.blocks:
        result = engine.run(
            volts[:, block.row0 : block.row1],
            block.tile,
            rng.child(block.tile.tile_id),
        )
        diff = result.values[:, 0::2] - result.values[:, 1::2]
        pair_counts[:, block.col0 // 2 : block.col1 // 2] += np.rint(diff / unit)

    per_slice = pair_counts.reshape(2, cycles, n_vectors, group.out_dim, layout.slices)
    slice_weights = float(layout.levels) ** np.arange(layout.slices)
    cycle_weights = float(1 << profile.dac_bits) ** np.arange(cycles)
    per_cycle = per_slice @ slice_weights
    signed = np.tensordot(cycle_weights, per_cycle[0] - per_cycle[1], axes=(0, 0))
    acc = signed.reshape(*batch_shape, group.out_dim)

    if requantize_scale is None:
        return acc
    limit = (1 << (spec.activation_bits - 1)) - 1
    return np.clip(np.rint(acc * requantize_scale), -limit, limit)
