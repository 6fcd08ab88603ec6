from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, override

import numpy as np

from cimcall.mapper.exceptions import MappingError
from cimcall.nn import UnmappedModelError, VmmBackend, quantize_tensor
from cimcall.xbar import bit_sliced_vmm

if TYPE_CHECKING:
    from cimcall.device import RngStream
    from cimcall.mapper.models import ProgrammedChip
    from cimcall.xbar import VmmEngine

_log = logging.getLogger(__name__)


class TileBackend(VmmBackend):
    """Routes every VMM of a forward pass through the programmed chip.

    The analog path runs the bit-sliced tiles through ``engine``; weights
    flagged in the chip's RSA masks are served digitally from the model's
    current values, so retrained SRAM weights take effect without
    reprogramming. Call ``n`` draws from ``rng.child(n)``.
    """

    def __init__(
        self,
        chip: ProgrammedChip,
        engine: VmmEngine,
        rng: RngStream,
        *args: Any,
        **kwargs: Any,
    ) -> None:
        super().__init__(*args, **kwargs)
        self.chip = chip
        self.engine = engine
        self.rng = rng
        self.calls = 0

    @override
    def matmul(
        self,
        name: str,
        x: np.ndarray,
        w: np.ndarray,
        x_scale: float | None,
    ) -> np.ndarray:
        group = self.chip.groups.get(name)
        if group is None:
            raise UnmappedModelError(name)
        if x_scale is None:
            raise MappingError(
                issue="tile backend needs quantized activations", layer=name
            )

        x_int = np.rint(x / x_scale)
        stream = self.rng.child(self.calls)
        self.calls += 1
        acc = bit_sliced_vmm(x_int, group, self.chip.spec, stream, engine=self.engine)

        w_scale = self.chip.scales[name]
        mask = self.chip.masks.get(name)
        if mask is not None and mask.any():
            q, _ = quantize_tensor(w, self.chip.spec.weight_bits, w_scale)
            acc = acc + x_int @ np.where(mask, q, 0)
        return acc * (w_scale * x_scale)
