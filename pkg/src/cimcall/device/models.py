from __future__ import annotations

import logging
import math
from enum import StrEnum
from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

_log = logging.getLogger(__name__)

VariationMode = Literal["cycle", "device"]
NonIdealityGroup = Literal[
    "none",
    "synaptic_wires",
    "sense_adc",
    "dac_driver",
    "combined",
    "measured",
]


class NonIdeality(StrEnum):
    SYNAPTIC_WIRES = "synaptic_wires"
    SENSE_ADC = "sense_adc"
    DAC_DRIVER = "dac_driver"


ALL_NON_IDEALITIES: frozenset[NonIdeality] = frozenset(NonIdeality)


def group_members(group: NonIdealityGroup) -> frozenset[NonIdeality]:
    """Return the non-ideality classes enabled by a named group."""
    if group == "none":
        return frozenset()
    if group in ("combined", "measured"):
        return ALL_NON_IDEALITIES
    return frozenset({NonIdeality(group)})


class DeviceParams(BaseModel):
    """Resistance window and state structure of one memristor cell."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    g_lrs: float = Field(
        default=1e-4,
        gt=0.0,
        description="Low-resistance-state conductance in siemens (10 kOhm)",
    )
    g_hrs: float = Field(
        default=1e-6,
        gt=0.0,
        description="High-resistance-state conductance in siemens (1 MOhm)",
    )
    levels_per_cell: int = Field(
        default=2,
        ge=2,
        description="Number of programmable conductance states per cell",
    )
    nonlinearity_min: float = Field(
        default=0.03,
        gt=0.0,
        description="Lower nonlinearity bound of the optional state curve",
    )
    nonlinearity_max: float = Field(
        default=30.0,
        gt=0.0,
        description="Upper nonlinearity bound of the optional state curve",
    )
    curve: str = Field(
        default="linear",
        description="Registered state-to-conductance curve name",
    )

    @model_validator(mode="after")
    def _check_window(self) -> Self:
        if self.g_lrs <= self.g_hrs:
            raise ValueError(
                f"g_lrs ({self.g_lrs}) must exceed g_hrs ({self.g_hrs})"
            )
        if self.nonlinearity_min >= self.nonlinearity_max:
            raise ValueError("nonlinearity_min must be below nonlinearity_max")
        return self

    @property
    def window(self) -> float:
        return self.g_lrs - self.g_hrs

    @property
    def level_step(self) -> float:
        """Conductance distance between adjacent states of the linear curve."""
        return self.window / (self.levels_per_cell - 1)

    @property
    def bits_per_cell(self) -> int:
        """Bits stored per cell; zero when the level count is not a power of two."""
        bits = math.log2(self.levels_per_cell)
        return int(bits) if bits.is_integer() else 0


class NonIdealityProfile(BaseModel):
    """Error-model parameters of one simulated chip instance.

    Quantisation at the DAC and ADC is a constraint and always applies. The
    remaining parameters belong to a non-ideality class and only act when that
    class is listed in ``enabled``; see ``effective``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    write_variation_rate: float = Field(
        default=0.10,
        ge=0.0,
        le=1.0,
        description="Relative std-dev of programmed conductance",
    )
    variation_mode: VariationMode = Field(
        default="cycle",
        description="Fresh draw per programming event or fixed per device",
    )
    dac_gain_error: float = Field(default=0.02, description="Relative DAC gain error")
    dac_offset: float = Field(default=0.002, description="DAC offset in volts")
    dac_bits: int = Field(default=1, ge=1, description="DAC resolution")
    dac_full_scale: float = Field(
        default=0.2,
        gt=0.0,
        description="DAC full-scale read voltage in volts",
    )
    adc_bits: int = Field(default=8, ge=1, description="ADC resolution")
    adc_ref_error: float = Field(
        default=0.02, description="Relative ADC reference error"
    )
    sense_vmin: float = Field(
        default=0.04,
        ge=0.0,
        description="Sense-amplifier dead zone in volts",
    )
    sense_resistance: float = Field(
        default=1e4,
        gt=0.0,
        description="Ohms converting column current to the sensed voltage",
    )
    wire_resistance_per_segment: float = Field(
        default=1.0,
        ge=0.0,
        description="Wire resistance between adjacent cells in ohms",
    )
    read_noise_rate: float = Field(
        default=0.0,
        ge=0.0,
        description="Relative per-read column current noise",
    )
    enabled: frozenset[NonIdeality] = Field(
        default=ALL_NON_IDEALITIES,
        description="Active non-ideality classes",
    )

    @field_serializer("enabled")
    def _serialize_enabled(self, enabled: frozenset[NonIdeality]) -> list[str]:
        return sorted(str(kind) for kind in enabled)

    def is_enabled(self, kind: NonIdeality) -> bool:
        return kind in self.enabled

    def effective(self) -> NonIdealityProfile:
        """Return a copy whose disabled classes are neutralised to identities."""
        update: dict[str, object] = {}
        if NonIdeality.DAC_DRIVER not in self.enabled:
            update.update({"dac_gain_error": 0.0, "dac_offset": 0.0})
        if NonIdeality.SENSE_ADC not in self.enabled:
            update.update({"adc_ref_error": 0.0, "sense_vmin": 0.0})
        if NonIdeality.SYNAPTIC_WIRES not in self.enabled:
            update.update({"wire_resistance_per_segment": 0.0, "read_noise_rate": 0.0})
        return self.model_copy(update=update) if update else self

    def ideal(self) -> NonIdealityProfile:
        """Return the same constraints with every non-ideality removed."""
        return self.model_copy(
            update={"enabled": frozenset(), "write_variation_rate": 0.0}
        ).effective()

    def with_group(self, group: NonIdealityGroup) -> NonIdealityProfile:
        return self.model_copy(update={"enabled": group_members(group)})

    @property
    def is_ideal(self) -> bool:
        eff = self.effective()
        return (
            self.write_variation_rate == 0.0
            and eff.dac_gain_error == 0.0
            and eff.dac_offset == 0.0
            and eff.adc_ref_error == 0.0
            and eff.sense_vmin == 0.0
            and eff.wire_resistance_per_segment == 0.0
            and eff.read_noise_rate == 0.0
        )
