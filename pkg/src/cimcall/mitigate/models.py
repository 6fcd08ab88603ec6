from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from cimcall.mitigate.exceptions import MitigationConfigurationError

if TYPE_CHECKING:
    from cimcall.device import DeviceParams, NonIdealityProfile, RngStream
    from cimcall.mapper import ProgrammedChip, TilePlan
    from cimcall.nn import Batch, NetworkModel, QuantSpec, TrainingOptions
    from cimcall.xbar import MeasurementLibrary

_log = logging.getLogger(__name__)

SelectionMode = Literal["ranked", "random"]


class MitigationTechnique(StrEnum):
    VAT = "vat"
    KD = "kd"
    RVW = "rvw"
    RSA = "rsa"
    RSA_KD = "rsa_kd"


# Offline training first, then programming, then online adaptation.
CANONICAL_ORDER: tuple[MitigationTechnique, ...] = (
    MitigationTechnique.VAT,
    MitigationTechnique.KD,
    MitigationTechnique.RVW,
    MitigationTechnique.RSA,
    MitigationTechnique.RSA_KD,
)

_ALIASES: dict[str, tuple[MitigationTechnique, ...]] = {
    "none": (),
    "all": (
        MitigationTechnique.VAT,
        MitigationTechnique.KD,
        MitigationTechnique.RVW,
        MitigationTechnique.RSA_KD,
    ),
}


class VatParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs: int = Field(
        default=10, ge=1, description="Noise-injected fine-tuning epochs"
    )
    noise_scale: float = Field(
        default=1.0,
        ge=0.0,
        description="Multiplier on the profile's write-variation rate during training",
    )


class KdParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs: int = Field(default=10, ge=1)
    temperature: float = Field(default=2.0, gt=0.0)
    mix: float = Field(
        default=0.5, ge=0.0, le=1.0, description="Weight of the hard-label loss"
    )


class RvwParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tolerance: float = Field(
        default=0.01,
        gt=0.0,
        description="Verify tolerance as a fraction of the conductance window",
    )
    max_pulses: int = Field(default=20, ge=1)


class RsaParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    fraction: float = Field(default=0.05, ge=0.0, le=1.0)
    selection_mode: SelectionMode = "ranked"
    retrain_epochs: int = Field(default=5, ge=1)


class MitigationRecipe(BaseModel):
    """Ordered set of techniques with their hyperparameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    techniques: tuple[MitigationTechnique, ...] = ()
    vat: VatParams = VatParams()
    kd: KdParams = KdParams()
    rvw: RvwParams = RvwParams()
    rsa: RsaParams = RsaParams()

    @classmethod
    def parse(cls, text: str, **params: Any) -> MitigationRecipe:
        """Parse ``"vat+kd"``, ``"all"`` or ``"none"`` into a recipe."""
        names: list[MitigationTechnique] = []
        for token in (t.strip().lower() for t in text.split("+")):
            if token in _ALIASES:
                names.extend(_ALIASES[token])
                continue
            try:
                names.append(MitigationTechnique(token))
            except ValueError:
                raise MitigationConfigurationError(
                    issue=f"unknown technique '{token}'",
                    stage="recipe_parse",
                ) from None
        return cls(techniques=tuple(dict.fromkeys(names)), **params)

    def ordered(self) -> tuple[MitigationTechnique, ...]:
        return tuple(t for t in CANONICAL_ORDER if t in self.techniques)

    @property
    def is_empty(self) -> bool:
        return not self.techniques

    @property
    def label(self) -> str:
        return "+".join(self.ordered()) or "none"

    def has(self, technique: MitigationTechnique) -> bool:
        return technique in self.techniques


@dataclass(frozen=True)
class RsaMask:
    """Per-matrix masks of weights served from SRAM instead of the crossbar."""

    masks: dict[str, np.ndarray]
    fraction: float
    selection_mode: SelectionMode

    @property
    def count(self) -> int:
        return int(sum(np.count_nonzero(m) for m in self.masks.values()))

    @property
    def total(self) -> int:
        return int(sum(m.size for m in self.masks.values()))

    @property
    def density(self) -> float:
        return self.count / self.total if self.total else 0.0

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    def to_manifest(self) -> dict[str, Any]:
        return {
            "fraction": self.fraction,
            "selection_mode": self.selection_mode,
            "masked": self.count,
            "density": self.density,
            "per_matrix": {k: int(np.count_nonzero(v)) for k, v in self.masks.items()},
        }


@dataclass
class CostLedger:
    """Costs of the applied techniques, charged by the evaluator."""

    programming_pulses: int = 0
    refresh_pulses: int = 0
    sram_weights: int = 0
    sram_bits: int = 0
    retrain_epochs: int = 0
    masked_per_layer: dict[str, int] = field(default_factory=dict)
    notes: dict[str, float] = field(default_factory=dict)

    def to_manifest(self) -> dict[str, Any]:
        return {
            "programming_pulses": self.programming_pulses,
            "refresh_pulses": self.refresh_pulses,
            "sram_weights": self.sram_weights,
            "sram_bits": self.sram_bits,
            "retrain_epochs": self.retrain_epochs,
            "masked_per_layer": dict(self.masked_per_layer),
            "notes": dict(self.notes),
        }


@dataclass
class MitigationContext:
    """Everything the techniques read and thread through.

    ``model`` is the quantised student; ``teacher`` the float model it was
    derived from. ``chip`` is filled in by the deploy phase, which programs
    from ``program_rng`` when given.
    """

    model: NetworkModel
    teacher: NetworkModel
    data: Batch
    device: DeviceParams
    profile: NonIdealityProfile
    spec: QuantSpec
    array_size: tuple[int, int]
    training: TrainingOptions
    rng: RngStream
    program_rng: RngStream | None = None
    library: MeasurementLibrary | None = None
    plan: TilePlan | None = None
    chip: ProgrammedChip | None = None
    mask: RsaMask | None = None
    programming_mode: str = "one_shot"
    ledger: CostLedger = field(default_factory=CostLedger)
