from __future__ import annotations

from typing import Any

from cimcall.mitigate.base import Phase, Technique, TechniqueFactory
from cimcall.mitigate.exceptions import (
    EmptyRecipeError,
    MaskMismatchError,
    MitigationConfigurationError,
    MitigationError,
    NoTrainableParametersError,
)
from cimcall.mitigate.factory import DefaultTechniqueFactory
from cimcall.mitigate.kd import kd_train
from cimcall.mitigate.models import (
    CANONICAL_ORDER,
    CostLedger,
    KdParams,
    MitigationContext,
    MitigationRecipe,
    MitigationTechnique,
    RsaMask,
    RsaParams,
    RvwParams,
    SelectionMode,
    VatParams,
)
from cimcall.mitigate.recipe import (
    apply_recipe,
    deploy_recipe,
    prepare_recipe,
    program_context,
)
from cimcall.mitigate.rsa import (
    cell_errors,
    reset_group,
    reset_masked_cells,
    rsa_online_retrain,
    rsa_select,
    rsa_vmm,
)
from cimcall.mitigate.rvw import expected_pulses, hit_probability, rvw_program
from cimcall.mitigate.vat import (
    DeviceNoiseForward,
    noise_forward,
    noise_transform,
    training_engine,
    vat_train,
)

_technique_factory: TechniqueFactory | None = None


def get_default_technique_factory(*args: Any, **kwargs: Any) -> TechniqueFactory:
    global _technique_factory
    if _technique_factory is None:
        _technique_factory = DefaultTechniqueFactory(*args, **kwargs)
    return _technique_factory


__all__ = [
    "CANONICAL_ORDER",
    "CostLedger",
    "DefaultTechniqueFactory",
    "DeviceNoiseForward",
    "EmptyRecipeError",
    "KdParams",
    "MaskMismatchError",
    "MitigationConfigurationError",
    "MitigationContext",
    "MitigationError",
    "MitigationRecipe",
    "MitigationTechnique",
    "NoTrainableParametersError",
    "Phase",
    "RsaMask",
    "RsaParams",
    "RvwParams",
    "SelectionMode",
    "Technique",
    "TechniqueFactory",
    "VatParams",
    "apply_recipe",
    "cell_errors",
    "deploy_recipe",
    "expected_pulses",
    "get_default_technique_factory",
    "hit_probability",
    "kd_train",
    "noise_forward",
    "noise_transform",
    "prepare_recipe",
    "program_context",
    "reset_group",
    "reset_masked_cells",
    "rsa_online_retrain",
    "rsa_select",
    "rsa_vmm",
    "training_engine",
    "vat_train",
]
