from __future__ import annotations

import dataclasses
import logging
import time
from typing import TYPE_CHECKING

from cimcall.device import DeviceError, StreamKind
from cimcall.mapper import MapperError, partition_and_map, program_plan
from cimcall.mitigate.base import Phase
from cimcall.mitigate.exceptions import EmptyRecipeError, MitigationError
from cimcall.nn import NnError
from cimcall.xbar import XbarError

if TYPE_CHECKING:
    from cimcall.mapper import ProgrammedChip
    from cimcall.mitigate.base import TechniqueFactory
    from cimcall.mitigate.models import CostLedger, MitigationContext, MitigationRecipe
    from cimcall.nn import NetworkModel

_log = logging.getLogger(__name__)


def _factory(factory: TechniqueFactory | None) -> TechniqueFactory:
    if factory is not None:
        return factory
    from cimcall.mitigate import get_default_technique_factory

    return get_default_technique_factory()


def _run_phase(
    recipe: MitigationRecipe,
    context: MitigationContext,
    phases: tuple[Phase, ...],
    factory: TechniqueFactory | None,
) -> MitigationContext:
    factory = _factory(factory)
    for name in recipe.ordered():
        technique = factory.create(name)
        if technique.phase not in phases:
            continue

        started = time.perf_counter()
        try:
            context = technique.apply(context, recipe)

        except (MitigationError, DeviceError, XbarError, NnError, MapperError):
            raise

        except Exception as exc:
            _log.error("Technique '%s' failed: %s", name, exc)
            raise MitigationError(
                message=f"Technique '{name}' failed: {exc}",
                details={"technique": str(name), "phase": str(technique.phase)},
            ) from exc

        elapsed = time.perf_counter() - started
        context.ledger.notes[f"{name}_seconds"] = elapsed
        _log.info("Applied %s (%s) in %.2fs", name, technique.phase, elapsed)
    return context


def prepare_recipe(
    recipe: MitigationRecipe,
    context: MitigationContext,
    *,
    factory: TechniqueFactory | None = None,
) -> MitigationContext:
    """Run the offline techniques (VAT, KD) on the context's model."""
    return _run_phase(recipe, context, (Phase.OFFLINE,), factory)


def program_context(
    recipe: MitigationRecipe, context: MitigationContext
) -> MitigationContext:
    """Map and program the context's model in its selected programming mode."""
    plan = partition_and_map(
        context.model,
        context.array_size,
        context.device,
        context.spec,
        context.profile,
    )
    chip = program_plan(
        plan,
        context.model,
        context.program_rng or context.rng.child(StreamKind.PROGRAM),
        mode=context.programming_mode,
        tolerance=recipe.rvw.tolerance * context.device.window,
        max_pulses=recipe.rvw.max_pulses,
    )
    ledger = context.ledger
    ledger.programming_pulses += chip.stats.pulses
    if context.programming_mode == "verified":
        ledger.refresh_pulses = chip.stats.pulses
    return dataclasses.replace(context, plan=plan, chip=chip)


def deploy_recipe(
    recipe: MitigationRecipe,
    context: MitigationContext,
    *,
    factory: TechniqueFactory | None = None,
) -> MitigationContext:
    """Program the chip, then run the online techniques on it.

    Programming techniques only switch how tiles are written, so they run
    before the tiles are programmed.
    """
    context = _run_phase(recipe, context, (Phase.PROGRAMMING,), factory)
    context = program_context(recipe, context)
    return _run_phase(recipe, context, (Phase.ONLINE,), factory)


def apply_recipe(
    recipe: MitigationRecipe,
    context: MitigationContext,
    *,
    factory: TechniqueFactory | None = None,
) -> tuple[NetworkModel, ProgrammedChip, CostLedger]:
    """Execute a recipe in canonical order VAT, KD, RVW, RSA.

    Returns:
        The mitigated model, its programmed chip and the accumulated costs.

    Raises:
        EmptyRecipeError: If the recipe names no technique.
    """
    if recipe.is_empty:
        raise EmptyRecipeError()

    _log.info("Applying mitigation recipe %s", recipe.label)
    context = prepare_recipe(recipe, context, factory=factory)
    context = deploy_recipe(recipe, context, factory=factory)
    if context.chip is None:
        raise MitigationError(message="Deployment produced no programmed chip")
    return context.model, context.chip, context.ledger
