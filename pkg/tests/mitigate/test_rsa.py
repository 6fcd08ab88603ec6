from __future__ import annotations

import numpy as np
import pytest

from cimcall.device import RngStream
from cimcall.mapper import partition_and_map, program_plan, read_back
from cimcall.mitigate import (
    MaskMismatchError,
    MitigationConfigurationError,
    MitigationRecipe,
    NoTrainableParametersError,
    RsaMask,
    apply_recipe,
    cell_errors,
    reset_group,
    rsa_online_retrain,
    rsa_select,
    rsa_vmm,
)
from cimcall.nn import VMM_PARAMETERS, QuantSpec, integer_weights
from cimcall.xbar import SliceLayout, get_default_vmm_engine_factory, tile_matrix


@pytest.fixture
def errors() -> dict[str, np.ndarray]:
    return {
        "a": np.array([[0.1, 0.9], [0.5, 0.0]]),
        "b": np.array([[0.7, 0.2, 0.9]]),
    }


@pytest.fixture
def chip(context):
    plan = partition_and_map(
        context.model, context.array_size, context.device, context.spec, context.profile
    )
    return program_plan(plan, context.model, RngStream(seed=8))


def test_ranked_selection_takes_largest_errors(errors):
    mask = rsa_select(errors, 3 / 7, "ranked", RngStream(seed=0))
    assert mask.count == 3
    np.testing.assert_array_equal(mask.masks["a"], [[False, True], [False, False]])
    np.testing.assert_array_equal(mask.masks["b"], [[True, False, True]])


def test_ranked_ties_prefer_earlier_position(errors):
    mask = rsa_select(errors, 1 / 7, "ranked", RngStream(seed=0))
    assert mask.masks["a"][0, 1]
    assert not mask.masks["b"].any()


def test_fraction_rounds_over_all_matrices(errors):
    assert rsa_select(errors, 0.5, "ranked", RngStream(seed=0)).count == round(3.5)
    assert rsa_select(errors, 0.0, "ranked", RngStream(seed=0)).is_empty
    assert rsa_select(errors, 1.0, "random", RngStream(seed=0)).count == 7


def test_random_selection_is_seeded(errors):
    a = rsa_select(errors, 0.5, "random", RngStream(seed=4))
    b = rsa_select(errors, 0.5, "random", RngStream(seed=4))
    for name in errors:
        np.testing.assert_array_equal(a.masks[name], b.masks[name])


@pytest.mark.parametrize(("fraction", "mode"), [(1.5, "ranked"), (0.1, "greedy")])
def test_selection_rejects_bad_arguments(errors, fraction, mode):
    with pytest.raises(MitigationConfigurationError):
        rsa_select(errors, fraction, mode, RngStream(seed=0))


def test_cell_errors_vanish_without_variation(context):
    profile = context.profile.ideal()
    plan = partition_and_map(
        context.model, context.array_size, context.device, context.spec, profile
    )
    chip = program_plan(plan, context.model, RngStream(seed=0))
    for error in cell_errors(chip, context.model).values():
        np.testing.assert_allclose(error, 0.0, atol=1e-9)


def test_split_vmm_equals_exact_integer_product(ideal_profile, device):
    spec = QuantSpec.parse("8-8")
    layout = SliceLayout(weight_bits=8, bits_per_cell=device.bits_per_cell)
    rng = np.random.default_rng(10)
    w = rng.integers(-127, 128, size=(6, 3))
    mask = rng.random(w.shape) < 0.3
    group = tile_matrix("w", w, layout, (8, 8), device, ideal_profile)
    group = group.map_tiles(
        lambda block: block.tile.with_conductance(block.tile.targets)
    )
    group = reset_group(group, mask)
    x = rng.integers(-127, 128, size=(5, 6))
    engine = get_default_vmm_engine_factory().create("ideal")
    out = rsa_vmm(x, group, mask, w, spec, RngStream(seed=0), engine=engine)
    np.testing.assert_array_equal(out, x @ w)


def test_reset_group_rejects_wrong_mask(ideal_profile, device):
    layout = SliceLayout(weight_bits=8, bits_per_cell=1)
    group = tile_matrix(
        "w", np.ones((4, 2), dtype=int), layout, (8, 8), device, ideal_profile
    )
    with pytest.raises(MaskMismatchError):
        reset_group(group, np.zeros((2, 4), dtype=bool))


def test_rsa_parks_masked_cells_at_hrs(context):
    recipe = MitigationRecipe.parse("rsa", rsa={"fraction": 0.1})
    model, chip, ledger = apply_recipe(recipe, context)
    total = sum(context.model.params[name].size for name in VMM_PARAMETERS)
    assert ledger.sram_weights == round(0.1 * total)
    assert ledger.sram_bits == ledger.sram_weights * context.spec.weight_bits
    assert sum(ledger.masked_per_layer.values()) == ledger.sram_weights
    weights = read_back(chip)
    for name, mask in chip.masks.items():
        assert np.all(weights[name][mask] == 0)
    # Plain RSA does not touch the model.
    for name, value in context.model.params.items():
        np.testing.assert_array_equal(model.params[name], value)


def test_online_retraining_moves_only_sram_weights_and_biases(context, chip):
    mask = rsa_select(
        cell_errors(chip, context.model), 0.2, "ranked", RngStream(seed=0)
    )
    student = context.model
    retrained = rsa_online_retrain(
        student,
        context.teacher,
        mask,
        context.data,
        2,
        RngStream(seed=1),
        chip=chip,
        options=context.training,
    )
    moved = False
    for name in VMM_PARAMETERS:
        frozen = ~mask.masks[name]
        np.testing.assert_array_equal(
            retrained.params[name][frozen], student.params[name][frozen]
        )
        moved |= not np.array_equal(retrained.params[name], student.params[name])
    assert moved
    biases = set(student.params) - set(VMM_PARAMETERS)
    assert biases
    for name in biases:
        assert not np.array_equal(retrained.params[name], student.params[name]), name


def test_online_retraining_keeps_masked_weights_on_grid(context, chip):
    mask = rsa_select(
        cell_errors(chip, context.model), 0.2, "ranked", RngStream(seed=0)
    )
    retrained = rsa_online_retrain(
        context.model,
        context.teacher,
        mask,
        context.data,
        1,
        RngStream(seed=1),
        chip=chip,
        options=context.training,
    )
    for name in VMM_PARAMETERS:
        grid = integer_weights(retrained, name) * chip.scales[name]
        np.testing.assert_allclose(retrained.params[name], grid, atol=1e-12)


def test_empty_mask_cannot_be_retrained(context, chip):
    empty = RsaMask(
        masks={
            name: np.zeros(context.model.params[name].shape, dtype=bool)
            for name in VMM_PARAMETERS
        },
        fraction=0.0,
        selection_mode="ranked",
    )
    with pytest.raises(NoTrainableParametersError):
        rsa_online_retrain(
            context.model,
            context.teacher,
            empty,
            context.data,
            1,
            RngStream(seed=0),
            chip=chip,
        )
