from __future__ import annotations

import pytest

from cimcall.device import NonIdealityProfile, RngStream
from cimcall.mitigate import MitigationContext
from cimcall.nn import QuantSpec, TrainingOptions, quantize_model
from cimcall.taskgen import KmerTable, generate_dataset


@pytest.fixture
def reads():
    table = KmerTable.from_seed(0)
    return generate_dataset(6, 12, 0.1, (1, 2), RngStream(seed=2), table=table)


@pytest.fixture
def context(tiny_model, reads, device) -> MitigationContext:
    spec = QuantSpec.parse("8-8")
    return MitigationContext(
        model=quantize_model(tiny_model, spec),
        teacher=tiny_model,
        data=reads.to_batch(min_frames=tiny_model.receptive_field),
        device=device,
        profile=NonIdealityProfile(),
        spec=spec,
        array_size=(16, 16),
        training=TrainingOptions(epochs=1, batch_size=3),
        rng=RngStream(seed=3),
    )
