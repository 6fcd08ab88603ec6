from __future__ import annotations

import pytest

from cimcall.device import RngStream
from cimcall.mapper import partition_and_map, program_plan
from cimcall.nn import QuantSpec, quantize_model


@pytest.fixture
def chip(tiny_model, device, ideal_profile):
    spec = QuantSpec.parse("8-8")
    student = quantize_model(tiny_model, spec)
    plan = partition_and_map(student, 16, device, spec, ideal_profile)
    return program_plan(plan, student, RngStream(seed=5))
