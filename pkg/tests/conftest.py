from __future__ import annotations

import numpy as np
import pytest

from cimcall.config import RunConfig, build_config
from cimcall.device import DeviceParams, NonIdealityProfile, RngStream
from cimcall.nn import ModelShape, NetworkModel


@pytest.fixture
def device() -> DeviceParams:
    return DeviceParams()


@pytest.fixture
def profile() -> NonIdealityProfile:
    return NonIdealityProfile()


@pytest.fixture
def ideal_profile(profile: NonIdealityProfile) -> NonIdealityProfile:
    return profile.ideal()


@pytest.fixture
def rng() -> RngStream:
    return RngStream(seed=1234)


@pytest.fixture
def tiny_shape() -> ModelShape:
    return ModelShape(kernel=3, channels=4, hidden=4)


@pytest.fixture
def tiny_model(tiny_shape: ModelShape) -> NetworkModel:
    return NetworkModel.initialize(np.random.default_rng(7), tiny_shape)


@pytest.fixture
def small_config() -> RunConfig:
    """A run small enough to train and evaluate in a few seconds."""
    return build_config(
        {
            "task": {"train_reads": 12, "test_reads": 4, "read_length": 16},
            "model": {"kernel": 3, "channels": 4, "hidden": 4},
            "training": {"epochs": 2, "batch_size": 4},
            "quant": {"format": "8-8"},
            "plan": {"array_size": 16},
            "evaluation": {"runs": 2},
        }
    )
