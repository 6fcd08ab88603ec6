from __future__ import annotations

from cimcall.nn.backend import ExactBackend, VmmBackend
from cimcall.nn.checkpoint import load_checkpoint, save_checkpoint
from cimcall.nn.data import Batch, pad_batch
from cimcall.nn.exceptions import (
    CheckpointError,
    NnConfigurationError,
    NnError,
    ShapeMismatchError,
    TrainingDivergenceError,
    UnmappedModelError,
)
from cimcall.nn.layers import (
    Activation,
    Conv1d,
    ForwardContext,
    Layer,
    Linear,
    Recurrent,
    Softmax,
    softmax,
)
from cimcall.nn.models import (
    BLANK,
    CLASSES,
    FLOAT32,
    VMM_PARAMETERS,
    GradientSet,
    ModelShape,
    NetworkModel,
    QuantSpec,
)
from cimcall.nn.network import (
    IGNORE_LABEL,
    DistillationTargets,
    backward,
    build_layers,
    forward,
    forward_logits,
    loss_and_grads,
    loss_from_logits,
)
from cimcall.nn.optim import Adam, Optimizer, Sgd, make_optimizer, sgd_step
from cimcall.nn.quant import (
    activation_scale,
    fake_quantize,
    integer_weights,
    quantize_activation,
    quantize_model,
    quantize_params,
    quantize_tensor,
    tensor_scale,
)
from cimcall.nn.training import (
    BackendFactory,
    ParamTransform,
    Trainer,
    TrainingOptions,
    TrainResult,
    chain,
    fake_quant_transform,
)

__all__ = [
    "BLANK",
    "CLASSES",
    "FLOAT32",
    "IGNORE_LABEL",
    "VMM_PARAMETERS",
    "Activation",
    "Adam",
    "BackendFactory",
    "Batch",
    "CheckpointError",
    "Conv1d",
    "DistillationTargets",
    "ExactBackend",
    "ForwardContext",
    "GradientSet",
    "Layer",
    "Linear",
    "ModelShape",
    "NetworkModel",
    "NnConfigurationError",
    "NnError",
    "Optimizer",
    "ParamTransform",
    "QuantSpec",
    "Recurrent",
    "Sgd",
    "ShapeMismatchError",
    "Softmax",
    "TrainResult",
    "Trainer",
    "TrainingDivergenceError",
    "TrainingOptions",
    "UnmappedModelError",
    "VmmBackend",
    "activation_scale",
    "backward",
    "build_layers",
    "chain",
    "fake_quant_transform",
    "fake_quantize",
    "forward",
    "forward_logits",
    "integer_weights",
    "load_checkpoint",
    "loss_and_grads",
    "loss_from_logits",
    "make_optimizer",
    "pad_batch",
    "quantize_activation",
    "quantize_model",
    "quantize_params",
    "quantize_tensor",
    "save_checkpoint",
    "sgd_step",
    "softmax",
    "tensor_scale",
]
