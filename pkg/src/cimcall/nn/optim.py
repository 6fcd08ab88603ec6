from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Any, override

import numpy as np

from cimcall.nn.exceptions import NnConfigurationError, TrainingDivergenceError

if TYPE_CHECKING:
    from cimcall.nn.models import GradientSet, NetworkModel

_log = logging.getLogger(__name__)


def _check_finite(grads: GradientSet, step: int | None = None) -> None:
    for name, grad in grads:
        if not np.all(np.isfinite(grad)):
            raise TrainingDivergenceError(
                issue=f"non-finite gradient in '{name}'", step=step
            )


def sgd_step(model: NetworkModel, grads: GradientSet, lr: float) -> NetworkModel:
    """Return ``model`` with ``w - lr * g`` applied to every parameter.

    Raises:
        NnConfigurationError: If ``lr`` is negative.
        TrainingDivergenceError: If any gradient is non-finite.
    """
    if lr < 0.0:
        raise NnConfigurationError(
            issue=f"learning rate {lr} is negative", stage="sgd_step"
        )
    grads.check_congruent(model)
    _check_finite(grads)
    return model.with_params({k: v - lr * grads[k] for k, v in model.params.items()})


class Optimizer(ABC):
    """Stateful update rule applied once per minibatch."""

    def __init__(self, lr: float, *args: Any, **kwargs: Any) -> None:
        if lr < 0.0:
            raise NnConfigurationError(
                issue=f"learning rate {lr} is negative",
                stage="optimizer_construction",
            )
        self.lr = lr
        self.steps = 0

        _log.debug(
            "%s initialized with args=%r, kwargs=%r",
            self.__class__.__name__,
            (lr, *args),
            kwargs,
        )

    def step(self, model: NetworkModel, grads: GradientSet) -> NetworkModel:
        grads.check_congruent(model)
        _check_finite(grads, self.steps)
        self.steps += 1
        return self._update(model, grads)

    @abstractmethod
    def _update(self, model: NetworkModel, grads: GradientSet) -> NetworkModel:
        """Apply one update; gradients are already validated."""


class Sgd(Optimizer):
    @override
    def _update(self, model: NetworkModel, grads: GradientSet) -> NetworkModel:
        return sgd_step(model, grads, self.lr)


class Adam(Optimizer):
    """Adam with bias correction. Zero gradients leave a parameter untouched."""

    def __init__(
        self,
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        super().__init__(lr, beta1=beta1, beta2=beta2, eps=eps)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    @override
    def _update(self, model: NetworkModel, grads: GradientSet) -> NetworkModel:
        t = self.steps
        params: dict[str, np.ndarray] = {}
        for name, value in model.params.items():
            g = grads[name]
            m_prev = self._m.get(name, np.zeros_like(g))
            v_prev = self._v.get(name, np.zeros_like(g))
            m = self.beta1 * m_prev + (1.0 - self.beta1) * g
            v = self.beta2 * v_prev + (1.0 - self.beta2) * g * g
            self._m[name], self._v[name] = m, v
            m_hat = m / (1.0 - self.beta1**t)
            v_hat = v / (1.0 - self.beta2**t)
            params[name] = value - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
        return model.with_params(params)


OPTIMIZERS: dict[str, type[Optimizer]] = {"sgd": Sgd, "adam": Adam}


def make_optimizer(name: str, lr: float) -> Optimizer:
    try:
        return OPTIMIZERS[name](lr)
    except KeyError:
        raise NnConfigurationError(
            issue=f"unknown optimizer '{name}'",
            stage="optimizer_selection",
        ) from None
