"""Adadelta with global gradient-norm clipping.

All functions are pure: they return new arrays and never modify their inputs.
"""

from collections.abc import Mapping
from dataclasses import dataclass
import logging

import numpy as np

from ..models.config import OptimizerConfig
from ..network.params import is_weight

log = logging.getLogger(__name__)

CLIP_SLACK = 5e-7
"""Norms within this distance above the threshold are left alone."""


@dataclass(frozen=True)
class AdadeltaState:
    """Running averages ``E[g²]`` and ``E[Δx²]`` per parameter name."""

    sq_grad: dict[str, np.ndarray]
    sq_delta: dict[str, np.ndarray]

    @classmethod
    def zeros(cls, params: Mapping[str, np.ndarray]) -> "AdadeltaState":
        return cls(
            {name: np.zeros_like(value) for name, value in params.items()},
            {name: np.zeros_like(value) for name, value in params.items()},
        )

    def names(self) -> list[str]:
        return sorted(self.sq_grad)


def global_norm(grads: Mapping[str, np.ndarray]) -> float:
    """L2 norm over all gradient entries, accumulated in float64."""
    return float(np.sqrt(sum(float(np.sum(np.square(g, dtype=np.float64))) for g in grads.values())))


def clip_gradients(grads: Mapping[str, np.ndarray], max_norm: float = 5.0) -> dict[str, np.ndarray]:
    """Rescale all gradients by ``max_norm / g`` when their global norm ``g`` exceeds ``max_norm``."""
    if max_norm <= 0:
        raise ValueError(f"max_norm must be positive, got {max_norm}")
    norm = global_norm(grads)
    if norm <= max_norm + CLIP_SLACK:
        return dict(grads)
    scale = max_norm / norm
    log.debug("Clipping gradients: norm %.4g > %.4g", norm, max_norm)
    return {name: (g * scale).astype(g.dtype) for name, g in grads.items()}


def add_l2(
    grads: Mapping[str, np.ndarray], params: Mapping[str, np.ndarray], l2: float
) -> dict[str, np.ndarray]:
    """Add ``l2 * w`` to the gradient of every weight matrix and kernel.

    Biases, batch-norm parameters and initial states are not penalized.
    """
    if l2 == 0.0:
        return dict(grads)
    return {
        name: (g + l2 * params[name]).astype(g.dtype) if is_weight(name) else g
        for name, g in grads.items()
    }


def adadelta_update(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdadeltaState,
    config: OptimizerConfig | None = None,
) -> tuple[dict[str, np.ndarray], AdadeltaState]:
    """One Adadelta step for every parameter.

    ``E[g²] ← ρE[g²] + (1-ρ)g²``, ``Δ = -√(E[Δx²]+ε)/√(E[g²]+ε)·g``,
    ``E[Δx²] ← ρE[Δx²] + (1-ρ)Δ²``, ``x ← x + lr·Δ``.

    .. code-block:: python

        >>> new, _ = adadelta_update({"w": np.ones(1)}, {"w": np.ones(1)},
        ...                          AdadeltaState.zeros({"w": np.ones(1)}))
        >>> float(new["w"][0] - 1.0)
        -0.004472...
    """
    config = config or OptimizerConfig()
    rho, eps, lr = config.rho, config.eps, config.lr
    new_params: dict[str, np.ndarray] = {}
    sq_grad: dict[str, np.ndarray] = {}
    sq_delta: dict[str, np.ndarray] = {}
    for name, value in params.items():
        g = grads[name]
        acc_g = rho * state.sq_grad[name] + (1.0 - rho) * g * g
        delta = -np.sqrt(state.sq_delta[name] + eps) / np.sqrt(acc_g + eps) * g
        acc_d = rho * state.sq_delta[name] + (1.0 - rho) * delta * delta
        new_params[name] = (value + lr * delta).astype(value.dtype)
        sq_grad[name] = acc_g.astype(value.dtype)
        sq_delta[name] = acc_d.astype(value.dtype)
    return new_params, AdadeltaState(sq_grad, sq_delta)
