"""Token-mean cross-entropy over the non-padding target positions."""

import numpy as np
from numpy.typing import ArrayLike

from ..constants import PAD_ID
from ..numerics import ops
from ..numerics.tensor import ShapeError, Tensor

LOG_FLOOR = 1e-30
"""Added to probabilities before the logarithm so the loss stays finite."""


def xent_loss(distributions: Tensor, targets: ArrayLike, mask: ArrayLike | None = None) -> Tensor:
    """Mean of ``-log p(target)`` over the positions where ``mask`` is true.

    :param distributions: Probabilities [N, T, V].
    :param targets: Token ids [N, T].
    :param mask: Positions that count; defaults to ``targets != PAD``.
    :raises ValueError: If no position counts.
    """
    ids = np.asarray(targets, dtype=np.int64)
    if distributions.ndim != 3 or ids.shape != distributions.shape[:2]:
        raise ShapeError(
            f"xent_loss: distributions {distributions.shape} do not match targets {ids.shape}"
        )
    valid = ids != PAD_ID if mask is None else np.asarray(mask, dtype=bool)
    count = int(valid.sum())
    if count == 0:
        raise ValueError("xent_loss: the mask selects no target position")

    vocab = distributions.shape[-1]
    one_hot = (ids[..., None] == np.arange(vocab)).astype(distributions.dtype)
    picked = ops.sum(ops.mul(distributions, one_hot), axis=-1)
    log_p = ops.log(ops.add(picked, LOG_FLOOR))
    weights = valid.astype(distributions.dtype) / distributions.dtype.type(count)
    return ops.mul(ops.sum(ops.mul(log_p, weights)), -1.0)
