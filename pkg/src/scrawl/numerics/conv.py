"""Convolution, pooling and batch normalization on NCHW tensors."""

from dataclasses import dataclass, field

import numpy as np

from .ops import emit
from .tensor import Mode, ShapeError, Tensor

BN_EPS = 1e-5
BN_MOMENTUM = 0.9


def _output_extent(op: str, size: int, kernel: int, stride: int, pad: int) -> int:
    extent = (size + 2 * pad - kernel) // stride + 1
    if extent <= 0 or size + 2 * pad < kernel:
        raise ShapeError(
            f"{op}: kernel {kernel} with stride {stride} and padding {pad} "
            f"does not fit an extent of {size}"
        )
    return extent


def conv2d(x: Tensor, kernel: Tensor, bias: Tensor, stride: int = 1, pad: int = 0) -> Tensor:
    """2-D cross-correlation (no kernel flip) with zero padding.

    :param x: Input of shape [N, C, H, W].
    :param kernel: Filters of shape [F, C, kh, kw].
    :param bias: One value per filter, shape [F].
    :return: Output of shape [N, F, H', W'] with
        ``H' = (H + 2*pad - kh) // stride + 1`` and likewise for ``W'``.
    """
    if x.ndim != 4 or kernel.ndim != 4 or kernel.shape[1] != x.shape[1]:
        raise ShapeError(f"conv2d: input {x.shape} and kernel {kernel.shape} do not conform")
    if bias.shape != (kernel.shape[0],):
        raise ShapeError(f"conv2d: bias {bias.shape} does not match kernel {kernel.shape}")
    if stride < 1 or pad < 0:
        raise ValueError(f"conv2d: invalid stride {stride} or padding {pad}")

    n, c, h, w = x.shape
    f, _, kh, kw = kernel.shape
    ho = _output_extent("conv2d", h, kh, stride, pad)
    wo = _output_extent("conv2d", w, kw, stride, pad)

    padded = np.pad(x.data, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    # cols[n, c, i, j, y, x] = padded[n, c, y*stride + i, x*stride + j]
    cols = np.empty((n, c, kh, kw, ho, wo), dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i, j] = padded[
                :, :, i : i + stride * ho : stride, j : j + stride * wo : stride
            ]
    cols2 = cols.reshape(n, c * kh * kw, ho * wo)
    weights = kernel.data.reshape(f, c * kh * kw)
    out = np.matmul(weights, cols2).reshape(n, f, ho, wo) + bias.data[None, :, None, None]

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        g2 = g.reshape(n, f, ho * wo)
        grad_kernel = np.matmul(g2, np.swapaxes(cols2, 1, 2)).sum(axis=0).reshape(kernel.shape)
        grad_bias = g.sum(axis=(0, 2, 3))
        grad_cols = np.matmul(weights.T, g2).reshape(n, c, kh, kw, ho, wo)
        grad_padded = np.zeros_like(padded)
        for i in range(kh):
            for j in range(kw):
                grad_padded[
                    :, :, i : i + stride * ho : stride, j : j + stride * wo : stride
                ] += grad_cols[:, :, i, j]
        grad_x = grad_padded[:, :, pad : pad + h, pad : pad + w]
        return grad_x, grad_kernel, grad_bias

    return emit("conv2d", (x, kernel, bias), out.astype(x.dtype, copy=False), backward)


def maxpool2x2(x: Tensor) -> tuple[Tensor, np.ndarray]:
    """Max over disjoint 2x2 windows; an odd last row or column is dropped.

    :param x: Input of shape [N, C, H, W] with H, W >= 2.
    :return: The pooled tensor [N, C, H//2, W//2] and, per output element,
        the position (0..3, row-major within the window) of the maximum.
        Ties resolve to the first position.
    """
    if x.ndim != 4:
        raise ShapeError(f"maxpool2x2: expected [N, C, H, W], got {x.shape}")
    n, c, h, w = x.shape
    if h < 2 or w < 2:
        raise ShapeError(f"maxpool2x2: spatial extents of {x.shape} must be at least 2")

    ho, wo = h // 2, w // 2
    windows = (
        x.data[:, :, : 2 * ho, : 2 * wo]
        .reshape(n, c, ho, 2, wo, 2)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, ho, wo, 4)
    )
    indices = windows.argmax(axis=-1)
    out = np.take_along_axis(windows, indices[..., None], axis=-1)[..., 0]

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        routed = np.zeros((n, c, ho, wo, 4), dtype=g.dtype)
        np.put_along_axis(routed, indices[..., None], g[..., None], axis=-1)
        grad = np.zeros_like(x.data)
        grad[:, :, : 2 * ho, : 2 * wo] = (
            routed.reshape(n, c, ho, wo, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, 2 * ho, 2 * wo)
        )
        return (grad,)

    return emit("maxpool2x2", (x,), out, backward), indices


@dataclass
class RunningStats:
    """Per-channel running mean and variance of a batch-norm layer."""

    mean: np.ndarray
    var: np.ndarray
    momentum: float = field(default=BN_MOMENTUM)

    @classmethod
    def fresh(cls, channels: int, dtype: np.dtype | type = np.float32) -> "RunningStats":
        """Mean 0 and variance 1 for every channel."""
        return cls(np.zeros(channels, dtype=dtype), np.ones(channels, dtype=dtype))

    def update(self, batch_mean: np.ndarray, batch_var: np.ndarray) -> None:
        """``running <- momentum * running + (1 - momentum) * batch``."""
        keep = self.momentum
        self.mean = (keep * self.mean + (1.0 - keep) * batch_mean).astype(self.mean.dtype)
        self.var = (keep * self.var + (1.0 - keep) * batch_var).astype(self.var.dtype)


def batch_norm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    stats: RunningStats,
    mode: Mode = Mode.INFER,
    eps: float = BN_EPS,
) -> Tensor:
    """Normalize every channel, then scale by ``gamma`` and shift by ``beta``.

    Train mode normalizes with the (biased) batch statistics and folds them
    into ``stats``; infer mode uses ``stats`` as they are.
    """
    if x.ndim != 4 or gamma.shape != (x.shape[1],) or beta.shape != (x.shape[1],):
        raise ShapeError(
            f"batch_norm: input {x.shape}, gamma {gamma.shape}, beta {beta.shape} do not conform"
        )
    mode = Mode(mode)
    n, c, h, w = x.shape
    axes = (0, 2, 3)
    count = n * h * w
    scale_shape = (1, c, 1, 1)

    if mode is Mode.TRAIN:
        if count < 2:
            raise ShapeError(f"batch_norm: train mode needs at least 2 values per channel, got {count}")
        mu = x.data.mean(axis=axes)
        var = x.data.var(axis=axes)
        stats.update(mu, var)
    else:
        mu, var = stats.mean.astype(x.dtype), stats.var.astype(x.dtype)

    inv = (1.0 / np.sqrt(var + eps)).astype(x.dtype)
    xhat = (x.data - mu.reshape(scale_shape)) * inv.reshape(scale_shape)
    g_scale = gamma.data.reshape(scale_shape)
    out = g_scale * xhat + beta.data.reshape(scale_shape)

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        grad_gamma = (g * xhat).sum(axis=axes)
        grad_beta = g.sum(axis=axes)
        dxhat = g * g_scale
        if mode is Mode.TRAIN:
            grad_x = (inv.reshape(scale_shape) / count) * (
                count * dxhat
                - dxhat.sum(axis=axes, keepdims=True)
                - xhat * (dxhat * xhat).sum(axis=axes, keepdims=True)
            )
        else:
            grad_x = dxhat * inv.reshape(scale_shape)
        return grad_x, grad_gamma, grad_beta

    return emit("batch_norm", (x, gamma, beta), out.astype(x.dtype, copy=False), backward)
