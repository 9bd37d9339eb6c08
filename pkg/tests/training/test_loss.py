import math

import numpy as np
import pytest

from scrawl.constants import PAD_ID
from scrawl.numerics.gradcheck import finite_diff_check
from scrawl.numerics.ops import softmax
from scrawl.numerics.tensor import ShapeError, Tensor, precision
from scrawl.training.loss import xent_loss

V = 99


def one_hot(ids: np.ndarray, vocab: int = V) -> np.ndarray:
    return (ids[..., None] == np.arange(vocab)).astype(np.float64)


def test_certain_predictions_cost_nothing():
    targets = np.array([[5, 6, 2], [7, 2, PAD_ID]])
    loss = xent_loss(Tensor(one_hot(targets)), targets)
    assert loss.item() == pytest.approx(0.0, abs=1e-12)


def test_uniform_predictions_cost_log_v():
    targets = np.array([[5, 6, 2]])
    loss = xent_loss(Tensor(np.full((1, 3, V), 1.0 / V)), targets)
    assert loss.item() == pytest.approx(math.log(V))


def test_single_valid_position():
    dist = np.zeros((1, 2, 4))
    dist[0, 0] = [0.5, 0.0, 0.0, 0.5]
    dist[0, 1] = [1.0, 0.0, 0.0, 0.0]
    loss = xent_loss(Tensor(dist), np.array([[3, PAD_ID]]))
    assert loss.item() == pytest.approx(math.log(2.0))


def test_padding_positions_are_ignored():
    targets = np.array([[4, PAD_ID]])
    dist = np.full((1, 2, 5), 0.2)
    dist[0, 1] = [0.0, 1.0, 0.0, 0.0, 0.0]
    assert xent_loss(Tensor(dist), targets).item() == pytest.approx(math.log(5.0))


def test_zero_probability_stays_finite():
    dist = np.zeros((1, 1, 3))
    dist[0, 0, 0] = 1.0
    loss = xent_loss(Tensor(dist), np.array([[2]]))
    assert loss.item() == pytest.approx(-math.log(1e-30))


def test_empty_mask():
    with pytest.raises(ValueError, match="no target position"):
        xent_loss(Tensor(np.full((1, 2, 3), 1 / 3)), np.array([[PAD_ID, PAD_ID]]))


def test_shape_mismatch():
    with pytest.raises(ShapeError, match="xent_loss"):
        xent_loss(Tensor(np.full((1, 2, 3), 1 / 3)), np.array([[1, 2, 3]]))


def test_order_within_the_batch_does_not_matter():
    rng = np.random.default_rng(0)
    dist = rng.dirichlet(np.ones(6), size=(3, 4))
    targets = rng.integers(1, 6, size=(3, 4))
    targets[1, 2:] = PAD_ID
    order = [2, 0, 1]
    a = xent_loss(Tensor(dist), targets).item()
    b = xent_loss(Tensor(dist[order]), targets[order]).item()
    assert a == pytest.approx(b, rel=1e-6)


def test_gradient_through_softmax():
    rng = np.random.default_rng(1)
    targets = np.array([[1, 3, PAD_ID], [2, 2, 4]])
    with precision(np.float64):
        scores = Tensor(rng.normal(size=(2, 3, 5)), dtype=np.float64)
        assert finite_diff_check(lambda x: xent_loss(softmax(x), targets), scores) < 1e-4
