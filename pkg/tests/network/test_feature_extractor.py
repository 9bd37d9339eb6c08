import numpy as np
import pytest

from scrawl.models.config import RunConfig
from scrawl.network.feature_extractor import (
    ExtractorInputError,
    extract_features,
    output_shape,
    valid_columns,
)
from scrawl.network.params import ModelParams, init_params
from scrawl.numerics import ops
from scrawl.numerics.gradcheck import finite_diff_check
from scrawl.numerics.tensor import Mode, Tensor, precision

VOCAB = 8


def tiny_config(height: int = 64) -> RunConfig:
    return RunConfig.from_dict(
        {
            "cnn": {"channels": [2] * 7},
            "encoder": {"hidden_size": 2},
            "decoder": {"hidden_size": 3, "embedding_size": 4},
            "corpus": {"image_height": height},
        }
    )


@pytest.mark.parametrize(
    "h, w, expected", [(64, 800, (4, 50)), (64, 16, (4, 1)), (16, 16, (1, 1)), (64, 960, (4, 60))]
)
def test_output_shape(h, w, expected):
    assert output_shape(h, w) == expected


@pytest.mark.parametrize("h, w", [(64, 100), (60, 16), (0, 16)])
def test_output_shape_rejects_non_multiples(h, w):
    with pytest.raises(ExtractorInputError):
        output_shape(h, w)


@pytest.mark.parametrize("w", [16, 160, 800, 960])
def test_extractor_agrees_with_output_shape(w):
    config = tiny_config()
    params = init_params(config, VOCAB)
    images = Tensor(np.ones((1, 1, 64, w)))
    grid = extract_features(images, params, config.cnn)
    assert grid.values.shape == (1, 2, *output_shape(64, w))


def test_doubling_width_doubles_columns():
    config = tiny_config()
    params = init_params(config, VOCAB)
    narrow = extract_features(Tensor(np.ones((1, 1, 64, 160))), params, config.cnn)
    wide = extract_features(Tensor(np.ones((1, 1, 64, 320))), params, config.cnn)
    assert wide.cols == 2 * narrow.cols
    assert wide.rows == narrow.rows == 4


def test_width_must_be_a_multiple_of_16():
    config = tiny_config()
    with pytest.raises(ExtractorInputError, match="multiples of 16"):
        extract_features(Tensor(np.ones((1, 1, 64, 100))), init_params(config, VOCAB), config.cnn)


def test_pixels_must_be_in_unit_range():
    config = tiny_config()
    with pytest.raises(ExtractorInputError, match=r"\[0, 1\]"):
        extract_features(Tensor(np.full((1, 1, 64, 16), 2.0)), init_params(config, VOCAB), config.cnn)


def test_train_mode_needs_a_seed():
    config = tiny_config()
    with pytest.raises(ExtractorInputError, match="seed"):
        extract_features(
            Tensor(np.ones((2, 1, 64, 16))), init_params(config, VOCAB), config.cnn, Mode.TRAIN
        )


def test_infer_mode_is_deterministic():
    config = tiny_config()
    params = init_params(config, VOCAB, seed=1)
    images = Tensor(np.random.default_rng(0).random((2, 1, 64, 32)))
    a = extract_features(images, params, config.cnn).values.data
    b = extract_features(images, params, config.cnn).values.data
    np.testing.assert_array_equal(a, b)


def test_train_mode_dropout_is_reproducible():
    config = tiny_config()
    images = Tensor(np.random.default_rng(0).random((2, 1, 64, 32)))
    a = extract_features(images, init_params(config, VOCAB, seed=1), config.cnn, Mode.TRAIN, 42)
    b = extract_features(images, init_params(config, VOCAB, seed=1), config.cnn, Mode.TRAIN, 42)
    np.testing.assert_array_equal(a.values.data, b.values.data)


def test_train_mode_updates_running_stats():
    config = tiny_config()
    params = init_params(config, VOCAB, seed=1)
    images = Tensor(np.random.default_rng(0).random((2, 1, 64, 32)))
    extract_features(images, params, config.cnn, Mode.TRAIN, 0)
    assert not np.array_equal(params.stats["cnn.bn3"].mean, np.zeros(2))


def test_source_widths_and_column_mask():
    config = tiny_config()
    images = Tensor(np.ones((2, 1, 64, 64)))
    grid = extract_features(images, init_params(config, VOCAB), config.cnn, source_widths=(64, 20))
    np.testing.assert_array_equal(
        grid.column_mask(), [[True, True, True, True], [True, True, False, False]]
    )


def test_valid_columns_rounds_up_and_is_at_least_one():
    np.testing.assert_array_equal(valid_columns((1, 16, 17, 0, 500), 4), [1, 1, 2, 1, 4])


def positive_params(config: RunConfig) -> ModelParams:
    """Small positive kernels keep every ReLU active, so no gradient is trivially zero."""
    params = init_params(config, VOCAB, dtype=np.float64)
    rng = np.random.default_rng(9)
    values = {}
    for name in params:
        if name.startswith("cnn.conv") and name.endswith(".kernel"):
            values[name] = rng.uniform(0.02, 0.12, size=params[name].shape)
        elif name.startswith("cnn.conv"):
            values[name] = np.full(params[name].shape, 0.1)
    return params.replace(values)


def test_extractor_gradient_wrt_image():
    with precision(np.float64):
        config = tiny_config(height=16)
        params = positive_params(config)
        rng = np.random.default_rng(2)
        readout = Tensor(rng.normal(size=(1, 2, 1, 1)))
        image = Tensor(rng.uniform(0.2, 0.8, size=(1, 1, 16, 16)))

        def loss(x: Tensor) -> Tensor:
            grid = extract_features(x, params, config.cnn, Mode.INFER)
            return ops.sum(ops.mul(grid.values, readout))

        assert finite_diff_check(loss, image) < 1e-4


def test_extractor_gradient_wrt_kernel_in_train_mode():
    with precision(np.float64):
        config = tiny_config(height=32)
        params = positive_params(config)
        rng = np.random.default_rng(4)
        images = Tensor(rng.uniform(0.2, 0.8, size=(2, 1, 32, 32)))
        readout = Tensor(rng.normal(size=(2, 2, 2, 2)))
        name = "cnn.conv4.kernel"

        def loss(kernel: Tensor) -> Tensor:
            swapped = ModelParams({**params.tensors, name: kernel}, params.stats)
            grid = extract_features(images, swapped, config.cnn, Mode.TRAIN, rng_seed=7)
            return ops.sum(ops.mul(grid.values, readout))

        assert finite_diff_check(loss, params[name]) < 1e-4
