import numpy as np
import pytest

from scrawl.models.config import RunConfig
from scrawl.network.feature_extractor import FeatureGrid
from scrawl.network.params import ModelParams, init_params
from scrawl.network.seq_encoder import (
    AnnotationGrid,
    LstmParams,
    encode_rows,
    final_states,
    lstm_cell_step,
)
from scrawl.numerics import ops
from scrawl.numerics.gradcheck import finite_diff_check
from scrawl.numerics.tensor import Mode, ShapeError, Tensor, precision


def lstm(d: int, e: int, w_x=0.0, w_h=0.0, b=0.0) -> LstmParams:
    return LstmParams(
        Tensor(np.broadcast_to(w_x, (d, 4 * e)).copy()),
        Tensor(np.broadcast_to(w_h, (e, 4 * e)).copy()),
        Tensor(np.broadcast_to(b, (4 * e,)).copy()),
    )


def encoder_config(rows: int = 1, depth: int = 2, hidden: int = 2) -> RunConfig:
    return RunConfig.from_dict(
        {
            "cnn": {"channels": [2] * 6 + [depth]},
            "encoder": {"hidden_size": hidden},
            "decoder": {"hidden_size": 3, "embedding_size": 4},
            "corpus": {"image_height": 16 * rows},
        }
    )


def random_encoder(config: RunConfig, seed: int = 0) -> ModelParams:
    params = init_params(config, 8, seed=seed, dtype=np.float64)
    rng = np.random.default_rng(seed + 100)
    return params.replace(
        {name: rng.normal(scale=0.5, size=params[name].shape) for name in params if name.startswith("enc.")}
    )


def test_zero_cell_stays_zero():
    x = Tensor(np.random.default_rng(0).normal(size=(3, 5)))
    h = c = Tensor(np.zeros((3, 2)))
    h1, c1 = lstm_cell_step(x, h, c, lstm(5, 2))
    np.testing.assert_array_equal(h1.data, 0.0)
    np.testing.assert_array_equal(c1.data, 0.0)


def test_saturated_forget_gate_keeps_cell():
    bias = np.zeros(8)
    bias[0:2] = -100.0  # input gate
    bias[2:4] = 100.0  # forget gate
    x = Tensor(np.ones((1, 3)))
    h = Tensor(np.zeros((1, 2)))
    c = Tensor([[0.7, -1.3]])
    _, c1 = lstm_cell_step(x, h, c, lstm(3, 2, w_x=0.3, b=bias))
    np.testing.assert_allclose(c1.data, c.data, atol=1e-6)


def test_scalar_cell_by_hand():
    with precision(np.float64):
        params = LstmParams(
            Tensor([[0.5, -0.4, 0.3, 0.2]]), Tensor([[0.1, 0.2, -0.3, 0.4]]), Tensor([0.0, 1.0, 0.0, -0.5])
        )
        x, h, c = 2.0, 0.5, -1.0
        h1, c1 = lstm_cell_step(Tensor([[x]]), Tensor([[h]]), Tensor([[c]]), params)

    def sig(v):
        return 1 / (1 + np.exp(-v))

    i = sig(0.5 * x + 0.1 * h)
    f = sig(-0.4 * x + 0.2 * h + 1.0)
    g = np.tanh(0.3 * x - 0.3 * h)
    o = sig(0.2 * x + 0.4 * h - 0.5)
    expected_c = f * c + i * g
    np.testing.assert_allclose(c1.item(), expected_c, rtol=1e-12)
    np.testing.assert_allclose(h1.item(), o * np.tanh(expected_c), rtol=1e-12)


def test_cell_shape_mismatch():
    with pytest.raises(ShapeError, match="lstm_cell_step"):
        lstm_cell_step(Tensor(np.ones((2, 4))), Tensor(np.zeros((2, 2))), Tensor(np.zeros((2, 2))), lstm(3, 2))


def grid_of(values: np.ndarray, widths=None) -> FeatureGrid:
    n, _, _, cols = values.shape
    return FeatureGrid(Tensor(values), tuple(widths) if widths else (16 * cols,) * n)


def test_output_dimension_and_layout():
    config = encoder_config(rows=2, depth=3, hidden=4)
    params = init_params(config, 8, seed=1)
    grid = grid_of(np.random.default_rng(0).normal(size=(2, 3, 2, 5)))
    annotations = encode_rows(grid, params)
    assert annotations.values.shape == (2, 2, 5, 8)
    assert annotations.flat.shape == (2, 10, 8)
    assert annotations.mask.shape == (2, 10)
    np.testing.assert_array_equal(annotations.flat.data[:, 7], annotations.values.data[:, 1, 2])


def test_zero_params_give_zero_annotations():
    config = encoder_config(rows=2, depth=3)
    params = init_params(config, 8)
    params = params.replace({name: np.zeros(params[name].shape) for name in params if name.startswith("enc.")})
    annotations = encode_rows(grid_of(np.ones((1, 3, 2, 4))), params)
    np.testing.assert_array_equal(annotations.values.data, 0.0)


def test_single_column_is_two_single_steps():
    with precision(np.float64):
        config = encoder_config()
        params = random_encoder(config)
        x = np.random.default_rng(5).normal(size=(1, 2, 1, 1))
        annotations = encode_rows(grid_of(x), params)
        halves = []
        for direction in ("fwd", "bwd"):
            h, _ = lstm_cell_step(
                Tensor(x[:, :, 0, 0]),
                Tensor(params[f"enc.{direction}.h0"].data[:1]),
                Tensor(params[f"enc.{direction}.c0"].data[:1]),
                LstmParams.from_params(params, direction),
            )
            halves.append(h.data)
    np.testing.assert_allclose(annotations.values.data[0, 0, 0], np.concatenate(halves, axis=1)[0])


def test_reversed_row_swaps_directions():
    with precision(np.float64):
        config = encoder_config()
        params = random_encoder(config)
        both = {name: params[name].data for name in params if name.startswith("enc.fwd")}
        mirrored = params.replace({name.replace("fwd", "bwd"): value for name, value in both.items()})
        x = np.random.default_rng(6).normal(size=(1, 2, 1, 4))
        forward = encode_rows(grid_of(x), mirrored).values.data[0, 0]
        reverse = encode_rows(grid_of(x[..., ::-1].copy()), mirrored).values.data[0, 0]
    np.testing.assert_allclose(forward[:, :2], reverse[::-1, 2:], rtol=1e-12)
    np.testing.assert_allclose(forward[:, 2:], reverse[::-1, :2], rtol=1e-12)


def test_rows_are_independent():
    with precision(np.float64):
        config = encoder_config(rows=3)
        params = random_encoder(config)
        # Identical per-row initial states make rows exchangeable.
        params = params.replace(
            {name: np.tile(params[name].data[:1], (3, 1)) for name in params if name[-2:] in ("h0", "c0")}
        )
        x = np.random.default_rng(7).normal(size=(1, 2, 3, 4))
        order = [2, 0, 1]
        plain = encode_rows(grid_of(x), params).values.data
        permuted = encode_rows(grid_of(x[:, :, order].copy()), params).values.data
    np.testing.assert_allclose(permuted, plain[:, order], rtol=1e-12)


def test_padding_does_not_change_valid_positions():
    with precision(np.float64):
        config = encoder_config()
        params = random_encoder(config)
        x = np.random.default_rng(8).normal(size=(1, 2, 1, 3))
        padded = np.concatenate([x, np.random.default_rng(9).normal(size=(1, 2, 1, 2))], axis=3)
        alone = encode_rows(grid_of(x), params).values.data
        inside = encode_rows(grid_of(padded, widths=(48,)), params).values.data
    np.testing.assert_allclose(inside[:, :, :3], alone, rtol=1e-12)


def test_row_count_must_match_initial_states():
    config = encoder_config(rows=1)
    with pytest.raises(ShapeError, match="rows"):
        encode_rows(grid_of(np.ones((1, 2, 4, 2))), init_params(config, 8))


def test_flatten_unflatten_round_trip():
    values = Tensor(np.zeros((1, 4, 7, 2)))
    grid = AnnotationGrid.from_values(values, np.ones((1, 7), dtype=bool))
    for index in range(grid.positions):
        assert grid.flat_index(*grid.unflatten(index)) == index
    assert grid.unflatten(9) == (1, 2)
    with pytest.raises(IndexError):
        grid.unflatten(28)


@pytest.mark.parametrize(
    "flat, mask, expected",
    [
        ([[[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]]], [[True, True, True]], [[1.0, 2.0]]),
        ([[[0.0, 0.0], [4.0, 6.0]]], [[True, True]], [[2.0, 3.0]]),
        ([[[2.0, 2.0], [9.0, 9.0]]], [[True, False]], [[2.0, 2.0]]),
    ],
)
def test_final_states(flat, mask, expected):
    flat = np.asarray(flat)
    grid = AnnotationGrid.from_values(Tensor(flat[:, None]), np.asarray(mask))
    np.testing.assert_allclose(final_states(grid).data, expected)


def test_final_states_with_everything_masked():
    grid = AnnotationGrid.from_values(Tensor(np.ones((2, 1, 2, 2))), np.array([[True, True], [False, False]]))
    with pytest.raises(ValueError, match=r"\[1\]"):
        final_states(grid)


def test_encoder_dropout_needs_rng_in_train_mode():
    config = encoder_config()
    with pytest.raises(ValueError, match="random generator"):
        encode_rows(grid_of(np.ones((1, 2, 1, 2))), init_params(config, 8), Mode.TRAIN, dropout_p=0.5)


def test_encoder_dropout_is_seeded():
    config = encoder_config()
    params = random_encoder(config)
    grid = grid_of(np.ones((1, 2, 1, 6)))
    a = encode_rows(grid, params, Mode.TRAIN, 0.5, np.random.default_rng(3)).values.data
    b = encode_rows(grid, params, Mode.TRAIN, 0.5, np.random.default_rng(3)).values.data
    np.testing.assert_array_equal(a, b)
    assert (a == 0).any()


@pytest.mark.parametrize("target", ["values", "enc.fwd.w_h", "enc.bwd.w_x", "enc.fwd.h0"])
def test_encoder_gradient(target):
    with precision(np.float64):
        config = encoder_config()
        params = random_encoder(config, seed=3)
        rng = np.random.default_rng(13)
        values = rng.normal(size=(1, 2, 1, 3))
        readout = Tensor(rng.normal(size=(1, 1, 3, 4)))

        def loss(x: Tensor) -> Tensor:
            if target == "values":
                grid, p = FeatureGrid(x, (48,)), params
            else:
                grid = grid_of(values)
                p = ModelParams({**params.tensors, target: x}, params.stats)
            return ops.sum(ops.mul(encode_rows(grid, p).values, readout))

        point = Tensor(values) if target == "values" else params[target]
        assert finite_diff_check(loss, point) < 1e-4
