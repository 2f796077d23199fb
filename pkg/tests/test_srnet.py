import numpy as np
import pytest

from tvsr import srnet as srnet_mod
from tvsr.errors import CorruptDataError, ModelFormatError
from tvsr.srnet import (
    DEFAULT_ARCH,
    ConvLayer,
    LayerSpec,
    SrNetwork,
    TrainConfig,
    arch_from_id,
    arch_id_of,
    backward,
    forward,
    init_network,
    load_model,
    mse_loss,
    save_model,
    sgd_step,
    train,
)

TINY = [LayerSpec(1, 2, 3), LayerSpec(2, 2, 1), LayerSpec(2, 1, 3)]
ONES = [LayerSpec(1, 1, 1), LayerSpec(1, 1, 1), LayerSpec(1, 1, 1)]


def ones_net(weight=0.0, biases=(0.0, 0.0, 0.0)):
    net = init_network(ONES, seed=0, init_std=0.0)
    for layer, b in zip(net.layers, biases):
        layer.weights[:] = weight
        layer.biases[:] = b
    return net


# ---------------------------------------------------------------- forward


def test_forward_bias_only():
    net = ones_net(weight=0.0, biases=(0.3, 0.3, 0.3))
    out = forward(net, np.zeros((4, 6)))
    assert out.shape == (4, 6)
    assert np.all(out == 0.3)


def test_forward_identity_weights():
    net = ones_net(weight=1.0)
    x = np.linspace(0.0, 1.0, 12).reshape(3, 4)
    assert np.array_equal(forward(net, x), x)


def test_forward_negative_final_bias_clamps_to_zero():
    net = ones_net(weight=0.0, biases=(0.0, 0.0, -0.5))
    assert np.all(forward(net, np.full((3, 3), 0.9)) == 0.0)


def test_forward_upper_clamp_and_linear_mode():
    net = ones_net(weight=0.0, biases=(0.0, 0.0, 1.7))
    assert np.all(forward(net, np.zeros((3, 3))) == 1.0)
    assert np.all(forward(net, np.zeros((3, 3)), final_relu=False) == 1.7)


def test_forward_shrinks_by_receptive_field():
    net = init_network(TINY, seed=1, init_std=0.01)
    out = forward(net, np.random.default_rng(0).random((12, 15)))
    assert out.shape == (12 - 4, 15 - 4)
    assert np.all(out >= 0.0)


def test_forward_input_too_small():
    net = init_network(arch_from_id(DEFAULT_ARCH), seed=1, init_std=0.01)
    with pytest.raises(ValueError, match="too small"):
        forward(net, np.zeros((12, 12)))  # receptive field is 13


# ------------------------------------------------------------------- loss


def test_mse_examples():
    a = np.zeros((4, 4))
    assert mse_loss(a, a) == 0.0
    assert mse_loss(a, np.full((4, 4), 0.5)) == 0.25
    assert mse_loss(np.array([[0.0, 1.0]]), np.array([[1.0, 1.0]])) == 0.5
    with pytest.raises(ValueError, match="mismatch"):
        mse_loss(a, np.zeros((3, 4)))


# --------------------------------------------------------------- backward


def _finite_difference(net, x, target, final_relu, h=1e-5):
    fd = []
    for layer in net.layers:
        for arr in (layer.weights, layer.biases):
            g = np.zeros_like(arr)
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                orig = arr[idx]
                arr[idx] = orig + h
                lp = mse_loss(forward(net, x, final_relu), target)
                arr[idx] = orig - h
                lm = mse_loss(forward(net, x, final_relu), target)
                arr[idx] = orig
                g[idx] = (lp - lm) / (2.0 * h)
            fd.append(g)
    return fd


def make_smooth_case(seed, final_relu=True):
    """Random tiny net kept away from ReLU/clamp kinks so central
    differences are trustworthy."""
    rng = np.random.default_rng(seed)
    net = init_network(TINY, seed=seed, init_std=0.4)
    for layer in net.layers:
        layer.biases[:] = rng.uniform(0.1, 0.3, layer.biases.shape)
    x = rng.uniform(0.1, 0.9, (10, 10))
    target = rng.uniform(0.1, 0.9, (6, 6))
    _, pre, acts = srnet_mod._forward_batch(net, x[None, None], final_relu)
    margin = 1e-3
    for z in pre:
        if np.any(np.abs(z) < margin) or np.any(np.abs(z - 1.0) < margin):
            return None
    return net, x, target


def test_gradcheck_small_battery():
    checked = 0
    seed = 0
    while checked < 4:
        seed += 1
        case = make_smooth_case(seed)
        if case is None:
            continue
        net, x, target = case
        grads, _ = backward(net, x, target)
        fd = _finite_difference(net, x, target, True)
        flat = [g for pair in grads for g in pair]
        for ga, gf in zip(flat, fd):
            mask = (np.abs(ga) > 1e-8) | (np.abs(gf) > 1e-8)
            if not mask.any():
                continue
            rel = np.abs(ga - gf)[mask] / np.maximum(np.abs(ga), np.abs(gf))[mask]
            assert rel.max() < 1e-5
        checked += 1


def test_backward_zero_when_pred_equals_target():
    net = ones_net(weight=1.0)
    x = np.random.default_rng(1).random((5, 5))
    grads, loss = backward(net, x, x)
    assert loss == 0.0
    for d_w, d_b in grads:
        assert np.all(d_w == 0.0) and np.all(d_b == 0.0)


def test_backward_zero_input_grads():
    net = init_network(TINY, seed=2, init_std=0.2)
    for layer in net.layers:
        layer.biases[:] = 0.2
    x = np.zeros((10, 10))
    target = np.full((6, 6), 0.9)
    grads, _ = backward(net, x, target)
    assert np.all(grads[0][0] == 0.0)  # layer-1 weights see only zeros
    assert np.any(grads[0][1] != 0.0)  # its biases still get gradient


# -------------------------------------------------------------------- sgd


def test_sgd_zero_rate_bit_exact():
    net = init_network(TINY, seed=3, init_std=0.1)
    grads, _ = backward(net, np.random.default_rng(2).random((10, 10)),
                        np.random.default_rng(3).random((6, 6)))
    stepped = sgd_step(net, grads, TrainConfig(learning_rates=(0.0, 0.0, 0.0)))
    for a, b in zip(net.layers, stepped.layers):
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.biases, b.biases)


def test_sgd_single_weight():
    net = ones_net(weight=1.0)
    grads = [(np.full((1, 1, 1, 1), 2.0), np.zeros(1))] + [
        (np.zeros((1, 1, 1, 1)), np.zeros(1)) for _ in range(2)
    ]
    stepped = sgd_step(net, grads, TrainConfig(learning_rates=(0.1, 0.0, 0.0)))
    assert stepped.layers[0].weights[0, 0, 0, 0] == pytest.approx(0.8, abs=1e-15)


def test_sgd_zero_grads_unchanged():
    net = init_network(TINY, seed=4, init_std=0.1)
    grads = [(np.zeros_like(l.weights), np.zeros_like(l.biases)) for l in net.layers]
    stepped = sgd_step(net, grads, TrainConfig(learning_rates=(0.5, 0.5, 0.5)))
    for a, b in zip(net.layers, stepped.layers):
        assert np.array_equal(a.weights, b.weights)


# ------------------------------------------------------------------ train


def test_train_fixed_point_when_pred_equals_target():
    net = init_network(ONES, seed=5, init_std=0.0)
    for layer in net.layers:
        layer.weights[:] = 1.0
    rng = np.random.default_rng(4)
    pairs = [(c, c.copy()) for c in (rng.random((9, 9)) for _ in range(6))]
    cfg = TrainConfig(learning_rates=(0.1, 0.1, 0.1), epochs=3, batch_size=2,
                      sub_image=9, seed=11)
    trained, history = train(net, pairs, cfg)
    assert history == [0.0, 0.0, 0.0]
    for a, b in zip(net.layers, trained.layers):
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.biases, b.biases)


def test_train_converges_on_constant_pair():
    # start from a live (non-dead-ReLU) point; a bias-only solution exists,
    # so small-rate SGD must converge
    net = ones_net(weight=0.5, biases=(0.01, 0.01, 0.01))
    x = np.full((9, 9), 0.4)
    y = np.full((9, 9), 0.7)
    cfg = TrainConfig(learning_rates=(0.2, 0.2, 0.2), epochs=200, batch_size=1,
                      sub_image=9, seed=12)
    _, history = train(net, [(x, y)], cfg)
    assert history[-1] < 0.01 * history[0]


def test_train_deterministic_model_files(tmp_path):
    rng = np.random.default_rng(5)
    pairs = [(rng.random((9, 9)), rng.random((9, 9))) for _ in range(8)]
    cfg = TrainConfig(learning_rates=(0.05, 0.05, 0.05), epochs=4, batch_size=3,
                      sub_image=9, seed=77)
    paths = []
    for run in range(2):
        net = init_network(TINY, seed=cfg.seed, init_std=cfg.init_std)
        net, _ = train(net, [(x.copy(), y.copy()) for x, y in pairs], cfg)
        p = tmp_path / f"run{run}.tvsrnet"
        save_model(net, p)
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_train_errors():
    net = init_network(TINY, seed=7, init_std=0.1)
    with pytest.raises(ValueError, match="empty"):
        train(net, [], TrainConfig())
    bad = [(np.zeros((9, 9)), np.zeros((8, 9)))]
    with pytest.raises(ValueError, match="crop shape"):
        train(net, bad, TrainConfig(sub_image=9, epochs=1))


def test_full_batch_descent_is_monotone():
    rng = np.random.default_rng(6)
    pairs = [(rng.random((9, 9)), rng.random((9, 9))) for _ in range(4)]
    net = init_network(TINY, seed=8, init_std=0.1)
    cfg = TrainConfig(learning_rates=(0.01, 0.01, 0.01), epochs=50, batch_size=4,
                      sub_image=9, seed=13)
    _, history = train(net, pairs, cfg)
    # full-batch: one step per epoch; the history must never increase
    assert all(b <= a + 1e-15 for a, b in zip(history, history[1:]))


# ------------------------------------------------------------------- init


def test_init_deterministic_and_structured():
    a = init_network(arch_from_id(DEFAULT_ARCH), seed=42, init_std=0.001)
    b = init_network(arch_from_id(DEFAULT_ARCH), seed=42, init_std=0.001)
    for la, lb in zip(a.layers, b.layers):
        assert np.array_equal(la.weights, lb.weights)
        assert np.all(la.biases == 0.0)
    assert a.arch_id == DEFAULT_ARCH
    assert [l.spec.kernel for l in a.layers] == [9, 1, 5]
    assert [l.spec.n_in for l in a.layers] == [1, 16, 8]
    assert a.layers[-1].spec.n_out == 1


def test_init_zero_std():
    net = init_network(TINY, seed=9, init_std=0.0)
    for layer in net.layers:
        assert np.all(layer.weights == 0.0)


def test_arch_tag_roundtrip():
    specs = arch_from_id("5-3-3/8-4")
    assert arch_id_of(specs) == "5-3-3/8-4"
    with pytest.raises(ValueError, match="tag"):
        arch_from_id("9-1/16-8")
    with pytest.raises(ValueError, match="odd"):
        arch_from_id("8-1-5/16-8")


def test_network_chain_validation():
    with pytest.raises(ValueError, match="mismatch"):
        SrNetwork(
            [
                ConvLayer(LayerSpec(1, 2, 3), np.zeros((2, 1, 3, 3)), np.zeros(2)),
                ConvLayer(LayerSpec(3, 2, 1), np.zeros((2, 3, 1, 1)), np.zeros(2)),
                ConvLayer(LayerSpec(2, 1, 3), np.zeros((1, 2, 3, 3)), np.zeros(1)),
            ],
            "x",
        )


# ---------------------------------------------------------- serialization


def test_save_load_roundtrip(tmp_path):
    net = init_network(arch_from_id(DEFAULT_ARCH), seed=10, init_std=0.02)
    path = tmp_path / "model.tvsrnet"
    save_model(net, path)
    loaded = load_model(path)
    assert loaded.arch_id == net.arch_id
    for a, b in zip(net.layers, loaded.layers):
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.biases, b.biases)


def test_load_truncated(tmp_path):
    net = init_network(TINY, seed=11, init_std=0.02)
    path = tmp_path / "model.tvsrnet"
    save_model(net, path)
    blob = path.read_bytes()
    path.write_bytes(blob[: len(blob) // 2])
    with pytest.raises(CorruptDataError, match="truncated"):
        load_model(path)


def test_load_wrong_magic(tmp_path):
    path = tmp_path / "bad.tvsrnet"
    path.write_bytes(b"NOTMODEL" + b"\x00" * 64)
    with pytest.raises(ModelFormatError, match="magic"):
        load_model(path)


def test_load_wrong_version(tmp_path):
    net = init_network(TINY, seed=12, init_std=0.02)
    path = tmp_path / "m.tvsrnet"
    save_model(net, path)
    blob = bytearray(path.read_bytes())
    blob[7] = ord("2")
    path.write_bytes(bytes(blob))
    with pytest.raises(ModelFormatError, match="version"):
        load_model(path)


def test_load_trailing_bytes(tmp_path):
    net = init_network(TINY, seed=13, init_std=0.02)
    path = tmp_path / "m.tvsrnet"
    save_model(net, path)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(CorruptDataError, match="trailing"):
        load_model(path)


def test_load_header_payload_mismatch(tmp_path):
    # declared dims larger than the remaining payload
    net = init_network(ONES, seed=14, init_std=0.02)
    path = tmp_path / "m.tvsrnet"
    save_model(net, path)
    blob = bytearray(path.read_bytes())
    import struct

    struct.pack_into("<4I", blob, 8, 64, 32, 9, 9)
    path.write_bytes(bytes(blob))
    with pytest.raises(CorruptDataError, match="truncated"):
        load_model(path)
