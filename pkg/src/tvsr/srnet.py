"""Three-layer convolutional refinement network, trained from scratch.

Architecture: three valid (no padding) convolutions with chained channel
counts 1 -> n1 -> n2 -> 1, each followed by ReLU max(0, x) -- including the
last layer -- and a final upper clamp at 1 so outputs stay in [0, 1]. Passing
``final_relu=False`` leaves the last layer linear and unclamped instead (the
SRCNN-style convention, useful for ablations). Spatial size shrinks by
sum(kernel - 1) across the layers.

Training is plain mini-batch SGD on mean squared error with per-layer step
sizes and no momentum. Everything random (weight init, epoch shuffling) is
drawn from the SplitMix64 generator in ``rng``, so a seed pins the entire
run: two trainings with the same seed write byte-identical model files.

Model file format (little endian): magic ``TVSRNET1``; then for each of the
3 layers four uint32 dims (n_out, n_in, kh, kw) followed by the float64
weights in C order and the n_out float64 biases.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptDataError, ModelFormatError
from .rng import SplitMix64

MODEL_MAGIC = b"TVSRNET1"
DEFAULT_ARCH = "9-1-5/16-8"


@dataclass(frozen=True)
class LayerSpec:
    n_in: int
    n_out: int
    kernel: int

    def __post_init__(self):
        if self.n_in < 1 or self.n_out < 1 or self.kernel < 1:
            raise ValueError("layer dims must be positive")
        if self.kernel % 2 == 0:
            raise ValueError(f"kernel size must be odd, got {self.kernel}")


@dataclass
class ConvLayer:
    spec: LayerSpec
    weights: np.ndarray  # (n_out, n_in, k, k)
    biases: np.ndarray  # (n_out,)

    def __post_init__(self):
        expect = (self.spec.n_out, self.spec.n_in, self.spec.kernel, self.spec.kernel)
        if self.weights.shape != expect:
            raise ValueError(f"weights shape {self.weights.shape} != spec {expect}")
        if self.biases.shape != (self.spec.n_out,):
            raise ValueError(f"biases shape {self.biases.shape} != ({self.spec.n_out},)")


@dataclass
class SrNetwork:
    layers: list
    arch_id: str

    def __post_init__(self):
        if len(self.layers) != 3:
            raise ValueError("network must have exactly 3 layers")
        if self.layers[0].spec.n_in != 1 or self.layers[-1].spec.n_out != 1:
            raise ValueError("channel chain must start and end at 1")
        for a, b in zip(self.layers, self.layers[1:]):
            if a.spec.n_out != b.spec.n_in:
                raise ValueError(
                    f"channel mismatch: {a.spec.n_out} -> {b.spec.n_in}"
                )

    @property
    def total_shrink(self) -> int:
        return sum(l.spec.kernel - 1 for l in self.layers)


@dataclass(frozen=True)
class TrainConfig:
    learning_rates: tuple = (1e-4, 1e-4, 1e-5)
    epochs: int = 10
    batch_size: int = 16
    sub_image: int = 33
    stride: int = 14
    seed: int = 0
    init_std: float = 0.001
    final_relu: bool = True

    def __post_init__(self):
        if len(self.learning_rates) != 3 or any(r < 0 for r in self.learning_rates):
            raise ValueError("need 3 non-negative learning rates")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if self.sub_image < 1 or self.stride < 1:
            raise ValueError("sub_image and stride must be positive")
        if self.init_std < 0:
            raise ValueError("init_std must be non-negative")


def arch_from_id(arch_id: str):
    """Parse a tag like '9-1-5/16-8' into three LayerSpec values."""
    try:
        kernel_part, channel_part = arch_id.split("/")
        kernels = [int(t) for t in kernel_part.split("-")]
        channels = [int(t) for t in channel_part.split("-")]
    except ValueError:
        raise ValueError(f"bad architecture tag {arch_id!r}") from None
    if len(kernels) != 3 or len(channels) != 2:
        raise ValueError(f"bad architecture tag {arch_id!r}")
    chain = [1] + channels + [1]
    return [LayerSpec(chain[i], chain[i + 1], kernels[i]) for i in range(3)]


def arch_id_of(specs) -> str:
    kernels = "-".join(str(s.kernel) for s in specs)
    channels = "-".join(str(s.n_out) for s in specs[:-1])
    return f"{kernels}/{channels}"


def init_network(specs, seed: int, init_std: float = 0.001) -> SrNetwork:
    """Gaussian(0, init_std^2) weights in layer/C order, zero biases."""
    gen = SplitMix64(seed)
    layers = []
    for spec in specs:
        shape = (spec.n_out, spec.n_in, spec.kernel, spec.kernel)
        flat = np.empty(int(np.prod(shape)))
        for i in range(flat.size):
            flat[i] = gen.next_gaussian() * init_std
        layers.append(ConvLayer(spec, flat.reshape(shape), np.zeros(spec.n_out)))
    return SrNetwork(layers, arch_id_of(specs))


def _conv_valid(x: np.ndarray, weights: np.ndarray, biases: np.ndarray) -> np.ndarray:
    """Valid correlation of (B, Cin, H, W) with (Cout, Cin, k, k) + bias."""
    n_out, n_in, kh, kw = weights.shape
    oh = x.shape[2] - kh + 1
    ow = x.shape[3] - kw + 1
    out = np.empty((x.shape[0], n_out, oh, ow))
    for o in range(n_out):
        acc = np.full((x.shape[0], oh, ow), biases[o])
        for ci in range(n_in):
            xc = x[:, ci]
            woc = weights[o, ci]
            for di in range(kh):
                for dj in range(kw):
                    acc += woc[di, dj] * xc[:, di : di + oh, dj : dj + ow]
        out[:, o] = acc
    return out


def _forward_batch(net: SrNetwork, x: np.ndarray, final_relu: bool):
    """Returns (output, pre-activations, activations) for a (B,1,H,W) batch."""
    pre = []
    acts = [x]
    a = x
    for li, layer in enumerate(net.layers):
        z = _conv_valid(a, layer.weights, layer.biases)
        pre.append(z)
        if li < 2 or final_relu:
            a = np.maximum(z, 0.0)
        else:
            a = z
        acts.append(a)
    out = np.minimum(a, 1.0) if final_relu else a
    return out, pre, acts


def forward(net: SrNetwork, img: np.ndarray, final_relu: bool = True) -> np.ndarray:
    """Run the net on one luma plane; output shrinks by the receptive margin."""
    arr = np.asarray(img, dtype=np.float64)
    shrink = net.total_shrink
    if arr.shape[0] <= shrink or arr.shape[1] <= shrink:
        raise ValueError(
            f"input {arr.shape} too small for receptive field {shrink + 1}"
        )
    out, _, _ = _forward_batch(net, arr[None, None], final_relu)
    return out[0, 0]


def mse_loss(pred: np.ndarray, target: np.ndarray) -> float:
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    diff = np.asarray(pred, dtype=np.float64) - np.asarray(target, dtype=np.float64)
    return float(np.mean(diff * diff))


def _backward_batch(net: SrNetwork, x: np.ndarray, target: np.ndarray, final_relu: bool):
    out, pre, acts = _forward_batch(net, x, final_relu)
    if out.shape != target.shape:
        raise ValueError(f"target shape {target.shape} != output {out.shape}")
    diff = out - target
    loss = float(np.mean(diff * diff))
    delta = (2.0 / diff.size) * diff
    if final_relu:
        # through the upper clamp, then the last ReLU (derivative 0 at kinks)
        delta = delta * (acts[-1] < 1.0) * (pre[-1] > 0.0)
    grads = [None, None, None]
    for li in range(2, -1, -1):
        layer = net.layers[li]
        a_prev = acts[li]
        n_out, n_in, kh, kw = layer.weights.shape
        oh, ow = delta.shape[2], delta.shape[3]
        d_w = np.empty_like(layer.weights)
        d_b = np.empty_like(layer.biases)
        d_prev = np.zeros_like(a_prev)
        for o in range(n_out):
            d_o = delta[:, o]
            d_b[o] = float(np.sum(d_o))
            for ci in range(n_in):
                ac = a_prev[:, ci]
                dpc = d_prev[:, ci]
                for di in range(kh):
                    for dj in range(kw):
                        d_w[o, ci, di, dj] = float(
                            np.sum(d_o * ac[:, di : di + oh, dj : dj + ow])
                        )
                        dpc[:, di : di + oh, dj : dj + ow] += (
                            layer.weights[o, ci, di, dj] * d_o
                        )
        grads[li] = (d_w, d_b)
        if li > 0:
            delta = d_prev * (pre[li - 1] > 0.0)
    return grads, loss


def backward(net: SrNetwork, img: np.ndarray, target: np.ndarray, final_relu: bool = True):
    """Analytic gradients of mse_loss(forward(net, img), target) plus the loss."""
    arr = np.asarray(img, dtype=np.float64)
    tgt = np.asarray(target, dtype=np.float64)
    return _backward_batch(net, arr[None, None], tgt[None, None], final_relu)


def sgd_step(net: SrNetwork, grads, config: TrainConfig) -> SrNetwork:
    """w <- w - rate_l * g per layer; plain SGD."""
    layers = []
    for layer, (d_w, d_b), rate in zip(net.layers, grads, config.learning_rates):
        if d_w.shape != layer.weights.shape or d_b.shape != layer.biases.shape:
            raise ValueError("gradient shapes do not match the network")
        layers.append(
            ConvLayer(layer.spec, layer.weights - rate * d_w, layer.biases - rate * d_b)
        )
    return SrNetwork(layers, net.arch_id)


def train(net: SrNetwork, pairs, config: TrainConfig):
    """Mini-batch SGD over (input, target) crops; returns (net, epoch losses).

    Targets are center-cropped to the network output size at loss time.
    Shuffling is driven solely by config.seed, so runs are bit-reproducible.
    """
    if not pairs:
        raise ValueError("empty training set")
    sub = config.sub_image
    shrink = net.total_shrink
    if sub <= shrink:
        raise ValueError(f"sub_image {sub} too small for receptive field {shrink + 1}")
    margin = shrink // 2
    inputs, targets = [], []
    for x, y in pairs:
        if x.shape != (sub, sub) or y.shape != (sub, sub):
            raise ValueError(
                f"crop shape mismatch: got {x.shape}/{y.shape}, expected {(sub, sub)}"
            )
        inputs.append(np.asarray(x, dtype=np.float64))
        targets.append(
            np.asarray(y, dtype=np.float64)[margin : sub - margin, margin : sub - margin]
        )
    inputs = np.stack(inputs)[:, None]
    targets = np.stack(targets)[:, None]

    gen = SplitMix64(config.seed)
    n = len(pairs)
    history = []
    for _ in range(config.epochs):
        order = list(range(n))
        gen.shuffle(order)
        total = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            grads, loss = _backward_batch(
                net, inputs[batch], targets[batch], config.final_relu
            )
            net = sgd_step(net, grads, config)
            total += loss * len(batch)
        history.append(total / n)
    return net, history


def save_model(net: SrNetwork, path) -> None:
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        for layer in net.layers:
            n_out, n_in, kh, kw = layer.weights.shape
            fh.write(struct.pack("<4I", n_out, n_in, kh, kw))
            fh.write(layer.weights.astype("<f8").tobytes())
            fh.write(layer.biases.astype("<f8").tobytes())


def load_model(path) -> SrNetwork:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MODEL_MAGIC) or data[:7] != MODEL_MAGIC[:7]:
        raise ModelFormatError("not a model file (bad magic)")
    if data[: len(MODEL_MAGIC)] != MODEL_MAGIC:
        raise ModelFormatError(
            f"unsupported model version {data[7:8]!r}; expected {MODEL_MAGIC[7:8]!r}"
        )
    pos = len(MODEL_MAGIC)
    layers = []
    for li in range(3):
        if pos + 16 > len(data):
            raise CorruptDataError(f"model truncated in layer {li + 1} header")
        n_out, n_in, kh, kw = struct.unpack_from("<4I", data, pos)
        pos += 16
        if kh != kw:
            raise ModelFormatError(f"layer {li + 1}: non-square kernel {kh}x{kw}")
        try:
            spec = LayerSpec(n_in, n_out, kh)
        except ValueError as exc:
            raise ModelFormatError(f"layer {li + 1}: {exc}") from None
        n_weights = n_out * n_in * kh * kw
        need = (n_weights + n_out) * 8
        if pos + need > len(data):
            raise CorruptDataError(
                f"model truncated in layer {li + 1} payload "
                f"(need {need} bytes, have {len(data) - pos})"
            )
        weights = (
            np.frombuffer(data, dtype="<f8", count=n_weights, offset=pos)
            .reshape(n_out, n_in, kh, kw)
            .astype(np.float64)
        )
        pos += n_weights * 8
        biases = np.frombuffer(data, dtype="<f8", count=n_out, offset=pos).astype(
            np.float64
        )
        pos += n_out * 8
        layers.append(ConvLayer(spec, weights, biases))
    if pos != len(data):
        raise CorruptDataError(f"{len(data) - pos} trailing bytes after layer payloads")
    try:
        specs = [l.spec for l in layers]
        return SrNetwork(layers, arch_id_of(specs))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None
