"""Forward and backward passes of the two sequence classifiers.

Both variants share one trunk: embedding lookup, a width-5 windowed
convolution whose out-of-range context slots hold the reserved "none"
embedding, ReLU, two stacked LSTM layers, dropout (training only, inverted
scaling), and a mask-gated average over all padded positions feeding a
linear + softmax head. The divisor of that average is the padded length, not
the count of valid tokens, so shorter texts pool to proportionally smaller
vectors on purpose.

The second variant ("m2") adds a branch that pushes the raw embeddings
through a linear + sigmoid gate and adds the branch's own mask-gated average
into the pooled vector, which keeps the original features in view when the
trunk gradient grows weak.

Everything is float64 and the backward pass is written out by hand, exactly
differentiating the summed cross-entropy through the pooling mask, both LSTM
recurrences, the shared convolution window, and the embedding table
(including the boundary slots, which feed gradient into the "none" row).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..emotions import NUM_EMOTIONS
from ..errors import ConfigurationError

WINDOW = 5  # convolution context: two tokens either side of the target
_HALF = WINDOW // 2


class ModelVariant(str, Enum):
    M1 = "m1"  # convolution + two-layer LSTM trunk
    M2 = "m2"  # trunk + sigmoid-gated raw-embedding branch


@dataclass(frozen=True)
class ModelDims:
    vocab_size: int
    embed_dim: int
    conv_dim: int
    lstm1_dim: int
    lstm2_dim: int
    num_classes: int = NUM_EMOTIONS

    def __post_init__(self):
        for name in ("vocab_size", "embed_dim", "conv_dim", "lstm1_dim",
                     "lstm2_dim", "num_classes"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")


@dataclass
class LstmLayerParams:
    """One gated layer; gates pack as [input, forget, output, candidate]."""

    w_x: np.ndarray  # (input_dim, 4*hidden)
    w_h: np.ndarray  # (hidden, 4*hidden)
    b: np.ndarray    # (4*hidden,)

    @property
    def hidden_dim(self) -> int:
        return self.w_h.shape[0]


@dataclass
class ModelParams:
    variant: ModelVariant
    dims: ModelDims
    embedding: np.ndarray          # (vocab, embed)
    conv_w: np.ndarray             # (WINDOW*embed, conv)
    conv_b: np.ndarray             # (conv,)
    lstm1: LstmLayerParams
    lstm2: LstmLayerParams
    out_w: np.ndarray              # (lstm2, classes)
    out_b: np.ndarray              # (classes,)
    stack_w: Optional[np.ndarray] = None  # (embed, lstm2), m2 only
    stack_b: Optional[np.ndarray] = None  # (lstm2,), m2 only

    def named_arrays(self):
        """(name, array) pairs in a fixed order; m1 has no stack entries."""
        pairs = [
            ("embedding", self.embedding),
            ("conv_w", self.conv_w),
            ("conv_b", self.conv_b),
            ("lstm1.w_x", self.lstm1.w_x),
            ("lstm1.w_h", self.lstm1.w_h),
            ("lstm1.b", self.lstm1.b),
            ("lstm2.w_x", self.lstm2.w_x),
            ("lstm2.w_h", self.lstm2.w_h),
            ("lstm2.b", self.lstm2.b),
            ("out_w", self.out_w),
            ("out_b", self.out_b),
        ]
        if self.variant is ModelVariant.M2:
            pairs.append(("stack_w", self.stack_w))
            pairs.append(("stack_b", self.stack_b))
        return pairs

    def copy(self) -> "ModelParams":
        return ModelParams(
            variant=self.variant,
            dims=self.dims,
            embedding=self.embedding.copy(),
            conv_w=self.conv_w.copy(),
            conv_b=self.conv_b.copy(),
            lstm1=LstmLayerParams(self.lstm1.w_x.copy(), self.lstm1.w_h.copy(),
                                  self.lstm1.b.copy()),
            lstm2=LstmLayerParams(self.lstm2.w_x.copy(), self.lstm2.w_h.copy(),
                                  self.lstm2.b.copy()),
            out_w=self.out_w.copy(),
            out_b=self.out_b.copy(),
            stack_w=None if self.stack_w is None else self.stack_w.copy(),
            stack_b=None if self.stack_b is None else self.stack_b.copy(),
        )

    def validate(self) -> None:
        d = self.dims
        expect = {
            "embedding": (d.vocab_size, d.embed_dim),
            "conv_w": (WINDOW * d.embed_dim, d.conv_dim),
            "conv_b": (d.conv_dim,),
            "lstm1.w_x": (d.conv_dim, 4 * d.lstm1_dim),
            "lstm1.w_h": (d.lstm1_dim, 4 * d.lstm1_dim),
            "lstm1.b": (4 * d.lstm1_dim,),
            "lstm2.w_x": (d.lstm1_dim, 4 * d.lstm2_dim),
            "lstm2.w_h": (d.lstm2_dim, 4 * d.lstm2_dim),
            "lstm2.b": (4 * d.lstm2_dim,),
            "out_w": (d.lstm2_dim, d.num_classes),
            "out_b": (d.num_classes,),
            "stack_w": (d.embed_dim, d.lstm2_dim),
            "stack_b": (d.lstm2_dim,),
        }
        if self.variant is ModelVariant.M1 and (
                self.stack_w is not None or self.stack_b is not None):
            raise ConfigurationError("m1 carries no stack-branch parameters")
        for name, arr in self.named_arrays():
            if arr is None or arr.shape != expect[name]:
                raise ConfigurationError(
                    f"parameter {name} has shape "
                    f"{None if arr is None else arr.shape}, expected {expect[name]}"
                )


def init_params(dims: ModelDims, variant: ModelVariant, seed) -> ModelParams:
    """Seeded initialization: weights uniform in [-r, r] with r = 1/sqrt(fan_in),
    biases zero."""
    variant = ModelVariant(variant)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    def uniform(shape, fan_in):
        r = 1.0 / math.sqrt(fan_in)
        return rng.uniform(-r, r, size=shape)

    d = dims
    params = ModelParams(
        variant=variant,
        dims=dims,
        embedding=uniform((d.vocab_size, d.embed_dim), d.embed_dim),
        conv_w=uniform((WINDOW * d.embed_dim, d.conv_dim), WINDOW * d.embed_dim),
        conv_b=np.zeros(d.conv_dim),
        lstm1=LstmLayerParams(
            w_x=uniform((d.conv_dim, 4 * d.lstm1_dim), d.conv_dim),
            w_h=uniform((d.lstm1_dim, 4 * d.lstm1_dim), d.lstm1_dim),
            b=np.zeros(4 * d.lstm1_dim),
        ),
        lstm2=LstmLayerParams(
            w_x=uniform((d.lstm1_dim, 4 * d.lstm2_dim), d.lstm1_dim),
            w_h=uniform((d.lstm2_dim, 4 * d.lstm2_dim), d.lstm2_dim),
            b=np.zeros(4 * d.lstm2_dim),
        ),
        out_w=uniform((d.lstm2_dim, d.num_classes), d.lstm2_dim),
        out_b=np.zeros(d.num_classes),
        stack_w=uniform((d.embed_dim, d.lstm2_dim), d.embed_dim)
        if variant is ModelVariant.M2 else None,
        stack_b=np.zeros(d.lstm2_dim) if variant is ModelVariant.M2 else None,
    )
    params.validate()
    return params


def sigmoid(x):
    """Numerically stable logistic: never exponentiates a positive argument."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits):
    """Row-wise stable softmax."""
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _gates(x, h_prev, layer):
    h = layer.hidden_dim
    a = x @ layer.w_x + h_prev @ layer.w_h + layer.b
    i = sigmoid(a[..., :h])
    f = sigmoid(a[..., h:2 * h])
    o = sigmoid(a[..., 2 * h:3 * h])
    g = np.tanh(a[..., 3 * h:])
    return i, f, o, g


def lstm_step(x, state, layer: LstmLayerParams):
    """One gated-cell update: ((h, c), x) -> (h', c').

    c' = f*c + i*g and h' = o*tanh(c'), with sigmoid input/forget/output
    gates and a tanh candidate. Works on single vectors or batches.
    """
    h_prev, c_prev = state
    i, f, o, g = _gates(np.asarray(x, dtype=float), np.asarray(h_prev, dtype=float),
                        layer)
    c = f * np.asarray(c_prev, dtype=float) + i * g
    h = o * np.tanh(c)
    return h, c


@dataclass
class LstmTrace:
    """Per-step activations of one LSTM layer, kept for the backward pass."""

    i: np.ndarray  # (batch, steps, hidden)
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray
    c: np.ndarray
    h: np.ndarray


def _run_lstm(inputs, layer) -> LstmTrace:
    batch, steps, _ = inputs.shape
    hid = layer.hidden_dim
    shape = (batch, steps, hid)
    tr = LstmTrace(*(np.empty(shape) for _ in range(6)))
    h_t = np.zeros((batch, hid))
    c_t = np.zeros((batch, hid))
    for t in range(steps):
        i, f, o, g = _gates(inputs[:, t], h_t, layer)
        c_t = f * c_t + i * g
        h_t = o * np.tanh(c_t)
        tr.i[:, t], tr.f[:, t], tr.o[:, t], tr.g[:, t] = i, f, o, g
        tr.c[:, t], tr.h[:, t] = c_t, h_t
    return tr


@dataclass
class ForwardTrace:
    """Every intermediate of one forward pass over a (batch, length) input."""

    token_ids: np.ndarray       # effective ids, padding slots forced to 0
    mask: np.ndarray            # (batch, length) float 0/1
    embeddings: np.ndarray      # (batch, length, embed)
    windows: np.ndarray         # (batch, length, WINDOW*embed)
    conv_pre: np.ndarray        # (batch, length, conv) before ReLU
    conv_out: np.ndarray        # after ReLU, non-negative
    lstm1: LstmTrace
    lstm2: LstmTrace
    dropout_mask: Optional[np.ndarray]  # scaled 0/(1-rate) mask, train only
    dropped: np.ndarray         # lstm2.h after dropout
    stack_pre: Optional[np.ndarray]     # (batch, length, lstm2), m2 only
    stack_gate: Optional[np.ndarray]    # sigmoid(stack_pre), m2 only
    pooled: np.ndarray          # (batch, lstm2) mask-gated average
    logits: np.ndarray          # (batch, classes)
    probs: np.ndarray           # softmax rows


def forward(token_ids, mask, params: ModelParams, mode: str = "eval",
            dropout_rate: float = 0.0, seed=None) -> ForwardTrace:
    """Run one batch through the network, keeping all intermediates.

    Padding slots (mask 0) are forced to the reserved token id before lookup,
    so a masked position can never influence the output. ``mode`` is "train"
    or "eval"; dropout fires only in train mode and is fully determined by
    ``seed``, which makes gradient checks with active dropout possible.
    """
    if mode not in ("train", "eval"):
        raise ConfigurationError(f"unknown mode: {mode!r}")
    if not 0.0 <= dropout_rate < 1.0:
        raise ConfigurationError("dropout rate must lie in [0, 1)")
    params.validate()
    token_ids = np.asarray(token_ids)
    mask = np.asarray(mask, dtype=float)
    if token_ids.shape != mask.shape or token_ids.ndim != 2:
        raise ConfigurationError("token_ids and mask must share a (batch, length) shape")
    if token_ids.min() < 0 or token_ids.max() >= params.dims.vocab_size:
        raise ConfigurationError("token id outside the vocabulary")

    ids = np.where(mask > 0, token_ids, 0)
    batch, length = ids.shape
    emb_dim = params.dims.embed_dim

    z = params.embedding[ids]
    padded = np.empty((batch, length + 2 * _HALF, emb_dim))
    padded[:, _HALF:_HALF + length] = z
    padded[:, :_HALF] = params.embedding[0]
    padded[:, _HALF + length:] = params.embedding[0]
    windows = np.empty((batch, length, WINDOW * emb_dim))
    for t in range(length):
        windows[:, t] = padded[:, t:t + WINDOW].reshape(batch, WINDOW * emb_dim)

    conv_pre = windows @ params.conv_w + params.conv_b
    conv_out = np.maximum(conv_pre, 0.0)

    lstm1 = _run_lstm(conv_out, params.lstm1)
    lstm2 = _run_lstm(lstm1.h, params.lstm2)

    if mode == "train" and dropout_rate > 0.0:
        rng = np.random.default_rng(seed)
        keep = 1.0 - dropout_rate
        dropout_mask = (rng.random(lstm2.h.shape) < keep) / keep
        dropped = lstm2.h * dropout_mask
    else:
        dropout_mask = None
        dropped = lstm2.h

    gate = mask[:, :, None]
    pooled = (dropped * gate).sum(axis=1) / length

    stack_pre = stack_gate = None
    if params.variant is ModelVariant.M2:
        stack_pre = z @ params.stack_w + params.stack_b
        stack_gate = sigmoid(stack_pre)
        pooled = pooled + (stack_gate * gate).sum(axis=1) / length

    logits = pooled @ params.out_w + params.out_b
    probs = softmax(logits)
    return ForwardTrace(
        token_ids=ids, mask=mask, embeddings=z, windows=windows,
        conv_pre=conv_pre, conv_out=conv_out, lstm1=lstm1, lstm2=lstm2,
        dropout_mask=dropout_mask, dropped=dropped,
        stack_pre=stack_pre, stack_gate=stack_gate,
        pooled=pooled, logits=logits, probs=probs,
    )


def forward_sequence(seq, params: ModelParams, mode: str = "eval",
                     dropout_rate: float = 0.0, seed=None) -> ForwardTrace:
    """Convenience wrapper for a single FeatureSequence (batch of one)."""
    ids = np.asarray([seq.token_ids])
    mask = np.asarray([seq.mask])
    return forward(ids, mask, params, mode=mode, dropout_rate=dropout_rate, seed=seed)


def cross_entropy_loss(probs, labels) -> float:
    """Summed cross-entropy of one-hot targets: -sum_j log p_j[label_j].

    A zero probability on a true label yields inf, which the training loop
    treats as divergence.
    """
    probs = np.asarray(probs, dtype=float)
    labels = np.asarray(labels)
    picked = probs[np.arange(len(labels)), labels]
    with np.errstate(divide="ignore"):
        return float(-np.log(picked).sum())


def _lstm_backward(tr: LstmTrace, inputs, layer, dh_out):
    """Backprop through time for one layer.

    dh_out carries the loss gradient arriving at each step's hidden output.
    Returns (d_inputs, dw_x, dw_h, db).
    """
    batch, steps, hid = tr.h.shape
    dw_x = np.zeros_like(layer.w_x)
    dw_h = np.zeros_like(layer.w_h)
    db = np.zeros_like(layer.b)
    d_inputs = np.empty_like(inputs)
    dh_next = np.zeros((batch, hid))
    dc_next = np.zeros((batch, hid))
    zeros = np.zeros((batch, hid))
    for t in reversed(range(steps)):
        i, f, o, g = tr.i[:, t], tr.f[:, t], tr.o[:, t], tr.g[:, t]
        tanh_c = np.tanh(tr.c[:, t])
        c_prev = tr.c[:, t - 1] if t > 0 else zeros
        h_prev = tr.h[:, t - 1] if t > 0 else zeros

        dh = dh_out[:, t] + dh_next
        do = dh * tanh_c
        dc = dh * o * (1.0 - tanh_c ** 2) + dc_next
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dc_next = dc * f

        da = np.concatenate(
            [di * i * (1.0 - i), df * f * (1.0 - f),
             do * o * (1.0 - o), dg * (1.0 - g ** 2)],
            axis=1,
        )
        dw_x += inputs[:, t].T @ da
        dw_h += h_prev.T @ da
        db += da.sum(axis=0)
        d_inputs[:, t] = da @ layer.w_x.T
        dh_next = da @ layer.w_h.T
    return d_inputs, dw_x, dw_h, db


def backward(trace: ForwardTrace, labels, params: ModelParams) -> dict:
    """Exact gradients of the summed cross-entropy w.r.t. every parameter.

    Returns a dict keyed like ``ModelParams.named_arrays``; the m1 variant
    yields no stack entries because it owns no stack parameters.
    """
    labels = np.asarray(labels)
    batch, length = trace.token_ids.shape
    grads: dict = {}

    dlogits = trace.probs.copy()
    dlogits[np.arange(batch), labels] -= 1.0

    grads["out_w"] = trace.pooled.T @ dlogits
    grads["out_b"] = dlogits.sum(axis=0)
    dpooled = dlogits @ params.out_w.T

    gate = trace.mask[:, :, None]
    ddropped = dpooled[:, None, :] * gate / length

    dz = np.zeros_like(trace.embeddings)
    if params.variant is ModelVariant.M2:
        dstack_gate = dpooled[:, None, :] * gate / length
        dstack_pre = dstack_gate * trace.stack_gate * (1.0 - trace.stack_gate)
        emb_dim = params.dims.embed_dim
        flat_z = trace.embeddings.reshape(batch * length, emb_dim)
        flat_ds = dstack_pre.reshape(batch * length, -1)
        grads["stack_w"] = flat_z.T @ flat_ds
        grads["stack_b"] = dstack_pre.sum(axis=(0, 1))
        dz += dstack_pre @ params.stack_w.T

    if trace.dropout_mask is not None:
        dlstm2_h = ddropped * trace.dropout_mask
    else:
        dlstm2_h = ddropped

    dlstm1_h, dw_x2, dw_h2, db2 = _lstm_backward(
        trace.lstm2, trace.lstm1.h, params.lstm2, dlstm2_h)
    grads["lstm2.w_x"], grads["lstm2.w_h"], grads["lstm2.b"] = dw_x2, dw_h2, db2

    dconv_out, dw_x1, dw_h1, db1 = _lstm_backward(
        trace.lstm1, trace.conv_out, params.lstm1, dlstm1_h)
    grads["lstm1.w_x"], grads["lstm1.w_h"], grads["lstm1.b"] = dw_x1, dw_h1, db1

    dconv_pre = dconv_out * (trace.conv_pre > 0.0)
    conv_in = WINDOW * params.dims.embed_dim
    flat_win = trace.windows.reshape(batch * length, conv_in)
    flat_dc = dconv_pre.reshape(batch * length, -1)
    grads["conv_w"] = flat_win.T @ flat_dc
    grads["conv_b"] = dconv_pre.sum(axis=(0, 1))

    dwindows = dconv_pre @ params.conv_w.T
    emb_dim = params.dims.embed_dim
    dpadded = np.zeros((batch, length + 2 * _HALF, emb_dim))
    for t in range(length):
        dpadded[:, t:t + WINDOW] += dwindows[:, t].reshape(batch, WINDOW, emb_dim)
    dz += dpadded[:, _HALF:_HALF + length]

    dembedding = np.zeros_like(params.embedding)
    np.add.at(dembedding, trace.token_ids, dz)
    # the boundary slots always hold the reserved token
    dembedding[0] += dpadded[:, :_HALF].sum(axis=(0, 1))
    dembedding[0] += dpadded[:, _HALF + length:].sum(axis=(0, 1))
    grads["embedding"] = dembedding
    return grads
