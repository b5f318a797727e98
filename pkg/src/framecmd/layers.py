"""Network building blocks: LSTM cell, bidirectional recurrence,
additive attention, highway connection, and parameter initialization."""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .autodiff import Parameter, Tensor

GATES = ("i", "f", "o", "g")


def init_params(shape, seed, scheme, name=""):
    """Deterministic initial tensor for a parameter.

    schemes: glorot_uniform (weights), zeros (biases),
    forget_bias_one (LSTM forget-gate bias). The RNG stream is derived
    from (seed, name) so every parameter is independent and stable.
    """
    shape = tuple(int(s) for s in shape)
    if scheme == "zeros":
        return np.zeros(shape)
    if scheme == "forget_bias_one":
        return np.ones(shape)
    if scheme == "glorot_uniform":
        if len(shape) == 2:
            fan_out, fan_in = shape
        else:
            fan_in = fan_out = shape[0]
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        rng = np.random.default_rng(
            np.random.SeedSequence([int(seed)] + list(name.encode("utf-8"))))
        return rng.uniform(-bound, bound, shape)
    raise ValueError(f"unknown init scheme: {scheme}")


class LstmCellParams:
    """Per-gate weights of one LSTM cell.

    Standard parameterization: for gate x in {i, f, o, g},
    pre-activation = W_x input + U_x hidden + b_x; i, f, o pass through
    the logistic sigmoid, g through tanh; c' = f*c + i*g, h' = o*tanh(c').
    """

    def __init__(self, prefix, input_dim, hidden_dim, seed):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.W = {}
        self.U = {}
        self.b = {}
        for gate in GATES:
            wname = f"{prefix}.W_{gate}"
            uname = f"{prefix}.U_{gate}"
            bname = f"{prefix}.b_{gate}"
            self.W[gate] = Parameter(
                wname, init_params((hidden_dim, input_dim), seed,
                                   "glorot_uniform", wname))
            self.U[gate] = Parameter(
                uname, init_params((hidden_dim, hidden_dim), seed,
                                   "glorot_uniform", uname))
            bscheme = "forget_bias_one" if gate == "f" else "zeros"
            self.b[gate] = Parameter(
                bname, init_params((hidden_dim,), seed, bscheme, bname))

    def parameters(self):
        for gate in GATES:
            yield self.W[gate]
            yield self.U[gate]
            yield self.b[gate]


def lstm_cell_forward(x, h, c, params):
    """One LSTM step; returns (h', c'). Pure function of its inputs."""
    if x.data.shape[0] != params.input_dim or h.data.shape[0] != params.hidden_dim:
        raise ValueError("LSTM cell dimension mismatch")

    def gate(name, act):
        pre = ad.add(ad.add(ad.matvec(params.W[name], x),
                            ad.matvec(params.U[name], h)),
                     params.b[name])
        return act(pre)

    i = gate("i", ad.sigmoid)
    f = gate("f", ad.sigmoid)
    o = gate("o", ad.sigmoid)
    g = gate("g", ad.tanh)
    c_new = ad.add(ad.mul(f, c), ad.mul(i, g))
    h_new = ad.mul(o, ad.tanh(c_new))
    return h_new, c_new


def lstm_run(seq, params, h0=None, c0=None):
    """Unroll an LSTM over a list of input tensors; returns hidden states."""
    hdim = params.hidden_dim
    h = h0 if h0 is not None else ad.constant(np.zeros(hdim))
    c = c0 if c0 is not None else ad.constant(np.zeros(hdim))
    states = []
    for x in seq:
        h, c = lstm_cell_forward(x, h, c, params)
        states.append(h)
    return states


def bilstm_forward(seq, fwd, bwd):
    """Bidirectional LSTM over a list of input tensors.

    Returns (states, last_fwd, last_bwd) where states[t] is the
    concatenation of the forward state at t and the backward state at t;
    both directions start from zero states.
    """
    if len(seq) < 1:
        raise ValueError("empty sequence")
    f_states = lstm_run(seq, fwd)
    b_states = list(reversed(lstm_run(list(reversed(seq)), bwd)))
    states = [ad.concat([f, b]) for f, b in zip(f_states, b_states)]
    return states, f_states[-1], b_states[0]


class AttentionParams:
    """Additive attention: score(q, k) = v . tanh(W1 q + W2 k)."""

    def __init__(self, prefix, query_dim, key_dim, att_dim, seed):
        self.W1 = Parameter(f"{prefix}.W1", init_params(
            (att_dim, query_dim), seed, "glorot_uniform", f"{prefix}.W1"))
        self.W2 = Parameter(f"{prefix}.W2", init_params(
            (att_dim, key_dim), seed, "glorot_uniform", f"{prefix}.W2"))
        self.v = Parameter(f"{prefix}.v", init_params(
            (att_dim,), seed, "glorot_uniform", f"{prefix}.v"))

    def parameters(self):
        return [self.W1, self.W2, self.v]


def attention(queries, keys, params):
    """Attend each query over the keys (values = keys).

    Returns (contexts, weights): one context tensor per query and the
    softmax weight rows as a Q x T numpy array.
    """
    projected = [ad.matvec(params.W2, k) for k in keys]
    contexts = []
    rows = []
    for q in queries:
        pq = ad.matvec(params.W1, q)
        scores = ad.stack_scalars(
            [ad.dot(params.v, ad.tanh(ad.add(pq, pk))) for pk in projected])
        w = ad.softmax(scores)
        contexts.append(ad.weighted_sum(w, keys))
        rows.append(w.data)
    return contexts, np.array(rows)


class HighwayParams:
    """Gated bypass y = T(x)*H(x) + (1 - T(x))*x with square transforms.

    Gate bias starts at -2 so the connection initially favors carrying
    the input through unchanged.
    """

    def __init__(self, prefix, dim, seed):
        self.W_h = Parameter(f"{prefix}.W_h", init_params(
            (dim, dim), seed, "glorot_uniform", f"{prefix}.W_h"))
        self.b_h = Parameter(f"{prefix}.b_h", np.zeros(dim))
        self.W_t = Parameter(f"{prefix}.W_t", init_params(
            (dim, dim), seed, "glorot_uniform", f"{prefix}.W_t"))
        self.b_t = Parameter(f"{prefix}.b_t", np.full(dim, -2.0))

    def parameters(self):
        return [self.W_h, self.b_h, self.W_t, self.b_t]


def highway(x, params):
    if params.W_h.data.shape[0] != params.W_h.data.shape[1]:
        raise ValueError("highway transform must be square")
    if x.data.shape[0] != params.W_h.data.shape[1]:
        raise ValueError("highway input dimension mismatch")
    h = ad.tanh(ad.add(ad.matvec(params.W_h, x), params.b_h))
    t = ad.sigmoid(ad.add(ad.matvec(params.W_t, x), params.b_t))
    return ad.add(ad.mul(t, h), ad.mul(ad.one_minus(t), x))


class AffineParams:
    def __init__(self, prefix, out_dim, in_dim, seed):
        self.W = Parameter(f"{prefix}.W", init_params(
            (out_dim, in_dim), seed, "glorot_uniform", f"{prefix}.W"))
        self.b = Parameter(f"{prefix}.b", np.zeros(out_dim))

    def parameters(self):
        return [self.W, self.b]


def affine(x, params):
    return ad.add(ad.matvec(params.W, x), params.b)
