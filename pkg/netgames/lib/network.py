"""
Dense networks with exact backpropagation, the Adam optimizer and target
network soft updates. Everything is plain numpy, batch first.
"""
from io import BytesIO
import numpy as np

from .utils import NumericalFault

HIDDEN_ACTIVATIONS = ["relu", "tanh"]
OUTPUT_ACTIVATIONS = ["linear", "scaled_tanh"]


class DenseNet(object):
    """ A fully connected network.

    Layer k computes z = a W_k + b_k, followed by the hidden activation,
    or by the output activation on the last layer. `scaled_tanh` maps the
    output into [low, high] elementwise:
    low + (high - low) * (tanh(z) + 1) / 2.
    """

    def __init__(self, layer_dims, weights, biases,
                 hidden_activation: str="relu", output_activation: str="linear",
                 output_low=None, output_high=None):
        """
        :param layer_dims: [input, hidden..., output] sizes
        :param weights: one (in, out) matrix per layer
        :param biases: one (out,) vector per layer
        :param output_low, output_high: bounds for scaled_tanh
        """
        layer_dims = [int(d) for d in layer_dims]
        if len(layer_dims) < 2 or any(d < 1 for d in layer_dims):
            raise ValueError(f"Invalid layer dims: {layer_dims}")
        if hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(f"Valid hidden activations: {HIDDEN_ACTIVATIONS}")
        if output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"Valid output activations: {OUTPUT_ACTIVATIONS}")
        n_layers = len(layer_dims) - 1
        if len(weights) != n_layers or len(biases) != n_layers:
            raise ValueError(f"Expected {n_layers} weight matrices and bias vectors")
        for k, (W, b) in enumerate(zip(weights, biases)):
            if W.shape != (layer_dims[k], layer_dims[k + 1]) or b.shape != (layer_dims[k + 1],):
                raise ValueError(f"Layer {k} parameters do not match dims {layer_dims}")

        self.layer_dims = layer_dims
        self.weights = [np.array(W, dtype=float) for W in weights]
        self.biases = [np.array(b, dtype=float) for b in biases]
        self.hidden_activation = hidden_activation
        self.output_activation = output_activation
        if output_activation == "scaled_tanh":
            if output_low is None or output_high is None:
                raise ValueError("scaled_tanh needs output_low and output_high")
            self.output_low = np.broadcast_to(np.asarray(output_low, dtype=float),
                                              (layer_dims[-1],)).copy()
            self.output_high = np.broadcast_to(np.asarray(output_high, dtype=float),
                                               (layer_dims[-1],)).copy()
            if np.any(self.output_low > self.output_high):
                raise ValueError("output_low must not exceed output_high")
        else:
            self.output_low = self.output_high = None

    @classmethod
    def initialize(cls, layer_dims, rng: np.random.Generator, **kwargs):
        """ New net with weights and biases uniform in ±1/sqrt(fan_in) """
        weights, biases = [], []
        for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(layer_dims, weights, biases, **kwargs)

    @property
    def params(self):
        """ [W_0, b_0, W_1, b_1, ...], the live arrays """
        out = []
        for W, b in zip(self.weights, self.biases):
            out += [W, b]
        return out

    @property
    def n_params(self):
        return sum(p.size for p in self.params)

    def flat_params(self):
        return np.concatenate([p.ravel() for p in self.params])

    def set_flat_params(self, flat):
        flat = np.asarray(flat, dtype=float)
        if flat.size != self.n_params:
            raise ValueError(f"Expected {self.n_params} parameters, got {flat.size}")
        offset = 0
        for p in self.params:
            p[...] = flat[offset:offset + p.size].reshape(p.shape)
            offset += p.size

    def copy(self):
        return DenseNet(self.layer_dims, self.weights, self.biases,
                        hidden_activation=self.hidden_activation,
                        output_activation=self.output_activation,
                        output_low=self.output_low, output_high=self.output_high)

    def same_architecture(self, other):
        return (self.layer_dims == other.layer_dims
                and self.hidden_activation == other.hidden_activation
                and self.output_activation == other.output_activation)

    def _hidden(self, z):
        if self.hidden_activation == "relu":
            return np.maximum(z, 0.0)
        return np.tanh(z)

    def _output(self, z):
        if self.output_activation == "linear":
            return z
        return self.output_low + (self.output_high - self.output_low) * (np.tanh(z) + 1) / 2

    def _as_batch(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = x[None, :] if single else x
        if X.ndim != 2 or X.shape[1] != self.layer_dims[0]:
            raise ValueError(f"Expected input of length {self.layer_dims[0]}, got shape {x.shape}")
        return X, single

    def _forward(self, X):
        """ Pre-activations and activations of every layer """
        activations, preactivations = [X], []
        a = X
        last = len(self.weights) - 1
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ W + b
            preactivations.append(z)
            a = self._output(z) if k == last else self._hidden(z)
            activations.append(a)
        return preactivations, activations

    def forward(self, x):
        """ Evaluate the net on one input vector or a batch of rows """
        X, single = self._as_batch(x)
        _, activations = self._forward(X)
        out = activations[-1]
        if not np.all(np.isfinite(out)):
            raise NumericalFault("Non-finite network output", field="output")
        return out[0] if single else out

    __call__ = forward

    def backward(self, x, upstream_grad):
        """ Reverse mode gradients of Σ upstream_grad · forward(x).

        :returns: (parameter gradients in `params` order, gradient with
            respect to the input, shaped like x)
        """
        X, single = self._as_batch(x)
        G = np.asarray(upstream_grad, dtype=float)
        G = G[None, :] if single else G
        if G.shape != (X.shape[0], self.layer_dims[-1]):
            raise ValueError(f"Upstream gradient shape {G.shape} does not match output")

        preactivations, activations = self._forward(X)
        last = len(self.weights) - 1
        grads = [None] * (2 * len(self.weights))
        delta = G
        for k in range(last, -1, -1):
            z = preactivations[k]
            if k == last:
                if self.output_activation == "scaled_tanh":
                    delta = delta * (self.output_high - self.output_low) / 2 * (1 - np.tanh(z) ** 2)
            elif self.hidden_activation == "relu":
                delta = delta * (z > 0)
            else:
                delta = delta * (1 - activations[k + 1] ** 2)
            grads[2 * k] = activations[k].T @ delta
            grads[2 * k + 1] = delta.sum(axis=0)
            delta = delta @ self.weights[k].T
        return grads, (delta[0] if single else delta)

    def to_arrays(self, prefix=""):
        """ Parameters and a layer-dims header, keyed for np.savez """
        arrays = {
            prefix + "layer_dims": np.array(self.layer_dims),
            prefix + "activations": np.array([self.hidden_activation, self.output_activation]),
        }
        if self.output_activation == "scaled_tanh":
            arrays[prefix + "output_low"] = self.output_low
            arrays[prefix + "output_high"] = self.output_high
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            arrays[f"{prefix}W{k}"] = W
            arrays[f"{prefix}b{k}"] = b
        return arrays

    @classmethod
    def from_arrays(cls, arrays, prefix=""):
        layer_dims = [int(d) for d in arrays[prefix + "layer_dims"]]
        hidden, output = [str(x) for x in arrays[prefix + "activations"]]
        n_layers = len(layer_dims) - 1
        return cls(layer_dims,
                   [arrays[f"{prefix}W{k}"] for k in range(n_layers)],
                   [arrays[f"{prefix}b{k}"] for k in range(n_layers)],
                   hidden_activation=hidden, output_activation=output,
                   output_low=arrays.get(prefix + "output_low"),
                   output_high=arrays.get(prefix + "output_high"))

    def save(self, key, storage):
        """ Write the net as an .npz checkpoint through a Storage """
        buf = BytesIO()
        np.savez(buf, **self.to_arrays())
        buf.seek(0)
        storage.save(key, buf, "npz")

    @classmethod
    def load(cls, stream):
        """ Read a net saved with save() from a bytes stream """
        with np.load(stream, allow_pickle=False) as data:
            return cls.from_arrays({k: data[k] for k in data.files})

    def __repr__(self):
        return "<{cls}: {dims} {h}/{o}>".format(cls=type(self).__name__,
                                                dims="-".join(str(d) for d in self.layer_dims),
                                                h=self.hidden_activation,
                                                o=self.output_activation)


class AdamState(object):
    """ Moment accumulators and hyperparameters of one Adam optimizer """

    def __init__(self, shapes, lr: float=1e-3, beta1: float=0.9, beta2: float=0.999,
                 eps: float=1e-8):
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    @classmethod
    def for_params(cls, params, lr: float=1e-3, **kwargs):
        return cls([p.shape for p in params], lr=lr, **kwargs)

    def to_arrays(self, prefix=""):
        arrays = {prefix + "t": np.array(self.t),
                  prefix + "hyper": np.array([self.lr, self.beta1, self.beta2, self.eps])}
        for k, (m, v) in enumerate(zip(self.m, self.v)):
            arrays[f"{prefix}m{k}"] = m
            arrays[f"{prefix}v{k}"] = v
        return arrays

    @classmethod
    def from_arrays(cls, arrays, prefix=""):
        lr, beta1, beta2, eps = (float(x) for x in arrays[prefix + "hyper"])
        n = sum(1 for k in arrays if k.startswith(prefix + "m")
                and k[len(prefix) + 1:].isdigit())
        state = cls([], lr=lr, beta1=beta1, beta2=beta2, eps=eps)
        state.m = [np.array(arrays[f"{prefix}m{k}"]) for k in range(n)]
        state.v = [np.array(arrays[f"{prefix}v{k}"]) for k in range(n)]
        state.t = int(arrays[prefix + "t"])
        return state


def adam_step(params, grads, state: AdamState):
    """ One bias corrected Adam descent step, in place.
    Callers ascend by passing negated gradients.
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ValueError("Parameters, gradients and optimizer state do not match")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape:
            raise ValueError(f"Gradient shape {g.shape} does not match parameter {p.shape}")
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * g * g
        m_hat = m / (1 - b1 ** state.t)
        v_hat = v / (1 - b2 ** state.t)
        p -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return params, state


def soft_update(target: DenseNet, online: DenseNet, tau: float):
    """ target <- (1 - tau) target + tau online, in place """
    if not 0 < tau <= 1:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    if not target.same_architecture(online):
        raise ValueError(f"Architectures differ: {target!r} vs {online!r}")
    for t, o in zip(target.params, online.params):
        if tau == 1:
            t[...] = o
        else:
            t *= (1 - tau)
            t += tau * o
    return target
