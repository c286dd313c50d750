"""Dense network definitions over a ParameterStore.

Every network exposes two evaluation paths that produce bit-identical
values: `forward` (plain numpy, used in rollouts and evaluation) and
`forward_graph` (autodiff nodes, used when gradients are needed). Keeping
the hot rollout path free of graph bookkeeping is what makes desk-scale
training runs affordable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import autodiff as ad
from .errors import ConfigurationError
from .params import ParameterStore, uniform_fan_in

LEAKY_SLOPE = 0.01

NONLINEARITIES = ("leaky-relu", "tanh")


def stable_sigmoid(x: np.ndarray) -> np.ndarray:
    v = np.clip(x, -500.0, 500.0)
    return np.where(v >= 0.0, 1.0 / (1.0 + np.exp(-v)), np.exp(v) / (1.0 + np.exp(v)))


@dataclass(frozen=True)
class NetworkSpec:
    """Shape contract for a learned component.

    `layer_sizes` runs input -> hidden... -> output and must contain at
    least one hidden layer; 128 is the default hidden width throughout.
    """

    layer_sizes: tuple[int, ...]
    nonlinearity: str = "leaky-relu"
    recurrent: bool = False

    def __post_init__(self) -> None:
        if len(self.layer_sizes) < 3:
            raise ConfigurationError("NetworkSpec needs at least one hidden layer")
        if any(s <= 0 for s in self.layer_sizes):
            raise ConfigurationError(f"non-positive layer size in {self.layer_sizes}")
        if self.nonlinearity not in NONLINEARITIES:
            raise ConfigurationError(f"unknown nonlinearity {self.nonlinearity!r}")

    @staticmethod
    def mlp(n_in: int, n_out: int, hidden: int = 128, depth: int = 2,
            nonlinearity: str = "leaky-relu") -> "NetworkSpec":
        return NetworkSpec((n_in, *([hidden] * depth), n_out), nonlinearity)


class Mlp:
    """Chain of dense layers; activation between layers, linear output."""

    def __init__(
        self,
        store: ParameterStore,
        prefix: str,
        layer_sizes: Sequence[int],
        nonlinearity: str = "leaky-relu",
        rng: Optional[np.random.Generator] = None,
    ):
        if len(layer_sizes) < 2:
            raise ConfigurationError("Mlp needs at least input and output sizes")
        if nonlinearity not in NONLINEARITIES:
            raise ConfigurationError(f"unknown nonlinearity {nonlinearity!r}")
        self.store = store
        self.prefix = prefix
        self.layer_sizes = tuple(int(s) for s in layer_sizes)
        self.nonlinearity = nonlinearity
        if f"{prefix}/W0" not in store:
            if rng is None:
                raise ConfigurationError(f"parameters for {prefix!r} missing and no init rng given")
            for l, (fan_in, fan_out) in enumerate(zip(self.layer_sizes, self.layer_sizes[1:])):
                store.add(f"{prefix}/W{l}", uniform_fan_in(rng, (fan_in, fan_out), fan_in))
                store.add(f"{prefix}/b{l}", np.zeros(fan_out))

    @classmethod
    def from_spec(cls, store: ParameterStore, prefix: str, spec: NetworkSpec,
                  rng: Optional[np.random.Generator] = None) -> "Mlp":
        return cls(store, prefix, spec.layer_sizes, spec.nonlinearity, rng)

    @property
    def param_names(self) -> list[str]:
        return [f"{self.prefix}/{kind}{l}" for l in range(len(self.layer_sizes) - 1)
                for kind in ("W", "b")]

    @property
    def n_in(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_out(self) -> int:
        return self.layer_sizes[-1]

    def _activate(self, h: np.ndarray) -> np.ndarray:
        if self.nonlinearity == "leaky-relu":
            return np.where(h > 0.0, h, LEAKY_SLOPE * h)
        return np.tanh(h)

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        h = x[None, :] if squeeze else x
        if h.shape[1] != self.n_in:
            raise ConfigurationError(
                f"{self.prefix}: input width {h.shape[1]} != expected {self.n_in}"
            )
        last = len(self.layer_sizes) - 2
        for l in range(last + 1):
            h = h @ self.store.values(f"{self.prefix}/W{l}") + self.store.values(f"{self.prefix}/b{l}")
            if l != last:
                h = self._activate(h)
        return h[0] if squeeze else h

    def forward_graph(self, x: Union[ad.Node, np.ndarray]) -> ad.Node:
        h = ad.as_node(x)
        if h.value.shape[-1] != self.n_in:
            raise ConfigurationError(
                f"{self.prefix}: input width {h.value.shape[-1]} != expected {self.n_in}"
            )
        last = len(self.layer_sizes) - 2
        for l in range(last + 1):
            h = ad.linear(h, self.store.node(f"{self.prefix}/W{l}"), self.store.node(f"{self.prefix}/b{l}"))
            if l != last:
                h = ad.leaky_relu(h, LEAKY_SLOPE) if self.nonlinearity == "leaky-relu" else ad.tanh(h)
        return h


class LstmEncoder:
    """Stacked LSTM; the final top-layer hidden state summarizes a sequence.

    Gate layout in the fused weight matrices is (input, forget, cell, output);
    forget-gate biases start at 1.0. An empty sequence encodes to the initial
    (zero) hidden state.
    """

    def __init__(
        self,
        store: ParameterStore,
        prefix: str,
        input_size: int,
        hidden_size: int,
        layers: int = 2,
        rng: Optional[np.random.Generator] = None,
    ):
        self.store = store
        self.prefix = prefix
        self.input_size = input_size
        self.hidden_size = hidden_size
        self.layers = layers
        if f"{prefix}/l0/Wx" not in store:
            if rng is None:
                raise ConfigurationError(f"parameters for {prefix!r} missing and no init rng given")
            for l in range(layers):
                n_in = input_size if l == 0 else hidden_size
                store.add(f"{prefix}/l{l}/Wx", uniform_fan_in(rng, (n_in, 4 * hidden_size), n_in))
                store.add(f"{prefix}/l{l}/Wh", uniform_fan_in(rng, (hidden_size, 4 * hidden_size), hidden_size))
                bias = np.zeros(4 * hidden_size)
                bias[hidden_size : 2 * hidden_size] = 1.0
                store.add(f"{prefix}/l{l}/b", bias)

    @property
    def param_names(self) -> list[str]:
        return [f"{self.prefix}/l{l}/{kind}" for l in range(self.layers)
                for kind in ("Wx", "Wh", "b")]

    def _cell(self, x: np.ndarray, h: np.ndarray, c: np.ndarray, l: int) -> tuple[np.ndarray, np.ndarray]:
        gates = (
            x @ self.store.values(f"{self.prefix}/l{l}/Wx")
            + h @ self.store.values(f"{self.prefix}/l{l}/Wh")
            + self.store.values(f"{self.prefix}/l{l}/b")
        )
        hs = self.hidden_size
        i = stable_sigmoid(gates[:, :hs])
        f = stable_sigmoid(gates[:, hs : 2 * hs])
        g = np.tanh(gates[:, 2 * hs : 3 * hs])
        o = stable_sigmoid(gates[:, 3 * hs :])
        c_new = f * c + i * g
        h_new = o * np.tanh(c_new)
        return h_new, c_new

    def encode(self, seq: np.ndarray) -> np.ndarray:
        """(B, T, input_size) -> (B, hidden_size); T may be zero."""
        seq = np.asarray(seq, dtype=np.float64)
        if seq.ndim == 2:
            seq = seq[None]
        batch, steps = seq.shape[0], seq.shape[1]
        if steps == 0:
            return np.zeros((batch, self.hidden_size))
        if seq.shape[2] != self.input_size:
            raise ConfigurationError(
                f"{self.prefix}: message width {seq.shape[2]} != expected {self.input_size}"
            )
        h = [np.zeros((batch, self.hidden_size)) for _ in range(self.layers)]
        c = [np.zeros((batch, self.hidden_size)) for _ in range(self.layers)]
        for t in range(steps):
            x = seq[:, t, :]
            for l in range(self.layers):
                h[l], c[l] = self._cell(x, h[l], c[l], l)
                x = h[l]
        return h[-1]

    def _cell_graph(self, x: ad.Node, h: ad.Node, c: ad.Node, l: int) -> tuple[ad.Node, ad.Node]:
        gates = ad.add(
            ad.add(
                ad.matmul(x, self.store.node(f"{self.prefix}/l{l}/Wx")),
                ad.matmul(h, self.store.node(f"{self.prefix}/l{l}/Wh")),
            ),
            self.store.node(f"{self.prefix}/l{l}/b"),
        )
        hs = self.hidden_size
        i = ad.sigmoid(ad.slice_cols(gates, 0, hs))
        f = ad.sigmoid(ad.slice_cols(gates, hs, 2 * hs))
        g = ad.tanh(ad.slice_cols(gates, 2 * hs, 3 * hs))
        o = ad.sigmoid(ad.slice_cols(gates, 3 * hs, 4 * hs))
        c_new = ad.add(ad.mul(f, c), ad.mul(i, g))
        h_new = ad.mul(o, ad.tanh(c_new))
        return h_new, c_new

    def encode_graph(self, steps: Sequence[Union[ad.Node, np.ndarray]], batch: int) -> ad.Node:
        """Graph twin of `encode`; `steps` is a list of (B, input_size) inputs."""
        if len(steps) == 0:
            return ad.constant(np.zeros((batch, self.hidden_size)))
        h = [ad.constant(np.zeros((batch, self.hidden_size))) for _ in range(self.layers)]
        c = [ad.constant(np.zeros((batch, self.hidden_size))) for _ in range(self.layers)]
        for step in steps:
            x = ad.as_node(step)
            for l in range(self.layers):
                h[l], c[l] = self._cell_graph(x, h[l], c[l], l)
                x = h[l]
        return h[-1]
