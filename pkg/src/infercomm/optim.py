"""Gradient-descent optimizers over a ParameterStore.

Adam is the default for every learned component; plain SGD exists for
tests where the update rule must be exactly `p -= lr * g`. An optimizer
instance owns a fixed set of entry names so disjoint components (critic,
policy+encoder, prior) keep independent moment state.
"""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from .errors import DivergenceError
from .params import ParameterStore


class Sgd:
    def __init__(self, store: ParameterStore, lr: float, names: Optional[Iterable[str]] = None):
        self.store = store
        self.lr = lr
        self.names = list(names) if names is not None else list(store.entries)

    def step(self) -> None:
        _check_finite(self.store, self.names)
        for name in self.names:
            entry = self.store.entries[name]
            entry.values -= self.lr * entry.grads
        self.store.zero_grads(self.names)
        self.store.version += 1

    def state_dict(self) -> dict:
        return {"kind": "sgd", "t": 0, "moments": {}}

    def load_state_dict(self, state: dict) -> None:
        pass


class Adam:
    def __init__(
        self,
        store: ParameterStore,
        lr: float,
        names: Optional[Iterable[str]] = None,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.store = store
        self.lr = lr
        self.names = list(names) if names is not None else list(store.entries)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m = {n: np.zeros_like(store.values(n)) for n in self.names}
        self.v = {n: np.zeros_like(store.values(n)) for n in self.names}

    def step(self) -> None:
        _check_finite(self.store, self.names)
        self.t += 1
        b1t = 1.0 - self.beta1**self.t
        b2t = 1.0 - self.beta2**self.t
        for name in self.names:
            entry = self.store.entries[name]
            g = entry.grads
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            entry.values -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)
        self.store.zero_grads(self.names)
        self.store.version += 1

    def state_dict(self) -> dict:
        return {
            "kind": "adam",
            "t": self.t,
            "moments": {n: (self.m[n].copy(), self.v[n].copy()) for n in self.names},
        }

    def load_state_dict(self, state: dict) -> None:
        self.t = int(state["t"])
        for n, (m, v) in state["moments"].items():
            self.m[n][...] = m
            self.v[n][...] = v


def _check_finite(store: ParameterStore, names: Iterable[str]) -> None:
    for name in names:
        if not np.all(np.isfinite(store.grads(name))):
            raise DivergenceError(f"non-finite gradient in parameter {name!r}")
