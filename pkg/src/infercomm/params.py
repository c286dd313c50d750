"""Named, versioned flat parameter storage with paired gradient buffers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .autodiff import Node
from .errors import ConfigurationError, NumericError


@dataclass
class Entry:
    values: np.ndarray
    grads: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape


class ParameterStore:
    """Single-writer container for every learned array in a run.

    Invariants: values and grads of an entry share its shape, values stay
    finite, and `version` strictly increases on every optimizer step.
    Read-only copies (see `copy`) may be evaluated concurrently; the trainer
    owns the sole mutable instance.
    """

    def __init__(self) -> None:
        self.entries: dict[str, Entry] = {}
        self.version: int = 0

    def add(self, name: str, values: np.ndarray) -> None:
        if name in self.entries:
            raise ConfigurationError(f"parameter {name!r} already exists")
        values = np.array(values, dtype=np.float64)
        if not np.all(np.isfinite(values)):
            raise NumericError(f"parameter {name!r} initialized with non-finite values")
        self.entries[name] = Entry(values=values, grads=np.zeros_like(values))

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def values(self, name: str) -> np.ndarray:
        return self.entries[name].values

    def grads(self, name: str) -> np.ndarray:
        return self.entries[name].grads

    def names(self, prefix: str = "") -> list[str]:
        return [n for n in self.entries if n.startswith(prefix)]

    def node(self, name: str) -> Node:
        """Graph leaf for this parameter; backward accumulates into its buffer."""
        entry = self.entries[name]

        def pull(g: np.ndarray) -> None:
            if g.shape != entry.grads.shape:
                raise ConfigurationError(
                    f"gradient shape {g.shape} != parameter {name!r} shape {entry.grads.shape}"
                )
            entry.grads += g

        return Node(entry.values, (), pull)

    def zero_grads(self, names: Optional[Iterable[str]] = None) -> None:
        for name in names if names is not None else self.entries:
            self.entries[name].grads[...] = 0.0

    def copy(self) -> "ParameterStore":
        out = ParameterStore()
        out.version = self.version
        for name, entry in self.entries.items():
            out.entries[name] = Entry(values=entry.values.copy(), grads=np.zeros_like(entry.values))
        return out

    def copy_values_from(self, other: "ParameterStore", src_prefix: str, dst_prefix: str) -> None:
        """Overwrite every `dst_prefix` entry from the matching `src_prefix` entry."""
        for name in self.names(dst_prefix):
            src = src_prefix + name[len(dst_prefix):]
            self.entries[name].values[...] = other.entries[src].values

    def flat_values(self, names: Iterable[str]) -> np.ndarray:
        return np.concatenate([self.entries[n].values.ravel() for n in names])

    def flat_grads(self, names: Iterable[str]) -> np.ndarray:
        return np.concatenate([self.entries[n].grads.ravel() for n in names])

    def set_flat_values(self, names: Iterable[str], flat: np.ndarray) -> None:
        offset = 0
        for n in names:
            entry = self.entries[n]
            size = entry.values.size
            entry.values[...] = flat[offset : offset + size].reshape(entry.shape)
            offset += size


def uniform_fan_in(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) init."""
    bound = 1.0 / np.sqrt(float(fan_in))
    return rng.uniform(-bound, bound, size=shape)
