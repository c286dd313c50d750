"""Seeding discipline: one root seed fans out into named, independent substreams.

Every source of randomness in a run (environment dynamics, policy sampling,
replay sampling, weight init, ...) draws from its own generator so that
changing one component never perturbs the others. Substream derivation is
a pure function of (root_seed, name), stable across processes and platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np

# The four streams every training run uses; callers may derive extra ones.
STANDARD_STREAMS = ("env", "policy-sampling", "buffer-sampling", "init")


def _name_key(name: str) -> int:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def substream(root_seed: int, name: str) -> np.random.Generator:
    """Generator for the substream `name` of `root_seed`."""
    return np.random.default_rng(np.random.SeedSequence([int(root_seed), _name_key(name)]))


def substreams(root_seed: int, names: tuple[str, ...] = STANDARD_STREAMS) -> dict[str, np.random.Generator]:
    return {name: substream(root_seed, name) for name in names}
