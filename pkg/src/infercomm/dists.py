"""Finite action distributions: temperature softmax and KL divergence.

A distribution here is a plain float64 vector (or a batch of row vectors)
with entries in [0, 1] summing to 1. Before any KL both arguments are
floored at FLOOR and renormalized, which keeps log() finite even for the
near-deterministic softmaxes a sharp temperature produces.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, NumericError

FLOOR = 1e-10


def softmax_temperature(q: np.ndarray, lam: float) -> np.ndarray:
    """probs[k] = exp(lam*q[k]) / sum_k' exp(lam*q[k']), max-subtracted.

    Works on a vector or rowwise on a (B, K) batch.
    """
    if lam <= 0.0:
        raise ConfigurationError(f"temperature must be positive, got {lam}")
    q = np.asarray(q, dtype=np.float64)
    if not np.all(np.isfinite(q)):
        raise NumericError("softmax_temperature requires finite values")
    z = lam * q
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def floor_and_renormalize(p: np.ndarray, floor: float = FLOOR) -> np.ndarray:
    p = np.maximum(np.asarray(p, dtype=np.float64), floor)
    return p / p.sum(axis=-1, keepdims=True)


def kl_divergence(p: np.ndarray, q: np.ndarray, floor: float = FLOOR) -> np.ndarray | float:
    """sum_k p[k] * log(p[k] / q[k]) with 0*log 0 := 0, never negative.

    Vector arguments give a float; (B, K) batches give a (B,) array.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ConfigurationError(f"KL shape mismatch: {p.shape} vs {q.shape}")
    pf = floor_and_renormalize(p, floor)
    qf = floor_and_renormalize(q, floor)
    out = np.maximum((pf * (np.log(pf) - np.log(qf))).sum(axis=-1), 0.0)
    return float(out) if out.ndim == 0 else out


def validate_distribution(p: np.ndarray, n_actions: int | None = None, tol: float = 1e-9) -> None:
    """Raise unless `p` is a valid probability vector (used by invariant tests)."""
    p = np.asarray(p)
    if n_actions is not None and p.shape[-1] != n_actions:
        raise ConfigurationError(f"distribution length {p.shape[-1]} != {n_actions}")
    if np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
        raise NumericError("distribution entries outside [0, 1]")
    if np.any(np.abs(p.sum(axis=-1) - 1.0) > tol):
        raise NumericError("distribution does not sum to 1")
