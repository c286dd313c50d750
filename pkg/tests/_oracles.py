"""Independent reference computations shared by the test modules.

Everything here is deliberately written the slow, obvious way (explicit
loops, exhaustive enumeration) so it cannot share a bug with the library
code it checks.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

import numpy as np

from infercomm.params import ParameterStore


def finite_difference_grad(
    f: Callable[[], float],
    store: ParameterStore,
    names: Sequence[str],
    h: float = 1e-5,
    coords: Iterable[int] | None = None,
) -> np.ndarray:
    """Central-difference gradient of the scalar `f()` wrt the named entries.

    Returns a flat vector aligned with `store.flat_values(names)`. With
    `coords`, only those flat indices are probed (others left NaN).
    """
    base = store.flat_values(names).copy()
    out = np.full(base.size, np.nan)
    indices = range(base.size) if coords is None else coords
    for k in indices:
        bumped = base.copy()
        bumped[k] = base[k] + h
        store.set_flat_values(names, bumped)
        up = f()
        bumped[k] = base[k] - h
        store.set_flat_values(names, bumped)
        down = f()
        out[k] = (up - down) / (2.0 * h)
    store.set_flat_values(names, base)
    return out


def assert_grads_close(
    analytic: np.ndarray,
    numeric: np.ndarray,
    rtol: float = 1e-4,
    atol: float = 1e-7,
) -> None:
    """Per-coordinate |a - b| <= atol + rtol * max(|a|, |b|).

    rtol is the spec's relative-error bound; atol absorbs central-difference
    roundoff on coordinates whose true gradient is (near) zero, where a pure
    ratio is meaningless.
    """
    mask = ~np.isnan(numeric)
    a, b = np.asarray(analytic)[mask], np.asarray(numeric)[mask]
    gap = np.abs(a - b)
    bound = atol + rtol * np.maximum(np.abs(a), np.abs(b))
    worst = np.argmax(gap - bound)
    assert np.all(gap <= bound), (
        f"gradient mismatch at flat coord {np.flatnonzero(mask)[worst]}: "
        f"analytic={a[worst]:.6e} numeric={b[worst]:.6e}"
    )


def softmax_direct(q: Sequence[float], lam: float) -> np.ndarray:
    """Elementwise exp/sum softmax, no stabilization tricks."""
    e = [math.exp(lam * v) for v in q]
    s = sum(e)
    return np.array([v / s for v in e])


def kl_direct(p: Sequence[float], q: Sequence[float]) -> float:
    """Plain elementwise sum with the 0 log 0 = 0 convention."""
    total = 0.0
    for pk, qk in zip(p, q):
        if pk > 0.0:
            total += pk * math.log(pk / qk)
    return total


def mlp_forward_loops(weights, biases, x, slope=0.01, nonlinearity="leaky-relu"):
    """Layer-by-layer, neuron-by-neuron forward pass."""
    h = list(x)
    for l, (w, b) in enumerate(zip(weights, biases)):
        out = []
        for j in range(w.shape[1]):
            acc = b[j]
            for i in range(w.shape[0]):
                acc += h[i] * w[i, j]
            out.append(acc)
        if l != len(weights) - 1:
            if nonlinearity == "leaky-relu":
                out = [v if v > 0 else slope * v for v in out]
            else:
                out = [math.tanh(v) for v in out]
        h = out
    return np.array(h)


def lstm_cell_by_hand(wx, wh, b, x, h, c):
    """One LSTM cell step, gate order (input, forget, cell, output)."""
    hs = wh.shape[0]
    gates = x @ wx + h @ wh + b
    sig = lambda v: 1.0 / (1.0 + np.exp(-v))
    i = sig(gates[:hs])
    f = sig(gates[hs : 2 * hs])
    g = np.tanh(gates[2 * hs : 3 * hs])
    o = sig(gates[3 * hs :])
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, c_new


def conditional_dist_by_table(q_table: np.ndarray, i: int, joint: Sequence[int], lam: float) -> np.ndarray:
    """P(a_i | a_-i) over an explicit joint Q table, by direct enumeration."""
    n_actions = q_table.shape[i]
    vals = []
    for k in range(n_actions):
        idx = list(joint)
        idx[i] = k
        vals.append(q_table[tuple(idx)])
    return softmax_direct(vals, lam)


def marginal_dist_by_table(q_table: np.ndarray, i: int, j: int, joint: Sequence[int], lam: float) -> np.ndarray:
    """sum_{a_j} of the joint softmax over (a_i, a_j), all else fixed."""
    n_i, n_j = q_table.shape[i], q_table.shape[j]
    raw = np.zeros((n_i, n_j))
    for ai in range(n_i):
        for aj in range(n_j):
            idx = list(joint)
            idx[i], idx[j] = ai, aj
            raw[ai, aj] = math.exp(lam * q_table[tuple(idx)])
    raw /= raw.sum()
    return raw.sum(axis=1)


def causal_effect_by_table(q_table: np.ndarray, i: int, j: int, joint: Sequence[int], lam: float) -> float:
    cond = conditional_dist_by_table(q_table, i, joint, lam)
    marg = marginal_dist_by_table(q_table, i, j, joint, lam)
    return kl_direct(np.maximum(cond, 1e-10) / np.maximum(cond, 1e-10).sum(),
                     np.maximum(marg, 1e-10) / np.maximum(marg, 1e-10).sum())
