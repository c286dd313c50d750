import numpy as np
import pytest

from infercomm.errors import DivergenceError
from infercomm.optim import Adam, Sgd
from infercomm.params import ParameterStore


def test_zero_gradients_are_a_fixed_point_for_adam():
    store = ParameterStore()
    store.add("w", np.array([1.0, -2.0, 3.0]))
    opt = Adam(store, lr=0.1)
    before = store.values("w").copy()
    opt.step()
    np.testing.assert_array_equal(store.values("w"), before)
    assert store.version == 1


def test_sgd_update_is_exact():
    store = ParameterStore()
    store.add("w", np.array([1.0, 2.0]))
    store.grads("w")[...] = np.array([0.5, -1.5])
    Sgd(store, lr=0.2).step()
    np.testing.assert_array_equal(store.values("w"), [1.0 - 0.2 * 0.5, 2.0 + 0.2 * 1.5])
    np.testing.assert_array_equal(store.grads("w"), [0.0, 0.0])


def test_version_strictly_increases_per_step():
    store = ParameterStore()
    store.add("w", np.zeros(2))
    opt = Sgd(store, lr=0.1)
    versions = []
    for _ in range(3):
        opt.step()
        versions.append(store.version)
    assert versions == [1, 2, 3]


def test_adam_converges_on_convex_quadratic():
    # loss = 0.5 * (w - target)' A (w - target), A positive definite
    store = ParameterStore()
    store.add("w", np.array([4.0, -3.0]))
    target = np.array([1.0, 2.0])
    a_mat = np.array([[2.0, 0.3], [0.3, 1.0]])
    opt = Adam(store, lr=0.08)

    def loss_and_grad():
        d = store.values("w") - target
        store.grads("w")[...] = a_mat @ d
        return 0.5 * d @ a_mat @ d

    initial = loss_and_grad()
    losses = []
    for _ in range(100):
        loss_and_grad()
        opt.step()
        losses.append(0.5 * (store.values("w") - target) @ a_mat @ (store.values("w") - target))
    # monotone after warm-up, and nearly solved at the end
    warm = losses[5:]
    assert all(b <= a + 1e-12 for a, b in zip(warm, warm[1:]))
    assert losses[-1] < 1e-3 * initial


def test_nan_gradient_raises_divergence_error_naming_parameter():
    store = ParameterStore()
    store.add("layer/W0", np.zeros(3))
    store.grads("layer/W0")[...] = np.array([0.0, np.nan, 0.0])
    opt = Adam(store, lr=0.1)
    with pytest.raises(DivergenceError, match="layer/W0"):
        opt.step()


def test_optimizer_only_touches_its_named_entries():
    store = ParameterStore()
    store.add("a", np.array([1.0]))
    store.add("b", np.array([1.0]))
    store.grads("a")[...] = 1.0
    store.grads("b")[...] = 1.0
    Sgd(store, lr=0.5, names=["a"]).step()
    assert store.values("a")[0] == 0.5
    assert store.values("b")[0] == 1.0
    assert store.grads("b")[0] == 1.0  # untouched, including its gradient


def test_adam_state_roundtrip():
    store = ParameterStore()
    store.add("w", np.array([1.0, 2.0]))
    opt = Adam(store, lr=0.05)
    store.grads("w")[...] = np.array([0.3, -0.4])
    opt.step()
    state = opt.state_dict()

    other = Adam(store, lr=0.05)
    other.load_state_dict(state)
    assert other.t == opt.t
    np.testing.assert_array_equal(other.m["w"], opt.m["w"])
    np.testing.assert_array_equal(other.v["w"], opt.v["w"])
