import numpy as np
import pytest

from infercomm.checkpoint import load_checkpoint, save_checkpoint
from infercomm.errors import ConfigurationError
from infercomm.optim import Adam
from infercomm.params import ParameterStore


def build_store():
    rng = np.random.default_rng(9)
    store = ParameterStore()
    store.add("critic/W0", rng.normal(size=(6, 4)))
    store.add("critic/b0", rng.normal(size=4))
    store.add("policy/W0", rng.normal(size=(3, 2)))
    store.version = 17
    return store


def test_roundtrip_is_bit_exact(tmp_path):
    store = build_store()
    opt = Adam(store, lr=0.01, names=["critic/W0", "critic/b0"])
    store.grads("critic/W0")[...] = 0.1
    store.grads("critic/b0")[...] = -0.2
    opt.step()

    first = tmp_path / "a.ckpt"
    save_checkpoint(first, store, {"experiment": "x", "phase": 1, "episode": 10}, {"critic": opt})

    loaded, meta, opt_states = load_checkpoint(first)
    assert meta == {"experiment": "x", "phase": 1, "episode": 10}
    assert loaded.version == store.version
    for name in store.entries:
        np.testing.assert_array_equal(loaded.values(name), store.values(name))

    reopt = Adam(loaded, lr=0.01, names=["critic/W0", "critic/b0"])
    reopt.load_state_dict(opt_states["critic"])
    second = tmp_path / "b.ckpt"
    save_checkpoint(second, loaded, meta, {"critic": reopt})
    assert first.read_bytes() == second.read_bytes()


def test_rejects_non_checkpoint_file(tmp_path):
    bogus = tmp_path / "bogus.ckpt"
    bogus.write_bytes(b"not a checkpoint at all")
    with pytest.raises(ConfigurationError):
        load_checkpoint(bogus)


def test_rejects_truncation_noise(tmp_path):
    store = build_store()
    path = tmp_path / "c.ckpt"
    save_checkpoint(path, store, {}, {})
    path.write_bytes(path.read_bytes() + b"\x00" * 8)
    with pytest.raises(ConfigurationError):
        load_checkpoint(path)
