import numpy as np
import pytest

from netgames.lib.replay import Batch, ReplayBuffer, Transition
from netgames.lib.utils import NumericalFault


def _transition(k):
    return Transition(obs=[float(k)], action=[0.0], reward=float(k), next_obs=[k + 1.0])


def test_fifo_eviction():
    buf = ReplayBuffer(5, np.random.default_rng(0))
    for k in range(8):
        buf.push(_transition(k))
    assert len(buf) == 5
    assert [tr.reward for tr in buf] == [3.0, 4.0, 5.0, 6.0, 7.0]


def test_uniform_sampling():
    buf = ReplayBuffer(10, np.random.default_rng(1))
    for k in range(10):
        buf.push(_transition(k))
    batch = buf.sample(100000)
    counts = np.bincount(batch.reward.astype(int), minlength=10)
    assert np.all(np.abs(counts / 100000 - 0.1) <= 0.005)


def test_sampling_is_reproducible():
    def draw(seed):
        buf = ReplayBuffer(10, np.random.default_rng(seed))
        for k in range(10):
            buf.push(_transition(k))
        return buf.sample(20).reward

    assert np.array_equal(draw(3), draw(3))


def test_sample_shapes():
    buf = ReplayBuffer(10, np.random.default_rng(0))
    buf.push(Transition(obs=[1.0, 2.0], action=[0.5], reward=1.0, next_obs=[2.0, 3.0],
                        joint_action=[0.5, 0.7]))
    batch = buf.sample(4)
    assert isinstance(batch, Batch)
    assert len(batch) == 4
    assert batch.obs.shape == (4, 2)
    assert batch.action.shape == (4, 1)
    assert batch.critic_action.shape == (4, 2)
    assert batch.next_action is None
    assert not np.any(batch.terminal)


def test_errors():
    with pytest.raises(ValueError):
        ReplayBuffer(0, np.random.default_rng(0))
    buf = ReplayBuffer(3, np.random.default_rng(0))
    with pytest.raises(ValueError):
        buf.sample(1)
    with pytest.raises(ValueError):
        Transition(obs=[1.0], action=[0.0], reward=0.0, next_obs=[1.0, 2.0])
    with pytest.raises(NumericalFault):
        Transition(obs=[1.0], action=[0.0], reward=np.nan, next_obs=[1.0])
