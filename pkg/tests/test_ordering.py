import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from dying_channels import (ChannelModel, DiscreteWeibull, FiniteUniform, Geometric,
                            StrassenModel, combined_order, dp_schedule)
from dying_channels.ordering import output_degradation, stochastic_dominance


@pytest.mark.parametrize("a,b", [(0.01, 0.05), (0.05, 0.3), (0.0, 0.2), (0.1, 0.1)])
def test_bsc_cascade_witness(a, b):
    better, worse = ChannelModel(np.array([[1 - a, a], [a, 1 - a]])), ChannelModel.bsc(b)
    v = output_degradation(better, worse)
    assert v.degraded
    c = oracles.bsc_cascade_crossover(a, b)
    assert v.witness_matrix == pytest.approx(np.array([[1 - c, c], [c, 1 - c]]), abs=1e-7)
    assert v.residual <= 1e-8
    assert np.allclose(v.witness_matrix.sum(axis=1), 1.0)


def test_better_bsc_is_not_degraded_from_worse():
    v = output_degradation(ChannelModel.bsc(0.2), ChannelModel.bsc(0.05))
    assert not v.degraded and v.witness_matrix is None


def test_erasure_channel_is_degraded_from_identity():
    W = ChannelModel(np.array([[0.7, 0.0, 0.3], [0.0, 0.7, 0.3]]))
    v = output_degradation(ChannelModel(np.eye(2)), W)
    assert v.degraded
    assert np.abs(np.eye(2) @ v.witness_matrix - W.matrix).max() <= 1e-8


def test_input_size_mismatch_raises():
    with pytest.raises(ValueError):
        output_degradation(ChannelModel(np.eye(3)), ChannelModel.bsc(0.1))


def test_survival_dominance_and_witness():
    v = stochastic_dominance(Geometric(0.2), Geometric(0.05))
    assert v.dominates and v.witness_t is None
    v = stochastic_dominance(Geometric(0.05), Geometric(0.2))
    assert not v.dominates and v.witness_t == 1
    # Crossing survival curves: neither dominates.
    u, w = FiniteUniform(10, 12), Geometric(0.02)
    assert not stochastic_dominance(u, w).dominates
    assert not stochastic_dominance(w, u).dominates


def test_combined_verdicts():
    good, bad = (ChannelModel.bsc(0.01), Geometric(0.02)), (ChannelModel.bsc(0.1), Geometric(0.1))
    assert combined_order(bad, good).verdict == "ch2>=ch1"
    assert combined_order(good, bad).verdict == "ch1>=ch2"
    assert combined_order(good, good).verdict == "equivalent"
    mixed = (ChannelModel.bsc(0.01), Geometric(0.1))
    other = (ChannelModel.bsc(0.1), Geometric(0.02))
    assert combined_order(mixed, other).verdict == "incomparable"


@settings(max_examples=25, deadline=None)
@given(st.floats(0.001, 0.1), st.floats(0.0, 0.1), st.floats(0.01, 0.2), st.floats(0.0, 0.2),
       st.floats(0.5, 2.0))
def test_better_pair_never_has_less_volume(e_good, de, a_good, da, beta):
    e_bad, a_bad = min(e_good + de, 0.45), min(a_good + da, 0.9)
    good = (ChannelModel.bsc(e_good), DiscreteWeibull(a_good, beta))
    bad = (ChannelModel.bsc(e_bad), DiscreteWeibull(a_bad, beta))
    v = combined_order(bad, good, horizon=60)
    assert v.verdict in ("ch2>=ch1", "equivalent")
    vols = [dp_schedule(d, StrassenModel(w.scalars(), 1e-3), 60, certify=False).volume
            for w, d in (good, bad)]
    assert vols[0] >= vols[1] - 1e-12
