import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from exceptions import InsufficientDataError
from learners import (
    ModelFreeLearner,
    ModelFreeSettings,
    QTable,
    ReturnStats,
    ReturnSummary,
    mf_interval,
    q_update,
    record_returns,
    sample_std,
    t_quantile,
)


def summary_of(samples):
    samples = np.asarray(samples, dtype=float)
    return ReturnSummary(n=samples.size, total=float(samples.sum()), total_sq=float((samples**2).sum()))


def test_single_step_update():
    table = QTable.zeros(3, 2)
    q_update(table, 0, 0, 1.0, 1, gamma=0.9, eta=0.5, lam=0.0, greedy_action_taken=True)
    expected = np.zeros((3, 2))
    expected[0, 0] = 0.5
    assert_allclose(table.q, expected)
    assert np.all(table.trace == 0.0)


def test_zero_lambda_matches_one_step_q_learning():
    rng = np.random.default_rng(4)
    table = QTable.zeros(5, 3)
    plain = np.zeros((5, 3))
    for _ in range(200):
        s, a, s_next = int(rng.integers(5)), int(rng.integers(3)), int(rng.integers(5))
        r = float(rng.normal())
        q_update(table, s, a, r, s_next, gamma=0.9, eta=0.2, lam=0.0, greedy_action_taken=bool(rng.integers(2)))
        plain[s, a] += 0.2 * (r + 0.9 * plain[s_next].max() - plain[s, a])
    assert_allclose(table.q, plain)


def test_zero_td_error_leaves_table_unchanged():
    table = QTable.zeros(2, 2)
    table.q[:] = [[1.0, 0.0], [0.0, 0.0]]
    before = table.q.copy()
    q_update(table, 0, 0, 1.0, 1, gamma=0.5, eta=0.3, lam=0.9, greedy_action_taken=True)
    assert_allclose(table.q, before)


def test_traces_spread_credit_backwards():
    table = QTable.zeros(3, 1)
    q_update(table, 0, 0, 0.0, 1, gamma=1 - 1e-9, eta=1.0, lam=1.0, greedy_action_taken=True)
    q_update(table, 1, 0, 1.0, 2, gamma=1 - 1e-9, eta=1.0, lam=1.0, greedy_action_taken=True)
    assert table.q[0, 0] == pytest.approx(1.0, rel=1e-6)
    assert table.q[1, 0] == pytest.approx(1.0)


def test_exploratory_action_cuts_traces():
    table = QTable.zeros(3, 1)
    q_update(table, 0, 0, 0.0, 1, gamma=0.9, eta=1.0, lam=1.0, greedy_action_taken=True)
    q_update(table, 1, 0, 1.0, 2, gamma=0.9, eta=1.0, lam=1.0, greedy_action_taken=False)
    assert table.q[0, 0] == 0.0
    assert table.q[1, 0] == 1.0


@pytest.mark.parametrize("kwargs", [{"eta": 0.0}, {"gamma": 1.0}, {"lam": 1.5}])
def test_q_update_rejects_bad_rates(kwargs):
    rates = {"gamma": 0.9, "eta": 0.1, "lam": 0.5, **kwargs}
    with pytest.raises(ValueError):
        q_update(QTable.zeros(2, 1), 0, 0, 0.0, 1, greedy_action_taken=True, **rates)


def test_record_returns_geometric_sum():
    returns = record_returns([(0, 0, 1.0), (1, 0, 1.0), (2, 0, 1.0)], gamma=0.5)
    assert returns[0] == (0, 0, 1.75)
    assert returns[-1] == (2, 0, 1.0)


def test_record_returns_myopic():
    returns = record_returns([(0, 1, 2.0), (1, 0, -3.0)], gamma=0.0)
    assert [g for _, _, g in returns] == [2.0, -3.0]


def test_sample_std_examples():
    assert sample_std(summary_of([1, 3])) == pytest.approx(math.sqrt(2))
    assert sample_std(summary_of([5, 5, 5])) == 0.0
    assert sample_std(summary_of([0, 2, 4])) == pytest.approx(2.0)


def test_sample_std_needs_two_samples():
    with pytest.raises(InsufficientDataError):
        sample_std(summary_of([1.0]))


def test_return_stats_respect_cauchy_schwarz():
    stats = ReturnStats.zeros(2, 2)
    rng = np.random.default_rng(8)
    for _ in range(100):
        stats.add(int(rng.integers(2)), int(rng.integers(2)), float(rng.normal(3.0, 2.0)))
        mask = stats.n > 0
        assert np.all(stats.total_sq[mask] * stats.n[mask] >= stats.total[mask] ** 2 - 1e-9)


def test_t_quantile_matches_table():
    assert t_quantile(0.05, 3) == pytest.approx(3.182, abs=1e-3)
    assert t_quantile(0.05, 30) == pytest.approx(2.042, abs=1e-3)


def test_interval_from_samples():
    samples = [1.0, 1.0, 5.0, 5.0]
    summary = summary_of(samples)
    assert sample_std(summary) == pytest.approx(2.309, abs=1e-3)
    half_width, quantile = mf_interval(summary, 0.05, prior_half_width=100.0)
    assert quantile == pytest.approx(3.182, abs=1e-3)
    assert half_width == pytest.approx(quantile * sample_std(summary) / 2.0)


def test_interval_zero_spread_and_fallback():
    assert mf_interval(summary_of([2.0] * 10), 0.05, 50.0)[0] == 0.0
    half_width, quantile = mf_interval(summary_of([2.0]), 0.05, 50.0)
    assert half_width == 50.0
    assert quantile == pytest.approx(1.96, abs=1e-3)


def test_interval_shrinks_with_more_samples():
    widths = [mf_interval(ReturnSummary(n, n * 1.0, n * 1.0 + 4.0 * (n - 1)), 0.05, 1.0)[0] for n in range(2, 40)]
    assert all(a >= b for a, b in zip(widths, widths[1:]))


def test_prior_half_width_from_reward_span():
    assert ModelFreeSettings(gamma=0.9, reward_span=2.0).prior_half_width == pytest.approx(20.0)


def test_learner_converges_on_deterministic_chain():
    learner = ModelFreeLearner(1, 2, ModelFreeSettings(gamma=0.9, eta=0.1, lam=0.8, reward_span=1.0))
    for _ in range(2000):
        learner.observe(0, 0, 0.0, 1, False)
        learner.observe(1, 0, 1.0, 0, True)
        learner.end_episode(False)
    assert learner.action_values(0)[0] == pytest.approx(0.9, abs=1e-3)
    assert learner.action_values(1)[0] == pytest.approx(1.0, abs=1e-3)


def test_learner_returns_recorded_only_for_finished_episodes():
    learner = ModelFreeLearner(2, 3, ModelFreeSettings(reward_span=1.0))
    learner.observe(0, 1, 1.0, 1, False)
    learner.end_episode(truncated=True)
    assert learner.returns.n.sum() == 0
    learner.observe(0, 1, 1.0, 1, False)
    learner.observe(1, 0, 1.0, 2, True)
    assert learner.returns.n.sum() == 2


def test_unvisited_state_keeps_exploring():
    learner = ModelFreeLearner(3, 4, ModelFreeSettings(reward_span=1.0, sample_count=20_000))
    policy = learner.thompson_policy(2, np.random.default_rng(0))
    assert_allclose(policy.probs, 1 / 3, atol=0.02)
