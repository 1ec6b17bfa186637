import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from policy import (
    ActionPolicy,
    FeParams,
    FreeEnergyEval,
    epsilon_greedy_policy,
    evaluate,
    evaluate_ts_behavioral,
    floor_policy,
    select_space,
    tilted_utility,
    utility,
)


def random_floored(rng, n):
    weights = rng.dirichlet(np.full(n, 0.5))
    return floor_policy(ActionPolicy.from_weights(weights), xi=1e-4)


def test_utility_is_log_probability():
    assert_allclose(utility(ActionPolicy(np.array([0.5, 0.25, 0.25]))), np.log([0.5, 0.25, 0.25]))


def test_utility_rejects_zero_probability():
    with pytest.raises(ValueError):
        utility(ActionPolicy(np.array([1.0, 0.0])))


def test_tilted_utility_blends_toward_main():
    u_sub = np.array([-1.0, -2.0])
    u_main = np.array([-3.0, -1.0])
    assert_allclose(tilted_utility(u_sub, u_main, 1.0), u_main)
    assert_allclose(tilted_utility(u_sub, u_main, 2.0), [-2.0, -1.5])
    with pytest.raises(ValueError):
        tilted_utility(u_sub, u_main, 0.5)


def test_uniform_policies_give_log_action_count():
    uniform = ActionPolicy.uniform(4)
    result = evaluate(uniform, uniform, uniform, FeParams(alpha=2.5, beta=3.0))
    assert_allclose(result.policy.probs, 0.25)
    assert result.partition == pytest.approx(4 ** -2.5)
    assert result.free_energy == pytest.approx(math.log(4))


def test_two_action_worked_example():
    ts = ActionPolicy(np.array([0.8, 0.2]))
    result = evaluate(ts, ts, ActionPolicy.uniform(2), FeParams(alpha=1.0, beta=1.0))
    assert result.partition == pytest.approx(0.5)
    assert_allclose(result.policy.probs, [0.8, 0.2])
    assert result.free_energy == pytest.approx(math.log(2))


def test_partition_identity_on_random_cases():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        params = FeParams(alpha=float(rng.uniform(0.1, 10.0)), beta=float(rng.uniform(1.0, 10.0)))
        result = evaluate(random_floored(rng, n), random_floored(rng, n), random_floored(rng, n), params)
        assert abs(math.exp(-params.alpha * result.free_energy) - result.partition) < 1e-9
        assert result.free_energy == pytest.approx(-math.log(result.partition) / params.alpha, abs=1e-9)
        assert result.policy.probs.sum() == pytest.approx(1.0)


def test_optimal_policy_keeps_every_behavioural_action():
    rng = np.random.default_rng(13)
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        params = FeParams(alpha=float(rng.uniform(0.1, 10.0)), beta=float(rng.uniform(1.0, 10.0)))
        pi_b = epsilon_greedy_policy(rng.normal(size=n), float(rng.uniform(0.01, 1.0)))
        result = evaluate(random_floored(rng, n), random_floored(rng, n), pi_b, params)
        assert np.all(result.policy.probs[pi_b.probs > 0] > 0)


def test_higher_beta_shifts_mass_toward_the_subspace_favourite():
    rng = np.random.default_rng(14)
    betas = [1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 13.0, 50.0]
    for _ in range(200):
        n = int(rng.integers(2, 7))
        sub, main, pi_b = random_floored(rng, n), random_floored(rng, n), random_floored(rng, n)
        alpha = float(rng.uniform(0.1, 10.0))
        # beta only scales how far the tilt moves from the main utility toward the subspace one
        favourite = int(np.argmax(utility(sub) - utility(main)))
        masses = [evaluate(sub, main, pi_b, FeParams(alpha, beta)).policy[favourite] for beta in betas]
        assert all(later >= earlier - 1e-12 for earlier, later in zip(masses, masses[1:]))

        uniform = ActionPolicy.uniform(n)
        best = int(np.argmax(sub.probs))
        masses = [evaluate(sub, uniform, pi_b, FeParams(alpha, beta)).policy[best] for beta in betas]
        assert all(later >= earlier - 1e-12 for earlier, later in zip(masses, masses[1:]))


def test_raising_one_tilted_utility_raises_its_mass():
    rng = np.random.default_rng(15)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        sub, pi_b = random_floored(rng, n), random_floored(rng, n)
        params = FeParams(alpha=float(rng.uniform(0.1, 10.0)), beta=float(rng.uniform(1.0, 10.0)))
        action = int(rng.integers(n))
        weights = sub.probs.copy()
        weights[action] *= 2.0
        boosted = ActionPolicy.from_weights(weights)
        before = evaluate(sub, sub, pi_b, params).policy[action]
        after = evaluate(boosted, boosted, pi_b, params).policy[action]
        assert after >= before - 1e-12


def test_ts_behavioral_matches_general_form():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        alpha = float(rng.uniform(1.0, 10.0))
        sub, main = random_floored(rng, n), random_floored(rng, n)
        general = evaluate(sub, main, sub, FeParams(alpha=alpha, beta=alpha))
        special = evaluate_ts_behavioral(sub, main, alpha)
        assert special.free_energy == pytest.approx(general.free_energy, abs=1e-9)
        assert_allclose(special.policy.probs, general.policy.probs, atol=1e-9)


def test_ts_behavioral_uniform_gives_log_action_count():
    uniform = ActionPolicy.uniform(5)
    assert evaluate_ts_behavioral(uniform, uniform, 3.0).free_energy == pytest.approx(math.log(5))


def test_main_space_wins_when_subspace_disagrees():
    xi = 1e-4
    main = floor_policy(ActionPolicy(np.array([1.0, 0.0, 0.0, 0.0])), xi)
    sub = floor_policy(ActionPolicy(np.array([0.0, 1.0, 0.0, 0.0])), xi)
    params = FeParams(alpha=4.0, beta=7.0)
    f_main = evaluate(main, main, epsilon_greedy_policy(np.array([1.0, 0, 0, 0]), 0.1), params).free_energy
    f_sub = evaluate(sub, main, epsilon_greedy_policy(np.array([0, 1.0, 0, 0]), 0.1), params).free_energy
    assert f_main < f_sub


def test_large_alpha_concentrates_on_best_tilted_utility():
    sub = ActionPolicy(np.array([0.6, 0.3, 0.1]))
    main = ActionPolicy(np.array([0.5, 0.4, 0.1]))
    b = ActionPolicy(np.array([0.2, 0.5, 0.3]))
    result = evaluate(sub, main, b, FeParams(alpha=50.0, beta=7.0))
    best = int(np.argmax(tilted_utility(utility(sub), utility(main), 7.0)))
    assert int(np.argmax(result.policy.probs)) == best
    assert result.policy[best] > 0.99


def test_mismatched_action_counts_rejected():
    with pytest.raises(ValueError):
        evaluate(ActionPolicy.uniform(2), ActionPolicy.uniform(3), ActionPolicy.uniform(2), FeParams(1.0, 1.0))


@pytest.mark.parametrize("alpha, beta", [(0.0, 1.0), (-1.0, 2.0), (1.0, 0.5), (float("inf"), 2.0)])
def test_fe_params_validation(alpha, beta):
    with pytest.raises(ValueError):
        FeParams(alpha, beta)


def fe(value):
    return FreeEnergyEval(ActionPolicy.uniform(2), math.exp(-value), value)


@pytest.mark.parametrize(
    "energies, expected",
    [([1.2, 0.9, 1.5], 1), ([1.0, 1.0], 0), ([2.0, 1.0, 1.0], 1)],
)
def test_select_space(energies, expected):
    assert select_space([fe(v) for v in energies], main_index=0) == expected


def test_select_space_rejects_empty():
    with pytest.raises(ValueError):
        select_space([], main_index=0)
