import numpy as np
import pytest

from envs import CombatEnvironment, CombatSpec, CombatState, combat_step, combat_subspaces
from envs.combat_environment import combat_state_id

ONE = CombatSpec(enemies=((10, 10),))
THREE = CombatSpec(enemies=((12, 3), (4, 12), (13, 13)), enemy_hp=50, enemy_damage=10)


def test_action_layout():
    assert ONE.action_count == 3
    assert THREE.action_count == 7


def test_move_closes_x_gap_first():
    state, reward, terminal = combat_step(ONE, ONE.initial_state(), 0, np.random.default_rng(0))
    assert (state.x, state.y) == (1, 0)
    assert reward == -1.0
    assert not terminal


def test_retreat_at_start_is_a_wall_hit():
    state, reward, _ = combat_step(ONE, ONE.initial_state(), 1, np.random.default_rng(1))
    assert (state.x, state.y) == (0, 0)
    assert -3.0 <= reward <= -1.0


def test_shot_out_of_range_is_penalised():
    state, reward, _ = combat_step(ONE, ONE.initial_state(), 2, np.random.default_rng(2))
    assert state.enemy_hp == (100,)
    assert -12.0 <= reward <= -10.0


def test_exchange_of_fire_in_range():
    state, reward, terminal = combat_step(ONE, CombatState(9, 10, 100, (100,)), 2, np.random.default_rng(3))
    assert state.enemy_hp == (75,)
    assert state.hp == 75
    assert reward == -1.0
    assert not terminal


def test_killing_the_last_enemy_wins():
    state, reward, terminal = combat_step(ONE, CombatState(9, 10, 100, (25,)), 2, np.random.default_rng(4))
    assert state.enemy_hp == (0,)
    assert state.hp == 100
    assert terminal
    assert 344.0 <= reward <= 354.0


def test_agent_death_ends_episode():
    state, reward, terminal = combat_step(ONE, CombatState(9, 10, 25, (100,)), 0, np.random.default_rng(5))
    assert (state.x, state.y) == (9, 10)
    assert state.hp == 0
    assert terminal
    assert -253.0 <= reward <= -251.0


def test_dead_enemy_no_longer_blocks_or_fires():
    spec = CombatSpec(enemies=((10, 10), (2, 2)))
    state, reward, _ = combat_step(spec, CombatState(9, 10, 100, (0, 100)), 0, np.random.default_rng(6))
    assert (state.x, state.y) == (10, 10)
    assert state.hp == 100
    assert reward == -1.0


def test_shooting_a_dead_enemy_is_a_bad_shot():
    spec = CombatSpec(enemies=((10, 10), (2, 2)))
    _, reward, _ = combat_step(spec, CombatState(9, 10, 100, (0, 100)), 3, np.random.default_rng(7))
    assert -12.0 <= reward <= -10.0


def test_three_enemy_damage_adds_up():
    spec = CombatSpec(enemies=((5, 5), (5, 7), (7, 6)), enemy_hp=50, enemy_damage=10)
    state, _, _ = combat_step(spec, CombatState(5, 6, 100, (50, 50, 50)), 6, np.random.default_rng(8))
    assert state.enemy_hp == (50, 50, 25)
    assert state.hp == 70


def test_subspaces():
    xy, hp, dist = combat_subspaces(ONE)
    state = CombatState(3, 4, 60, (100,))
    assert xy.project(state) == 4 * 16 + 3
    assert hp.project(state) == 60 and hp.size == 101
    assert dist.name == "dist1" and dist.project(state) == 13 and dist.size == 31


def test_main_space_ids_are_distinct():
    env = CombatEnvironment(ONE)
    main = env.spaces()[0]
    states = {CombatState(x, y, hp, (e,)) for x in (0, 15) for y in (0, 15) for hp in (0, 100) for e in (0, 100)}
    ids = {main.project(s) for s in states}
    assert len(ids) == len(states)
    assert max(ids) < main.size
    assert combat_state_id(ONE, CombatState(15, 15, 100, (100,))) == main.size - 1


def test_reward_range_brackets_rewards():
    env = CombatEnvironment(THREE)
    low, high = env.reward_range
    rng = np.random.default_rng(9)
    state = env.reset(rng)
    for _ in range(400):
        state, reward, terminal = env.step(state, int(rng.integers(env.action_count)), rng)
        assert low <= reward <= high
        if terminal:
            state = env.reset(rng)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"enemies": ()},
        {"enemies": ((16, 0),)},
        {"enemies": ((0, 0),)},
        {"enemies": ((3, 3), (3, 3))},
        {"enemies": ((3, 3),), "damage": 0},
    ],
)
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        CombatSpec(**kwargs)


def test_step_rejects_out_of_range_action():
    with pytest.raises(ValueError):
        combat_step(ONE, ONE.initial_state(), 3, np.random.default_rng(0))


@pytest.mark.parametrize("spec", [ONE, THREE], ids=["one-enemy", "three-enemies"])
def test_random_policy_ends_within_step_cap(spec):
    env = CombatEnvironment(spec)
    rng = np.random.default_rng(31)
    outcomes = {"win": 0, "death": 0, "truncated": 0}
    for _ in range(200):
        state, terminal = env.reset(rng), False
        for _ in range(1000):
            next_state, _, terminal = env.step(state, int(rng.integers(env.action_count)), rng)
            assert next_state.hp <= state.hp
            assert all(after <= before for after, before in zip(next_state.enemy_hp, state.enemy_hp))
            state = next_state
            if terminal:
                break
        if not terminal:
            outcomes["truncated"] += 1
        elif state.hp == 0:
            outcomes["death"] += 1
        else:
            assert all(hp == 0 for hp in state.enemy_hp)
            outcomes["win"] += 1
    assert sum(outcomes.values()) == 200
    assert outcomes["win"] + outcomes["death"] > 0
