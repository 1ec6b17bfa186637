import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from envs import AgentBody, World, WorldConfig, cont_spaces, cont_step, cont_subspaces, multi_agent_tick, sense, sense_point
from envs.continuous_maze import FOOD, POISON, WALL, wall_distances

EMPTY = WorldConfig(food=0, poison=0)
MIDDLE_EYE = 4


def empty_world(position, heading, interior=()):
    world = World.create(EMPTY, interior, agent_count=1, rng=np.random.default_rng(0))
    world.agents[0] = AgentBody(np.array(position, dtype=float), heading)
    return world


def reading(observation, eye, kind):
    return observation[eye * 3 + kind]


def test_observation_layout_and_range():
    world = World.create(WorldConfig(), (), agent_count=2, rng=np.random.default_rng(1))
    obs = sense(world, 0)
    assert obs.shape == (27,)
    assert np.all((obs >= 0.0) & (obs <= 1.0))


def test_nothing_in_range_reads_one():
    obs = sense(empty_world((350, 250), 0.0), 0)
    assert_allclose(obs, 1.0)


def test_wall_distance_scaled_by_range():
    obs = sense(empty_world((50, 250), math.pi), 0)
    assert reading(obs, MIDDLE_EYE, WALL) == pytest.approx(50 / 85)
    assert reading(obs, 0, WALL) == 1.0


def test_item_seen_at_its_edge():
    walls = empty_world((0, 0), 0.0).walls
    obs = sense_point(EMPTY, walls, np.array([[150.0, 250.0]]), np.array([FOOD]), np.array([100.0, 250.0]), 0.0)
    assert reading(obs, MIDDLE_EYE, FOOD) == pytest.approx(40 / 85)
    assert reading(obs, MIDDLE_EYE, POISON) == 1.0


def test_wall_hides_item_behind_it():
    world = empty_world((100, 250), 0.0, interior=[(130, 200, 130, 300)])
    obs = sense_point(EMPTY, world.walls, np.array([[150.0, 250.0]]), np.array([POISON]), np.array([100.0, 250.0]), 0.0)
    assert reading(obs, MIDDLE_EYE, WALL) == pytest.approx(30 / 85)
    assert reading(obs, MIDDLE_EYE, POISON) == 1.0


def test_open_forward_move_earns_straight_bonus():
    world = empty_world((350, 250), 0.0)
    outcome = cont_step(world, 0, 0, np.random.default_rng(2))
    assert_allclose(world.agents[0].position, [353, 250])
    assert outcome.proximity_reward == pytest.approx(1.0)
    assert outcome.straight_reward == pytest.approx(0.1)
    assert outcome.digestion_reward == 0.0
    assert outcome.reward == pytest.approx(1.1)


def test_turning_skips_straight_bonus():
    world = empty_world((350, 250), 0.0)
    outcome = cont_step(world, 0, 1, np.random.default_rng(3))
    assert world.agents[0].heading == pytest.approx(math.radians(15))
    assert outcome.straight_reward == 0.0


def test_wall_blocks_movement():
    world = empty_world((11, 250), math.pi)
    cont_step(world, 0, 0, np.random.default_rng(4))
    assert_allclose(world.agents[0].position, [11, 250])


def test_eating_food_rewards_and_respawns():
    world = empty_world((100, 250), 0.0)
    world.item_positions = np.array([[120.0, 250.0]])
    world.item_kinds = np.array([FOOD])
    outcome = cont_step(world, 0, 0, np.random.default_rng(5))
    assert outcome.digestion_reward == 5.0
    assert not np.allclose(world.item_positions[0], [120.0, 250.0])


def test_eating_poison_costs():
    world = empty_world((100, 250), 0.0)
    world.item_positions = np.array([[115.0, 250.0]])
    world.item_kinds = np.array([POISON])
    assert cont_step(world, 0, 0, np.random.default_rng(6)).digestion_reward == -6.0


def test_tick_uses_start_of_tick_observations():
    world = World.create(WorldConfig(food=5, poison=5), (), agent_count=3, rng=np.random.default_rng(7))
    before = [sense(world, i) for i in range(3)]
    seen = []

    def policy(obs):
        seen.append(obs)
        return 0

    results = multi_agent_tick(world, [policy] * 3, np.random.default_rng(8))
    assert len(results) == 3
    for i, (obs, action, outcome) in enumerate(results):
        assert_allclose(obs, before[i])
        assert_allclose(seen[i], before[i])
        assert action == 0
        assert_allclose(outcome.observation, sense(world, i))


def test_tick_rejects_policy_count_mismatch():
    world = World.create(EMPTY, (), agent_count=2, rng=np.random.default_rng(9))
    with pytest.raises(ValueError):
        multi_agent_tick(world, [lambda obs: 0], np.random.default_rng(0))


def test_create_places_everything_clear_of_walls():
    config = WorldConfig(food=30, poison=30)
    world = World.create(config, [(350, 0, 350, 400)], agent_count=4, rng=np.random.default_rng(10))
    assert world.item_positions.shape == (60, 2)
    assert (world.item_kinds == FOOD).sum() == 30
    for agent in world.agents:
        assert 10 <= agent.position[0] <= 690 and 10 <= agent.position[1] <= 490


def test_subspaces_pick_one_kind_each():
    spaces = cont_subspaces(WorldConfig())
    assert [s.name for s in spaces] == ["wall", "food", "poison"]
    obs = np.arange(27.0)
    assert_allclose(spaces[1].project(obs), np.arange(1, 27, 3))
    main = cont_spaces(WorldConfig())[0]
    assert main.columns is None and not main.tabular
    assert_allclose(main.project(obs), obs)


def test_turn_rejects_unknown_action():
    with pytest.raises(ValueError):
        WorldConfig().turn(5)


def test_random_walk_keeps_world_invariants():
    config = WorldConfig(food=20, poison=20)
    interior = [(350, 0, 350, 400), (100, 250, 250, 250)]
    world = World.create(config, interior, agent_count=2, rng=np.random.default_rng(11))
    world_rng, policy_rng = np.random.default_rng(12), np.random.default_rng(13)
    policies = [lambda obs: int(policy_rng.integers(5))] * 2
    meals = 0
    for _ in range(2000):
        for _, _, outcome in multi_agent_tick(world, policies, world_rng):
            meals += outcome.digestion_reward != 0.0
            assert np.all((outcome.observation >= 0.0) & (outcome.observation <= 1.0))
        for agent in world.agents:
            assert wall_distances(agent.position, world.walls).min() >= config.agent_radius - 1e-9
            assert 0.0 < agent.position[0] < config.width and 0.0 < agent.position[1] < config.height
        assert world.item_positions.shape == (40, 2)
        assert (world.item_kinds == FOOD).sum() == 20 and (world.item_kinds == POISON).sum() == 20
    assert meals > 0
    for position in world.item_positions:
        assert wall_distances(position, world.walls).min() >= config.item_radius


def test_first_agent_in_order_wins_a_shared_item(monkeypatch):
    world = World.create(EMPTY, (), agent_count=2, rng=np.random.default_rng(14))
    world.agents[0] = AgentBody(np.array([100.0, 250.0]), 0.0)
    world.agents[1] = AgentBody(np.array([140.0, 250.0]), math.pi)
    world.item_positions = np.array([[120.0, 250.0]])
    world.item_kinds = np.array([FOOD])
    respawns = []

    def far_corner(self, clearance, rng):
        respawns.append(clearance)
        return np.array([600.0, 400.0])

    monkeypatch.setattr(World, "free_point", far_corner)
    results = multi_agent_tick(world, [lambda obs: 0] * 2, np.random.default_rng(15))
    assert [outcome.digestion_reward for _, _, outcome in results] == [5.0, 0.0]
    assert respawns == [EMPTY.item_radius]
    assert_allclose(world.item_positions[0], [600.0, 400.0])
