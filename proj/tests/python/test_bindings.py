import json
import math
import random

import pytest

import magaisil


def gae_oracle(rewards, values, bootstrap, gamma, lam):
    n = len(rewards)
    out = []
    for t in range(n):
        acc = 0.0
        for k in range(t, n):
            next_v = values[k + 1] if k + 1 < n else bootstrap
            acc += (gamma * lam) ** (k - t) * (rewards[k] + gamma * next_v - values[k])
        out.append(acc)
    return out


def test_shipped_tasks():
    t1 = magaisil.load_task("task1")
    assert t1.width == 30.0
    assert t1.goal_progress == 240.0
    assert t1.num_obstacles == 0
    assert magaisil.load_task("task2").num_obstacles > 0
    geo = json.loads(t1.geometry_json())
    assert geo["task_id"] == "task1"
    with pytest.raises(magaisil.Error):
        magaisil.load_task("no_such_task")


def test_invalid_task_names_field():
    with pytest.raises(magaisil.InvariantError, match="goal_progress"):
        magaisil.parse_task("width = 30\ncenterline = [[0, 0], [100, 0]]\ngoal_progress = 500\n")


def test_world_step_and_determinism():
    world = magaisil.World(magaisil.load_task("task1"))
    a, b = world.reset(), world.reset()
    first = world.observe(a)
    assert len(first["leader_obs"]) == 6
    assert len(first["follower_obs"]) == 8
    for _ in range(20):
        oa = world.step(a, 2, 2)
        ob = world.step(b, 2, 2)
        assert oa == ob
    assert a.steps == 20


def test_sonar_center_of_straight_pipe():
    world = magaisil.World(magaisil.parse_task(
        "width = 30\ncenterline = [[-300, 0], [300, 0]]\ngoal_progress = 500\n"))
    ranges = world.sonar((0.0, 0.0, 0.0))
    assert len(ranges) == 6
    assert ranges[0] == pytest.approx(17.32, abs=0.01)
    assert world.sonar((0.0, 40.0, 0.0)) is None


def test_rewards():
    assert magaisil.eval_reward_leader(17.3) == pytest.approx(1.0)
    assert magaisil.eval_reward_leader(5.0) < magaisil.eval_reward_leader(15.0)
    assert magaisil.discriminator_reward(0.5) == pytest.approx(math.log(2.0))
    assert math.isfinite(magaisil.discriminator_reward(1.0))


def test_gae_matches_oracle():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(1, 40)
        r = [rng.gauss(0, 1) for _ in range(n)]
        v = [rng.gauss(0, 1) for _ in range(n)]
        boot = rng.gauss(0, 1)
        adv, ret = magaisil.compute_gae(r, v, boot, 0.99, 0.95)
        want = gae_oracle(r, v, boot, 0.99, 0.95)
        assert adv == pytest.approx(want, abs=1e-10)
        assert ret == pytest.approx([a + b for a, b in zip(want, v)], abs=1e-10)


def test_record_train_evaluate(tmp_path):
    demos = magaisil.record_demos("task1", "optimal", episodes=2, seed=1, out_dir=tmp_path / "demos")
    assert demos["completed"] == 2
    assert demos["leader_mean_eval_reward"] > 0.7
    summary = magaisil.train(mode="magaisil", task="task1", episodes=2, out_dir=str(tmp_path / "run"),
                             train={"seed": 3}, demos={"episodes": 2, "quality": "suboptimal"})
    assert summary["episodes_completed"] == 2
    report = magaisil.evaluate(tmp_path / "run" / "checkpoint.json", "task1", episodes=3)
    assert len(report["per_episode"]) == 3
    svg = magaisil.render_svg("task1", str(tmp_path / "run" / "trajectories.jsonl"))
    assert svg.startswith("<svg")


def test_train_rejects_unknown_keys(tmp_path):
    with pytest.raises(magaisil.Error):
        magaisil.train(bogus=1, out_dir=str(tmp_path))
