"""Leader-follower AUV imitation learning (MAGAIL / MAGAISIL)."""

import json

from ._core import (  # noqa: F401
    ContractError,
    Corridor,
    Error,
    InvariantError,
    ParseError,
    World,
    WorldState,
    compute_gae,
    discriminator_reward,
    eval_reward_follower,
    eval_reward_leader,
    load_task,
    parse_task,
    render_svg,
)
from . import _core

ACTIONS = ("turn_left_2", "turn_left_1", "straight", "turn_right_1", "turn_right_2")


def record_demos(task="task1", quality="optimal", episodes=10, seed=1, out_dir=""):
    """Record scripted demonstrations; writes files when out_dir is given."""
    return json.loads(_core._record_demos(task, quality, episodes, seed, str(out_dir)))


def train(**config):
    """Run a training session. Keyword arguments mirror the session config
    (mode, judge, task, episodes, out_dir, train={...}, demos={...})."""
    return json.loads(_core._train(json.dumps(config)))


def evaluate(checkpoint, task="task1", episodes=20, seed=0):
    """Greedy evaluation of a checkpoint on a task."""
    return json.loads(_core._evaluate(str(checkpoint), task, episodes, seed))
