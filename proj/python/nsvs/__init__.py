"""Adaptive visual servoing with null-space human intervention.

Scenarios are plain dicts in the same form as ``effective_config.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _nsvs
from ._nsvs import ConfigError, ValidationError, forward_kinematics, image_jacobian, jacobian, \
    null_projector, project, pseudo_inverse

__all__ = [
    "ConfigError", "ValidationError", "RunResult", "Session", "ablation", "compare_intent_off",
    "forward_kinematics", "image_jacobian", "jacobian", "null_projector", "project",
    "pseudo_inverse", "run", "scenario",
]


def _text(s: dict | str) -> str:
    if isinstance(s, str):
        return json.dumps(scenario(s))
    return json.dumps(s)


def scenario(name_or_path: str = "task1", **overrides) -> dict:
    """Loads a preset ("task1", "task2") or a scenario file, fully materialized.

    Keyword overrides are merged into the loaded sections, so
    ``scenario("task2", sim={"duration": 10})`` keeps the other sim settings.
    """
    s = json.loads(_nsvs.load_scenario(name_or_path))
    if overrides:
        _merge(s, overrides)
        s = json.loads(_nsvs.normalize_scenario(json.dumps(s)))
    return s


def _merge(base: dict, extra: dict) -> None:
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value


@dataclass
class RunResult:
    columns: list[str]
    data: np.ndarray
    summary: dict
    wall_seconds: float
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self._index = {c: i for i, c in enumerate(self.columns)}

    def __getitem__(self, column: str) -> np.ndarray:
        return self.data[:, self._index[column]]

    @property
    def aborted(self) -> Optional[str]:
        return self.summary["aborted"]

    def error_norm(self) -> np.ndarray:
        return np.hypot(self["e_u"], self["e_v"])


def run(s: dict | str, intent: Optional[Callable[[int, float], np.ndarray]] = None) -> RunResult:
    """Runs a scenario headless. ``intent(step, t)`` replaces its intent schedule."""
    out = _nsvs.run(_text(s), intent)
    return RunResult(out["columns"], out["data"], json.loads(out["summary"]), out["wall_seconds"])


def compare_intent_off(s: dict | str) -> dict:
    return _nsvs.compare_intent_off(_text(s))


def ablation(s: dict | str, seeds: int = 20, jobs: int = 1, first_seed: int = 0, at: float = 2.0):
    """Rows of (seed, adaptive error, fixed-estimate error, abort reason) at time ``at``."""
    return _nsvs.ablation(_text(s), seeds, jobs, first_seed, at)


class Session:
    """In-process session speaking the same JSON messages as the HTTP server."""

    def __init__(self, s: dict | str = "task1", session_id: str = "session", decimation: int = 1,
                 intent_ttl: float = 0.5):
        self._core = _nsvs.SessionCore(_text(s), session_id, decimation, intent_ttl)

    def send(self, msg: dict) -> dict:
        return json.loads(self._core.handle(json.dumps(msg)))

    def tick(self) -> Optional[dict]:
        out = self._core.tick()
        return None if out is None else json.loads(out)

    def robot(self) -> dict:
        return json.loads(self._core.robot_description())

    @property
    def time(self) -> float:
        return self._core.time

    @property
    def step(self) -> int:
        return self._core.step

    @property
    def paused(self) -> bool:
        return self._core.paused
