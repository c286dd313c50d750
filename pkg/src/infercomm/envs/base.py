"""Shared environment interface and configuration.

All three tasks sit behind the same episodic surface: `reset(seed)` and
`step(actions)` over fixed-length float64 observation rows, plus
`field_of_view` queries that bound who may communicate with whom. Rewards
are team-level scalars. Identical (config, seed, action sequence) always
reproduces the same trajectory bit for bit; each instance owns its RNG.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from ..errors import ConfigurationError, InputError

COOP_NAV = "coop-nav"
PREDATOR_PREY = "predator-prey"
TRAFFIC_JUNCTION = "traffic-junction"

ENV_NAMES = (COOP_NAV, PREDATOR_PREY, TRAFFIC_JUNCTION)


@dataclass(frozen=True)
class EnvConfig:
    """Environment settings; `defaults` fills the published per-task values."""

    name: str
    n_agents: int = 7
    n_landmarks: int = 7          # landmarks (coop-nav) or preys (predator-prey)
    agent_size: float = 0.05
    landmark_size: float = 0.05
    agent_accel: float = 0.7
    prey_accel: float = 0.7
    collision_penalty: float = -1.0
    n_observed: int = 3           # K nearest agents and K nearest landmarks/preys
    episode_length: int = 40
    # traffic junction only
    grid_size: int = 14
    n_max: int = 10
    p_arrive: float = 0.05
    mode: str = "medium"

    @staticmethod
    def defaults(name: str, **overrides: Any) -> "EnvConfig":
        if name == COOP_NAV:
            cfg = EnvConfig(name=name, n_agents=7, n_landmarks=7, agent_size=0.05,
                            landmark_size=0.05, agent_accel=0.7, episode_length=40)
        elif name == PREDATOR_PREY:
            cfg = EnvConfig(name=name, n_agents=7, n_landmarks=3, agent_size=0.04,
                            landmark_size=0.05, agent_accel=0.5, prey_accel=0.7,
                            episode_length=40)
        elif name == TRAFFIC_JUNCTION:
            mode = overrides.get("mode", "medium")
            if mode == "medium":
                cfg = EnvConfig(name=name, grid_size=14, n_max=10, p_arrive=0.05,
                                episode_length=40, mode="medium")
            elif mode == "hard":
                cfg = EnvConfig(name=name, grid_size=18, n_max=20, p_arrive=0.03,
                                episode_length=80, mode="hard")
            else:
                raise ConfigurationError(f"unknown traffic mode {mode!r}")
        else:
            raise ConfigurationError(f"unknown environment {name!r}")
        return replace(cfg, **overrides)

    def validate(self) -> None:
        if self.name not in ENV_NAMES:
            raise ConfigurationError(f"unknown environment {self.name!r}")
        if self.name in (COOP_NAV, PREDATOR_PREY):
            if self.n_agents < 2:
                raise ConfigurationError("particle tasks need at least 2 agents")
            if not (1 <= self.n_observed <= self.n_agents - 1):
                raise ConfigurationError(
                    f"n_observed={self.n_observed} must be in [1, n_agents-1]"
                )
            if self.n_observed > self.n_landmarks:
                raise ConfigurationError("n_observed exceeds landmark/prey count")
        else:
            if self.n_max < 1 or self.grid_size < 8:
                raise ConfigurationError("traffic junction needs n_max >= 1, grid >= 8")
        if self.episode_length < 1:
            raise ConfigurationError("episode_length must be positive")


class Environment:
    """Base class; concrete tasks implement the underscore hooks."""

    config: EnvConfig
    n_actions: int
    obs_dim: int

    def reset(self, seed: int) -> np.ndarray:
        """Start an episode; returns (n_slots, obs_dim) observations."""
        raise NotImplementedError

    def step(self, actions: np.ndarray) -> tuple[np.ndarray, float, bool, dict]:
        raise NotImplementedError

    def field_of_view(self, agent: int) -> list[int]:
        """Observable agent ids, ordered by (distance, id) ascending."""
        raise NotImplementedError

    @property
    def n_slots(self) -> int:
        """Number of observation/action rows (live agents for particle tasks)."""
        return self.config.n_agents

    def alive(self) -> np.ndarray:
        """Boolean mask over slots; particle agents are always alive."""
        return np.ones(self.n_slots, dtype=bool)

    def check_actions(self, actions: np.ndarray) -> np.ndarray:
        actions = np.asarray(actions)
        if actions.shape != (self.n_slots,):
            raise InputError(f"expected {self.n_slots} actions, got shape {actions.shape}")
        if np.any((actions < 0) | (actions >= self.n_actions)):
            raise InputError(f"action index out of range [0, {self.n_actions})")
        return actions.astype(np.intp)


def make_env(config: EnvConfig) -> Environment:
    from .particle import CooperativeNavigation, PredatorPrey
    from .traffic import TrafficJunction

    config.validate()
    if config.name == COOP_NAV:
        return CooperativeNavigation(config)
    if config.name == PREDATOR_PREY:
        return PredatorPrey(config)
    return TrafficJunction(config)
