"""Shared fixtures: regime bundles are solved once and reused across modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import pytest

from entpack.actions import ActionSpace, build_action_space, synthetic_action_space
from entpack.dp import (
    PolicyIterationResult,
    ValueTable,
    policy_evaluation,
    policy_iteration,
)
from entpack.model import ModelParams
from entpack.policies import best_constant, heuristic_policy, random_policy
from entpack.regimes import FAR_TERM, NEAR_TERM, RegimePreset
from entpack.statespace import StateSpace, enumerate_states
from entpack.transitions import TransitionTable, build_transition_table


@dataclass
class Bundle:
    """Everything solvable about one (regime, n, reduced) cell, computed lazily."""

    preset: RegimePreset
    n: int
    reduced: bool = False
    _cache: dict = field(default_factory=dict)

    @property
    def params(self) -> ModelParams:
        return self.preset.model_params(self.n)

    @property
    def actions(self) -> ActionSpace:
        return self._get("actions", lambda: build_action_space(self.params))

    @property
    def space(self) -> StateSpace:
        return self._get(
            "space",
            lambda: enumerate_states(self.n, self.params.t_max, reduced=self.reduced),
        )

    @property
    def table(self) -> TransitionTable:
        return self._get("table", lambda: build_transition_table(self.space, self.actions))

    @property
    def optimal(self) -> PolicyIterationResult:
        return self._get("optimal", lambda: policy_iteration(self.table))

    @property
    def heuristic(self):
        return self._get(
            "heuristic", lambda: heuristic_policy(self.space, self.actions, table=self.table)
        )

    @property
    def heuristic_values(self) -> ValueTable:
        return self._get(
            "heuristic_values", lambda: policy_evaluation(self.heuristic, self.table)
        )

    @property
    def best_constant(self) -> tuple[int, ValueTable]:
        return self._get("best_constant", lambda: best_constant(self.space, self.actions, table=self.table))

    @property
    def random_values(self) -> ValueTable:
        return self._get(
            "random_values",
            lambda: policy_evaluation(random_policy(self.space, self.actions), self.table),
        )

    def _get(self, key, make):
        if key not in self._cache:
            self._cache[key] = make()
        return self._cache[key]


@lru_cache(maxsize=None)
def bundle(regime: str, n: int, reduced: bool = False) -> Bundle:
    preset = {"near-term": NEAR_TERM, "far-term": FAR_TERM}[regime]
    return Bundle(preset=preset, n=n, reduced=reduced)


@pytest.fixture(scope="session")
def get_bundle():
    return bundle


@pytest.fixture(scope="session")
def syn2() -> ActionSpace:
    """The two-action synthetic space used throughout: (0.5, ttl 3), (0.2, ttl 6)."""
    return synthetic_action_space([(0.5, 3), (0.2, 6)])
