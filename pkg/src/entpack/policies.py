"""Construction of the named policies: matching heuristic, baselines, and the
closed-form two-link optimum.

The heuristic follows three rules keyed on the number of viable links:

* zero viable links: a tuned fixed action (selected exactly or by simulation),
* all but one link viable: the most probable action,
* otherwise: the most probable action whose fresh lifetime at least matches
  the smallest viable lifetime after this step.

The rules depend on a state only through its viable links, so the heuristic
is invariant under the viable projection by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .actions import ActionSpace
from .dp import ConvergenceError, Policy, ValueTable, policy_evaluation
from .model import InfeasibleError
from .statespace import StateSpace, enumerate_states, viable_count
from .transitions import TransitionTable, build_transition_table


@dataclass
class HeuristicSpec:
    """How the zero-viable action of the heuristic gets selected.

    ``selection_method`` is one of ``exact``, ``simulation`` or ``auto``;
    auto picks exact evaluation while the space stays below
    ``state_threshold`` states and falls back to simulation above it.
    """

    empty_action: int | None = None
    selection_method: str = "auto"
    selection_budget: int = 10**6
    seed: int = 0
    state_threshold: int = 10**6


def heuristic_action_ids(
    space: StateSpace, actions: ActionSpace, empty_action: int
) -> np.ndarray:
    """Heuristic rule applied to every state of the space."""
    n = space.n
    ids = np.empty(len(space), dtype=np.int64)
    for sid, state in enumerate(space.states):
        nv = viable_count(state, n)
        if nv == 0:
            ids[sid] = empty_action
        elif nv == n - 1:
            ids[sid] = 0
        else:
            ids[sid] = actions.first_with_ttl_at_least(state[nv - 1] - 1)
    return ids


def heuristic_policy(
    space: StateSpace,
    actions: ActionSpace,
    empty_action: int | None = None,
    *,
    spec: HeuristicSpec | None = None,
    table: TransitionTable | None = None,
) -> Policy:
    """Build the heuristic policy, tuning its zero-viable action if needed.

    When ``empty_action`` is not given, every candidate action is scored by
    the expected completion time from the no-links state and the best one is
    kept.  Candidates with infinite expected time are skipped.
    """
    spec = spec or HeuristicSpec()
    if empty_action is None:
        empty_action = spec.empty_action
    meta = {"method": "heuristic"}

    if empty_action is None:
        method = spec.selection_method
        if method == "auto":
            method = "exact" if len(space) <= spec.state_threshold else "simulation"
        scores = _score_empty_candidates(space, actions, method, spec, table)
        if not scores:
            raise ConvergenceError(
                "every zero-viable candidate action has infinite expected time"
            )
        empty_action = min(scores, key=scores.get)
        meta.update(
            {
                "empty_action_selection": method,
                "empty_action_scores": scores,
                "selection_budget": spec.selection_budget if method == "simulation" else None,
            }
        )

    ids = heuristic_action_ids(space, actions, empty_action)
    meta["empty_action"] = int(empty_action)
    return Policy("deterministic", ids, space, meta=meta)


def _score_empty_candidates(space, actions, method, spec, table):
    scores: dict[int, float] = {}
    if method == "exact":
        if table is None:
            table = build_transition_table(space, actions)
        for aid in range(len(actions)):
            pol = Policy(
                "deterministic", heuristic_action_ids(space, actions, aid), space
            )
            try:
                scores[aid] = policy_evaluation(pol, table).value_empty
            except ConvergenceError:
                continue
    elif method == "simulation":
        from .montecarlo import StepCapError, estimate

        for aid in range(len(actions)):
            pol = Policy(
                "deterministic", heuristic_action_ids(space, actions, aid), space
            )
            try:
                result = estimate(
                    pol, actions, episodes=spec.selection_budget, seed=spec.seed + aid
                )
            except StepCapError:
                continue
            scores[aid] = result.mean
    else:
        raise ValueError(f"unknown selection method {method!r}")
    return scores


def constant_policy(space: StateSpace, action_id: int) -> Policy:
    """The policy that plays one action in every state."""
    tab = np.full(len(space), action_id, dtype=np.int64)
    return Policy(
        "deterministic", tab, space, meta={"method": "constant", "action": int(action_id)}
    )


def best_constant(
    space: StateSpace,
    actions: ActionSpace,
    table: TransitionTable | None = None,
    tol: float = 1e-10,
    method: str = "auto",
) -> tuple[int, ValueTable]:
    """Exhaustively evaluate all constant policies; return the best action id.

    Actions whose lifetime is below n are skipped outright: links generated at
    different steps always have distinct lifetimes, so a constant lifetime-k
    action can hold at most k links at once.  Other non-finishing actions are
    excluded when their evaluation diverges.  Fails only when every action is
    excluded.
    """
    if table is None:
        table = build_transition_table(space, actions)
    results: dict[int, ValueTable] = {}
    for aid, action in enumerate(actions.actions):
        if action.ttl < space.n:
            continue
        try:
            results[aid] = policy_evaluation(
                constant_policy(space, aid), table, tol=tol, method=method
            )
        except ConvergenceError:
            continue
    if not results:
        raise ConvergenceError(
            "every constant action has infinite expected completion time"
        )
    best = min(results, key=lambda aid: results[aid].value_empty)
    return best, results[best]


def random_policy(space: StateSpace, actions: ActionSpace) -> Policy:
    """Uniformly random action in every state (stochastic policy)."""
    n_a = len(actions)
    tab = np.full((len(space), n_a), 1.0 / n_a)
    return Policy("stochastic", tab, space, meta={"method": "random"})


def analytic_n2(actions: ActionSpace) -> tuple[Policy, float]:
    """Closed-form optimal policy and expected time for two required links.

    With one live link, completing only needs the next attempt to succeed, so
    the most probable action is optimal except when the link dies this step.
    The no-links action balances its own probability against how many chances
    the generated link leaves for the second one:

        E[T] = 1/p_max + 1/(p * (1 - (1 - p_max) ** (ttl - 1)))

    minimised over the candidate no-links actions.  Ties break to the lowest
    action id and are flagged in the policy metadata.
    """
    if actions.t_max < 2:
        raise InfeasibleError(
            "two links can never coexist when every lifetime is one step"
        )
    p_max = actions[0].p
    scores = []
    for action in actions.actions:
        survive = 1.0 - (1.0 - p_max) ** (action.ttl - 1)
        scores.append(math.inf if survive == 0.0 else 1.0 / (action.p * survive))
    best = int(np.argmin(scores))
    expected = 1.0 / p_max + scores[best]
    ties = [i for i, s in enumerate(scores) if s == scores[best] and i != best]

    space = enumerate_states(2, actions.t_max)
    ids = np.zeros(len(space), dtype=np.int64)
    for sid, state in enumerate(space.states):
        if viable_count(state, 2) == 0:
            ids[sid] = best
    policy = Policy(
        "deterministic",
        ids,
        space,
        meta={
            "method": "analytic-n2",
            "empty_action": best,
            "empty_action_ties": ties,
        },
    )
    return policy, float(expected)
