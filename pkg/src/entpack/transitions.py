"""One-step dynamics and the materialised transition table.

Each time step every stored link ages by one step (lifetime-1 links drop out),
and with the chosen action's probability a fresh link with the action's full
lifetime joins the survivors.  A step therefore has at most two outcomes:

    success (prob p):  age survivors, insert the fresh link
    failure (prob 1-p): age survivors only

The table materialises both successor ids for every (state, action) pair so
that evaluation sweeps become pure array scans; success branches that complete
the packet are flagged with id -1 instead of an id in the space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actions import Action, ActionSpace
from .statespace import State, StateSpace, is_absorbing, viable_projection

ABSORBED = -1


@dataclass(frozen=True)
class TransitionEntry:
    next_state: State
    probability: float


def age_and_drop(state: State) -> State:
    """Survivors after one step of decay (descending order is preserved)."""
    return tuple(t - 1 for t in state if t > 1)


def insert_ttl(state: State, ttl: int) -> State:
    """Insert a fresh lifetime into a descending tuple."""
    for i, t in enumerate(state):
        if t < ttl:
            return state[:i] + (ttl,) + state[i:]
    return state + (ttl,)


def successors(state: State, action: Action, n: int) -> list[TransitionEntry]:
    """Successor distribution for one step from a non-absorbing state.

    Returns the success entry first.  Zero-probability branches are omitted,
    so a sure-success action yields a single entry.
    """
    if is_absorbing(state, n):
        raise ValueError(f"state {state} is absorbing; no transitions from it")
    aged = age_and_drop(state)
    succ = insert_ttl(aged, action.ttl)
    out = []
    if action.p > 0.0:
        out.append(TransitionEntry(succ, action.p))
    if action.p < 1.0:
        out.append(TransitionEntry(aged, 1.0 - action.p))
    return out


@dataclass
class TransitionTable:
    """Successor ids and probabilities for every (state, action) pair.

    ``succ[s, a]`` is the id of the success successor, or ``ABSORBED`` when
    that branch completes the packet.  ``fail[s, a]`` is always a valid id:
    a failed attempt can never complete.  Immutable after construction.
    """

    space: StateSpace
    actions: ActionSpace
    succ: np.ndarray = field(repr=False)
    fail: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)

    @property
    def n_states(self) -> int:
        return len(self.space)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def entries(self, state_id: int, action_id: int) -> list[TransitionEntry]:
        """Successor list with states spelled out (absorbing ones included)."""
        return successors(
            self.space.states[state_id], self.actions[action_id], self.space.n
        )


def build_transition_table(space: StateSpace, actions: ActionSpace) -> TransitionTable:
    """Materialise successor ids for the whole space.

    On a reduced space the successors are projected onto their viable links
    before id resolution.  A successor missing from the space indicates an
    enumeration bug and raises.
    """
    n = space.n
    n_s, n_a = len(space), len(actions)
    succ = np.empty((n_s, n_a), dtype=np.int64)
    fail = np.empty((n_s, n_a), dtype=np.int64)
    ttls = [a.ttl for a in actions.actions]

    for sid, state in enumerate(space.states):
        aged = age_and_drop(state)
        if space.reduced:
            aged_key = viable_projection(aged, n)
        else:
            aged_key = aged
        try:
            fid = space.index[aged_key]
        except KeyError:
            raise RuntimeError(
                f"failure successor {aged_key} of state {state} not enumerated"
            ) from None
        for aid, ttl in enumerate(ttls):
            fail[sid, aid] = fid
            nxt = insert_ttl(aged, ttl)
            if len(nxt) == n:
                succ[sid, aid] = ABSORBED
                continue
            key = viable_projection(nxt, n) if space.reduced else nxt
            try:
                succ[sid, aid] = space.index[key]
            except KeyError:
                raise RuntimeError(
                    f"success successor {key} of state {state} not enumerated"
                ) from None

    p = np.array([a.p for a in actions.actions], dtype=np.float64)
    return TransitionTable(space=space, actions=actions, succ=succ, fail=fail, p=p)
