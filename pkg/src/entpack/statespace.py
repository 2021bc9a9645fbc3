"""Enumeration, counting and indexing of link-lifetime multisets.

A state is the multiset of lifetimes (TTLs) of the links currently in memory,
stored canonically as a non-increasing tuple of integers in ``[1, t_max]``.
The empty tuple is the no-links state.  States holding the full ``n`` links
are absorbing and are never enumerated; they only appear as flagged successors
in the transition table.

The *viable* links of a state are the largest sub-multiset that could still be
alive when the process completes: the j-th largest lifetime qualifies when
``t_j > n - j``.  Identifying each state with its viable sub-multiset shrinks
the state space without changing any expected completion time, and the reduced
enumeration here lists exactly the fixed points of that projection.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .model import InfeasibleError

State = tuple[int, ...]

EMPTY: State = ()


def canonicalize(ttls, t_max: int) -> State:
    """Sort lifetimes into the canonical non-increasing tuple.

    Raises ValueError on entries outside ``[1, t_max]``.  Idempotent.
    """
    out = tuple(sorted(ttls, reverse=True))
    if out and (out[-1] < 1 or out[0] > t_max):
        bad = [t for t in out if t < 1 or t > t_max]
        raise ValueError(f"lifetimes outside [1, {t_max}]: {bad}")
    return out


def is_absorbing(state: State, n: int) -> bool:
    """True when the state already holds all ``n`` links."""
    if len(state) > n:
        raise ValueError(f"state {state} holds more than n={n} links")
    return len(state) == n


def viable_count(state: State, n: int) -> int:
    """Number of links that could still be alive at completion.

    The j-th largest lifetime (1-based) qualifies when ``t_j > n - j``: if the
    top j links are kept, at least ``n - j`` further steps are needed, and the
    smallest of them must outlive those steps.  Returns the largest such j,
    or 0 when none qualifies.
    """
    nv = 0
    for j, t in enumerate(state, start=1):
        if t > n - j:
            nv = j
    return nv


def viable_projection(state: State, n: int) -> State:
    """The canonical sub-multiset of viable links (empty when there are none)."""
    return state[: viable_count(state, n)]


def count_states(n: int, t_max: int) -> int:
    """Exact number of non-absorbing states: C(t_max + n - 1, n - 1).

    Sizes 0 through n-1 of multisets over ``[1, t_max]`` telescope into a
    single binomial coefficient.
    """
    _check_feasible(n, t_max)
    return math.comb(t_max + n - 1, n - 1)


def count_reduced(n: int, t_max: int) -> int:
    """Exact number of states that equal their own viable projection.

    A fully viable state of size m is a multiset over ``(n - m, t_max]``,
    giving ``1 + sum_m C(t_max + 2m - n - 1, m)``.
    """
    _check_feasible(n, t_max)
    return 1 + sum(math.comb(t_max + 2 * m - n - 1, m) for m in range(1, n))


def state_count_lower_bound(n: int, t_max: int) -> float:
    """Lower bound ``(1 + t_max / (n - 1)) ** (n - 1)`` on the full count.

    At least ``2 ** (n - 1)`` whenever ``t_max >= n - 1``: the state space
    grows exponentially with the number of required links.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if t_max < n - 1:
        raise ValueError(f"t_max must be >= n - 1, got {t_max}")
    return (1.0 + t_max / (n - 1)) ** (n - 1)


def _check_feasible(n: int, t_max: int) -> None:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if n > t_max:
        raise InfeasibleError(f"n={n} exceeds the maximum lifetime t_max={t_max}")


def _grade(n: int, t_max: int, m: int, reduced: bool):
    """All canonical states of size m, in ascending descending-tuple order."""
    if reduced and m > 0:
        lo = n - m + 1
    else:
        lo = 1
    combos = itertools.combinations_with_replacement(range(lo, t_max + 1), m)
    return sorted(tuple(reversed(c)) for c in combos)


def _grade_sizes(n: int, t_max: int, reduced: bool) -> list[int]:
    if reduced:
        return [1] + [
            math.comb(t_max + 2 * m - n - 1, m) for m in range(1, n)
        ]
    return [math.comb(t_max + m - 1, m) for m in range(n)]


def state_rank(state: State, n: int, t_max: int, reduced: bool = False) -> int:
    """Arithmetic index of a state in the deterministic enumeration order.

    Agrees with ``StateSpace.index`` without materialising the space; used by
    the simulator for constant-time policy lookup.
    """
    m = len(state)
    sizes = _grade_sizes(n, t_max, reduced)
    rank = sum(sizes[:m])
    shift = (n - m) if (reduced and m > 0) else 0
    for j, t in enumerate(state, start=1):
        rank += math.comb((t - shift) - 1 + (m - j), m - j + 1)
    return rank


@dataclass
class StateSpace:
    """Indexed enumeration of every non-absorbing state for ``(n, t_max)``.

    Immutable after construction.  Ordering is graded by state size and then
    by ascending descending-tuple order, so ids are stable across runs and
    policy files diff cleanly.  The empty state always has id 0.
    """

    n: int
    t_max: int
    reduced: bool
    states: list[State]
    index: dict[State, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.states)

    def id_of(self, state: State) -> int:
        return self.index[state]

    def lookup_id(self, state: State) -> int:
        """Id used for policy lookup: projects to viable links on a reduced space."""
        if self.reduced:
            state = viable_projection(state, self.n)
        return self.index[state]

    @staticmethod
    def key_of(state: State) -> str:
        """Canonical textual key: comma-joined descending lifetimes, '' for empty."""
        return ",".join(str(t) for t in state)

    @staticmethod
    def state_of_key(key: str) -> State:
        if not key:
            return EMPTY
        return tuple(int(part) for part in key.split(","))


def enumerate_states(n: int, t_max: int, reduced: bool = False) -> StateSpace:
    """Build the full or viable-reduced state space.

    The enumeration length is checked against the closed-form count; a
    mismatch would be an enumeration bug.
    """
    _check_feasible(n, t_max)
    states: list[State] = []
    for m in range(n):
        states.extend(_grade(n, t_max, m, reduced))
    expected = count_reduced(n, t_max) if reduced else count_states(n, t_max)
    if len(states) != expected:
        raise AssertionError(
            f"enumerated {len(states)} states but expected {expected}"
        )
    index = {s: i for i, s in enumerate(states)}
    return StateSpace(n=n, t_max=t_max, reduced=reduced, states=states, index=index)
