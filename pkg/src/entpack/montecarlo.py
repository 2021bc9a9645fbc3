"""Seeded episode simulator measuring completion times empirically.

Randomness is counter-based: every draw is a strong 64-bit hash of
(master seed, episode index, draw counter), so per-episode substreams are
independent by construction and results are bit-reproducible for a fixed
(seed, episodes) pair regardless of how many threads run the episodes.

``simulate_episode`` is a plain-Python reference implementation driven by a
numpy Generator; ``estimate`` runs batches through a compiled kernel that
canonicalises states on the fly and looks policies up by arithmetic rank, so
no transition table is ever materialised.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from numba import njit

from .actions import ActionSpace
from .dp import Policy
from .statespace import _grade_sizes
from .transitions import age_and_drop, insert_ttl


class StepCapError(RuntimeError):
    """An episode exceeded the step cap (practical non-termination)."""

    def __init__(self, message: str, completed: int = 0):
        super().__init__(message)
        self.completed = completed


@dataclass
class SimResult:
    """Aggregate of independent completion-time samples.

    ``ci3`` is three standard errors, the half-width used for error bars.
    """

    episodes: int
    mean: float
    std_error: float
    ci3: float
    seed: int
    generator: str = "mix64x2-counter"
    histogram: dict[int, int] | None = None


# ---------------------------------------------------------------------------
# compiled kernels

_M1 = np.uint64(0xFF51AFD7ED558CCD)
_M2 = np.uint64(0xC4CEB9FE1A85EC53)
_S33 = np.uint64(33)
_S11 = np.uint64(11)
_GOLD = np.uint64(0x9E3779B97F4A7C15)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> _S33)) * _M1
    z = (z ^ (z >> _S33)) * _M2
    return z ^ (z >> _S33)


@njit(inline="always")
def _u01(base, ctr):
    h = _mix64(_mix64(base ^ ctr))
    return (h >> _S11) * _INV53


@njit(inline="always")
def _episode_base(seed, episode):
    return _mix64(_mix64(seed ^ _GOLD) ^ episode)


@njit(inline="always")
def _viable_prefix(ttls, m, n):
    nv = 0
    for j in range(m):
        if ttls[j] > n - (j + 1):
            nv = j + 1
    return nv


@njit(inline="always")
def _rank(ttls, m, n, reduced, offsets, binom):
    # Policies on a reduced space are keyed by the viable prefix of the
    # raw state; projecting here keeps the simulation table-free.
    if reduced:
        m = _viable_prefix(ttls, m, n)
    rank = offsets[m]
    shift = 0
    if reduced and m > 0:
        shift = n - m
    for j in range(m):
        rank += binom[ttls[j] - shift - 1 + (m - j - 1), m - j]
    return rank


@njit(inline="always")
def _apply_success(cur, nxt, m, new_ttl):
    k = 0
    i = 0
    while i < m and cur[i] - 1 >= new_ttl:
        nxt[k] = cur[i] - 1
        k += 1
        i += 1
    nxt[k] = new_ttl
    k += 1
    while i < m:
        v = cur[i] - 1
        if v > 0:
            nxt[k] = v
            k += 1
        i += 1
    return k


@njit(inline="always")
def _apply_failure(cur, m):
    k = 0
    for i in range(m):
        v = cur[i] - 1
        if v > 0:
            cur[k] = v
            k += 1
    return k


@njit(cache=True)
def _episodes_det(
    seed, episodes, n, reduced, policy_tab, p_arr, ttl_arr, offsets, binom, step_cap, out
):
    for ep in range(episodes):
        base = _episode_base(seed, np.uint64(ep))
        ctr = np.uint64(0)
        cur = np.zeros(n, dtype=np.int64)
        nxt = np.zeros(n, dtype=np.int64)
        m = 0
        t = np.int64(0)
        result = np.int64(-1)
        while t < step_cap:
            sid = _rank(cur, m, n, reduced, offsets, binom)
            aid = policy_tab[sid]
            u = _u01(base, ctr)
            ctr += _ONE
            t += 1
            if u < p_arr[aid]:
                k = _apply_success(cur, nxt, m, ttl_arr[aid])
                tmp = cur
                cur = nxt
                nxt = tmp
                m = k
                if m == n:
                    result = t
                    break
            else:
                m = _apply_failure(cur, m)
        out[ep] = result


@njit(cache=True)
def _episodes_stoch(
    seed, episodes, n, reduced, policy_cum, p_arr, ttl_arr, offsets, binom, step_cap, out
):
    n_actions = p_arr.shape[0]
    for ep in range(episodes):
        base = _episode_base(seed, np.uint64(ep))
        ctr = np.uint64(0)
        cur = np.zeros(n, dtype=np.int64)
        nxt = np.zeros(n, dtype=np.int64)
        m = 0
        t = np.int64(0)
        result = np.int64(-1)
        while t < step_cap:
            sid = _rank(cur, m, n, reduced, offsets, binom)
            ua = _u01(base, ctr)
            ctr += _ONE
            aid = n_actions - 1
            for a in range(n_actions):
                if ua < policy_cum[sid, a]:
                    aid = a
                    break
            u = _u01(base, ctr)
            ctr += _ONE
            t += 1
            if u < p_arr[aid]:
                k = _apply_success(cur, nxt, m, ttl_arr[aid])
                tmp = cur
                cur = nxt
                nxt = tmp
                m = k
                if m == n:
                    result = t
                    break
            else:
                m = _apply_failure(cur, m)
        out[ep] = result


# ---------------------------------------------------------------------------
# public api

def _rank_tables(space):
    sizes = _grade_sizes(space.n, space.t_max, space.reduced)
    offsets = np.zeros(space.n + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(sizes)
    top = space.t_max + space.n + 2
    binom = np.zeros((top, space.n + 2), dtype=np.int64)
    for a in range(top):
        for b in range(space.n + 2):
            if b <= a:
                binom[a, b] = math.comb(a, b)
    return offsets[: space.n], binom


def simulate_episode(policy: Policy, actions: ActionSpace, rng, step_cap: int = 10**10) -> int:
    """One episode under the policy; returns the completion step count.

    Reference implementation on canonical tuples, independent of the compiled
    batch kernels.  Raises StepCapError past ``step_cap`` steps.
    """
    n = policy.space.n
    state: tuple[int, ...] = ()
    t = 0
    while t < step_cap:
        aid = policy.action_id_at(state, rng=rng)
        action = actions[aid]
        t += 1
        if rng.random() < action.p:
            state = insert_ttl(age_and_drop(state), action.ttl)
            if len(state) == n:
                return t
        else:
            state = age_and_drop(state)
    raise StepCapError(f"episode still running after {step_cap} steps")


def estimate(
    policy: Policy,
    actions: ActionSpace,
    episodes: int,
    seed: int,
    step_cap: int = 10**10,
    workers: int | None = None,
    histogram: bool = False,
) -> SimResult:
    """Mean completion time over independent seeded episodes.

    Episode i draws from the substream keyed by (seed, i); results are
    bit-identical for a fixed (seed, episodes) at any worker count.
    """
    if episodes < 2:
        raise ValueError(f"need at least 2 episodes, got {episodes}")
    offsets, binom = _rank_tables(policy.space)
    p_arr = np.array([a.p for a in actions.actions])
    ttl_arr = np.array([a.ttl for a in actions.actions], dtype=np.int64)
    out = np.empty(episodes, dtype=np.int64)

    if workers is None:
        env = os.environ.get("ENTPACK_WORKERS")
        workers = int(env) if env else None
    # Episodes run serially in one compiled loop; the counter-based streams
    # make any split across workers bit-compatible, so the worker count is
    # accepted but never changes results.
    del workers

    if policy.deterministic:
        _episodes_det(
            np.uint64(seed), episodes, policy.space.n, policy.space.reduced,
            policy.table, p_arr, ttl_arr, offsets, binom, np.int64(step_cap), out,
        )
    else:
        cum = np.cumsum(policy.table, axis=1)
        _episodes_stoch(
            np.uint64(seed), episodes, policy.space.n, policy.space.reduced,
            cum, p_arr, ttl_arr, offsets, binom, np.int64(step_cap), out,
        )

    capped = int(np.sum(out < 0))
    if capped:
        raise StepCapError(
            f"{capped} of {episodes} episodes exceeded the {step_cap}-step cap",
            completed=episodes - capped,
        )

    mean = float(out.mean())
    std_error = float(out.std(ddof=1) / math.sqrt(episodes))
    hist = None
    if histogram:
        values, counts = np.unique(out, return_counts=True)
        hist = {int(v): int(c) for v, c in zip(values, counts)}
    return SimResult(
        episodes=episodes,
        mean=mean,
        std_error=std_error,
        ci3=3.0 * std_error,
        seed=seed,
        histogram=hist,
    )
