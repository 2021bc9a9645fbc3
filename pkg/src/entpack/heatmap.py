"""Heat-map aggregation of a deterministic policy.

Cells are keyed by the number of viable links (y) and the smallest viable
lifetime (x); the zero-viable row collapses to a single cell with sentinel
lifetime 0.  Each populated cell records the lifetime of the most commonly
chosen action over its states, with frequency ties broken towards the longer
lifetime.  Cells no run can ever visit (for example two links both at the
maximum lifetime, which a single generator cannot produce) are marked
inaccessible via a forward reachability sweep from the no-links state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import ActionSpace
from .dp import Policy
from .statespace import viable_projection
from .transitions import TransitionTable, build_transition_table


@dataclass(frozen=True)
class HeatmapCell:
    n_viable: int
    min_viable_ttl: int  # 0 for the zero-viable row
    modal_action_ttl: int | None  # None when the cell holds no states
    state_count: int
    accessible: bool


def reachable_mask(table: TransitionTable) -> np.ndarray:
    """States reachable from the no-links state under any action sequence."""
    n_s = table.n_states
    seen = np.zeros(n_s, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    while frontier.size:
        succ = table.succ[frontier].ravel()
        nxt = np.unique(np.concatenate([succ[succ >= 0], table.fail[frontier].ravel()]))
        new = nxt[~seen[nxt]]
        seen[new] = True
        frontier = new
    return seen


def heatmap_cells(
    policy: Policy,
    actions: ActionSpace,
    table: TransitionTable | None = None,
    aggregate: str = "reduced",
) -> list[HeatmapCell]:
    """Aggregate a deterministic policy into heat-map cells.

    ``aggregate='reduced'`` (default) populates cells with the states equal to
    their own viable projection; ``'full'`` uses every state, keyed by its
    projection's coordinates.  The choice is recorded by the caller in the
    output metadata.
    """
    if not policy.deterministic:
        raise ValueError("heat maps require a deterministic policy")
    if aggregate not in ("reduced", "full"):
        raise ValueError(f"unknown aggregation {aggregate!r}")
    space = policy.space
    n, t_max = space.n, space.t_max
    n_a = len(actions)
    if table is None:
        table = build_transition_table(space, actions)
    reach = reachable_mask(table)

    counts: dict[tuple[int, int], np.ndarray] = {}
    reachable_cells: set[tuple[int, int]] = set()
    for sid, state in enumerate(space.states):
        proj = viable_projection(state, n)
        if aggregate == "reduced" and proj != state:
            continue
        cell = (len(proj), proj[-1] if proj else 0)
        if cell not in counts:
            counts[cell] = np.zeros(n_a, dtype=np.int64)
        counts[cell][policy.table[sid]] += 1
        if reach[sid]:
            reachable_cells.add((len(proj), proj[-1] if proj else 0))
    if aggregate == "reduced" and not space.reduced:
        # accessibility of a viable-state cell: some reachable state projects
        # onto it
        reachable_cells = set()
        for sid in np.flatnonzero(reach):
            proj = viable_projection(space.states[sid], n)
            reachable_cells.add((len(proj), proj[-1] if proj else 0))

    cells = []
    grid = [(0, 0)] + [(m, t) for m in range(1, n) for t in range(1, t_max + 1)]
    for m, t in grid:
        cnt = counts.get((m, t))
        if cnt is None:
            cells.append(HeatmapCell(m, t, None, 0, False))
            continue
        modal = max(range(n_a), key=lambda a: (cnt[a], a))
        cells.append(
            HeatmapCell(
                n_viable=m,
                min_viable_ttl=t,
                modal_action_ttl=actions[modal].ttl,
                state_count=int(cnt.sum()),
                accessible=(m, t) in reachable_cells,
            )
        )
    return cells
