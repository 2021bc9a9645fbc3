"""What the optimal policy actually does: heat-map views.

Aggregates the optimal policy by (number of viable links, smallest viable
lifetime) and prints the lifetime of the most commonly chosen action per
cell.  Two patterns stand out: pressure (more viable links, or links about to
expire) pushes towards high-probability short-lived generation, while the
empty state invests in a long-lived link; and in the far-term regime the
first link targets lifetime ten rather than the maximum eleven, trading a
little lifetime for a better success probability.
"""

from entpack import (
    FAR_TERM,
    NEAR_TERM,
    build_action_space,
    build_transition_table,
    enumerate_states,
    heatmap_cells,
    policy_iteration,
)


def show(preset, n):
    params = preset.model_params(n)
    actions = build_action_space(params)
    space = enumerate_states(n, params.t_max)
    table = build_transition_table(space, actions)
    policy = policy_iteration(table).policy
    cells = {(c.n_viable, c.min_viable_ttl): c
             for c in heatmap_cells(policy, actions, table=table)}

    t_max = params.t_max
    print(f"\n=== {preset.name}, n={n}: modal action lifetime per cell ===")
    print("(rows: viable links; columns: smallest viable lifetime; . = unreachable)")
    header = "      " + " ".join(f"{t:>3}" for t in range(1, t_max + 1))
    print(header)
    for m in range(n - 1, 0, -1):
        row = [f"m={m:<2}  "]
        for t in range(1, t_max + 1):
            cell = cells[(m, t)]
            row.append(f"{cell.modal_action_ttl:>3}" if cell.accessible else "  .")
        print(" ".join(row))
    zero = cells[(0, 0)]
    print(f"empty state: generate a lifetime-{zero.modal_action_ttl} link "
          f"(maximum possible: {t_max})")


show(NEAR_TERM, 5)
show(FAR_TERM, 7)
