"""Optimal vs heuristic vs baselines, across packet sizes.

Reproduces the performance-comparison tables for both presets: expected
completion times and their ratios to the optimum.  The heuristic ties the
optimum in the near-term regime and stays within three percent in the
far-term regime, while the constant-action and random baselines fall behind
by growing factors as the packet size increases.
"""

from entpack import (
    FAR_TERM,
    NEAR_TERM,
    best_constant,
    build_action_space,
    build_transition_table,
    enumerate_states,
    heuristic_policy,
    policy_evaluation,
    policy_iteration,
    random_policy,
)


def study(preset, n_max):
    print(f"\n=== {preset.name} (rate {preset.gamma}, trade-off {preset.lam}) ===")
    print("  n   optimal      heuristic    best-const   random       con/opt  ran/opt")
    for n in range(2, n_max + 1):
        params = preset.model_params(n)
        actions = build_action_space(params)
        space = enumerate_states(n, params.t_max)
        table = build_transition_table(space, actions)

        w_star = policy_iteration(table).values.value_empty
        h = heuristic_policy(space, actions, table=table)
        w_h = policy_evaluation(h, table).value_empty
        _, con = best_constant(space, actions, table=table)
        w_ran = policy_evaluation(random_policy(space, actions), table).value_empty

        print(
            f"  {n}   {w_star:<12.4g} {w_h:<12.4g} {con.value_empty:<12.4g} "
            f"{w_ran:<12.4g} {con.value_empty / w_star:<8.2f} {w_ran / w_star:.2f}"
        )


study(NEAR_TERM, 5)
study(FAR_TERM, 7)

print(
    "\nthe advantage of adapting the generation parameters grows with n:\n"
    "near-term n=5 gains a factor ~14 over the best constant action and ~56\n"
    "over random choices; far-term n=7 gains ~19 and ~139."
)
