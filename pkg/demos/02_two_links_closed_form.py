"""The two-link case, solved three ways.

For a packet of two links the optimal policy has a closed form: play the most
probable action whenever a usable link is live, and tune the action played
from the empty state.  This script compares the closed-form expected time
with policy iteration and with a seeded simulation, on both hardware presets
and on a toy two-action space.
"""

import numpy as np

from entpack import (
    FAR_TERM,
    NEAR_TERM,
    analytic_n2,
    build_action_space,
    enumerate_states,
    build_transition_table,
    estimate,
    policy_iteration,
    simulate_episode,
    synthetic_action_space,
)

print("=== toy space: (p=0.5, lifetime 3) and (p=0.2, lifetime 6) ===")
toy = synthetic_action_space([(0.5, 3), (0.2, 6)])
policy, expected = analytic_n2(toy)
print(f"closed form: E[T] = {expected:.6f} (exactly 14/3)")
print(f"empty-state action: id {policy.meta['empty_action']} -> {toy[policy.meta['empty_action']]}")

space = enumerate_states(2, toy.t_max)
table = build_transition_table(space, toy)
result = policy_iteration(table)
print(f"policy iteration: E[T] = {result.values.value_empty:.6f} "
      f"in {result.rounds} improvement rounds")

sim = estimate(policy, toy, episodes=500_000, seed=7)
print(f"simulation:       E[T] = {sim.mean:.4f} +- {sim.std_error:.4f} "
      f"({sim.episodes} episodes)")

print("\none sampled episode trace length:",
      simulate_episode(policy, toy, np.random.default_rng(0)), "steps")

for preset in (NEAR_TERM, FAR_TERM):
    actions = build_action_space(preset.model_params(2))
    pol, expected = analytic_n2(actions)
    space = enumerate_states(2, actions.t_max)
    table = build_transition_table(space, actions)
    w_star = policy_iteration(table).values.value_empty
    print(f"\n=== {preset.name}: E[T] closed form {expected:.6f}, "
          f"policy iteration {w_star:.6f} ===")
    print(f"empty-state action lifetime: {actions[pol.meta['empty_action']].ttl} "
          f"(of {actions.t_max} possible)")
