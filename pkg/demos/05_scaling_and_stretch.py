"""State-space growth, the viable reduction, and the largest packet size.

The number of states grows exponentially with the packet size n (a binomial
coefficient with an explicit exponential lower bound).  Identifying states
with their viable links shrinks the space markedly and changes no expected
times, which is what makes the far-term n=11 computation below cheap enough
to run exactly: there the matching heuristic beats the best constant action
by about a factor of a million.
"""

import time

from entpack import (
    FAR_TERM,
    best_constant,
    build_action_space,
    build_transition_table,
    count_reduced,
    count_states,
    enumerate_states,
    heuristic_policy,
    policy_evaluation,
    state_count_lower_bound,
)

print("=== state counts for the far-term lifetime range (t_max=11) ===")
print("  n    full       reduced    lower bound")
for n in range(2, 12):
    print(
        f"  {n:<4} {count_states(n, 11):<10} {count_reduced(n, 11):<10} "
        f"{state_count_lower_bound(n, 11):,.1f}"
    )

print("\n=== exact far-term n=11 study on the reduced space ===")
t0 = time.time()
params = FAR_TERM.model_params(11)
actions = build_action_space(params)
space = enumerate_states(11, params.t_max, reduced=True)
table = build_transition_table(space, actions)
print(f"reduced space: {len(space):,} states x {len(actions)} actions "
      f"({time.time() - t0:.1f}s to build)")

h = heuristic_policy(space, actions, table=table)
w_h = policy_evaluation(h, table).value_empty
aid, con = best_constant(space, actions, table=table)
print(f"heuristic:      E[T] = {w_h:.4g} (empty-state lifetime "
      f"{actions[h.meta['empty_action']].ttl})")
print(f"best constant:  E[T] = {con.value_empty:.4g} (lifetime {actions[aid].ttl}, "
      f"the only one that can hold 11 links)")
print(f"ratio heuristic/constant = {w_h / con.value_empty:.3e}")
print(f"total {time.time() - t0:.1f}s")
