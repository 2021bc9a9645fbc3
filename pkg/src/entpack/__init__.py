"""Adaptive generation policies for entanglement packets.

A packet is a set of n simultaneously live entangled links; generation is
sequential and probabilistic, stored links decay, and each attempt may trade
success probability against the fresh link's fidelity (hence lifetime).  This
package models the task as a finite Markov decision process and provides:

* exact solvers (policy evaluation and policy iteration) over expected
  completion times,
* an efficient matching heuristic plus constant-action and random baselines,
* a closed-form solution for two-link packets,
* a reproducible seeded simulator,
* state-space enumeration with a viable-link reduction, and counting,
* presets for a near-term and a far-term hardware regime.

See the demos/ directory of the repository for narrative walkthroughs and the
``entpack`` command line for file-based experiment runs.
"""

from .actions import (
    Action,
    ActionSpace,
    approximation_error_bound,
    build_action_space,
    exact_batched_probability,
    max_success_probability,
    singleclick_fidelity,
    synthetic_action_space,
)
from .dp import (
    ConvergenceError,
    Policy,
    PolicyIterationResult,
    ValueTable,
    optimality_certificate,
    policy_evaluation,
    policy_iteration,
)
from .heatmap import HeatmapCell, heatmap_cells
from .model import (
    InfeasibleError,
    ModelParams,
    fidelity_after,
    max_ttl,
    ttl_of_fidelity,
)
from .montecarlo import SimResult, StepCapError, estimate, simulate_episode
from .policies import (
    HeuristicSpec,
    analytic_n2,
    best_constant,
    constant_policy,
    heuristic_policy,
    random_policy,
)
from .regimes import FAR_TERM, NEAR_TERM, RegimePreset, get_regime, preset_from_raw
from .statespace import (
    StateSpace,
    canonicalize,
    count_reduced,
    count_states,
    enumerate_states,
    is_absorbing,
    state_count_lower_bound,
    viable_count,
    viable_projection,
)
from .transitions import TransitionEntry, TransitionTable, build_transition_table, successors

__version__ = "0.1.0"
