"""Experiment runner: solve, sweep, heatmap, count, simulate.

Every subcommand prints a machine-readable JSON record on success and a
``{"error": kind, "message": ...}`` record on stderr otherwise.  Exit codes:
0 success, 2 infeasible parameters, 3 non-convergence, 4 step cap hit.

A JSON config file (``--config``) may supply any of the keys

    regime, raw {memory_lifetime, p_det, batch_size, f_app},
    n, n_max, method, methods, tol, episodes, seed, reduced, out, step_cap

and every command-line flag overrides the config value.  The environment
variable ENTPACK_WORKERS caps the simulator's worker count (results do not
depend on it).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import serialize
from .actions import InfeasibleActionError, build_action_space
from .dp import (
    ConvergenceError,
    policy_evaluation,
    policy_iteration,
)
from .heatmap import heatmap_cells
from .model import InfeasibleError
from .montecarlo import StepCapError, estimate
from .policies import (
    HeuristicSpec,
    analytic_n2,
    best_constant,
    constant_policy,
    heuristic_policy,
    random_policy,
)
from .regimes import get_regime, preset_from_raw
from .statespace import count_reduced, count_states, enumerate_states, state_count_lower_bound
from .transitions import build_transition_table

METHODS = ["policy-iteration", "heuristic", "best-constant", "random", "analytic-n2"]
DEFAULT_SWEEP_METHODS = ["policy-iteration", "heuristic", "best-constant", "random"]
EXACT_STATE_LIMIT = 10**6


def _emit(record, stream=None):
    json.dump(record, stream or sys.stdout, default=str)
    (stream or sys.stdout).write("\n")


def _load_config(path):
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _opt(args, config, key, default=None):
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _preset(args, config):
    regime = _opt(args, config, "regime")
    raw = config.get("raw")
    if regime in (None, "custom") and raw:
        return preset_from_raw(
            memory_lifetime=raw["memory_lifetime"],
            p_det=raw["p_det"],
            batch_size=raw["batch_size"],
            f_app=raw["f_app"],
        )
    if regime is None:
        raise InfeasibleError("no regime given: pass --regime or a config with 'regime'/'raw'")
    return get_regime(regime)


def _solve_one(method, preset, n, *, reduced, tol, seed, episodes):
    """Solve one (method, n) cell; returns (policy, value, kind, std_error)."""
    params = preset.model_params(n)
    actions = build_action_space(params)
    if method == "analytic-n2":
        if n != 2:
            raise InfeasibleError(f"analytic-n2 applies to n=2 only, got n={n}")
        policy, value = analytic_n2(actions)
        return policy, actions, value, "exact", None

    space = enumerate_states(n, params.t_max, reduced=reduced)
    exact = count_states(n, params.t_max) if not reduced else count_reduced(n, params.t_max)
    use_exact = exact <= EXACT_STATE_LIMIT
    table = build_transition_table(space, actions) if use_exact else None

    if method == "policy-iteration":
        if not use_exact:
            raise InfeasibleError(
                f"state space too large for exact solving ({exact} states)"
            )
        res = policy_iteration(table, tol=tol)
        return res.policy, actions, res.values.value_empty, "exact", None
    if method == "heuristic":
        spec = HeuristicSpec(seed=seed or 0, selection_budget=episodes or 10**6)
        policy = heuristic_policy(space, actions, spec=spec, table=table)
        if use_exact:
            value = policy_evaluation(policy, table, tol=tol).value_empty
            return policy, actions, value, "exact", None
        sim = estimate(policy, actions, episodes=episodes or 10**6, seed=seed or 0)
        return policy, actions, sim.mean, "simulated", sim.std_error
    if method == "best-constant":
        if not use_exact:
            raise InfeasibleError(
                f"state space too large for exact solving ({exact} states)"
            )
        aid, values = best_constant(space, actions, table=table, tol=tol)
        return constant_policy(space, aid), actions, values.value_empty, "exact", None
    if method == "random":
        policy = random_policy(space, actions)
        if use_exact:
            value = policy_evaluation(policy, table, tol=tol).value_empty
            return policy, actions, value, "exact", None
        sim = estimate(policy, actions, episodes=episodes or 10**6, seed=seed or 0)
        return policy, actions, sim.mean, "simulated", sim.std_error
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def cmd_solve(args, config):
    preset = _preset(args, config)
    n = int(_opt(args, config, "n"))
    method = _opt(args, config, "method", "policy-iteration")
    tol = float(_opt(args, config, "tol", 1e-10))
    seed = _opt(args, config, "seed")
    episodes = _opt(args, config, "episodes")
    reduced = bool(_opt(args, config, "reduced", False))
    out = _opt(args, config, "out")

    policy, actions, value, kind, std_error = _solve_one(
        method, preset, n, reduced=reduced, tol=tol, seed=seed, episodes=episodes
    )
    if out:
        serialize.save_policy(
            out,
            policy,
            actions,
            regime=preset.name,
            gamma=preset.gamma,
            lam=preset.lam,
            f_app=preset.f_app,
            value_empty=value,
            method=method,
            tol=tol,
            seed=seed,
        )
    _emit(
        {
            "regime": preset.name,
            "n": n,
            "method": method,
            "value_empty": value,
            "evaluation_kind": kind,
            "std_error": std_error,
            "policy_file": out,
        }
    )
    return 0


def cmd_sweep(args, config):
    preset = _preset(args, config)
    n_lo = int(_opt(args, config, "n", 2))
    n_hi = int(_opt(args, config, "n_max", n_lo))
    methods = _opt(args, config, "method") or config.get("methods") or DEFAULT_SWEEP_METHODS
    if isinstance(methods, str):
        methods = [methods]
    tol = float(_opt(args, config, "tol", 1e-10))
    seed = _opt(args, config, "seed", 0)
    episodes = _opt(args, config, "episodes")
    reduced = bool(_opt(args, config, "reduced", False))
    out = _opt(args, config, "out", "results.csv")

    rows, ratio_rows = [], []
    for n in range(n_lo, n_hi + 1):
        values = {}
        for method in methods:
            try:
                _, _, value, kind, std_error = _solve_one(
                    method, preset, n, reduced=reduced, tol=tol, seed=seed,
                    episodes=episodes,
                )
            except (InfeasibleError, InfeasibleActionError) as exc:
                rows.append({"n": n, "method": method, "expected_T": None,
                             "evaluation_kind": "error:infeasible", "std_error": None,
                             "episodes": None, "seed": None})
                continue
            except ConvergenceError:
                rows.append({"n": n, "method": method, "expected_T": None,
                             "evaluation_kind": "error:non-convergence", "std_error": None,
                             "episodes": None, "seed": None})
                continue
            values[method] = value
            rows.append(
                {
                    "n": n,
                    "method": method,
                    "expected_T": value,
                    "evaluation_kind": kind,
                    "std_error": std_error,
                    "episodes": episodes if kind == "simulated" else None,
                    "seed": seed if kind == "simulated" else None,
                }
            )
        star = values.get("policy-iteration") or values.get("analytic-n2")
        if star:
            for method, value in values.items():
                ratio_rows.append({"n": n, "method": method, "ratio_to_optimal": value / star})

    serialize.write_results_csv(out, rows, append=bool(_opt(args, config, "append", False)))
    ratio_path = _ratio_path(out)
    if ratio_rows:
        serialize.write_ratio_csv(ratio_path, ratio_rows)
    _emit({"regime": preset.name, "rows": len(rows), "results": out,
           "ratios": ratio_path if ratio_rows else None})
    return 0


def _ratio_path(out: str) -> str:
    if out.endswith(".csv"):
        return out[: -len(".csv")] + "_ratios.csv"
    return out + "_ratios.csv"


def cmd_heatmap(args, config):
    loaded = serialize.load_policy(args.policy_file)
    if not loaded.policy.deterministic:
        raise InfeasibleError("heat maps require a deterministic policy file")
    aggregate = "full" if args.full_states else "reduced"
    cells = heatmap_cells(loaded.policy, loaded.actions, aggregate=aggregate)
    out = _opt(args, config, "out", "heatmap.csv")
    serialize.write_heatmap_csv(out, cells, aggregate=aggregate, source=args.policy_file)
    zero = next(c for c in cells if c.n_viable == 0)
    _emit({"cells": len(cells), "zero_viable_modal_ttl": zero.modal_action_ttl, "out": out})
    return 0


def cmd_count(args, config):
    n = int(_opt(args, config, "n"))
    t_max = int(_opt(args, config, "t_max"))
    full = count_states(n, t_max)
    red = count_reduced(n, t_max)
    bound = state_count_lower_bound(n, t_max)
    if full <= 5 * 10**5:
        verified = (
            len(enumerate_states(n, t_max)) == full
            and len(enumerate_states(n, t_max, reduced=True)) == red
        )
        status = "verified" if verified else "MISMATCH"
    else:
        status = "skipped (too large)"
    _emit(
        {
            "n": n,
            "t_max": t_max,
            "full_states": full,
            "reduced_states": red,
            "lower_bound": bound,
            "enumeration": status,
        }
    )
    return 0 if status != "MISMATCH" else 3


def cmd_simulate(args, config):
    loaded = serialize.load_policy(args.policy_file)
    episodes = int(_opt(args, config, "episodes", 10**6))
    seed = int(_opt(args, config, "seed", 0))
    step_cap = int(_opt(args, config, "step_cap", 10**10))
    result = estimate(
        loaded.policy, loaded.actions, episodes=episodes, seed=seed, step_cap=step_cap
    )
    record = {
        "episodes": result.episodes,
        "mean": result.mean,
        "std_error": result.std_error,
        "ci3": result.ci3,
        "seed": result.seed,
        "generator": result.generator,
        "policy_file": args.policy_file,
    }
    out = _opt(args, config, "out")
    if out:
        serialize.write_results_csv(
            out,
            [
                {
                    "n": loaded.meta["n"],
                    "method": loaded.meta.get("method"),
                    "expected_T": result.mean,
                    "evaluation_kind": "simulated",
                    "std_error": result.std_error,
                    "episodes": result.episodes,
                    "seed": result.seed,
                }
            ],
            append=True,
        )
        record["results"] = out
    _emit(record)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entpack",
        description="Adaptive entanglement-packet generation policies: solvers and simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_flag=True):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--regime", choices=["near-term", "far-term", "custom"])
        if n_flag:
            p.add_argument("--n", type=int, help="required simultaneous links")
        p.add_argument("--tol", type=float, help="evaluation tolerance (default 1e-10)")
        p.add_argument("--seed", type=int)
        p.add_argument("--episodes", type=int)
        group = p.add_mutually_exclusive_group()
        group.add_argument("--reduced", action="store_true", default=None,
                           help="solve on the viable-reduced state space")
        group.add_argument("--full", dest="reduced", action="store_false",
                           help="solve on the full state space (default)")
        p.add_argument("--out", help="output path")

    p_solve = sub.add_parser("solve", help="compute one policy and its expected time")
    common(p_solve)
    p_solve.add_argument("--method", choices=METHODS)
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="policy performance across a range of n")
    common(p_sweep)
    p_sweep.add_argument("--n-max", type=int)
    p_sweep.add_argument("--method", action="append", choices=METHODS,
                         help="repeatable; default: all exact methods")
    p_sweep.add_argument("--append", action="store_true", default=None,
                         help="append to an existing results file")
    p_sweep.set_defaults(func=cmd_sweep)

    p_heat = sub.add_parser("heatmap", help="aggregate a policy file into heat-map cells")
    p_heat.add_argument("policy_file")
    p_heat.add_argument("--config")
    p_heat.add_argument("--out")
    p_heat.add_argument("--full-states", action="store_true",
                        help="aggregate over all states instead of viable-reduced ones")
    p_heat.set_defaults(func=cmd_heatmap)

    p_count = sub.add_parser("count", help="state-space sizes and bounds")
    p_count.add_argument("--config")
    p_count.add_argument("--n", type=int)
    p_count.add_argument("--t-max", type=int)
    p_count.set_defaults(func=cmd_count)

    p_sim = sub.add_parser("simulate", help="Monte Carlo estimate for a stored policy")
    p_sim.add_argument("policy_file")
    p_sim.add_argument("--config")
    p_sim.add_argument("--episodes", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--step-cap", type=int)
    p_sim.add_argument("--out", help="results CSV to append a row to")
    p_sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _load_config(getattr(args, "config", None))
    try:
        return args.func(args, config)
    except (InfeasibleError, InfeasibleActionError, ValueError) as exc:
        _emit({"error": "infeasible", "message": str(exc)}, sys.stderr)
        return 2
    except ConvergenceError as exc:
        _emit({"error": "non-convergence", "message": str(exc)}, sys.stderr)
        return 3
    except StepCapError as exc:
        _emit({"error": "step-cap", "message": str(exc), "completed": exc.completed}, sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
