"""File formats: policy JSON, results CSV, ratio CSV, heat-map CSV.

Policy files are JSON with a ``meta`` block (model parameters, the action
list as (p, f, ttl) records, method, tolerances, seed) and a ``policy`` map
from the canonical textual state key to an action id (deterministic) or a
probability list (stochastic).  The state key is the comma-joined descending
lifetime list, with the empty string for the no-links state, so files diff
cleanly and are language-neutral.

CSV numbers are written with 17 significant digits, enough to round-trip a
double exactly.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .actions import Action, ActionSpace
from .dp import Policy
from .statespace import StateSpace, enumerate_states

POLICY_FORMAT = "entpack-policy-v1"

RESULTS_HEADER = ["n", "method", "expected_T", "evaluation_kind", "std_error", "episodes", "seed"]
RATIO_HEADER = ["n", "method", "ratio_to_optimal"]
HEATMAP_HEADER = ["n_viable", "min_viable_ttl", "modal_action_ttl", "state_count", "accessible"]


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def save_policy(
    path,
    policy: Policy,
    actions: ActionSpace,
    *,
    regime: str | None = None,
    gamma: float | None = None,
    lam: float | None = None,
    f_app: float | None = None,
    value_empty: float | None = None,
    method: str | None = None,
    tol: float | None = None,
    seed: int | None = None,
) -> None:
    """Write a policy with enough metadata to rebuild and re-evaluate it."""
    space = policy.space
    meta = {
        "regime": regime,
        "gamma": gamma,
        "lam": lam if lam is not None else actions.lam,
        "f_app": f_app,
        "n": space.n,
        "t_max": space.t_max,
        "space": "reduced" if space.reduced else "full",
        "kind": policy.kind,
        "method": method or policy.meta.get("method"),
        "tol": tol,
        "seed": seed,
        "value_empty": value_empty,
        "provenance": actions.provenance,
        "actions": [
            {"p": a.p, "f": a.fidelity, "ttl": a.ttl} for a in actions.actions
        ],
        "extra": _json_safe(policy.meta),
    }
    if policy.deterministic:
        mapping = {
            space.key_of(s): int(policy.table[i]) for i, s in enumerate(space.states)
        }
    else:
        mapping = {
            space.key_of(s): [float(p) for p in policy.table[i]]
            for i, s in enumerate(space.states)
        }
    doc = {"format": POLICY_FORMAT, "meta": meta, "policy": mapping}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return repr(obj)


@dataclass
class LoadedPolicy:
    policy: Policy
    actions: ActionSpace
    meta: dict


def load_policy(path) -> LoadedPolicy:
    """Rebuild a policy, its action space and state space from a policy file."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != POLICY_FORMAT:
        raise ValueError(f"{path} is not a {POLICY_FORMAT} file")
    meta = doc["meta"]
    actions = ActionSpace(
        actions=tuple(
            Action(p=rec["p"], ttl=rec["ttl"], fidelity=rec.get("f"))
            for rec in meta["actions"]
        ),
        lam=meta.get("lam"),
        provenance=meta.get("provenance", "synthetic"),
    )
    space = enumerate_states(meta["n"], meta["t_max"], reduced=meta["space"] == "reduced")
    mapping = doc["policy"]
    if len(mapping) != len(space):
        raise ValueError(
            f"policy file covers {len(mapping)} states, space has {len(space)}"
        )
    if meta["kind"] == "deterministic":
        table = np.empty(len(space), dtype=np.int64)
        for key, aid in mapping.items():
            table[space.index[StateSpace.state_of_key(key)]] = aid
    else:
        n_a = len(actions)
        table = np.empty((len(space), n_a), dtype=np.float64)
        for key, row in mapping.items():
            table[space.index[StateSpace.state_of_key(key)]] = row
    policy = Policy(meta["kind"], table, space, meta=dict(meta.get("extra") or {}))
    return LoadedPolicy(policy=policy, actions=actions, meta=meta)


def write_results_csv(path, rows, append: bool = False) -> None:
    """Rows of dicts with the RESULTS_HEADER columns; header written once."""
    exists = os.path.exists(path) and os.path.getsize(path) > 0
    mode = "a" if append else "w"
    with open(path, mode, newline="") as fh:
        writer = csv.writer(fh)
        if not (append and exists):
            writer.writerow(RESULTS_HEADER)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in RESULTS_HEADER])


def write_ratio_csv(path, rows, append: bool = False) -> None:
    exists = os.path.exists(path) and os.path.getsize(path) > 0
    mode = "a" if append else "w"
    with open(path, mode, newline="") as fh:
        writer = csv.writer(fh)
        if not (append and exists):
            writer.writerow(RATIO_HEADER)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in RATIO_HEADER])


def write_heatmap_csv(path, cells, aggregate: str, source: str = "") -> None:
    """Heat-map cells with a comment line recording the aggregation mode."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# aggregate={aggregate} source={source}\n")
        writer = csv.writer(fh)
        writer.writerow(HEATMAP_HEADER)
        for c in cells:
            writer.writerow(
                [
                    c.n_viable,
                    c.min_viable_ttl,
                    "" if c.modal_action_ttl is None else c.modal_action_ttl,
                    c.state_count,
                    c.accessible,
                ]
            )
