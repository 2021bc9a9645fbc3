"""Exact policy evaluation and policy iteration over expected completion times.

Values are kept as non-negative expected times-to-completion ``w`` with
``w = 0`` on absorbing states, so smaller is better and the greedy step
minimises.  This is the sign-flipped twin of the usual reward formulation
with a step reward of -1; the optima coincide.

Evaluation methods:

* ``jacobi`` - synchronous sweeps of the fixed-point update (parallelisable,
  bit-deterministic).
* ``gauss_seidel`` - in-place sweeps, usually fewer iterations.
* ``direct`` - sparse LU solve of ``(I - P) w = 1`` restricted to the
  non-absorbing states, with one step of iterative refinement.  Exact up to
  rounding and the only practical option when the expected time is so large
  that sweep convergence would take ~E[T] iterations.
* ``auto`` (default) - ``direct`` at any size this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .statespace import StateSpace
from .transitions import TransitionTable


class ConvergenceError(RuntimeError):
    """Evaluation did not reach the fixed point (often an infinite E[T])."""


@dataclass
class Policy:
    """Action assignment per non-absorbing state.

    ``table`` is an int array of action ids (deterministic) or a row-stochastic
    float matrix of action probabilities (stochastic).  Absorbing states carry
    no assignment; they are not enumerated.
    """

    kind: str
    table: np.ndarray
    space: StateSpace
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n_s = len(self.space)
        if self.kind == "deterministic":
            if self.table.shape != (n_s,):
                raise ValueError(
                    f"deterministic table must have shape ({n_s},), "
                    f"got {self.table.shape}"
                )
        elif self.kind == "stochastic":
            if self.table.ndim != 2 or self.table.shape[0] != n_s:
                raise ValueError(
                    f"stochastic table must have {n_s} rows, got {self.table.shape}"
                )
            rows = self.table.sum(axis=1)
            if np.any(np.abs(rows - 1.0) > 1e-12) or np.any(self.table < 0.0):
                raise ValueError("stochastic rows must be distributions")
        else:
            raise ValueError(f"unknown policy kind {self.kind!r}")

    @property
    def deterministic(self) -> bool:
        return self.kind == "deterministic"

    def action_id_at(self, state, rng=None) -> int:
        """Action for a state (projected on reduced spaces); samples if stochastic."""
        sid = self.space.lookup_id(state)
        if self.deterministic:
            return int(self.table[sid])
        if rng is None:
            raise ValueError("stochastic policy lookup needs an rng")
        return int(rng.choice(self.table.shape[1], p=self.table[sid]))


@dataclass
class ValueTable:
    """Expected completion time per non-absorbing state id.

    Absorbing states are implicitly zero.  ``residual`` is the final sup-norm
    Bellman residual; for direct solves convergence is certified against a
    scale-aware bound ``tol * max(1, ||w||_inf)`` since an absolute 1e-10 is
    meaningless for astronomically large expected times.
    """

    w: np.ndarray
    residual: float
    iterations: int
    converged: bool
    method: str

    @property
    def value_empty(self) -> float:
        """Expected completion time from the no-links state."""
        return float(self.w[0])


def _policy_branch_arrays(policy: Policy, table: TransitionTable):
    """Per-state success probability and branch ids under a deterministic policy."""
    aid = policy.table
    rows = np.arange(len(aid))
    return table.p[aid], table.succ[rows, aid], table.fail[rows, aid]


def q_values(w: np.ndarray, table: TransitionTable) -> np.ndarray:
    """One-step lookahead values: ``1 + p * w[succ] + (1 - p) * w[fail]``."""
    w_succ = np.where(table.succ >= 0, w[np.maximum(table.succ, 0)], 0.0)
    w_fail = w[table.fail]
    return 1.0 + table.p[None, :] * w_succ + (1.0 - table.p[None, :]) * w_fail


def _bellman_apply_det(w, p_s, succ_s, fail_s):
    w_succ = np.where(succ_s >= 0, w[np.maximum(succ_s, 0)], 0.0)
    return 1.0 + p_s * w_succ + (1.0 - p_s) * w[fail_s]


def _jacobi_det(p_s, succ_s, fail_s, tol, max_iters):
    w = np.zeros(len(p_s))
    for it in range(1, max_iters + 1):
        w_new = _bellman_apply_det(w, p_s, succ_s, fail_s)
        delta = float(np.max(np.abs(w_new - w)))
        w = w_new
        if delta < tol:
            return w, delta, it, True
    return w, delta, max_iters, False


def _jacobi_stoch(pi, table, tol, max_iters):
    w = np.zeros(table.n_states)
    for it in range(1, max_iters + 1):
        w_new = (pi * q_values(w, table)).sum(axis=1)
        delta = float(np.max(np.abs(w_new - w)))
        w = w_new
        if delta < tol:
            return w, delta, it, True
    return w, delta, max_iters, False


def _gauss_seidel_det(p_s, succ_s, fail_s, tol, max_iters):
    w = np.zeros(len(p_s))
    for it in range(1, max_iters + 1):
        delta = 0.0
        for s in range(len(w)):
            ws = w[succ_s[s]] if succ_s[s] >= 0 else 0.0
            new = 1.0 + p_s[s] * ws + (1.0 - p_s[s]) * w[fail_s[s]]
            d = abs(new - w[s])
            if d > delta:
                delta = d
            w[s] = new
        if delta < tol:
            return w, float(delta), it, True
    return w, float(delta), max_iters, False


def _check_proper(policy: Policy, table: TransitionTable) -> None:
    """Require that every state can reach absorption under the policy.

    On a finite chain that is equivalent to absorption being certain, hence
    to finite expected completion times; without it the linear system is
    singular and sweeps diverge.  Detected by a backward closure from the
    success branches that complete the packet.
    """
    n_s = table.n_states
    if policy.deterministic:
        p_s, succ_s, fail_s = _policy_branch_arrays(policy, table)
        edges_succ = [succ_s]
        edges_fail = [(fail_s, p_s < 1.0)]
    else:
        edges_succ = [
            np.where(policy.table[:, a] > 0.0, table.succ[:, a], n_s)
            for a in range(table.n_actions)
        ]
        edges_fail = [
            (table.fail[:, a], (policy.table[:, a] > 0.0) & (table.p[a] < 1.0))
            for a in range(table.n_actions)
        ]
    can = np.zeros(n_s, dtype=bool)
    for succ in edges_succ:
        can |= succ == -1
    changed = True
    while changed:
        prev = can.copy()
        for succ in edges_succ:
            valid = (succ >= 0) & (succ < n_s)
            can[valid] |= prev[succ[valid]]
        for fail, mask in edges_fail:
            can[mask] |= prev[fail[mask]]
        changed = bool(np.any(can & ~prev))
    if not np.all(can):
        raise ConvergenceError(
            f"{int(np.sum(~can))} states can never reach completion under "
            "this policy; its expected completion time is infinite"
        )


def _transition_matrix(policy: Policy, table: TransitionTable) -> sp.csr_matrix:
    """Row-substochastic one-step matrix under the policy (absorption dropped)."""
    n_s = table.n_states
    if policy.deterministic:
        p_s, succ_s, fail_s = _policy_branch_arrays(policy, table)
        rows = np.arange(n_s)
        keep = succ_s >= 0
        r = np.concatenate([rows[keep], rows])
        c = np.concatenate([succ_s[keep], fail_s])
        v = np.concatenate([p_s[keep], 1.0 - p_s])
    else:
        pi = policy.table
        rows = np.repeat(np.arange(n_s), table.n_actions)
        succ = table.succ.ravel()
        fail = table.fail.ravel()
        w_succ = (pi * table.p[None, :]).ravel()
        w_fail = (pi * (1.0 - table.p)[None, :]).ravel()
        keep = succ >= 0
        r = np.concatenate([rows[keep], rows])
        c = np.concatenate([succ[keep], fail])
        v = np.concatenate([w_succ[keep], w_fail])
    mat = sp.coo_matrix((v, (r, c)), shape=(n_s, n_s))
    return mat.tocsr()


def _direct(policy: Policy, table: TransitionTable):
    p_mat = _transition_matrix(policy, table)
    a_mat = (sp.identity(table.n_states, format="csr") - p_mat).tocsc()
    b = np.ones(table.n_states)
    try:
        lu = spla.splu(a_mat)
        w = lu.solve(b)
        # one step of iterative refinement sharpens large-scale solutions
        r = b - (w - p_mat @ w)
        w = w + lu.solve(r)
    except RuntimeError as exc:  # singular factorisation
        raise ConvergenceError(
            f"expected completion time is infinite under this policy ({exc})"
        ) from None
    if not np.all(np.isfinite(w)):
        raise ConvergenceError(
            "expected completion time is infinite under this policy"
        )
    return w


def policy_evaluation(
    policy: Policy,
    table: TransitionTable,
    tol: float = 1e-10,
    max_iters: int = 10_000_000,
    method: str = "auto",
) -> ValueTable:
    """Expected completion time of every state under a fixed policy.

    Raises ConvergenceError when the sweep budget is exhausted or the policy
    cannot complete from some state (infinite expected time).
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if method == "auto":
        method = "direct"
    _check_proper(policy, table)

    if method == "direct":
        w = _direct(policy, table)
        if policy.deterministic:
            p_s, succ_s, fail_s = _policy_branch_arrays(policy, table)
            resid = float(np.max(np.abs(_bellman_apply_det(w, p_s, succ_s, fail_s) - w)))
        else:
            resid = float(np.max(np.abs((policy.table * q_values(w, table)).sum(axis=1) - w)))
        scale = max(1.0, float(np.max(np.abs(w))))
        converged = resid <= tol * scale
        if not converged:
            raise ConvergenceError(
                f"direct solve residual {resid:.3e} exceeds {tol:.1e} * {scale:.3e}"
            )
        return ValueTable(w=w, residual=resid, iterations=1, converged=True, method=method)

    if method == "jacobi":
        if policy.deterministic:
            p_s, succ_s, fail_s = _policy_branch_arrays(policy, table)
            w, resid, iters, ok = _jacobi_det(p_s, succ_s, fail_s, tol, max_iters)
        else:
            w, resid, iters, ok = _jacobi_stoch(policy.table, table, tol, max_iters)
    elif method == "gauss_seidel":
        if not policy.deterministic:
            raise ValueError("gauss_seidel evaluation supports deterministic policies only")
        p_s, succ_s, fail_s = _policy_branch_arrays(policy, table)
        w, resid, iters, ok = _gauss_seidel_det(p_s, succ_s, fail_s, tol, max_iters)
    else:
        raise ValueError(f"unknown evaluation method {method!r}")

    if not ok:
        raise ConvergenceError(
            f"no convergence after {iters} sweeps (last update {resid:.3e} > "
            f"tol {tol:.1e}); the policy may have infinite expected time"
        )
    return ValueTable(w=w, residual=resid, iterations=iters, converged=True, method=method)


def greedy_policy(w: np.ndarray, table: TransitionTable, meta=None) -> Policy:
    """Greedy improvement: per state, the action minimising the lookahead value.

    Ties break towards the lowest action id, i.e. the shortest-lived and most
    probable generation parameters.
    """
    aid = np.argmin(q_values(w, table), axis=1).astype(np.int64)
    return Policy("deterministic", aid, table.space, meta=dict(meta or {}))


def default_initial_policy(table: TransitionTable) -> Policy:
    """Most probable constant action that can finish: smallest lifetime >= n.

    A constant action with lifetime below n can never hold n links at once
    (simultaneous links always have distinct lifetimes), so the most probable
    such action is the fastest safely-evaluable starting point.
    """
    aid = table.actions.first_with_ttl_at_least(table.space.n)
    tab = np.full(table.n_states, aid, dtype=np.int64)
    return Policy("deterministic", tab, table.space, meta={"method": "constant", "action": aid})


@dataclass
class PolicyIterationResult:
    policy: Policy
    values: ValueTable
    rounds: int
    history: list | None = None


def policy_iteration(
    table: TransitionTable,
    tol: float = 1e-10,
    initial: Policy | None = None,
    eval_method: str = "auto",
    max_rounds: int = 1000,
    keep_history: bool = False,
) -> PolicyIterationResult:
    """Alternate exact evaluation and greedy improvement until the policy fixes.

    Returns the optimal policy, its value table and the number of improvement
    rounds.  ``keep_history`` records each round's value array, e.g. for
    monotonicity checks.
    """
    policy = initial if initial is not None else default_initial_policy(table)
    if not policy.deterministic:
        raise ValueError("policy iteration needs a deterministic initial policy")
    history = [] if keep_history else None
    values = policy_evaluation(policy, table, tol=tol, method=eval_method)
    for rounds in range(1, max_rounds + 1):
        if keep_history:
            history.append(values.w.copy())
        improved = greedy_policy(values.w, table)
        if np.array_equal(improved.table, policy.table):
            break
        policy = improved
        values = policy_evaluation(policy, table, tol=tol, method=eval_method)
    else:
        raise ConvergenceError(f"policy iteration did not settle in {max_rounds} rounds")
    policy.meta.update({"method": "policy-iteration", "rounds": rounds, "tol": tol})
    return PolicyIterationResult(policy=policy, values=values, rounds=rounds, history=history)


def optimality_certificate(values: ValueTable, table: TransitionTable) -> float:
    """Sup-norm residual of the optimality condition ``w = 1 + min_a P w``.

    A certificate below ``10 * tol`` confirms the table is optimal.
    """
    best = q_values(values.w, table).min(axis=1)
    return float(np.max(np.abs(values.w - best)))
