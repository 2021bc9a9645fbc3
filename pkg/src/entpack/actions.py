"""Generation actions and the batched single-click rate-fidelity trade-off.

An action is a pair (success probability, fresh-link fidelity); the fidelity
fixes the lifetime of the new link.  Batching M executions of the single-click
protocol into one attempt gives the exact relation

    p_exact = 1 - (1 - (1 - F) / (lam * M)) ** M,

which for large M is accurately approximated by

    F = lam * ln(1 - p) + 1.

The approximate relation defines the action spaces built here; the exact one
and its error bound are kept for verification.  Discretising by the induced
lifetime gives one action per reachable lifetime value: the most probable
generation parameters that still deliver a link living at least that long.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import QUARTER, ModelParams, max_ttl, ttl_of_fidelity


class InfeasibleActionError(ValueError):
    """No action exists for some lifetime in the requested range."""


def singleclick_fidelity(p: float, lam: float, f_app: float = 0.5) -> float:
    """Fresh-link fidelity at success probability ``p``: lam*ln(1-p) + 1.

    Valid for ``0 < p < 1 - exp((f_app - 1)/lam)``, the range over which the
    resulting fidelity stays above ``f_app``.
    """
    sup = max_success_probability(lam, f_app)
    if not 0.0 < p < sup:
        raise ValueError(f"p must be in (0, {sup:.6g}), got {p}")
    return lam * math.log1p(-p) + 1.0


def max_success_probability(lam: float, f_app: float) -> float:
    """Supremum of usable success probabilities: 1 - exp((f_app - 1)/lam).

    The usable range is the open interval below this value; at the supremum
    the generated fidelity hits the usability threshold exactly.
    """
    return -math.expm1((f_app - 1.0) / lam)


def exact_batched_probability(f: float, lam: float, m_batch: int) -> float:
    """Success probability of one batched attempt at target fidelity ``f``.

    One attempt is ``m_batch`` protocol executions, each succeeding with
    probability ``(1 - f) / (lam * m_batch)``; the attempt succeeds when at
    least one execution does.
    """
    if m_batch < 1:
        raise ValueError(f"batch size must be >= 1, got {m_batch}")
    if not 0.0 < f <= 1.0:
        raise ValueError(f"fidelity must be in (0, 1], got {f}")
    per_exec = (1.0 - f) / (lam * m_batch)
    if not 0.0 <= per_exec < 1.0:
        raise ValueError(
            f"per-execution probability {per_exec:.6g} outside [0, 1)"
        )
    return -math.expm1(m_batch * math.log1p(-per_exec))


def approximation_error_bound(f: float, lam: float, m_batch: int) -> float:
    """Upper bound on the exact-minus-approximate probability gap.

    With ``r = (1 - f)/lam`` and ``y = m_batch / r`` (requires y > 1), the gap
    is positive and below ``1 - (1 - r/m_batch) ** r``.
    """
    r = (1.0 - f) / lam
    if r == 0.0:
        return 0.0
    y = m_batch / r
    if y <= 1.0:
        raise ValueError(f"batch size too small for this fidelity: y={y:.6g} <= 1")
    return -math.expm1(r * math.log1p(-r / m_batch))


@dataclass(frozen=True)
class Action:
    """One choice of generation parameters.

    ``fidelity`` is None for synthetic actions specified directly as a
    (probability, lifetime) pair.
    """

    p: float
    ttl: int
    fidelity: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"success probability must be in (0, 1], got {self.p}")
        if self.ttl < 1:
            raise ValueError(f"lifetime must be >= 1, got {self.ttl}")


@dataclass(frozen=True)
class ActionSpace:
    """Finite list of actions sorted by increasing fresh-link lifetime.

    Lifetimes strictly increase along the list while success probabilities
    strictly decrease (and fidelities, when present, strictly increase), so
    action 0 is always the most probable, shortest-lived choice.
    """

    actions: tuple[Action, ...]
    lam: float | None = None
    provenance: str = "synthetic"

    def __post_init__(self) -> None:
        if not self.actions:
            raise ValueError("action space must contain at least one action")
        for a, b in zip(self.actions, self.actions[1:]):
            if b.ttl <= a.ttl:
                raise ValueError(
                    f"lifetimes must strictly increase: {a.ttl} then {b.ttl}"
                )
            if b.p >= a.p:
                raise ValueError(
                    f"probabilities must strictly decrease: {a.p} then {b.p}"
                )
            if a.fidelity is not None and b.fidelity is not None:
                if b.fidelity <= a.fidelity:
                    raise ValueError(
                        "fidelities must strictly increase along the list"
                    )

    def __len__(self) -> int:
        return len(self.actions)

    def __getitem__(self, i: int) -> Action:
        return self.actions[i]

    @property
    def t_min(self) -> int:
        return self.actions[0].ttl

    @property
    def t_max(self) -> int:
        return self.actions[-1].ttl

    @property
    def p_values(self) -> tuple[float, ...]:
        return tuple(a.p for a in self.actions)

    @property
    def ttl_values(self) -> tuple[int, ...]:
        return tuple(a.ttl for a in self.actions)

    def first_with_ttl_at_least(self, t: int) -> int:
        """Id of the most probable action delivering lifetime >= t."""
        for i, a in enumerate(self.actions):
            if a.ttl >= t:
                return i
        raise ValueError(f"no action generates a lifetime of at least {t}")


def synthetic_action_space(pairs) -> ActionSpace:
    """Action space from explicit (p, ttl) pairs, validated and sorted."""
    actions = tuple(
        Action(p=float(p), ttl=int(ttl))
        for p, ttl in sorted(pairs, key=lambda pair: pair[1])
    )
    return ActionSpace(actions=actions, provenance="synthetic")


def build_action_space(params: ModelParams) -> ActionSpace:
    """One action per reachable lifetime under the single-click trade-off.

    For each lifetime i the action takes the largest usable probability whose
    fidelity still lives i steps: the fidelity just inside the lower edge of
    the lifetime-i band.  The band-entry factor steps a hair inside the edge
    so the ceiling classifies it as i; it is enlarged (and the result
    re-checked) in the rare case the integer snap absorbs the first step.
    """
    t_top = max_ttl(params.gamma, params.f_app)
    q_cap = params.q_max
    sup = max_success_probability(params.lam, params.f_app)

    if params.q is None:
        t_low = 1
    else:
        f_at_q = params.lam * math.log1p(-params.q) + 1.0
        if f_at_q <= params.f_app:
            t_low = 1
        else:
            t_low = ttl_of_fidelity(f_at_q, params.gamma, params.f_app)

    actions = []
    for i in range(t_low, t_top + 1):
        band_edge = QUARTER + (params.f_app - QUARTER) * math.exp(
            params.gamma * (i - 1)
        )
        f_i = None
        eps = 1e-9
        while eps <= 1e-4:
            candidate = QUARTER + (band_edge - QUARTER) * (1.0 + eps)
            if candidate < 1.0 and ttl_of_fidelity(
                candidate, params.gamma, params.f_app
            ) == i:
                f_i = candidate
                break
            eps *= 10.0
        if f_i is None:
            raise InfeasibleActionError(
                f"no usable fidelity found inside the lifetime-{i} band"
            )
        p_i = -math.expm1((f_i - 1.0) / params.lam)
        if params.q is not None and p_i > q_cap:
            p_i = q_cap
            f_i = params.lam * math.log1p(-p_i) + 1.0
            if ttl_of_fidelity(f_i, params.gamma, params.f_app) != i:
                raise InfeasibleActionError(
                    f"probability cap q={q_cap:.6g} excludes every action "
                    f"with lifetime {i}"
                )
        if not 0.0 < p_i < sup:
            raise InfeasibleActionError(
                f"lifetime {i} needs probability {p_i:.6g} outside (0, {sup:.6g})"
            )
        actions.append(Action(p=p_i, ttl=i, fidelity=f_i))

    return ActionSpace(actions=tuple(actions), lam=params.lam, provenance="single-click")
