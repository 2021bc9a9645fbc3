"""Depolarising-decay arithmetic and shared model parameters.

Everything downstream works with integer link lifetimes (the number of whole
time steps a link stays usable).  This module is the only place where raw
fidelities appear: it converts between fidelity and lifetime and validates the
physical parameters shared by all other modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Fixed point of the depolarising channel.
QUARTER = 0.25

# Raw decay times within this distance of an integer are treated as exactly
# that integer, so analytically exact lifetimes do not round up.
INTEGER_SNAP = 1e-9


class InfeasibleError(ValueError):
    """The requested number of simultaneous links can never be reached."""


def fidelity_after(f: float, t: int, gamma: float) -> float:
    """Fidelity of a stored link after ``t`` whole time steps.

    Under depolarising noise the distance from the fully mixed state shrinks
    geometrically::

        F(t) = exp(-gamma * t) * (F - 1/4) + 1/4

    Strictly decreasing in ``t`` for F > 1/4, with fixed point 1/4.
    """
    if not QUARTER < f <= 1.0:
        raise ValueError(f"fidelity must be in (1/4, 1], got {f}")
    if gamma <= 0.0:
        raise ValueError(f"decoherence rate must be positive, got {gamma}")
    if t < 0:
        raise ValueError(f"elapsed steps must be non-negative, got {t}")
    return math.exp(-gamma * t) * (f - QUARTER) + QUARTER


def ttl_of_fidelity(f: float, gamma: float, f_app: float) -> int:
    """Whole time steps a link with fidelity ``f`` stays above ``f_app``.

    Inverts the decay map and takes the ceiling (time is discrete).  Raw decay
    times within ``INTEGER_SNAP`` of an integer are snapped to that integer
    first; the result is clamped to at least one step, since a link that is
    usable now survives the current step by definition.
    """
    if gamma <= 0.0:
        raise ValueError(f"decoherence rate must be positive, got {gamma}")
    if not QUARTER < f_app < 1.0:
        raise ValueError(f"application fidelity must be in (1/4, 1), got {f_app}")
    if f > 1.0:
        raise ValueError(f"fidelity must be at most 1, got {f}")
    if f <= f_app:
        raise ValueError(f"fidelity {f} is not above the usability threshold {f_app}")
    raw = math.log((f - QUARTER) / (f_app - QUARTER)) / gamma
    nearest = round(raw)
    if abs(raw - nearest) <= INTEGER_SNAP:
        return max(int(nearest), 1)
    return max(math.ceil(raw), 1)


def max_ttl(gamma: float, f_app: float) -> int:
    """Largest lifetime any freshly generated link can have (fidelity 1)."""
    return ttl_of_fidelity(1.0, gamma, f_app)


@dataclass(frozen=True)
class ModelParams:
    """Validated bundle of the physical and task parameters.

    Attributes:
        gamma: decoherence rate per time step (> 0).
        f_app: minimum fidelity the application tolerates, in (1/4, 1).
        n: number of simultaneously live links required (>= 2).
        lam: trade-off parameter of the batched single-click relation (> 0).
        q: optional cap on the usable success probability.  ``None`` means
            the full validity range of the trade-off, whose supremum is
            ``1 - exp((f_app - 1) / lam)``.
    """

    gamma: float
    f_app: float
    n: int
    lam: float
    q: float | None = None

    def __post_init__(self) -> None:
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not QUARTER < self.f_app < 1.0:
            raise ValueError(f"f_app must be in (1/4, 1), got {self.f_app}")
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if self.lam <= 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        q_sup = -math.expm1((self.f_app - 1.0) / self.lam)
        if self.q is not None and not 0.0 < self.q <= q_sup:
            raise ValueError(
                f"q must be in (0, {q_sup:.6g}] for lam={self.lam}, "
                f"f_app={self.f_app}, got {self.q}"
            )
        if self.n > self.t_max:
            raise InfeasibleError(
                f"n={self.n} links can never coexist: the maximum lifetime "
                f"is {self.t_max} steps"
            )

    @property
    def t_max(self) -> int:
        """Maximum lifetime of a freshly generated link."""
        return max_ttl(self.gamma, self.f_app)

    @property
    def q_max(self) -> float:
        """Effective success-probability cap (supremum when ``q`` is unset)."""
        if self.q is not None:
            return self.q
        return -math.expm1((self.f_app - 1.0) / self.lam)
