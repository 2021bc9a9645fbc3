"""Named parameter presets and their hardware provenance.

A preset records both the derived model parameters (decoherence rate and
trade-off coefficient) and the raw quantities they come from: the memory
lifetime N counted in single-click executions, the photon detection
probability, and the batch size M.  One attempt batches M executions, so

    gamma = 2 * M / N          (both qubits of a link decohere)
    lam   = 1 / (2 * p_det * M)

The near-term preset tracks current experiments (high decoherence, six-step
maximum lifetime); the far-term preset assumes a longer memory lifetime
(eleven steps), which makes larger packets feasible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ModelParams, max_ttl

_CONSISTENCY = 1e-12


@dataclass(frozen=True)
class RegimePreset:
    name: str
    memory_lifetime: float  # N, in single-click executions
    p_det: float
    batch_size: int  # M, executions per attempt
    f_app: float
    gamma: float
    lam: float

    def __post_init__(self) -> None:
        if abs(2.0 * self.batch_size / self.memory_lifetime - self.gamma) > _CONSISTENCY:
            raise ValueError(
                f"gamma={self.gamma} inconsistent with 2M/N="
                f"{2.0 * self.batch_size / self.memory_lifetime}"
            )
        if abs(1.0 / (2.0 * self.p_det * self.batch_size) - self.lam) > _CONSISTENCY:
            raise ValueError(
                f"lam={self.lam} inconsistent with 1/(2 p_det M)="
                f"{1.0 / (2.0 * self.p_det * self.batch_size)}"
            )

    @property
    def t_max(self) -> int:
        return max_ttl(self.gamma, self.f_app)

    def model_params(self, n: int, q: float | None = None) -> ModelParams:
        return ModelParams(gamma=self.gamma, f_app=self.f_app, n=n, lam=self.lam, q=q)


NEAR_TERM = RegimePreset(
    name="near-term",
    memory_lifetime=1000.0 / 0.19,  # ~5263 executions in recent experiments
    p_det=5e-4,
    batch_size=500,
    f_app=0.5,
    gamma=0.19,
    lam=2.0,
)

FAR_TERM = RegimePreset(
    name="far-term",
    memory_lifetime=20000.0,
    p_det=5e-4,
    batch_size=1000,
    f_app=0.5,
    gamma=0.1,
    lam=1.0,
)

_PRESETS = {p.name: p for p in (NEAR_TERM, FAR_TERM)}


def preset_from_raw(
    memory_lifetime: float, p_det: float, batch_size: int, f_app: float,
    name: str = "custom",
) -> RegimePreset:
    """Preset derived from raw hardware parameters."""
    return RegimePreset(
        name=name,
        memory_lifetime=memory_lifetime,
        p_det=p_det,
        batch_size=batch_size,
        f_app=f_app,
        gamma=2.0 * batch_size / memory_lifetime,
        lam=1.0 / (2.0 * p_det * batch_size),
    )


def get_regime(name: str) -> RegimePreset:
    try:
        return _PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown regime {name!r}; choose from {sorted(_PRESETS)}"
        ) from None
