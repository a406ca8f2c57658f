"""Scaled beta volume profiles.

A market maker describes the volume it wants resting at each of n_levels
contiguous price levels with a beta distribution rescaled to support
[0, n_levels]. This module evaluates that density, quantises it into integer
per-level volumes, converts between the (alpha, beta) and the more
interpretable (mode, concentration) parameterisations, and diffs a desired
profile against the currently active one into insert/cancel instructions.

All functions are pure; none touch the order book.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union


class DomainError(ValueError):
    """Evaluation point outside the open support (0, n_levels)."""


class DegenerateMode(ValueError):
    """Mode is undefined because alpha + beta == 2 (the uniform ladder)."""


class InconsistentState(ValueError):
    """Active-profile vector disagrees with the per-level order queues."""


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of the underlying beta distribution."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"alpha and beta must be > 0, got ({self.alpha}, {self.beta})")


@dataclass(frozen=True)
class ModeConcentration:
    """Location of the profile peak (as a proportion of n_levels) and its tightness.

    omega in [0, 1]; kappa >= 2 so the derived shape parameters stay >= 1.
    The boundary omega in {0, 1} pins the peak to the first/last level, and
    kappa == 2 is the uniform ladder (whose mode is no longer recoverable).
    """

    omega: float
    kappa: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError(f"omega must be in [0, 1], got {self.omega}")
        if not self.kappa >= 2.0:
            raise ValueError(f"kappa must be >= 2, got {self.kappa}")


@dataclass(frozen=True)
class ProfileSpec:
    """Static shape of one side's quoting window.

    min_quote shifts level 1 away from the touch: positive values start
    quoting deeper in the book, negative values go inside the spread.
    """

    n_levels: int
    total_volume: int
    min_quote: int = 0

    def __post_init__(self) -> None:
        if self.n_levels < 1:
            raise ValueError(f"n_levels must be >= 1, got {self.n_levels}")
        if self.total_volume < 1:
            raise ValueError(f"total_volume must be >= 1, got {self.total_volume}")


@dataclass(frozen=True)
class VolumeProfile:
    """Integer volume per level for one side. Level 1 is nearest the touch.

    side/anchor are stamped on when the profile is materialised against a
    book; a freshly quantised profile carries only the volumes.
    """

    volumes: tuple[int, ...]
    side: Union[str, None] = None
    anchor: Union[int, None] = None

    def __post_init__(self) -> None:
        if any(v < 0 for v in self.volumes):
            raise ValueError("profile volumes must be >= 0")

    @property
    def n_levels(self) -> int:
        return len(self.volumes)

    @property
    def total(self) -> int:
        return sum(self.volumes)


@dataclass(frozen=True)
class InsertInstruction:
    """Place this much new volume at the back of the queue at `level`."""

    level: int
    volume: int


@dataclass(frozen=True)
class CancelInstruction:
    """Cancel `volume` from the agent's own order `order_id` at `level`."""

    level: int
    order_id: int
    volume: int


Instruction = Union[InsertInstruction, CancelInstruction]


def _log_beta(alpha: float, beta: float) -> float:
    return math.lgamma(alpha) + math.lgamma(beta) - math.lgamma(alpha + beta)


def scaled_beta_pdf(x: float, n_levels: int, params: BetaParams) -> float:
    """Density of the beta distribution rescaled to support [0, n_levels].

    g(x) = f(x / n_levels) / n_levels with f the standard beta pdf. Only the
    open interior is allowed: with alpha < 1 or beta < 1 the density diverges
    at the endpoints, and every consumer evaluates at level midpoints anyway.
    """
    if n_levels < 1:
        raise ValueError(f"n_levels must be >= 1, got {n_levels}")
    if not 0.0 < x < n_levels:
        raise DomainError(f"x must be in (0, {n_levels}), got {x}")
    u = x / n_levels
    log_f = (
        (params.alpha - 1.0) * math.log(u)
        + (params.beta - 1.0) * math.log1p(-u)
        - _log_beta(params.alpha, params.beta)
    )
    return math.exp(log_f) / n_levels


def _midpoint_log_weights(n_levels: int, params: BetaParams) -> list[float]:
    # Log-density at level midpoints x_i = i - 0.5, up to an additive constant
    # that the normalisation cancels. Both log arguments are exact integers
    # (2i-1 and 2n-2i+1 out of 2n), so swapping (alpha, beta) yields bitwise
    # mirrored weights and quantisation is exactly reflection-symmetric.
    a1 = params.alpha - 1.0
    b1 = params.beta - 1.0
    return [
        a1 * math.log(2 * i - 1) + b1 * math.log(2 * n_levels - 2 * i + 1)
        for i in range(1, n_levels + 1)
    ]


def quantise(spec: ProfileSpec, params: BetaParams) -> VolumeProfile:
    """Turn a scaled beta density into integer volumes per level.

    Evaluates the density at the level midpoints i - 0.5, normalises the
    n_levels values to sum to one, scales by total_volume and rounds each
    entry to the nearest integer (ties away from zero). The rounded sum may
    differ from total_volume by at most n_levels / 2.
    """
    logs = _midpoint_log_weights(spec.n_levels, params)
    peak = max(logs)
    weights = [math.exp(l - peak) for l in logs]
    norm = math.fsum(weights)
    volumes = tuple(
        math.floor(spec.total_volume * w / norm + 0.5) for w in weights
    )
    return VolumeProfile(volumes=volumes)


def from_mode_concentration(mc: ModeConcentration) -> BetaParams:
    """Recover (alpha, beta) from the mode/concentration parameterisation.

    alpha = omega * (kappa - 2) + 1; beta follows from kappa = alpha + beta.
    """
    alpha = mc.omega * (mc.kappa - 2.0) + 1.0
    return BetaParams(alpha=alpha, beta=mc.kappa - alpha)


def to_mode_concentration(params: BetaParams) -> ModeConcentration:
    """Inverse of :func:`from_mode_concentration`.

    Defined for alpha, beta >= 1 with alpha + beta > 2; the interior mode is
    (alpha - 1) / (alpha + beta - 2).
    """
    if params.alpha < 1.0 or params.beta < 1.0:
        raise ValueError(
            f"mode undefined for alpha or beta < 1, got ({params.alpha}, {params.beta})"
        )
    kappa = params.alpha + params.beta
    if kappa == 2.0:
        raise DegenerateMode("alpha + beta == 2: every point is a mode")
    omega = (params.alpha - 1.0) / (kappa - 2.0)
    return ModeConcentration(omega=omega, kappa=kappa)


def from_mean_variance(mean: float, variance: float) -> BetaParams:
    """Convert a (mean, variance) pair to shape parameters.

    Requires 0 < mean < 1 and variance < mean * (1 - mean); the constraint
    makes this parameterisation awkward as a control surface, so nothing in
    the policy layer uses it. Provided for completeness.
    """
    if not 0.0 < mean < 1.0:
        raise ValueError(f"mean must be in (0, 1), got {mean}")
    if not 0.0 < variance < mean * (1.0 - mean):
        raise ValueError(
            f"variance must be in (0, mean*(1-mean)) = (0, {mean * (1.0 - mean)}), got {variance}"
        )
    alpha = ((1.0 - mean) / variance - 1.0 / mean) * mean * mean
    beta = alpha * (1.0 / mean - 1.0)
    return BetaParams(alpha=alpha, beta=beta)


def diff_to_instructions(
    current: VolumeProfile,
    desired: VolumeProfile,
    queues: Sequence[Sequence[tuple[int, int]]],
) -> list[Instruction]:
    """Per-level signed difference between desired and current volumes.

    A positive difference becomes one insert at that level; a negative one
    becomes cancels against the agent's own orders at that level, taken from
    the back of the queue (largest arrival first) so the front positions are
    kept. queues[i] lists the agent's (order_id, remaining) pairs at level
    i + 1 in arrival order and must sum to current.volumes[i].
    """
    if current.n_levels != desired.n_levels:
        raise InconsistentState(
            f"profiles differ in length: {current.n_levels} vs {desired.n_levels}"
        )
    if current.side is not None and desired.side is not None and current.side != desired.side:
        raise InconsistentState(f"profiles differ in side: {current.side} vs {desired.side}")
    if (
        current.anchor is not None
        and desired.anchor is not None
        and current.anchor != desired.anchor
    ):
        raise InconsistentState(
            f"profiles differ in anchor: {current.anchor} vs {desired.anchor}"
        )
    if len(queues) != current.n_levels:
        raise InconsistentState(
            f"expected {current.n_levels} level queues, got {len(queues)}"
        )

    instructions: list[Instruction] = []
    for i, (have, want) in enumerate(zip(current.volumes, desired.volumes)):
        queue = queues[i]
        queued = sum(rem for _, rem in queue)
        if queued != have:
            raise InconsistentState(
                f"level {i + 1}: profile says {have} but queue holds {queued}"
            )
        delta = want - have
        if delta > 0:
            instructions.append(InsertInstruction(level=i + 1, volume=delta))
        elif delta < 0:
            need = -delta
            for order_id, remaining in reversed(queue):
                if need == 0:
                    break
                take = min(need, remaining)
                instructions.append(
                    CancelInstruction(level=i + 1, order_id=order_id, volume=take)
                )
                need -= take
    return instructions
