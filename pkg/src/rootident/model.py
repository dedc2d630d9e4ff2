"""Noisy observation model and interval/box geometry.

Observations of the unknown function at level ``x`` are uniform on
``[x - kappa - delta, x - kappa + delta]``, so the mean function is
``M(x) = x - kappa`` and its root is ``kappa``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .rng import uniforms

_U64 = 2**64


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise InvalidArgumentError(f"interval needs lo <= hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def overlap_length(self, other: "Interval") -> float:
        return max(0.0, min(self.hi, other.hi) - max(self.lo, other.lo))


@dataclass(frozen=True)
class Box:
    """The cube ``[center - half_width, center + half_width]**dim``."""

    center: float
    half_width: float
    dim: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise InvalidArgumentError("box half_width must be positive")
        if self.dim < 1:
            raise InvalidArgumentError("box dim must be >= 1")

    @property
    def side(self) -> Interval:
        return Interval(self.center - self.half_width, self.center + self.half_width)

    @property
    def measure(self) -> float:
        return (2.0 * self.half_width) ** self.dim

    @property
    def log_measure(self) -> float:
        return self.dim * math.log(2.0 * self.half_width)

    def points(self, unit: np.ndarray) -> np.ndarray:
        """Map uniforms on [0,1)^dim to points of the box (last axis = coordinates)."""
        return self.center - self.half_width + 2.0 * self.half_width * unit

    def intersection_measure(self, other: "Box") -> float:
        if other.dim != self.dim:
            raise InvalidArgumentError("boxes must share a dimension")
        return self.side.overlap_length(other.side) ** self.dim


@dataclass(frozen=True)
class UniformRootModel:
    kappa: float
    delta: float
    seed: int = 0

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise InvalidArgumentError(f"delta must be positive and finite, got {self.delta}")
        if not 0 <= self.seed < _U64:
            raise InvalidArgumentError("seed must fit in an unsigned 64-bit integer")

    def support(self, x: float = 0.0) -> Interval:
        return Interval(x - self.kappa - self.delta, x - self.kappa + self.delta)

    def from_uniforms(self, x, u):
        """Sampler boundary: turn unit uniforms into observations at level ``x``.

        Another noise law only has to replace this inverse-CDF map.
        """
        return (x - self.kappa - self.delta) + 2.0 * self.delta * np.asarray(u)


def sample_observations(model: UniformRootModel, x: float, n: int, trial: int = 0) -> np.ndarray:
    """Draw ``n`` IID observations at level ``x``.

    The draws are fixed by ``(model.seed, trial, draw index)``; ``trial``
    selects an independent stream.
    """
    if n < 1:
        raise InvalidArgumentError(f"need at least one observation, got n={n}")
    u = uniforms(model.seed, np.uint64(trial), n)
    return model.from_uniforms(x, u)


def expected_value(model: UniformRootModel, x: float) -> float:
    return x - model.kappa


def box_intersection_measure(c1: float, c2: float, delta: float, n: int) -> float:
    """Lebesgue measure of ``[c1-delta, c1+delta]^n`` intersected with ``[c2-delta, c2+delta]^n``."""
    _check_box_args(delta, n)
    side = max(0.0, 2.0 * delta - abs(c1 - c2))
    return side**n


def log_box_intersection_measure(c1: float, c2: float, delta: float, n: int) -> float:
    """Natural log of :func:`box_intersection_measure`; ``-inf`` for disjoint boxes."""
    _check_box_args(delta, n)
    side = 2.0 * delta - abs(c1 - c2)
    if side <= 0:
        return -math.inf
    return n * math.log(side)


def normalized_overlap(distance: float, delta: float, n: int) -> float:
    """``(1 - d/2delta)^n``: overlap measure relative to ``(2delta)^n``, evaluated in log space."""
    _check_box_args(delta, n)
    r = abs(distance) / (2.0 * delta)
    if r >= 1.0:
        return 0.0
    return math.exp(n * math.log1p(-r))


def _check_box_args(delta, n):
    if not delta > 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    if n < 1:
        raise InvalidArgumentError(f"dimension must be >= 1, got n={n}")
