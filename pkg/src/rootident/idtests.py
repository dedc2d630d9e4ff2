"""Executable identification tests built on the feasible interval.

With observations taken at level 0, each ``y`` pins the root to
``[-y - delta, -y + delta]``. The intersection of those constraints (the
feasible interval) is a sufficient statistic for uniform noise, and both
tests below are threshold rules on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentDataError, InvalidArgumentError
from .model import Interval

# Relative slack for lo > hi caused by rounding on model-generated data.
_ROUNDING_SLACK = 1e-12


def _check_unit(name, value):
    if not 0 < value < 1:
        raise InvalidArgumentError(f"{name} must lie in (0, 1), got {value}")


@dataclass(frozen=True)
class TwoErrorSpec:
    a: float
    b: float
    eps: float
    delta: float
    n: int
    lambda1: float = 0.1
    lambda2: float = 0.1

    def __post_init__(self):
        if not self.a <= self.b:
            raise InvalidArgumentError(f"need a <= b, got a={self.a}, b={self.b}")
        if not self.delta > 0:
            raise InvalidArgumentError(f"delta must be positive, got {self.delta}")
        if not 0 < self.eps < 2 * self.delta:
            raise InvalidArgumentError(
                f"need 0 < eps < 2*delta, got eps={self.eps}, delta={self.delta}")
        if self.n < 1:
            raise InvalidArgumentError(f"n must be >= 1, got {self.n}")
        _check_unit("lambda1", self.lambda1)
        _check_unit("lambda2", self.lambda2)

    @property
    def widened_target(self) -> Interval:
        return Interval(self.a - self.eps / 2, self.b + self.eps / 2)

    @property
    def budget(self) -> float:
        return max(self.lambda1, self.lambda2)


@dataclass(frozen=True)
class ThreeErrorSpec:
    a: float
    b: float
    eps1: float
    eps2: float
    delta: float
    n: int
    lambda1: float = 0.1
    lambda2: float = 0.1
    lambda3: float = 0.1

    def __post_init__(self):
        if not self.a <= self.b:
            raise InvalidArgumentError(f"need a <= b, got a={self.a}, b={self.b}")
        if not self.delta > 0:
            raise InvalidArgumentError(f"delta must be positive, got {self.delta}")
        if not 0 < 2 * self.eps1 < self.eps2 < 2 * self.delta:
            raise InvalidArgumentError(
                "need 0 < 2*eps1 < eps2 < 2*delta, got "
                f"eps1={self.eps1}, eps2={self.eps2}, delta={self.delta}")
        if self.n < 1:
            raise InvalidArgumentError(f"n must be >= 1, got {self.n}")
        for name in ("lambda1", "lambda2", "lambda3"):
            _check_unit(name, getattr(self, name))

    @property
    def acceptance_window(self) -> Interval:
        """Midpoints inside this window yield verdict 1 (thresholds at outer-gap midlines)."""
        return Interval(self.a - self.eps2 + self.eps1 / 2, self.b + self.eps2 - self.eps1 / 2)

    def ring_regions(self, literal: bool = False) -> tuple[Interval, Interval]:
        """The two outer rings where verdict 1 is required.

        ``literal=True`` gives the right ring as originally written,
        ``[b + eps1, b + eps2 + eps1]``, which overlaps the reject region; use
        it only for error-budget bookkeeping.
        """
        left = Interval(self.a - self.eps2 + self.eps1, self.a - self.eps1)
        right_hi = self.b + self.eps2 + self.eps1 if literal else self.b + self.eps2 - self.eps1
        return left, Interval(self.b + self.eps1, right_hi)

    @property
    def budget(self) -> float:
        return max(self.lambda1, self.lambda2, self.lambda3)


@dataclass(frozen=True)
class Verdict:
    bit: int
    feasible: Interval


def feasible_bounds(obs, delta: float):
    """Vectorised feasible interval over the last axis of ``obs``.

    Returns ``(lo, hi, consistent)``. Rows whose constraints miss each other
    by no more than rounding noise are collapsed onto their midpoint.
    """
    obs = np.asarray(obs, dtype=np.float64)
    lo = -obs.min(axis=-1) - delta
    hi = -obs.max(axis=-1) + delta
    scale = np.maximum(np.maximum(np.abs(lo), np.abs(hi)), delta)
    gap = lo - hi
    consistent = gap <= _ROUNDING_SLACK * scale
    squeeze = (gap > 0) & consistent
    if np.any(squeeze):
        mid = 0.5 * (lo + hi)
        lo = np.where(squeeze, mid, lo)
        hi = np.where(squeeze, mid, hi)
    return lo, hi, consistent


def feasible_interval(obs, delta: float) -> Interval:
    """Set of roots consistent with every observation (taken at level 0)."""
    obs = np.asarray(obs, dtype=np.float64).ravel()
    if obs.size == 0:
        raise InvalidArgumentError("feasible_interval needs at least one observation")
    if not delta > 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    lo, hi, ok = feasible_bounds(obs, delta)
    if not ok:
        raise InconsistentDataError(
            f"observation spread {obs.max() - obs.min():.6g} exceeds 2*delta={2 * delta:.6g}")
    return Interval(float(lo), float(hi))


def two_error_verdicts(spec: TwoErrorSpec, lo, hi) -> np.ndarray:
    """1 where the feasible interval touches ``[a - eps/2, b + eps/2]``."""
    target = spec.widened_target
    return ((np.asarray(hi) >= target.lo) & (np.asarray(lo) <= target.hi)).astype(np.int8)


def three_error_verdicts(spec: ThreeErrorSpec, lo, hi) -> np.ndarray:
    """1 where the feasible-interval midpoint falls inside the acceptance window."""
    mid = 0.5 * (np.asarray(lo) + np.asarray(hi))
    window = spec.acceptance_window
    return ((mid >= window.lo) & (mid <= window.hi)).astype(np.int8)


def _check_count(spec, obs):
    obs = np.asarray(obs, dtype=np.float64).ravel()
    if obs.size != spec.n:
        raise InvalidArgumentError(f"test expects {spec.n} observations, got {obs.size}")
    return obs


def run_two_error_test(spec: TwoErrorSpec, obs) -> Verdict:
    obs = _check_count(spec, obs)
    feas = feasible_interval(obs, spec.delta)
    bit = int(two_error_verdicts(spec, feas.lo, feas.hi))
    return Verdict(bit, feas)


def run_three_error_test(spec: ThreeErrorSpec, obs) -> Verdict:
    obs = _check_count(spec, obs)
    feas = feasible_interval(obs, spec.delta)
    bit = int(three_error_verdicts(spec, feas.lo, feas.hi))
    return Verdict(bit, feas)


def run_test(spec, obs) -> Verdict:
    if isinstance(spec, TwoErrorSpec):
        return run_two_error_test(spec, obs)
    return run_three_error_test(spec, obs)


def verdicts(spec, lo, hi) -> np.ndarray:
    if isinstance(spec, TwoErrorSpec):
        return two_error_verdicts(spec, lo, hi)
    return three_error_verdicts(spec, lo, hi)


def two_error_miss_probability(eps: float, delta: float, n: int) -> float:
    """Exact false-accept probability at ``kappa = a - eps`` (or ``b + eps``): ``(1 - eps/4delta)^n``."""
    return math.exp(n * math.log1p(-eps / (4 * delta)))


def midrange_tail(distance: float, delta: float, n: int) -> float:
    """P(midpoint - kappa > distance) for the feasible interval of ``n`` draws.

    The midpoint deviates from the root by ``delta * (1 - u_min - u_max)``;
    for ``0 <= d <= delta`` the tail is ``(1 - d/delta)^n / 2``.
    """
    if distance < 0:
        return 1.0 - midrange_tail(-distance, delta, n)
    if distance >= delta:
        return 0.0
    return 0.5 * math.exp(n * math.log1p(-distance / delta))


def three_error_error_probability(spec: ThreeErrorSpec, kappa: float, want: int) -> float:
    """Exact probability that the three-error test returns ``1 - want`` at ``kappa``."""
    window = spec.acceptance_window
    below = 1.0 - midrange_tail(window.lo - kappa, spec.delta, spec.n)  # P(mid < window.lo)
    above = midrange_tail(window.hi - kappa, spec.delta, spec.n)  # P(mid > window.hi)
    reject = below + above
    return reject if want == 1 else 1.0 - reject
