"""Root computation: Newton-Raphson, Robbins-Monro and a sign-change bracket test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DivergenceError, InvalidArgumentError, ZeroDerivativeError
from .model import UniformRootModel
from .rng import uniforms


@dataclass
class RootResult:
    estimate: float
    iterations: int
    residual: float
    converged: bool
    trajectory: Optional[list] = None


@dataclass(frozen=True)
class StepSchedule:
    """Step sizes ``a_n``: either ``c / n`` or a user-supplied sequence/callable."""

    c: float = 1.0
    custom: Union[Sequence[float], Callable[[int], float], None] = None

    def __post_init__(self):
        if self.custom is None and not (self.c > 0 and math.isfinite(self.c)):
            raise InvalidArgumentError(f"schedule constant c must be positive, got {self.c}")

    @property
    def form(self) -> str:
        return "c_over_n" if self.custom is None else "custom"

    def steps(self, n_steps: int) -> np.ndarray:
        """``a_1 .. a_{n_steps}`` as an array; every value must be positive."""
        if self.custom is None:
            a = self.c / np.arange(1, n_steps + 1, dtype=np.float64)
        elif callable(self.custom):
            a = np.array([self.custom(k) for k in range(1, n_steps + 1)], dtype=np.float64)
        else:
            if len(self.custom) < n_steps:
                raise InvalidArgumentError(
                    f"custom schedule has {len(self.custom)} steps, {n_steps} requested")
            a = np.asarray(self.custom[:n_steps], dtype=np.float64)
        if not np.all(np.isfinite(a) & (a > 0)):
            raise InvalidArgumentError("step sizes must be finite and positive")
        return a


def newton_raphson(f, f_prime, x1: float, tol: float = 1e-10, max_iter: int = 50) -> RootResult:
    """Iterate ``x <- x - f(x)/f'(x)`` until ``|f(x)| <= tol``.

    Iterates are indexed from 0 (the starting point). Running out of budget
    returns an unconverged result; a vanishing derivative or a non-finite
    iterate raises.
    """
    if not tol > 0:
        raise InvalidArgumentError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise InvalidArgumentError(f"max_iter must be >= 1, got {max_iter}")
    x = float(x1)
    traj = [x]
    fx = f(x)
    k = 0
    while abs(fx) > tol and k < max_iter:
        d = f_prime(x)
        if d == 0:
            raise ZeroDerivativeError(k, x)
        x = x - fx / d
        k += 1
        if not math.isfinite(x):
            raise DivergenceError(k, x)
        traj.append(x)
        fx = f(x)
        if not math.isfinite(fx):
            raise DivergenceError(k, x)
    return RootResult(x, k, fx, abs(fx) <= tol, traj)


def _check_rm(n_steps, schedule):
    if n_steps < 1:
        raise InvalidArgumentError(f"n_steps must be >= 1, got {n_steps}")
    if not isinstance(schedule, StepSchedule):
        raise InvalidArgumentError("schedule must be a StepSchedule")
    return schedule.steps(n_steps)


def robbins_monro(model: UniformRootModel, alpha: float, x1: float, schedule: StepSchedule,
                  n_steps: int, trial: int = 0, record: bool = False) -> RootResult:
    """Run ``X_{n+1} = X_n - a_n (Y_{X_n} - alpha)`` with one observation per step.

    The observation at step ``k`` is draw ``k - 1`` of stream ``(model.seed, trial)``.
    The residual is ``M(X) - alpha`` evaluated on the model's mean function.
    """
    a = _check_rm(n_steps, schedule)
    u = uniforms(model.seed, np.uint64(trial), n_steps)
    x = float(x1)
    traj = [x] if record else None
    for k in range(n_steps):
        y = float(model.from_uniforms(x, u[k]))
        x = x - a[k] * (y - alpha)
        if record:
            traj.append(x)
    if not math.isfinite(x):
        raise DivergenceError(n_steps, x)
    return RootResult(x, n_steps, (x - model.kappa) - alpha, True, traj)


def robbins_monro_batch(kappa: float, delta: float, seeds, alpha: float, x1: float,
                        schedule: StepSchedule, n_steps: int, trial: int = 0,
                        checkpoints: Sequence[int] = ()) -> tuple[np.ndarray, dict]:
    """Independent Robbins-Monro runs, one per seed, advanced in lock-step.

    Each run sees exactly the stream :func:`robbins_monro` would use for the
    same seed. Returns final estimates plus ``{step: estimates}`` at the
    requested checkpoints (step counts, 1-based).
    """
    a = _check_rm(n_steps, schedule)
    seeds = np.asarray(seeds, dtype=np.uint64)
    model = UniformRootModel(kappa, delta)
    x = np.full(seeds.shape, float(x1))
    snaps = {}
    want = set(checkpoints)
    block = 1024
    for start in range(0, n_steps, block):
        stop = min(start + block, n_steps)
        u = uniforms(seeds, np.full(seeds.shape, trial, dtype=np.uint64), stop - start, start)
        for j, k in enumerate(range(start, stop)):
            y = model.from_uniforms(x, u[:, j])
            x = x - a[k] * (y - alpha)
            if k + 1 in want:
                snaps[k + 1] = x.copy()
    return x, snaps


def bracket_has_root(f, a: float, b: float) -> bool:
    """Sign-change test: true when ``f(a) * f(b) < 0``.

    A continuous ``f`` then has a root in ``(a, b)``; a false result does not
    rule one out.
    """
    if not a < b:
        raise InvalidArgumentError(f"need a < b, got a={a}, b={b}")
    fa, fb = f(a), f(b)
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise InvalidArgumentError("f must be finite at both endpoints")
    return (fa < 0 < fb) or (fb < 0 < fa)
