"""Lower bounds on the number of observations any identification test needs.

All bounds depend on the gap-to-noise ratios ``eps / (2 delta)`` only, and
logarithms appear in base-free quotients, so natural logs are used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import InvalidArgumentError, UndefinedLogarithmError

CEIL_RTOL = 1e-9
CURVE_HEADER = ("lambda", "n_old_raw", "n_old_min", "n_new_raw", "n_new_min", "n_reference",
                "vacuous_flags")
COMPARE_HEADER = ("lambda", "old_raw", "old_min", "new_raw", "new_min", "larger", "flags")

_TWO_OBS_NOTE = "for 1/2 < lambda < 1 two observations are reported to suffice (cited, not enforced)"


@dataclass(frozen=True)
class BoundResult:
    n_min: int
    raw_value: float
    vacuous: bool
    domain_note: str = ""


def ceil_tol(x: float, rtol: float = CEIL_RTOL) -> int:
    """Ceiling that rounds values within ``rtol`` of an integer down to it."""
    k = round(x)
    if abs(x - k) <= rtol * max(1.0, abs(x)):
        return int(k)
    return math.ceil(x)


def _ratio(eps, delta, name="eps"):
    if not delta > 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    if not 0 < eps < 2 * delta:
        raise InvalidArgumentError(f"need 0 < {name} < 2*delta, got {name}={eps}, delta={delta}")
    return eps / (2 * delta)


def _check_lambda(lam):
    if not 0 < lam < 1:
        raise InvalidArgumentError(f"lambda must lie in (0, 1), got {lam}")


def min_obs_two_error(eps: float, delta: float, lam: float) -> BoundResult:
    """``n >= log(2 lambda) / log(1 - eps/2delta)`` for any two-error test."""
    r = _ratio(eps, delta)
    _check_lambda(lam)
    raw = math.log(2 * lam) / math.log1p(-r) + 0.0  # no -0.0
    if lam >= 0.5:
        return BoundResult(0, raw, True, _TWO_OBS_NOTE)
    return BoundResult(max(0, ceil_tol(raw)), raw, False)


def _three_error_ratios(eps1, eps2, delta):
    # eps1 == eps2 and eps1 == 0 are the degenerate regimes the reduction
    # and the eps1 -> 0 limit need; strict hypotheses are reported, not enforced.
    r2 = _ratio(eps2, delta, "eps2")
    if not 0 <= eps1 <= eps2:
        raise InvalidArgumentError(f"need 0 <= eps1 <= eps2, got eps1={eps1}, eps2={eps2}")
    return eps1 / (2 * delta), r2


def _rhs(n, r1, r2):
    return 2.0 * (1.0 - r1) ** n + (1.0 - r2) ** n


def three_error_rhs(n: float, eps1: float, eps2: float, delta: float) -> float:
    """``2(1 - eps1/2delta)^n + (1 - eps2/2delta)^n``, strictly decreasing in ``n``."""
    r1, r2 = _three_error_ratios(eps1, eps2, delta)
    return _rhs(n, r1, r2)


def three_error_necessary_holds(n: int, eps1: float, eps2: float, delta: float, lam: float) -> bool:
    """Whether ``6 lambda >= 2(1 - eps1/2delta)^n + (1 - eps2/2delta)^n`` holds at ``n``."""
    if n < 0:
        raise InvalidArgumentError(f"n must be non-negative, got {n}")
    r1, r2 = _three_error_ratios(eps1, eps2, delta)
    _check_lambda(lam)
    return 6.0 * lam >= _rhs(n, r1, r2)


def _hypothesis_note(eps1, eps2):
    if eps1 == eps2:
        return "eps1 == eps2: reduces to the two-error bound"
    if eps1 == 0:
        return "eps1 == 0: limit regime"
    if not 2 * eps1 < eps2:
        return "outside 0 < 2*eps1 < eps2: inequality evaluated formally"
    return ""


def _three_error_raw(r1, r2, lam):
    """Real ``n`` solving ``rhs(n) = 6 lambda`` (may be negative)."""
    target = math.log(6.0 * lam)

    def f(x):
        return math.log(_rhs(x, r1, r2)) - target

    lo, hi = -1.0, 1.0
    while f(lo) < 0:
        lo *= 2
    while f(hi) > 0:
        hi *= 2
    return brentq(f, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500)


def min_obs_three_error(eps1: float, eps2: float, delta: float, lam: float) -> BoundResult:
    """Smallest integer ``n >= 0`` satisfying the three-error necessary condition.

    The right-hand side decreases strictly in ``n``, so an exponential search
    followed by bisection finds the first ``n`` that holds. ``raw_value`` is the
    real root of the equality.
    """
    r1, r2 = _three_error_ratios(eps1, eps2, delta)
    _check_lambda(lam)
    note = _hypothesis_note(eps1, eps2)
    if r1 == 0 and 6 * lam <= 2:
        raise UndefinedLogarithmError(
            f"with eps1 = 0 the condition needs lambda > 1/3, got lambda={lam}")
    raw = _three_error_raw(r1, r2, lam)
    if 6 * lam >= 3:
        return BoundResult(0, raw, True, note)

    def holds(n):
        return 6.0 * lam >= _rhs(n, r1, r2)

    hi = 1
    while not holds(hi):
        hi *= 2
    lo = hi // 2  # fails (or is 0, which fails since 6 lambda < 3)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return BoundResult(hi, raw, False, note)


def min_obs_eps1_zero(eps2: float, delta: float, lam: float) -> BoundResult:
    """Closed form ``n >= log(6 lambda - 2) / log(1 - eps2/2delta)`` for ``eps1 = 0``."""
    r2 = _ratio(eps2, delta, "eps2")
    _check_lambda(lam)
    if 6 * lam - 2 <= 0:
        raise UndefinedLogarithmError(f"log(6*lambda - 2) undefined for lambda={lam} <= 1/3")
    raw = math.log(6 * lam - 2) / math.log1p(-r2) + 0.0
    if lam >= 0.5:
        return BoundResult(0, raw, True, "lambda >= 1/2: bound is non-positive")
    return BoundResult(max(0, ceil_tol(raw)), raw, False)


def _safe(fn, *args):
    try:
        return fn(*args)
    except UndefinedLogarithmError:
        return None


def compare_bounds(eps, eps1, eps2, delta, lambda_grid):
    """Old (two-error, gap ``eps``) vs new (three-error) bound for each lambda.

    Rows are dicts keyed by :data:`COMPARE_HEADER`. ``larger`` names the
    bound demanding more observations on the raw scale (``equal`` within 1e-9);
    an undefined new bound gives ``old``.
    """
    grid = list(lambda_grid)
    if not grid:
        raise InvalidArgumentError("lambda grid is empty")
    _ratio(eps, delta)
    _three_error_ratios(eps1, eps2, delta)
    rows = []
    for lam in grid:
        old = min_obs_two_error(eps, delta, lam)
        new = _safe(min_obs_three_error, eps1, eps2, delta, lam)
        flags = []
        if old.vacuous:
            flags.append("old_vacuous")
        if new is None:
            flags.append("new_undefined")
            larger = "old"
        else:
            if new.vacuous:
                flags.append("new_vacuous")
            diff = new.raw_value - old.raw_value
            larger = "equal" if abs(diff) <= 1e-9 else ("new" if diff > 0 else "old")
        if eps1 == 0 and eps2 == eps and abs(lam - 0.5) <= 1e-12:
            flags.append("crossover")
        rows.append({
            "lambda": lam,
            "old_raw": old.raw_value,
            "old_min": old.n_min,
            "new_raw": math.nan if new is None else new.raw_value,
            "new_min": -1 if new is None else new.n_min,
            "larger": larger,
            "flags": "|".join(flags) or "none",
        })
    return rows


def crossover_lambda(eps1: float, eps2: float, eps: float) -> float | None:
    """Lambda at which the eps1 = 0 bound meets the old one (``6 lambda - 2 = 2 lambda``)."""
    if eps1 == 0 and eps2 == eps:
        return 0.5
    return None


@dataclass(frozen=True)
class CurveConfig:
    lambdas: tuple
    eps_ratio: float
    eps1_ratio: float | None = None
    eps2_ratio: float | None = None

    def resolved(self):
        e2 = self.eps_ratio if self.eps2_ratio is None else self.eps2_ratio
        e1 = e2 if self.eps1_ratio is None else self.eps1_ratio
        return self.eps_ratio, e1, e2


def reference_curve(old_raw: float) -> int:
    """Plumbing reference for the single- vs double-log plot: ``ceil(log2(raw))`` clipped at 0."""
    if old_raw <= 1:
        return 0
    return max(0, ceil_tol(math.log2(old_raw)))


def emit_bound_curves(config: CurveConfig):
    """Curve rows (dicts keyed by :data:`CURVE_HEADER`), using ``delta = 1/2`` so ratios equal gaps."""
    eps, e1, e2 = config.resolved()
    for lam in config.lambdas:
        if not 0 < lam < 1:
            raise InvalidArgumentError(f"lambda grid values must lie in (0, 1), got {lam}")
    rows = []
    for lam in config.lambdas:
        old = min_obs_two_error(eps, 0.5, lam)
        new = _safe(min_obs_three_error, e1, e2, 0.5, lam)
        flags = []
        if old.vacuous:
            flags.append("old_vacuous")
        if new is None:
            flags.append("new_undefined")
        elif new.vacuous:
            flags.append("new_vacuous")
        rows.append({
            "lambda": lam,
            "n_old_raw": old.raw_value,
            "n_old_min": old.n_min,
            "n_new_raw": math.nan if new is None else new.raw_value,
            "n_new_min": -1 if new is None else new.n_min,
            "n_reference": reference_curve(old.raw_value),
            "vacuous_flags": "|".join(flags) or "none",
        })
    return rows
