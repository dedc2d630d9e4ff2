"""Monte Carlo error estimation for the identification tests.

Trials are split into fixed-size chunks whose uniforms come from the
counter-based stream, so failure counts do not depend on how many workers
process the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import beta

from .errors import InconsistentDataError, InvalidArgumentError, NotFoundError
from .idtests import ThreeErrorSpec, TwoErrorSpec, feasible_bounds, verdicts
from .model import Box, Interval, UniformRootModel, box_intersection_measure
from .rng import uniforms

REGION_KINDS = ("target", "reject", "ring")
CHUNK = 1 << 16
REPORT_HEADER = ("region", "kappa", "n", "trials", "failures", "p_hat", "ci_lo", "ci_hi",
                 "budget_lambda", "pass")


@dataclass(frozen=True)
class ErrorEstimate:
    p_hat: float
    ci_lo: float
    ci_hi: float
    trials: int
    failures: int
    confidence: float = 0.99


def clopper_pearson(k: int, n: int, confidence: float = 0.99) -> tuple[float, float]:
    """Exact two-sided binomial interval for ``k`` successes in ``n`` trials."""
    if n < 1 or not 0 <= k <= n:
        raise InvalidArgumentError(f"need 0 <= k <= n and n >= 1, got k={k}, n={n}")
    if not 0 < confidence < 1:
        raise InvalidArgumentError(f"confidence must lie in (0, 1), got {confidence}")
    alpha = 1.0 - confidence
    lo = 0.0 if k == 0 else float(beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def make_estimate(failures: int, trials: int, confidence: float = 0.99) -> ErrorEstimate:
    lo, hi = clopper_pearson(failures, trials, confidence)
    p = failures / trials
    return ErrorEstimate(p, min(lo, p), max(hi, p), trials, failures, confidence)


def _region_parts(spec, kind, literal=False):
    if kind not in REGION_KINDS:
        raise InvalidArgumentError(f"unknown region kind {kind!r}")
    if kind == "target":
        return [Interval(spec.a, spec.b)]
    if isinstance(spec, TwoErrorSpec):
        if kind == "ring":
            raise InvalidArgumentError("two-error tests have no ring region")
        gap = spec.eps
    else:
        if kind == "ring":
            return list(spec.ring_regions(literal))
        gap = spec.eps2
    return [Interval(-np.inf, spec.a - gap), Interval(spec.b + gap, np.inf)]


def region_intervals(spec, kind: str, literal: bool = False) -> list[Interval]:
    """Region pieces with unbounded reject tails cut at ``2 delta`` past the gap.

    Beyond that distance the feasible interval cannot reach the decision
    threshold, so the error there is exactly zero.
    """
    parts = _region_parts(spec, kind, literal)
    reach = 2 * spec.delta
    out = []
    for p in parts:
        lo = p.hi - reach if np.isinf(p.lo) else p.lo
        hi = p.lo + reach if np.isinf(p.hi) else p.hi
        out.append(Interval(lo, hi))
    return out


def in_region(spec, kappa: float, kind: str, literal: bool = False) -> bool:
    return any(p.contains(kappa) for p in _region_parts(spec, kind, literal))


def error_verdict(kind: str) -> int:
    """Verdict value that counts as an error in a region."""
    return 1 if kind == "reject" else 0


def _count_chunk(spec, model, value, start, stop):
    u = uniforms(model.seed, np.arange(start, stop, dtype=np.uint64), spec.n)
    lo, hi, ok = feasible_bounds(model.from_uniforms(0.0, u), spec.delta)
    if not ok.all():
        raise InconsistentDataError("model produced observations with no common root")
    return int(np.count_nonzero(verdicts(spec, lo, hi) == value))


def count_verdicts(spec, model: UniformRootModel, value: int, trials: int,
                   trial_offset: int = 0, workers: int = 1) -> int:
    """Number of trials in ``[trial_offset, trial_offset + trials)`` with the given verdict."""
    bounds = [(s, min(s + CHUNK, trial_offset + trials))
              for s in range(trial_offset, trial_offset + trials, CHUNK)]
    if workers <= 1 or len(bounds) == 1:
        return sum(_count_chunk(spec, model, value, s, e) for s, e in bounds)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(lambda se: _count_chunk(spec, model, value, *se), bounds))


def estimate_error_probability(spec, kappa: float, region_kind: str, trials: int, seed: int,
                               confidence: float = 0.99, workers: int = 1,
                               literal: bool = False) -> ErrorEstimate:
    """Empirical probability of the region's error event at root ``kappa``.

    A 0-verdict is an error in the target and ring regions, a 1-verdict in
    the reject region.
    """
    if trials < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {trials}")
    if not in_region(spec, kappa, region_kind, literal):
        raise InvalidArgumentError(f"kappa={kappa} is not in the {region_kind} region")
    model = UniformRootModel(kappa, spec.delta, seed)
    failures = count_verdicts(spec, model, error_verdict(region_kind), trials, workers=workers)
    return make_estimate(failures, trials, confidence)


@dataclass
class SweepReport:
    region_kind: str
    worst_kappa: float
    worst_estimate: ErrorEstimate
    grid: list = field(default_factory=list)


def region_grid(spec, kind: str, grid_points: int, literal: bool = False) -> list[float]:
    """Evenly spaced roots over each (truncated) region piece, endpoints included."""
    if grid_points < 2:
        raise InvalidArgumentError(f"grid_points must be >= 2, got {grid_points}")
    pts = []
    for piece in region_intervals(spec, kind, literal):
        for k in np.linspace(piece.lo, piece.hi, grid_points):
            k = float(k)
            if k not in pts:
                pts.append(k)
    if not pts:
        raise InvalidArgumentError(f"{kind} region is empty")
    return pts


def _boundary_first(spec, kind, pts, literal=False):
    # points nearest the decision boundary carry the worst error, so probe them first
    parts = _region_parts(spec, kind, literal)
    inner = {p.hi for p in parts if np.isfinite(p.hi)} | {p.lo for p in parts if np.isfinite(p.lo)}
    return sorted(pts, key=lambda k: (k not in inner, pts.index(k)))


def worst_case_error(spec, region_kind: str, grid_points: int, trials: int, seed: int,
                     confidence: float = 0.99, workers: int = 1,
                     literal: bool = False) -> SweepReport:
    """Largest empirical error over a grid of the region (a lower estimate of the supremum)."""
    grid = []
    for kappa in region_grid(spec, region_kind, grid_points, literal):
        grid.append((kappa, estimate_error_probability(
            spec, kappa, region_kind, trials, seed, confidence, workers, literal)))
    worst_kappa, worst = max(grid, key=lambda ke: ke[1].p_hat)
    return SweepReport(region_kind, worst_kappa, worst, grid)


def regions_of(spec) -> tuple[str, ...]:
    return ("target", "reject") if isinstance(spec, TwoErrorSpec) else REGION_KINDS


def budget_for(spec, kind: str) -> float:
    if kind == "target":
        return spec.lambda1
    if kind == "reject":
        return spec.lambda2
    return spec.lambda3


def achievable_n(family, lambda_target: float, search_cap: int, trials: int, seed: int,
                 grid_points: int = 5, confidence: float = 0.99, workers: int = 1) -> int:
    """Smallest ``n <= search_cap`` whose worst upper confidence bound is ``<= lambda_target``.

    ``family`` is a test spec whose ``n`` is ignored. An ``n`` is rejected as
    soon as one grid point exceeds the target.
    """
    if not 0 < lambda_target < 1:
        raise InvalidArgumentError(f"lambda_target must lie in (0, 1), got {lambda_target}")
    if search_cap < 1:
        raise InvalidArgumentError(f"search_cap must be >= 1, got {search_cap}")
    best = None
    for n in range(1, search_cap + 1):
        spec = replace(family, n=n)
        worst = None
        for kind in regions_of(spec):
            pts = _boundary_first(spec, kind, region_grid(spec, kind, grid_points))
            for kappa in pts:
                est = estimate_error_probability(spec, kappa, kind, trials, seed, confidence,
                                                 workers)
                if worst is None or est.ci_hi > worst.ci_hi:
                    worst = est
                if est.ci_hi > lambda_target:
                    break
            if worst.ci_hi > lambda_target:
                break
        if worst.ci_hi <= lambda_target:
            return n
        if best is None or worst.ci_hi < best[1].ci_hi:
            best = (n, worst)
    raise NotFoundError(
        f"no n <= {search_cap} reaches error <= {lambda_target} (best n={best[0]}, "
        f"upper bound {best[1].ci_hi:.4g})", best=best)


def simulation_rows(spec, trials: int, seed: int, grid_points: int, confidence: float = 0.99,
                    workers: int = 1):
    """Per-grid-point rows keyed by :data:`REPORT_HEADER` covering every region."""
    rows = []
    for kind in regions_of(spec):
        lam = budget_for(spec, kind)
        for kappa in region_grid(spec, kind, grid_points):
            est = estimate_error_probability(spec, kappa, kind, trials, seed, confidence, workers)
            rows.append({
                "region": kind, "kappa": kappa, "n": spec.n, "trials": est.trials,
                "failures": est.failures, "p_hat": est.p_hat, "ci_lo": est.ci_lo,
                "ci_hi": est.ci_hi, "budget_lambda": lam, "pass": est.ci_hi <= lam,
            })
    return rows


@dataclass(frozen=True)
class MeasureCheck:
    inequality: str
    region: str
    c: float
    verdict: int
    estimate: ErrorEstimate  # frequency of `verdict`, i.e. the normalised measure
    bound: float
    holds: bool  # not refuted at the configured confidence
    certified: bool  # lower confidence limit already clears the bound


@dataclass(frozen=True)
class OverlapCap:
    label: str
    c1: float
    c2: float
    gap: float
    measure: float  # box_intersection_measure(c1, c2, delta, n)
    closed_form: float  # (2 delta - gap)^n
    normalized: float


@dataclass
class MeasureReport:
    check: MeasureCheck
    caps: list


def classify_three_error_point(spec: ThreeErrorSpec, c: float) -> str:
    if spec.a <= c <= spec.b:
        return "target"
    if in_region(spec, c, "ring"):
        return "ring"
    if in_region(spec, c, "reject"):
        if any(p.contains(c) for p in region_intervals(spec, "reject")):
            return "reject"
        raise InvalidArgumentError(
            f"c={c} lies more than 2*delta beyond the reject boundary; the box meets no other region")
    raise InvalidArgumentError(f"c={c} lies in a silent gap, no measure inequality applies")


def overlap_caps(spec: ThreeErrorSpec) -> list[OverlapCap]:
    """Caps ``m(J_i ∩ N_i)`` for the three root pairs a test has to separate."""
    a, e1, e2, d, n = spec.a, spec.eps1, spec.eps2, spec.delta, spec.n
    pairs = [("J1N1", a, a - e1, e1), ("J2N2", a - e2 + e1, a - e2, e1), ("J3N3", a, a - e2, e2)]
    caps = []
    for label, c1, c2, gap in pairs:
        m = box_intersection_measure(c1, c2, d, n)
        caps.append(OverlapCap(label, c1, c2, gap, m, (2 * d - gap) ** n, m / (2 * d) ** n))
    return caps


def verify_measure_inequalities(spec: ThreeErrorSpec, c: float, trials: int, seed: int,
                                confidence: float = 0.99) -> MeasureReport:
    """Estimate ``m(test^-1(v) ∩ box) / (2 delta)^n`` for the box of roots ``c``.

    The box is the support of the observation vector when the root is ``c``
    (centred at ``-c`` since observations are taken at level 0). Points are
    sampled uniformly on it, so the verdict frequency is the normalised measure.
    """
    if not isinstance(spec, ThreeErrorSpec):
        raise InvalidArgumentError("measure inequalities are stated for three-error tests")
    if trials < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {trials}")
    region = classify_three_error_point(spec, c)
    label = {"target": "NT1", "reject": "NT2", "ring": "NT3"}[region]
    value = 1 - error_verdict(region)
    bound = 1.0 - budget_for(spec, region)
    box = Box(-c, spec.delta, spec.n)
    hits = 0
    for s in range(0, trials, CHUNK):
        u = uniforms(seed, np.arange(s, min(s + CHUNK, trials), dtype=np.uint64), spec.n)
        lo, hi, _ = feasible_bounds(box.points(u), spec.delta)
        hits += int(np.count_nonzero(verdicts(spec, lo, hi) == value))
    est = make_estimate(hits, trials, confidence)
    check = MeasureCheck(label, region, c, value, est, bound, est.ci_hi >= bound,
                         est.ci_lo >= bound)
    return MeasureReport(check, overlap_caps(spec))
