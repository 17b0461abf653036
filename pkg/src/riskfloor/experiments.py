"""Seeded Monte-Carlo experiments: coverage, hardness ceilings, occupancy.

Each trial draws its own random stream from ``(seed, trial_index)`` via
spawn keys, and results are reduced in trial order, so a run is
bit-identical for any worker count. Experiments that check a theorem
report the empirical rate, its binomial standard error, and the
theoretical ceiling or floor; the 3-standard-error acceptance rule is
applied by callers (the CLI and the test suite).
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import (
    LossSpec,
    bound_erm_chernoff,
    bound_erm_markov,
    bound_erm_trunc,
    solve_delta_complement,
    trivial_randomized_bound,
)
from .exceptions import DomainError, UnknownTrueRiskError
from .generators import LinearGaussian, HeavyTailLinear
from .kmeans1d import group_by_x, kmeans1d_exact
from .linear import LinearClass, linear_empirical_risk, truncated_linear_risk_irls
from .pwc import (
    PwcClass,
    bound_pwc_basic,
    bound_pwc_refined,
    bound_pwc_trunc,
    occupancy_shortfall,
    pwc_empirical_risk,
    pwc_truncated_empirical_risk,
)
from .validation import check_positive_int, check_probability, spawn_rng


@dataclass(frozen=True)
class CoverageReport:
    """Miscoverage and positivity rates of a bound against the exact true risk."""

    trials: int
    miscoverage_count: int
    miscoverage_rate: float
    stderr: float
    alpha: float
    true_risk: float
    positivity_rate: float


@dataclass(frozen=True)
class ExceedanceReport:
    """Rate of the bound exceeding the pooled-sample empirical risk, with
    the sample-resample ceiling ``alpha + n^2 / (2N)``."""

    trials: int
    exceed_count: int
    exceed_rate: float
    stderr: float
    alpha: float
    ceiling: float


@dataclass(frozen=True)
class OccupancyReport:
    trials: int
    rate_all_distinct: float
    rate_within_shortfall: float
    r_used: int


@dataclass(frozen=True)
class InterpolationCapacity:
    """Lower estimates of the largest sample size the class can interpolate
    almost surely (``n_lower``) and with positive probability
    (``n_plus_lower``)."""

    n_lower: float
    n_plus_lower: float
    source: str


def class_empirical_risk(X, y, class_spec, loss=None, rng=None):
    """Empirical risk of a model class on a dataset, honoring a loss spec.

    Returns ``(risk, certified)``. Everything is exact except the
    truncated linear case, whose restart heuristic only upper-estimates
    the non-convex infimum (``certified=False``).
    """
    loss = loss or LossSpec()
    if isinstance(class_spec, PwcClass):
        if loss.truncated:
            return pwc_truncated_empirical_risk(X, y, class_spec.m, loss.B), True
        return pwc_empirical_risk(X, y, class_spec.m), True
    if isinstance(class_spec, LinearClass):
        if X.shape[1] != class_spec.d:
            raise DomainError(
                f"dataset has d={X.shape[1]} but the class expects d={class_spec.d}"
            )
        if loss.truncated:
            est = truncated_linear_risk_irls(X, y, loss.B, rng=rng)
            return est.value, est.certified
        return linear_empirical_risk(X, y), True
    raise DomainError(f"unsupported class spec {class_spec!r}")


def _require_trunc(loss, method):
    if loss is None or not loss.truncated:
        raise DomainError(f"method {method!r} needs a truncated_squared loss spec")
    return loss.B


def _m_trivial(X, y, class_spec, budget, loss, rng):
    return trivial_randomized_bound(budget.alpha, rng)


def _m_erm_markov(X, y, class_spec, budget, loss, rng):
    risk, certified = class_empirical_risk(X, y, class_spec, rng=rng)
    res = bound_erm_markov(budget.alpha, risk)
    return res if certified else _decertify(res)


def _m_erm_chernoff(X, y, class_spec, budget, loss, rng):
    B = _require_trunc(loss, "erm-chernoff")
    risk, certified = class_empirical_risk(X, y, class_spec, rng=rng)
    res = bound_erm_chernoff(budget.alpha, len(y), B, risk)
    return res if certified else _decertify(res)


def _m_erm_trunc(X, y, class_spec, budget, loss, rng):
    B = _require_trunc(loss, "erm-trunc")
    risk, certified = class_empirical_risk(X, y, class_spec, loss=loss, rng=rng)
    res = bound_erm_trunc(budget.alpha, len(y), B, risk)
    return res if certified else _decertify(res)


def _m_pwc_basic(X, y, class_spec, budget, loss, rng):
    return bound_pwc_basic(X, y, _pwc_m(class_spec), budget)


def _m_pwc_refined(X, y, class_spec, budget, loss, rng):
    return bound_pwc_refined(X, y, _pwc_m(class_spec), budget)


def _m_pwc_trunc(X, y, class_spec, budget, loss, rng):
    B = _require_trunc(loss, "pwc-trunc")
    return bound_pwc_trunc(X, y, _pwc_m(class_spec), budget, B)


def _pwc_m(class_spec):
    if not isinstance(class_spec, PwcClass):
        raise DomainError("pwc bounds require a PwcClass spec")
    return class_spec.m


def _decertify(res):
    return type(res)(
        value=res.value,
        delta=res.delta,
        empirical_risk=res.empirical_risk,
        method=res.method,
        certified=False,
    )


BOUND_METHODS = {
    "trivial": _m_trivial,
    "erm_markov": _m_erm_markov,
    "erm_chernoff": _m_erm_chernoff,
    "erm_trunc": _m_erm_trunc,
    "pwc_basic": _m_pwc_basic,
    "pwc_refined": _m_pwc_refined,
    "pwc_trunc": _m_pwc_trunc,
}


def resolve_method(name):
    key = name.replace("-", "_")
    if key not in BOUND_METHODS:
        raise DomainError(
            f"unknown bound method {name!r}; choose from "
            f"{sorted(k.replace('_', '-') for k in BOUND_METHODS)}"
        )
    return key


def evaluate_bound(method, X, y, class_spec, budget, loss=None, rng=None):
    """Run one named bound method on a dataset; returns a BoundResult."""
    return BOUND_METHODS[resolve_method(method)](X, y, class_spec, budget, loss, rng)


def _coverage_trial(payload, t):
    gen, class_spec, method, budget, loss, n, d, seed = payload
    rng = spawn_rng(seed, t)
    X, y = gen.sample(n, d, rng)
    return BOUND_METHODS[method](X, y, class_spec, budget, loss, rng).value


def _resample_trial(payload, t):
    gen, class_spec, method, budget, loss, n, N, d, seed = payload
    rng = spawn_rng(seed, t)
    X, y = gen.sample(N, d, rng)
    value = BOUND_METHODS[method](X[:n], y[:n], class_spec, budget, loss, rng).value
    pooled = _pooled_risk(X, y, class_spec)
    return 1.0 if value > pooled else 0.0


def _pooled_risk(X, y, class_spec):
    if isinstance(class_spec, LinearClass):
        return linear_empirical_risk(X, y)
    grouped = group_by_x(X, y)
    # class size at least the number of distinct rows: fit each exactly
    if class_spec.m >= grouped.size:
        return grouped.total_offset / len(y)
    return kmeans1d_exact(grouped, class_spec.m).cost / len(y)


def _map_trials(fn, payload, trials, workers):
    if workers <= 1:
        return [fn(payload, t) for t in range(trials)]
    chunk = max(1, trials // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(
            pool.map(_TrialRunner(fn, payload), range(trials), chunksize=chunk)
        )


class _TrialRunner:
    """Picklable closure over (fn, payload) for process pools."""

    def __init__(self, fn, payload):
        self.fn = fn
        self.payload = payload

    def __call__(self, t):
        return self.fn(self.payload, t)


def coverage_experiment(
    gen, class_spec, method, budget, n, trials, seed, d=None, loss=None, workers=1
):
    """Estimate miscoverage P(bound > true risk) of a bound method.

    Refuses generator/class pairs without a closed-form true risk: testing
    coverage against an estimated target would not certify anything.
    Also records the positivity rate P(bound > 0).
    """
    n = check_positive_int(n, "n")
    trials = check_positive_int(trials, "trials")
    if trials < 1000:
        raise DomainError("coverage experiments need at least 1000 trials")
    method = resolve_method(method)
    d = _default_d(class_spec, d)
    true_risk = gen.true_risk(class_spec)
    if true_risk is None:
        raise UnknownTrueRiskError(
            f"no closed-form true risk for {gen.kind} vs {class_spec!r}"
        )
    payload = (gen, class_spec, method, budget, loss, n, d, seed)
    values = np.asarray(_map_trials(_coverage_trial, payload, trials, workers))
    miss = int(np.sum(values > true_risk))
    rate = miss / trials
    return CoverageReport(
        trials=trials,
        miscoverage_count=miss,
        miscoverage_rate=rate,
        stderr=math.sqrt(rate * (1.0 - rate) / trials),
        alpha=budget.alpha,
        true_risk=true_risk,
        positivity_rate=float(np.mean(values > 0.0)),
    )


def sample_resample_experiment(
    gen, class_spec, method, budget, n, N, trials, seed, d=None, loss=None, workers=1
):
    """Estimate P(bound on n points > empirical risk on a pool of N >= n).

    For any valid bound this rate is at most ``alpha + n^2/(2N)``; the
    report carries that ceiling.
    """
    n = check_positive_int(n, "n")
    N = check_positive_int(N, "N")
    if N < n:
        raise DomainError(f"pool size N={N} must be at least n={n}")
    trials = check_positive_int(trials, "trials")
    if trials < 1000:
        raise DomainError("hardness experiments need at least 1000 trials")
    method = resolve_method(method)
    d = _default_d(class_spec, d)
    payload = (gen, class_spec, method, budget, loss, n, N, d, seed)
    flags = np.asarray(_map_trials(_resample_trial, payload, trials, workers))
    count = int(np.sum(flags))
    rate = count / trials
    return ExceedanceReport(
        trials=trials,
        exceed_count=count,
        exceed_rate=rate,
        stderr=math.sqrt(rate * (1.0 - rate) / trials),
        alpha=budget.alpha,
        ceiling=min(1.0, budget.alpha + n * n / (2.0 * N)),
    )


def occupancy_experiment(m, n, trials, seed, alpha0=0.05):
    """Simulate the occupied-cell count of n uniform draws from m cells.

    Reports the all-distinct rate (the birthday event) and the rate of
    the event "at most n - r distinct", with r from
    :func:`riskfloor.pwc.occupancy_shortfall` at ``alpha0``. The uniform
    cell distribution is the extremal case for the all-distinct event.
    """
    m = check_positive_int(m, "m")
    n = check_positive_int(n, "n")
    trials = check_positive_int(trials, "trials")
    alpha0 = check_probability(alpha0, "alpha0")
    r = occupancy_shortfall(n, m, alpha0)
    rng = spawn_rng(seed)
    draws = rng.integers(m, size=(trials, n))
    draws.sort(axis=1)
    distinct = 1 + np.sum(np.diff(draws, axis=1) != 0, axis=1)
    return OccupancyReport(
        trials=trials,
        rate_all_distinct=float(np.mean(distinct == n)),
        rate_within_shortfall=float(np.mean(distinct <= n - r)),
        r_used=r,
    )


def chernoff_lemma_experiment(n, mean_profile, alpha, trials, seed):
    """Frequency of the shrinkage event for sums of independent Bernoullis.

    Draws ``Z_i ~ Bernoulli(mean_profile[i])``, sets ``S = sum Z_i``,
    solves ``-delta - log(1-delta) = log(1/alpha)/S`` (``delta = 1`` when
    ``S = 0``), and reports how often ``(1-delta) S <= sum(mean_profile)``.
    The guarantee is a frequency of at least ``1 - alpha``.
    """
    n = check_positive_int(n, "n")
    alpha = check_probability(alpha, "alpha")
    trials = check_positive_int(trials, "trials")
    if trials < 1000:
        raise DomainError("the shrinkage-event experiment needs at least 1000 trials")
    means = np.asarray(mean_profile, dtype=np.float64)
    if means.shape != (n,) or np.any(means < 0.0) or np.any(means > 1.0):
        raise DomainError("mean_profile must be a length-n vector in [0, 1]")
    mu = float(np.sum(means))
    rng = spawn_rng(seed)
    draws = rng.uniform(size=(trials, n)) < means
    sums = np.sum(draws, axis=1).astype(np.int64)
    log_inv_alpha = math.log(1.0 / alpha)
    # S is integer-valued; solve each distinct value once
    complements = {0: 0.0}
    for s in np.unique(sums):
        if s > 0:
            complements[int(s)] = solve_delta_complement(log_inv_alpha / s)
    held = [complements[int(s)] * s <= mu for s in sums]
    return float(np.mean(held))


def capacity_profile(class_spec, gen, probe_ns=None, trials=50, seed=0):
    """Interpolation capacity of a class under a generator.

    Analytic values are returned where available: d for the linear class
    on generators with a density (infinite when the generator is itself
    noise-free linear), and the class size for piecewise-constant classes
    when the response marginal is nonatomic. Otherwise probes a grid of
    sample sizes and reports the largest n whose empirical risk was zero
    in all (``n_lower``) or any (``n_plus_lower``) of the trials.
    """
    if isinstance(class_spec, LinearClass):
        noise_free = (
            isinstance(gen, (LinearGaussian, HeavyTailLinear))
            and getattr(gen, "sigma", getattr(gen, "scale", 1.0)) == 0
        )
        if noise_free:
            return InterpolationCapacity(math.inf, math.inf, "analytic")
        return InterpolationCapacity(class_spec.d, class_spec.d, "analytic")
    if not isinstance(class_spec, PwcClass):
        raise DomainError(f"unsupported class spec {class_spec!r}")
    kind = getattr(gen, "kind", None)
    if kind == "pwc_signal" and gen.sigma == 0 and class_spec.m >= len(gen.levels):
        return InterpolationCapacity(math.inf, math.inf, "analytic")
    if kind in ("linear_gaussian", "heavy_tail_linear", "pwc_signal"):
        # nonatomic responses: m distinct feature rows can always be fit
        return InterpolationCapacity(class_spec.m, class_spec.m, "analytic")
    return _simulated_capacity(class_spec, gen, probe_ns, trials, seed)


def _simulated_capacity(class_spec, gen, probe_ns, trials, seed):
    if probe_ns is None:
        probe_ns = range(1, 2 * class_spec.m + 6)
    n_lower = 0
    n_plus_lower = 0
    for idx, n in enumerate(probe_ns):
        zeros = 0
        for t in range(trials):
            rng = spawn_rng(seed, idx, t)
            X, y = gen.sample(n, 1, rng)
            risk = pwc_empirical_risk(X, y, class_spec.m)
            if risk <= 1e-9 * (1.0 + float(np.mean(y**2))):
                zeros += 1
        if zeros == trials:
            n_lower = max(n_lower, n)
        if zeros > 0:
            n_plus_lower = max(n_plus_lower, n)
    return InterpolationCapacity(n_lower, n_plus_lower, "simulated")


def _default_d(class_spec, d):
    if d is not None:
        return check_positive_int(d, "d")
    if isinstance(class_spec, LinearClass):
        return class_spec.d
    return 1
