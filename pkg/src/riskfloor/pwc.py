"""Certified lower bounds on the risk of piecewise-constant model classes.

The class of interest allows at most ``m`` distinct output values over
arbitrary partitions of feature space. Its empirical risk is an exact
1-D clustering problem on the responses (after merging duplicate feature
rows), which lets the bounds below run on the exact minimizer rather
than a surrogate.

Three bounds are provided. The basic one discounts the empirical risk of
the (n-1)-value class by ``alpha1`` and is valid whenever ``m`` is small
enough that some response value repeats with probability ``1 - alpha0``.
The refined one replaces ``n - 1`` by ``n - r``, where ``r`` is a
high-probability floor on the number of repeated draws in an n-sample
from any m-cell distribution. The truncated one applies the
multiplicative-Chernoff discount to the truncated empirical risk at the
same ``n - r``, which tightens the constant for unbounded losses.
"""

import math
from dataclasses import dataclass

from .bounds import BoundResult, solve_delta_complement
from .exceptions import ConditionRefusedError, DomainError
from .kmeans1d import WeightedInstance, group_by_x, kmeans1d_exact, kmeans1d_exact_trunc
from .validation import check_data, check_positive, check_positive_int, check_probability


@dataclass(frozen=True)
class PwcClass:
    """Piecewise-constant functions taking at most ``m`` distinct values."""

    m: int

    def __post_init__(self):
        object.__setattr__(self, "m", check_positive_int(self.m, "m"))


def pwc_empirical_risk(X, y, k):
    """Exact empirical risk of the k-value piecewise-constant class.

    Equals the optimal 1-D k-clustering cost of the responses after
    grouping duplicate feature rows, divided by n.
    """
    X, y = check_data(X, y)
    k = check_positive_int(k, "k")
    instance = group_by_x(X, y)
    return kmeans1d_exact(instance, k).cost / len(y)


def pwc_truncated_empirical_risk(X, y, k, B):
    """Exact truncated empirical risk of the k-value class, loss capped at B.

    When feature rows repeat, the shared-output constraint is dropped and
    the responses are clustered as singletons; that relaxation can only
    lower the value, so any bound built on it stays valid. With distinct
    rows (the generic case) it is the exact minimizer.
    """
    X, y = check_data(X, y)
    k = check_positive_int(k, "k")
    B = check_positive(B, "B")
    instance = WeightedInstance.from_values(y)
    return kmeans1d_exact_trunc(instance, k, B).cost / len(y)


def occupancy_shortfall(n, m, alpha0):
    """High-probability floor r on the repeat count of n draws from m cells.

    With probability at least ``1 - alpha0``, at most ``n - r`` distinct
    cells appear among n multinomial draws, whatever the cell
    probabilities. Evaluates the positive-part/ceiling expression built
    on ``n(n-1)/(n+2m)``; may be 0, in which case downstream bounds are
    vacuous but still valid.
    """
    n = check_positive_int(n, "n")
    m = check_positive_int(m, "m")
    alpha0 = check_probability(alpha0, "alpha0")
    q = n * (n - 1) / (n + 2 * m)
    inner = q - 2.0 * math.sqrt(q * math.log(1.0 / alpha0))
    if inner <= 0.0:
        return 0
    return int(math.ceil(inner))


def basic_admissible_m(n, alpha0):
    """Largest m for which the basic bound's applicability condition holds."""
    n = check_positive_int(n, "n")
    alpha0 = check_probability(alpha0, "alpha0")
    return int(math.floor(n * (n - 1) / (2.0 * math.log(1.0 / alpha0))))


def bound_pwc_basic(X, y, m, budget):
    """Lower bound ``alpha1 * (empirical risk of the (n-1)-value class)``.

    Requires ``m <= n(n-1) / (2 log(1/alpha0))``; outside that range the
    validity argument fails and the call is refused outright (the error
    carries the maximal admissible m).
    """
    X, y = check_data(X, y)
    m = check_positive_int(m, "m")
    n = len(y)
    if n < 2:
        raise DomainError("the basic bound needs n >= 2")
    limit = basic_admissible_m(n, budget.alpha0)
    if m > limit:
        raise ConditionRefusedError(
            f"m={m} exceeds the admissible range for n={n}, "
            f"alpha0={budget.alpha0}: need m <= {limit}",
            max_admissible=limit,
        )
    risk = kmeans1d_exact(group_by_x(X, y), n - 1).cost / n
    return BoundResult(
        value=budget.alpha1 * risk,
        delta=None,
        empirical_risk=risk,
        method="pwc_basic",
        certified=True,
    )


def bound_pwc_refined(X, y, m, budget):
    """Lower bound ``alpha1 * (empirical risk of the (n-r)-value class)``.

    Valid for every ``m``; ``r`` may be 0, making the bound vacuous for
    data with distinct responses.
    """
    X, y = check_data(X, y)
    m = check_positive_int(m, "m")
    n = len(y)
    r = occupancy_shortfall(n, m, budget.alpha0)
    risk = kmeans1d_exact(group_by_x(X, y), n - r).cost / n
    return BoundResult(
        value=budget.alpha1 * risk,
        delta=None,
        empirical_risk=risk,
        method="pwc_refined",
        certified=True,
    )


def bound_pwc_trunc(X, y, m, budget, B):
    """Chernoff-discounted truncated empirical risk at the (n-r)-value class."""
    X, y = check_data(X, y)
    m = check_positive_int(m, "m")
    B = check_positive(B, "B")
    n = len(y)
    r = occupancy_shortfall(n, m, budget.alpha0)
    risk = pwc_truncated_empirical_risk(X, y, n - r, B)
    if risk == 0.0:
        delta, value = 1.0, 0.0
    else:
        rhs = B * math.log(1.0 / budget.alpha1) / (n * risk)
        complement = solve_delta_complement(rhs)
        delta = 1.0 - complement
        value = (1.0 - delta) * risk
    return BoundResult(
        value=value,
        delta=delta,
        empirical_risk=risk,
        method="pwc_trunc",
        certified=True,
    )
