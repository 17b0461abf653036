"""Generic certified lower bounds built from an empirical risk value.

Three constructions are provided:

* a Markov-style bound ``alpha * empirical_risk``, valid for any
  nonnegative loss;
* a multiplicative-Chernoff bound ``(1 - delta) * empirical_risk`` for
  losses known to lie in ``[0, B]``, where ``delta`` solves
  ``-delta - log(1 - delta) = B log(1/alpha) / (n * empirical_risk)``;
* the same arithmetic applied to a truncated empirical risk, which makes
  it valid for unbounded losses.

A randomized 0/infinity bound is included purely as a baseline for the
hardness experiments.
"""

import math
from dataclasses import dataclass

from .exceptions import DataInconsistencyError, DomainError
from .validation import as_rng, check_positive, check_positive_int, check_probability

#: Residual tolerance of the shrinkage root solve, relative to max(1, rhs).
ROOT_TOL = 1e-12

_MAX_BISECT = 200


@dataclass(frozen=True)
class AlphaBudget:
    """An error budget ``alpha`` split into two parts ``alpha0 + alpha1``.

    ``alpha0`` pays for the occupancy event in the piecewise-constant
    bounds and ``alpha1`` for the empirical-risk deviation. Omitting both
    splits evenly; omitting one derives it from the other.
    """

    alpha: float
    alpha0: float = None
    alpha1: float = None

    def __post_init__(self):
        alpha = check_probability(self.alpha, "alpha")
        a0, a1 = self.alpha0, self.alpha1
        if a0 is None and a1 is None:
            a0 = alpha / 2.0
            a1 = alpha - a0
        elif a1 is None:
            a0 = float(a0)
            a1 = alpha - a0
        elif a0 is None:
            a1 = float(a1)
            a0 = alpha - a1
        check_probability(a0, "alpha0")
        check_probability(a1, "alpha1")
        if abs((a0 + a1) - alpha) > math.ulp(alpha):
            raise DomainError(
                f"alpha0 + alpha1 = {a0 + a1!r} does not match alpha = {alpha!r}"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "alpha0", a0)
        object.__setattr__(self, "alpha1", a1)


@dataclass(frozen=True)
class LossSpec:
    """Loss configuration: plain squared loss, or squared loss capped at B."""

    kind: str = "squared"
    B: float = None

    def __post_init__(self):
        if self.kind not in ("squared", "truncated_squared"):
            raise DomainError(f"unknown loss kind {self.kind!r}")
        if self.kind == "truncated_squared":
            if self.B is None:
                raise DomainError("truncated_squared requires a truncation level B")
            object.__setattr__(self, "B", check_positive(self.B, "B"))
        elif self.B is not None:
            raise DomainError("B is only meaningful for truncated_squared")

    @property
    def truncated(self):
        return self.kind == "truncated_squared"


@dataclass(frozen=True)
class BoundResult:
    """A certified (or explicitly heuristic) lower bound with diagnostics.

    ``certified`` is False only when the empirical risk feeding the bound
    was itself produced by a heuristic upper estimate (the truncated
    linear path); such values must never be presented as certificates.
    """

    value: float
    delta: float
    empirical_risk: float
    method: str
    certified: bool


def solve_delta(rhs):
    """Root of ``-delta - log(1 - delta) = rhs`` on [0, 1].

    Returns 0 at ``rhs = 0`` and exactly 1 at ``rhs = +inf``. Note that
    for ``rhs`` above ~36 the complement ``1 - delta`` falls below float
    spacing at 1.0, so the returned ``delta`` rounds to 1; use
    :func:`solve_delta_complement` when the complement itself is needed.
    """
    return 1.0 - solve_delta_complement(rhs)


def solve_delta_complement(rhs):
    """Complement ``t = 1 - delta`` of the root of ``-delta - log(1-delta) = rhs``.

    Solving for the complement keeps full precision for large ``rhs``
    (tiny ``t``), where ``delta`` itself is unrepresentable below one ulp
    of 1.0. Downstream bound values are formed as ``t * empirical_risk``,
    so this is the representation that matters.
    """
    rhs = float(rhs)
    if rhs != rhs or rhs < 0.0:
        raise DomainError(f"rhs must be nonnegative, got {rhs}")
    if rhs == 0.0:
        return 1.0
    if math.isinf(rhs):
        return 0.0
    # In u = log t the equation reads e^u - 1 - u = rhs, strictly
    # decreasing in t (increasing in -u). g(e^{-(rhs+1)}) > rhs >= g(1).
    lo = -(rhs + 1.0)
    hi = 0.0
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if math.expm1(mid) - mid > rhs:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-18 * max(1.0, abs(mid)):
            break
    u = 0.5 * (lo + hi)
    # One Newton polish; h'(u) = expm1(u) vanishes only toward rhs -> 0,
    # where bisection already converged to machine precision.
    h = math.expm1(u) - u - rhs
    hp = math.expm1(u)
    if hp != 0.0:
        step = h / hp
        if lo <= u - step <= hi:
            u -= step
    return math.exp(u)


def shrinkage_residual(complement, rhs):
    """Forward residual ``(-delta - log(1-delta)) - rhs`` via the complement."""
    return (complement - 1.0 - math.log(complement)) - rhs


def bound_erm_markov(alpha, empirical_risk):
    """Markov lower bound ``alpha * empirical_risk``; valid for any loss."""
    alpha = check_probability(alpha, "alpha")
    empirical_risk = _check_risk(empirical_risk)
    return BoundResult(
        value=alpha * empirical_risk,
        delta=None,
        empirical_risk=empirical_risk,
        method="erm_markov",
        certified=True,
    )


def bound_erm_chernoff(alpha, n, B, empirical_risk):
    """Chernoff lower bound ``(1 - delta) * empirical_risk`` for loss in [0, B].

    Raises :class:`~riskfloor.exceptions.DataInconsistencyError` when the
    supplied empirical risk exceeds ``B``, since that contradicts the
    claimed loss range.
    """
    alpha = check_probability(alpha, "alpha")
    n = check_positive_int(n, "n")
    B = check_positive(B, "B")
    empirical_risk = _check_risk(empirical_risk)
    if empirical_risk > B:
        raise DataInconsistencyError(
            f"empirical risk {empirical_risk} exceeds the claimed loss bound B={B}"
        )
    return _chernoff_result(alpha, n, B, empirical_risk, method="erm_chernoff")


def bound_erm_trunc(alpha, n, B, truncated_empirical_risk):
    """Chernoff lower bound from a truncated empirical risk.

    Identical arithmetic to :func:`bound_erm_chernoff`, but because the
    per-point loss is capped at ``B`` by construction, the result is a
    valid lower bound even for unbounded losses.
    """
    alpha = check_probability(alpha, "alpha")
    n = check_positive_int(n, "n")
    B = check_positive(B, "B")
    risk = _check_risk(truncated_empirical_risk)
    if risk > B:
        raise DataInconsistencyError(
            f"truncated risk {risk} exceeds the truncation level B={B}"
        )
    return _chernoff_result(alpha, n, B, risk, method="erm_trunc")


def trivial_randomized_bound(alpha, rng):
    """The 0-or-infinity randomized baseline: +inf with probability alpha.

    Valid by construction, and positive with probability exactly alpha;
    used only as a reference point in hardness experiments.
    """
    alpha = check_probability(alpha, "alpha")
    rng = as_rng(rng)
    value = math.inf if rng.random() < alpha else 0.0
    return BoundResult(
        value=value,
        delta=None,
        empirical_risk=0.0,
        method="trivial",
        certified=True,
    )


def _chernoff_result(alpha, n, B, risk, method):
    if risk == 0.0:
        delta, value = 1.0, 0.0
    else:
        rhs = B * math.log(1.0 / alpha) / (n * risk)
        complement = solve_delta_complement(rhs)
        delta = 1.0 - complement
        value = (1.0 - delta) * risk
    return BoundResult(
        value=value,
        delta=delta,
        empirical_risk=risk,
        method=method,
        certified=True,
    )


def _check_risk(risk):
    risk = float(risk)
    if risk != risk or risk < 0.0:
        raise DomainError(f"empirical risk must be nonnegative, got {risk}")
    return risk
