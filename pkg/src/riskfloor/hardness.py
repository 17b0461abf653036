"""Hardness quantities for the linear class.

When the joint law of an n-sample is close in total variation to some
mixture of noise-free linear distributions, every valid lower bound on
the linear class risk is positive with probability at most ``alpha``
plus that distance. This module computes upper bounds on the distance:

* a closed form for Gaussian feature marginals, via Wishart
  log-determinant moments (exact gamma/digamma sums, no sampling);
* a Monte-Carlo estimate for arbitrary feature samplers, based on the
  concentration of ``det(X Omega X')^{-1/2}``;
* a transfer rule that converts a bound computed at an inflated sample
  size into one for a distribution with a bounded density ratio.

All determinant work happens in log space: the raw determinant
underflows once n grows past a few dozen rows.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DomainError
from .specfun import digamma, lgamma
from .validation import check_positive_int, check_probability, spawn_rng

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class TvEstimate:
    """An upper bound (or estimate of one) on the mixture total-variation
    distance, clamped to [0, 1].

    ``rejected`` counts Monte-Carlo trials discarded for a numerically
    singular Gram matrix (at most 1% of trials, or the run aborts).
    """

    value: float
    method: str
    mc_stderr: float = None
    omega_id: str = None
    base_n: int = None
    rejected: int = 0


class WishartMoments(NamedTuple):
    log_e_invsqrtdet: float
    e_logdet: float
    kl_chain_bound: float


def tv_gaussian_bound(n, d):
    """Closed-form bound ``min(1, 0.5 sqrt(n / (d - n - 1)))`` for Gaussian X.

    Requires ``d >= n + 2``.
    """
    n = check_positive_int(n, "n")
    d = check_positive_int(d, "d")
    if d < n + 2:
        raise DomainError(f"closed form needs d >= n + 2, got n={n}, d={d}")
    value = 0.5 * math.sqrt(n / (d - n - 1.0))
    return TvEstimate(value=min(1.0, value), method="gaussian_closed_form")


def wishart_logdet_moments(n, d):
    """Exact moments of the log-determinant of an n x n Wishart with d dof.

    The determinant is distributed as a product of independent chi-square
    variables with d, d-1, ..., d-n+1 degrees of freedom, so
    ``log E[det^{-1/2}]`` and ``E[log det]`` are gamma/digamma sums. The
    returned ``kl_chain_bound`` is ``sqrt((log E[det^{-1/2}] +
    E[log det]/2) / 2)``, which the closed form above dominates.
    """
    n = check_positive_int(n, "n")
    d = check_positive_int(d, "d")
    if d < n + 2:
        raise DomainError(f"moment sums need d >= n + 2, got n={n}, d={d}")
    log_e_inv = 0.0
    e_logdet = 0.0
    for k in range(d - n + 1, d + 1):
        log_e_inv += -0.5 * _LOG2 + lgamma((k - 1) / 2.0).value - lgamma(k / 2.0).value
        e_logdet += _LOG2 + digamma(k / 2.0).value
    gap = log_e_inv + 0.5 * e_logdet
    ceiling = n / (2.0 * (d - 1.0 - n))
    if gap > ceiling + 1e-9:
        raise AssertionError(
            f"moment gap {gap} exceeds its analytic ceiling {ceiling} at n={n}, d={d}"
        )
    kl_chain = math.sqrt(max(gap, 0.0) / 2.0)
    return WishartMoments(
        log_e_invsqrtdet=log_e_inv,
        e_logdet=e_logdet,
        kl_chain_bound=kl_chain,
    )


def tv_kl_chain_bound(n, d):
    """The Wishart moment-gap bound packaged as a :class:`TvEstimate`."""
    moments = wishart_logdet_moments(n, d)
    return TvEstimate(value=min(1.0, moments.kl_chain_bound), method="kl_chain")


def tv_concentration_mc(sampler, n, d, omega=None, trials=10_000, seed=0):
    """Monte-Carlo estimate of ``0.5 E|h / E[h] - 1|`` with
    ``h = det(X Omega X')^{-1/2}``.

    ``sampler`` must expose ``sample_x(n, d, rng)`` (any generator from
    :mod:`riskfloor.generators` does) or be a callable ``(n, d, rng) ->
    X``. Each trial factorizes ``X Omega X'`` by Cholesky and accumulates
    the log-determinant from the factor's diagonal. Numerically singular
    trials are rejected and counted; more than 1% rejections aborts.
    Requires ``d >= n`` and ``trials >= 100``.
    """
    n = check_positive_int(n, "n")
    d = check_positive_int(d, "d")
    trials = check_positive_int(trials, "trials")
    if trials < 100:
        raise DomainError("need at least 100 Monte-Carlo trials")
    if d < n:
        raise DomainError(f"the concentration bound needs d >= n, got n={n}, d={d}")
    omega_id = "identity"
    chol_omega = None
    if omega is not None:
        omega = np.asarray(omega, dtype=np.float64)
        if omega.shape != (d, d) or not np.allclose(omega, omega.T, atol=1e-10):
            raise DomainError("omega must be a symmetric d x d matrix")
        try:
            chol_omega = np.linalg.cholesky(omega)
        except np.linalg.LinAlgError:
            raise DomainError("omega must be positive definite") from None
        omega_id = "custom"
    draw = sampler.sample_x if hasattr(sampler, "sample_x") else sampler

    log_h = np.empty(trials)
    rejected = 0
    kept = 0
    for t in range(trials):
        rng = spawn_rng(seed, t)
        X = np.asarray(draw(n, d, rng), dtype=np.float64)
        if X.shape != (n, d):
            raise DomainError(f"sampler returned shape {X.shape}, expected {(n, d)}")
        M = X @ X.T if chol_omega is None else (X @ chol_omega) @ (X @ chol_omega).T
        try:
            L = np.linalg.cholesky(M)
        except np.linalg.LinAlgError:
            rejected += 1
            continue
        log_h[kept] = -float(np.sum(np.log(np.diag(L))))
        kept += 1
    if rejected > 0.01 * trials:
        raise DomainError(
            f"{rejected}/{trials} trials produced a singular X Omega X'"
        )
    log_h = log_h[:kept]
    shift = np.max(log_h)
    scaled = np.exp(log_h - shift)
    ratio = scaled / np.mean(scaled)
    dev = np.abs(ratio - 1.0)
    value = 0.5 * float(np.mean(dev))
    stderr = 0.5 * float(np.std(dev, ddof=1)) / math.sqrt(kept)
    return TvEstimate(
        value=min(1.0, value),
        method="mc_general",
        mc_stderr=stderr,
        omega_id=omega_id,
        rejected=rejected,
    )


def transfer_base_size(n, epsilon):
    """Sample size at which the base bound must be computed: ceil(2n/epsilon)."""
    n = check_positive_int(n, "n")
    if not 0.0 < epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon}")
    return int(math.ceil(2.0 * n / epsilon))


def tv_transfer_bound(base_value, n, epsilon):
    """Transfer a bound to a distribution with density ratio at most 1/epsilon.

    ``base_value`` must have been computed at sample size
    ``transfer_base_size(n, epsilon)``; the returned estimate records
    that size in ``base_n`` so callers can verify which base computation
    to perform. The result is ``min(1, base_value + exp(-n/4))``.
    """
    n = check_positive_int(n, "n")
    N = transfer_base_size(n, epsilon)
    if isinstance(base_value, TvEstimate):
        base_value = base_value.value
    base_value = float(base_value)
    if not 0.0 <= base_value <= 1.0:
        raise DomainError(f"base bound must lie in [0, 1], got {base_value}")
    value = min(1.0, base_value + math.exp(-n / 4.0))
    return TvEstimate(value=value, method="transfer", base_n=N)


def positivity_ceiling(alpha, n, tv):
    """Ceiling ``min(1, alpha + tv)`` on P(bound > 0) for any valid bound
    on the linear class risk at sample size n."""
    alpha = check_probability(alpha, "alpha")
    check_positive_int(n, "n")
    if isinstance(tv, TvEstimate):
        tv = tv.value
    tv = float(tv)
    if tv < 0.0:
        raise DomainError(f"tv bound must be nonnegative, got {tv}")
    return min(1.0, alpha + tv)
