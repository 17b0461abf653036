"""Empirical risk of the linear class and the truncated-fit diagnostics.

The squared-loss empirical risk of ``x -> x' beta`` is the squared norm
of the response's residual off the column span of X, divided by n; it is
computed by a rank-revealing pivoted QR so rank-deficient inputs are
handled exactly.

The truncated empirical risk (per-point loss capped at B) is a
non-convex program; here it gets an IRLS-style upper estimate with
random restarts. An upper estimate must never back a certificate, so the
result is flagged ``certified=False`` and the bound layer propagates
that flag.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .validation import as_rng, check_data, check_positive, check_positive_int

#: Rank decisions treat an R diagonal below RANK_RTOL * (largest column
#: norm) as zero. Generic-position inputs are unaffected; degenerate ones
#: get the exact projection onto the numerically revealed span.
RANK_RTOL = 1e-10

_IRLS_MAX_STEPS = 50


@dataclass(frozen=True)
class LinearClass:
    """Linear predictors on d features, no intercept."""

    d: int

    def __post_init__(self):
        object.__setattr__(self, "d", check_positive_int(self.d, "d"))


class TruncatedRiskEstimate(NamedTuple):
    value: float
    certified: bool


@dataclass(frozen=True)
class MomentDiagnostics:
    """Sample moment quantities entering the truncated-fit accuracy analysis.

    ``gamma`` is the exact fourth moment of y; ``lambda0`` the exact
    smallest eigenvalue of the scaled Gram matrix X'X/n; ``lambda1`` a
    sampled-direction estimate of the directional fourth-moment supremum
    (a lower estimate of the true supremum, reported as a diagnostic
    only); ``residual_floor`` the linear empirical risk itself.
    """

    gamma: float
    lambda0: float
    lambda1: float
    residual_floor: float

    def slack_terms(self, B):
        """The two case-specific accuracy slacks, each of the form c/B.

        The analysis bounds how far the truncated empirical risk can fall
        below the residual floor by the minimum of two expressions; no
        single closed-form constant is available, so both are exposed.
        """
        B = check_positive(B, "B")
        large_coef = 8.0 * (self.gamma + 16.0 * self.gamma * self.lambda1 / self.lambda0**2)
        small_coef = 4.0 * self.gamma * self.lambda1 / self.lambda0**2
        return large_coef / B, small_coef / B


def linear_empirical_risk(X, y):
    """Mean squared residual of y off the column span of X.

    Uses a column-pivoted QR with rank tolerance ``RANK_RTOL`` times the
    largest column norm; an all-zero X therefore projects onto the zero
    subspace and returns ``mean(y^2)``.
    """
    X, y = check_data(X, y)
    n = len(y)
    col_norms = np.linalg.norm(X, axis=0)
    scale = float(np.max(col_norms)) if col_norms.size else 0.0
    if scale == 0.0:
        return float(y @ y) / n
    Q, R, _ = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > RANK_RTOL * scale))
    if rank == 0:
        return float(y @ y) / n
    Qr = Q[:, :rank]
    resid = y - Qr @ (Qr.T @ y)
    return float(resid @ resid) / n


def truncated_linear_risk_irls(X, y, B, restarts=5, rng=None):
    """Upper estimate of the truncated linear empirical risk (loss capped at B).

    Iteratively refits least squares on the points whose squared residual
    is below B (the others get weight zero), starting from the
    untruncated solution and from ``restarts - 1`` randomly perturbed
    copies of it; returns the best objective seen. The objective of any
    candidate beta upper-bounds the infimum, hence ``certified=False``.
    """
    X, y = check_data(X, y)
    B = check_positive(B, "B")
    restarts = check_positive_int(restarts, "restarts")
    rng = as_rng(rng)
    n, d = X.shape

    beta0, *_ = np.linalg.lstsq(X, y, rcond=None)
    best = _capped_objective(X, y, beta0, B)
    pert_scale = (1.0 + float(np.linalg.norm(beta0))) / math.sqrt(d)
    for _ in range(restarts - 1):
        beta = beta0 + pert_scale * rng.standard_normal(d)
        best = min(best, _irls_descend(X, y, beta, B))
    best = min(best, _irls_descend(X, y, beta0.copy(), B))
    return TruncatedRiskEstimate(value=best, certified=False)


def moment_diagnostics(X, y, directions=64, rng=None):
    """Compute :class:`MomentDiagnostics` for a dataset.

    ``gamma`` and ``lambda0`` are exact; ``lambda1`` maximizes the
    directional fourth moment over ``directions`` random unit vectors and
    is only a lower estimate of the supremum.
    """
    X, y = check_data(X, y)
    directions = check_positive_int(directions, "directions")
    rng = as_rng(rng)
    n, d = X.shape
    gamma = float(np.mean(y**4))
    gram = (X.T @ X) / n
    lambda0 = float(np.linalg.eigvalsh(gram)[0])
    dirs = rng.standard_normal((directions, d))
    norms = np.linalg.norm(dirs, axis=1)
    norms[norms == 0.0] = 1.0
    dirs /= norms[:, None]
    proj = X @ dirs.T
    lambda1 = float(np.max(np.mean(proj**4, axis=0)))
    return MomentDiagnostics(
        gamma=gamma,
        lambda0=lambda0,
        lambda1=lambda1,
        residual_floor=linear_empirical_risk(X, y),
    )


def _capped_objective(X, y, beta, B):
    resid = y - X @ beta
    return float(np.mean(np.minimum(resid**2, B)))


def _irls_descend(X, y, beta, B):
    best = _capped_objective(X, y, beta, B)
    active_prev = None
    for _ in range(_IRLS_MAX_STEPS):
        resid = y - X @ beta
        active = resid**2 < B
        if not np.any(active):
            break
        key = active.tobytes()
        if key == active_prev:
            break
        active_prev = key
        beta, *_ = np.linalg.lstsq(X[active], y[active], rcond=None)
        best = min(best, _capped_objective(X, y, beta, B))
    return best
