"""Scikit-learn style estimators wrapping the bound computations.

Both estimators follow the usual conventions: constructor arguments are
stored verbatim (so ``get_params`` / ``set_params`` / ``clone`` work),
``fit(X, y)`` validates inputs and computes the bound, and fitted
quantities live in trailing-underscore attributes (``value_``,
``delta_``, ``empirical_risk_``, ``certified_``).
"""

from sklearn.base import BaseEstimator

from .bounds import AlphaBudget, bound_erm_chernoff, bound_erm_markov, bound_erm_trunc
from .exceptions import DomainError
from .linear import linear_empirical_risk, truncated_linear_risk_irls
from .pwc import bound_pwc_basic, bound_pwc_refined, bound_pwc_trunc
from .validation import as_rng, check_data


class PwcRiskLowerBound(BaseEstimator):
    """Certified lower bound on the risk of a piecewise-constant class.

    Parameters
    ----------
    m : int
        Number of distinct output values the target class allows.
    alpha : float
        Total error budget of the certificate.
    alpha0 : float, optional
        Share of the budget spent on the occupancy event; the remainder
        goes to the risk deviation. Defaults to an even split.
    method : {"basic", "refined", "trunc"}
        Which construction to use. "basic" enforces the admissibility
        condition on ``m`` and refuses when it fails; "refined" is valid
        for every ``m``; "trunc" additionally requires ``trunc_level``.
    trunc_level : float, optional
        Per-point cap on the squared loss (only for ``method="trunc"``).

    Examples
    --------
    >>> est = PwcRiskLowerBound(m=50, alpha=0.1, method="refined").fit(X, y)
    >>> est.value_, est.certified_
    """

    def __init__(self, m=10, alpha=0.1, alpha0=None, method="refined", trunc_level=None):
        self.m = m
        self.alpha = alpha
        self.alpha0 = alpha0
        self.method = method
        self.trunc_level = trunc_level

    def fit(self, X, y):
        X, y = check_data(X, y)
        budget = AlphaBudget(self.alpha, self.alpha0)
        if self.method == "basic":
            result = bound_pwc_basic(X, y, self.m, budget)
        elif self.method == "refined":
            result = bound_pwc_refined(X, y, self.m, budget)
        elif self.method == "trunc":
            if self.trunc_level is None:
                raise DomainError('method="trunc" requires trunc_level')
            result = bound_pwc_trunc(X, y, self.m, budget, self.trunc_level)
        else:
            raise DomainError(f"unknown method {self.method!r}")
        self._store(result, X)
        return self

    def _store(self, result, X):
        self.result_ = result
        self.value_ = result.value
        self.delta_ = result.delta
        self.empirical_risk_ = result.empirical_risk
        self.certified_ = result.certified
        self.n_features_in_ = X.shape[1]


class LinearRiskLowerBound(BaseEstimator):
    """Lower bound on the risk of the linear class (no intercept).

    Parameters
    ----------
    alpha : float
        Error budget.
    method : {"markov", "chernoff", "trunc"}
        "markov" needs no loss assumption. "chernoff" treats
        ``trunc_level`` as a claimed range [0, B] of the loss (the caller
        asserts boundedness). "trunc" caps the loss at ``trunc_level``
        and estimates the truncated empirical risk by restarted IRLS;
        that estimate is heuristic, so the result carries
        ``certified_ = False``.
    trunc_level : float, optional
        The B above; required for "chernoff" and "trunc".
    restarts : int
        IRLS restarts for the truncated path.
    random_state : int or numpy Generator, optional
        Drives the IRLS restart perturbations.
    """

    def __init__(self, alpha=0.1, method="markov", trunc_level=None, restarts=5,
                 random_state=None):
        self.alpha = alpha
        self.method = method
        self.trunc_level = trunc_level
        self.restarts = restarts
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_data(X, y)
        n = len(y)
        if self.method == "markov":
            risk = linear_empirical_risk(X, y)
            result = bound_erm_markov(self.alpha, risk)
        elif self.method == "chernoff":
            if self.trunc_level is None:
                raise DomainError('method="chernoff" requires trunc_level')
            risk = linear_empirical_risk(X, y)
            result = bound_erm_chernoff(self.alpha, n, self.trunc_level, risk)
        elif self.method == "trunc":
            if self.trunc_level is None:
                raise DomainError('method="trunc" requires trunc_level')
            est = truncated_linear_risk_irls(
                X, y, self.trunc_level, restarts=self.restarts,
                rng=as_rng(self.random_state),
            )
            raw = bound_erm_trunc(self.alpha, n, self.trunc_level, est.value)
            result = type(raw)(
                value=raw.value,
                delta=raw.delta,
                empirical_risk=raw.empirical_risk,
                method=raw.method,
                certified=False,
            )
        else:
            raise DomainError(f"unknown method {self.method!r}")
        self.result_ = result
        self.value_ = result.value
        self.delta_ = result.delta
        self.empirical_risk_ = result.empirical_risk
        self.certified_ = result.certified
        self.n_features_in_ = X.shape[1]
        return self
