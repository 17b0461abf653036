"""Built-in oracle suite behind the ``selftest`` CLI command.

Each check compares a fast path against an independent reference
implementation from :mod:`riskfloor.oracles` or against frozen constants.
The whole suite is deterministic and runs in well under a minute.
"""

from typing import NamedTuple

import numpy as np

from . import oracles, specfun
from .bounds import solve_delta_complement, shrinkage_residual
from .kmeans1d import WeightedInstance, kmeans1d_exact, kmeans1d_exact_trunc
from .linear import linear_empirical_risk


class CheckResult(NamedTuple):
    name: str
    ok: bool
    detail: str


# (function, argument, expected value, absolute tolerance)
_SPECFUN_REFERENCE = (
    ("lgamma", 1.0, 0.0),
    ("lgamma", 0.5, 0.5723649429247001),
    ("lgamma", 10.0, 12.801827480081469),
    ("digamma", 1.0, -0.5772156649015329),
    ("digamma", 0.5, -1.9635100260214235),
)
_SPECFUN_TOL = 1e-10


def run_selftest(seed=20240, lgamma_impl=None, digamma_impl=None):
    """Run every check; returns a list of :class:`CheckResult`.

    The ``*_impl`` hooks exist so tests can exercise the failure path by
    injecting a degraded implementation.
    """
    return [
        _check_kmeans_enumeration(seed),
        _check_kmeans_trunc_grid(seed),
        _check_shrinkage_roots(seed),
        _check_specfun(lgamma_impl, digamma_impl),
        _check_linear_grid(seed),
    ]


def _check_kmeans_enumeration(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(80):
        size = int(rng.integers(1, 10))
        k = int(rng.integers(1, 5))
        inst = WeightedInstance(
            np.sort(rng.normal(size=size) * rng.uniform(0.5, 4.0)),
            rng.uniform(0.5, 3.0, size=size),
            rng.uniform(0.0, 0.5, size=size),
        )
        fast = kmeans1d_exact(inst, k).cost
        ref = oracles.kmeans1d_enumerate(inst, k)
        worst = max(worst, abs(fast - ref) / max(1.0, abs(ref)))
    return CheckResult(
        "kmeans1d vs contiguous enumeration", worst <= 1e-9,
        f"worst relative gap {worst:.3e}",
    )


def _check_kmeans_trunc_grid(seed):
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    above = 0.0
    for _ in range(25):
        size = int(rng.integers(2, 8))
        k = int(rng.integers(1, 3))
        B = float(rng.uniform(0.2, 3.0))
        inst = WeightedInstance(
            np.sort(rng.normal(size=size) * 2.0),
            rng.uniform(0.5, 2.0, size=size),
            np.zeros(size),
        )
        fast = kmeans1d_exact_trunc(inst, k, B).cost
        ref = oracles.kmeans1d_trunc_grid(inst, k, B)
        worst = max(worst, abs(fast - ref))
        above = max(above, fast - ref)  # exact may never exceed the grid value
    ok = worst <= 1e-6 and above <= 1e-9
    return CheckResult(
        "truncated kmeans1d vs center grid", ok,
        f"worst gap {worst:.3e}, above-grid {above:.3e}",
    )


def _check_shrinkage_roots(seed):
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for _ in range(1000):
        rhs = float(rng.uniform(0.0, 50.0))
        t = solve_delta_complement(rhs)
        worst = max(worst, abs(shrinkage_residual(t, rhs)) / max(1.0, rhs))
    cross = 0.0
    for rhs in (0.01, 0.1, 0.5, 1.0, 3.0, 10.0):
        cross = max(
            cross,
            abs((1.0 - solve_delta_complement(rhs)) - oracles.shrinkage_root_bisect(rhs)),
        )
    ok = worst <= 1e-12 and cross <= 1e-12
    return CheckResult(
        "shrinkage root residuals", ok,
        f"worst residual {worst:.3e}, bisect gap {cross:.3e}",
    )


def _check_specfun(lgamma_impl, digamma_impl):
    fns = {
        "lgamma": lgamma_impl or (lambda u: specfun.lgamma(u).value),
        "digamma": digamma_impl or (lambda u: specfun.digamma(u).value),
    }
    worst = 0.0
    for name, arg, expected in _SPECFUN_REFERENCE:
        worst = max(worst, abs(fns[name](arg) - expected))
    rec = 0.0
    rng = np.random.default_rng(77)
    dg = fns["digamma"]
    for _ in range(200):
        u = float(rng.uniform(1e-3, 100.0))
        rec = max(rec, abs((dg(u + 1.0) - dg(u)) - 1.0 / u) / max(1.0, 1.0 / u))
    ok = worst <= _SPECFUN_TOL and rec <= 1e-12
    return CheckResult(
        "special function reference values", ok,
        f"worst reference gap {worst:.3e}, recurrence residual {rec:.3e}",
    )


def _check_linear_grid(seed):
    rng = np.random.default_rng(seed + 3)
    worst = 0.0
    for _ in range(12):
        n = int(rng.integers(2, 7))
        d = int(rng.integers(1, 3))
        X = rng.normal(size=(n, d))
        beta = rng.uniform(-1.5, 1.5, size=d)
        y = X @ beta + 0.3 * rng.normal(size=n)
        fast = linear_empirical_risk(X, y)
        ref = oracles.linear_risk_grid(X, y)
        worst = max(worst, abs(fast - ref))
    return CheckResult(
        "linear risk vs beta grid", worst <= 1e-6,
        f"worst gap {worst:.3e}",
    )
