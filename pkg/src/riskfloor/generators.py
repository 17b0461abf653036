"""Synthetic distributions with closed-form model class risks.

Every generator is a frozen config object with three duck-typed methods:
``sample_x(n, d, rng)``, ``sample(n, d, rng) -> (X, Y)``, and
``true_risk(class_spec) -> float | None`` (None means "no closed form";
coverage experiments refuse such pairs). Sampling consumes only the
passed Generator, so a fixed stream reproduces datasets bit for bit.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .kmeans1d import WeightedInstance, kmeans1d_exact
from .linear import LinearClass
from .pwc import PwcClass


def _beta_for(beta, d, scale=1.0):
    if beta is None:
        return np.full(d, scale / math.sqrt(d))
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (d,):
        raise DomainError(f"beta has shape {beta.shape}, inconsistent with d={d}")
    return beta


@dataclass(frozen=True)
class LinearGaussian:
    """Gaussian features, linear signal, Gaussian noise: Y = X'beta + sigma Z.

    ``cov_diag`` scales the feature coordinates (a diagonal covariance);
    the default is isotropic. The linear class risk is ``sigma^2``
    exactly, for any beta.
    """

    sigma: float = 1.0
    beta: tuple = None
    cov_diag: tuple = None

    kind = "linear_gaussian"

    def sample_x(self, n, d, rng):
        X = rng.standard_normal((n, d))
        if self.cov_diag is not None:
            scales = np.sqrt(np.asarray(self.cov_diag, dtype=np.float64))
            if scales.shape != (d,):
                raise DomainError("cov_diag length inconsistent with d")
            X = X * scales
        return X

    def sample(self, n, d, rng):
        X = self.sample_x(n, d, rng)
        beta = _beta_for(self.beta, d)
        noise = rng.standard_normal(n) if self.sigma > 0 else 0.0
        return X, X @ beta + self.sigma * noise

    def inverse_covariance(self, d):
        if self.cov_diag is None:
            return np.eye(d)
        return np.diag(1.0 / np.asarray(self.cov_diag, dtype=np.float64))

    def true_risk(self, class_spec):
        if isinstance(class_spec, LinearClass):
            return self.sigma**2
        return None


@dataclass(frozen=True)
class PwcSignal:
    """Piecewise-constant signal in the first feature, plus Gaussian noise.

    X is uniform on the unit cube; the signal takes ``levels[j]`` on the
    j-th of ``len(levels)`` equal slices of the first coordinate. For a
    piecewise-constant class with at least ``len(levels)`` values the
    true risk is ``sigma^2``; with fewer values it is ``sigma^2`` plus
    the population clustering cost of the level distribution.
    """

    levels: tuple = (0.0, 2.0)
    sigma: float = 1.0

    kind = "pwc_signal"

    def __post_init__(self):
        if len(self.levels) < 1:
            raise DomainError("need at least one level")
        if len(set(self.levels)) != len(self.levels):
            raise DomainError("levels must be distinct")

    def sample_x(self, n, d, rng):
        return rng.uniform(size=(n, d))

    def sample(self, n, d, rng):
        X = self.sample_x(n, d, rng)
        m_true = len(self.levels)
        cells = np.minimum((X[:, 0] * m_true).astype(np.int64), m_true - 1)
        signal = np.asarray(self.levels, dtype=np.float64)[cells]
        noise = rng.standard_normal(n) if self.sigma > 0 else 0.0
        return X, signal + self.sigma * noise

    def true_risk(self, class_spec):
        if not isinstance(class_spec, PwcClass):
            return None
        m_true = len(self.levels)
        base = self.sigma**2
        if class_spec.m >= m_true:
            return base
        levels = np.sort(np.asarray(self.levels, dtype=np.float64))
        inst = WeightedInstance(
            levels, np.full(m_true, 1.0 / m_true), np.zeros(m_true)
        )
        return base + kmeans1d_exact(inst, class_spec.m).cost


@dataclass(frozen=True)
class MultinomialUniform:
    """Responses uniform on {0, ..., support - 1}, independent of X.

    Since Y carries no signal, the best any function class can do is the
    constant at the mean, so the piecewise-constant risk is Var(Y) =
    (support^2 - 1) / 12 for every class size.
    """

    support: int = 365

    kind = "multinomial_uniform"

    def __post_init__(self):
        if int(self.support) != self.support or self.support < 1:
            raise DomainError("support must be a positive integer")

    def sample_x(self, n, d, rng):
        return rng.uniform(size=(n, d))

    def sample(self, n, d, rng):
        X = self.sample_x(n, d, rng)
        return X, rng.integers(self.support, size=n).astype(np.float64)

    def true_risk(self, class_spec):
        if isinstance(class_spec, PwcClass):
            return (self.support**2 - 1) / 12.0
        return None


@dataclass(frozen=True)
class HeavyTailLinear:
    """Linear signal with Student-t noise of ``dof`` degrees of freedom.

    The linear class risk is the noise variance ``scale^2 dof/(dof-2)``
    when ``dof > 2``; otherwise the variance is infinite and no closed
    form is reported.
    """

    dof: float = 3.0
    scale: float = 1.0
    beta: tuple = None

    kind = "heavy_tail_linear"

    def __post_init__(self):
        if not self.dof > 0:
            raise DomainError("dof must be positive")

    def sample_x(self, n, d, rng):
        return rng.standard_normal((n, d))

    def sample(self, n, d, rng):
        X = self.sample_x(n, d, rng)
        beta = _beta_for(self.beta, d)
        return X, X @ beta + self.scale * rng.standard_t(self.dof, size=n)

    def true_risk(self, class_spec):
        if isinstance(class_spec, LinearClass) and self.dof > 2:
            return self.scale**2 * self.dof / (self.dof - 2.0)
        return None


_GENERATORS = {
    "linear_gaussian": LinearGaussian,
    "pwc_signal": PwcSignal,
    "multinomial_uniform": MultinomialUniform,
    "heavy_tail_linear": HeavyTailLinear,
}


def make_generator(kind, **params):
    """Factory by kind name, used by the CLI."""
    try:
        cls = _GENERATORS[kind]
    except KeyError:
        raise DomainError(
            f"unknown generator {kind!r}; choose from {sorted(_GENERATORS)}"
        ) from None
    return cls(**params)
