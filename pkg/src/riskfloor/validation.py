"""Input validation helpers used by the functional API and the estimators."""

import numpy as np

from .exceptions import DomainError


def check_data(X, y):
    """Validate and coerce a feature matrix / response pair.

    Returns float64 copies of ``X`` (2-D, n x d) and ``y`` (1-D, length n).
    A 1-D ``X`` is treated as a single column. Raises
    :class:`~riskfloor.exceptions.DomainError` on shape mismatch or
    non-finite entries.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DomainError(f"X must be a 2-D matrix, got ndim={X.ndim}")
    if y.ndim != 1:
        raise DomainError(f"y must be a 1-D vector, got ndim={y.ndim}")
    if X.shape[0] != y.shape[0]:
        raise DomainError(
            f"X has {X.shape[0]} rows but y has length {y.shape[0]}"
        )
    if X.shape[0] == 0:
        raise DomainError("empty dataset")
    if not np.all(np.isfinite(X)):
        raise DomainError("X contains non-finite entries")
    if not np.all(np.isfinite(y)):
        raise DomainError("y contains non-finite entries")
    return X, y


def check_probability(value, name):
    """Require ``value`` strictly inside (0, 1)."""
    value = float(value)
    if not 0.0 < value < 1.0 or value != value:
        raise DomainError(f"{name} must lie strictly in (0, 1), got {value}")
    return value


def check_positive_int(value, name):
    if int(value) != value or value < 1:
        raise DomainError(f"{name} must be a positive integer, got {value}")
    return int(value)


def check_positive(value, name):
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise DomainError(f"{name} must be a positive finite real, got {value}")
    return value


def as_rng(seed):
    """Coerce an int seed or an existing Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_rng(seed, *key):
    """Independent, order-insensitive stream for a (seed, key) pair.

    Built on ``numpy.random.SeedSequence`` spawn keys, so the stream for
    trial ``i`` is the same regardless of how many other trials run, in
    which order, or on how many workers.
    """
    return np.random.default_rng(
        np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    )
