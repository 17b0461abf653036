"""Independent brute-force reference implementations.

These deliberately share no code with the fast paths they check: plain
enumeration, dense grids, and a plain bisection. They back the CLI
self-test and the test suite's oracle comparisons; keep them simple
rather than fast.
"""

import math
from itertools import combinations

import numpy as np


def kmeans1d_enumerate(instance, k):
    """Exhaustive minimum over all contiguous partitions into <= k segments."""
    v, w, off = instance.values, instance.weights, instance.offsets
    G = len(v)
    best = math.inf
    for j in range(1, min(k, G) + 1):
        for cuts in combinations(range(1, G), j - 1):
            edges = (0,) + cuts + (G,)
            total = 0.0
            for s, e in zip(edges[:-1], edges[1:]):
                ww = w[s:e]
                c = np.sum(ww * v[s:e]) / np.sum(ww)
                total += float(np.sum(ww * (v[s:e] - c) ** 2))
            best = min(best, total)
    return best + float(np.sum(off))


def kmeans1d_trunc_grid(instance, k, B, step_frac=1e-4):
    """Contiguous-partition minimum with per-segment centers from a dense grid.

    A local refinement pass around the coarse argmin keeps the oracle's
    own resolution error well below the comparison tolerances.
    """
    v, w, off = instance.values, instance.weights, instance.offsets
    G = len(v)
    span = max(v[-1] - v[0], 1.0)
    h = step_frac * span
    sqB = math.sqrt(B)
    grid = np.arange(v[0] - sqB - span, v[-1] + sqB + span, h)

    def eval_centers(s, e, centers):
        d2 = (v[s:e, None] - centers[None, :]) ** 2
        costs = np.sum(w[s:e, None] * np.minimum(d2, B), axis=0)
        i = int(np.argmin(costs))
        return float(costs[i]), centers[i]

    def seg_cost(s, e):
        coarse, c = eval_centers(s, e, grid)
        fine, _ = eval_centers(s, e, np.arange(c - 2 * h, c + 2 * h, h / 100.0))
        return min(coarse, fine)

    best = math.inf
    for j in range(1, min(k, G) + 1):
        for cuts in combinations(range(1, G), j - 1):
            edges = (0,) + cuts + (G,)
            total = sum(seg_cost(s, e) for s, e in zip(edges[:-1], edges[1:]))
            best = min(best, total)
    return best + float(np.sum(off))


def kmeans1d_trunc_assignments(values, k, B, step_frac=1e-3):
    """Tiny-instance check that ignores contiguity: all assignments, grid centers."""
    v = np.asarray(values, dtype=np.float64)
    G = len(v)
    span = max(v.max() - v.min(), 1.0)
    sqB = math.sqrt(B)
    grid = np.arange(v.min() - sqB - span, v.max() + sqB + span, step_frac * span)
    best = math.inf
    for labels in np.ndindex(*([k] * G)):
        labels = np.asarray(labels)
        total = 0.0
        for j in range(k):
            pts = v[labels == j]
            if len(pts) == 0:
                continue
            d2 = (pts[:, None] - grid[None, :]) ** 2
            total += float(np.min(np.sum(np.minimum(d2, B), axis=0)))
        best = min(best, total)
    return best


def linear_risk_grid(X, y, radius=4.0, step=4e-3):
    """Dense beta-grid minimum of the mean squared residual; d <= 2 only.

    The search radius doubles while the coarse argmin sits on the grid
    boundary (interpolating instances can put the minimizer far out),
    then a fine grid around the argmin removes the off-grid error.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if d > 2:
        raise ValueError("grid oracle supports d <= 2 only")

    def scan(center, half_width, h):
        axes = [np.arange(c - half_width, c + half_width + h, h) for c in center]
        if d == 1:
            betas = axes[0][:, None]
        else:
            b0, b1 = np.meshgrid(axes[0], axes[1], indexing="ij")
            betas = np.column_stack([b0.ravel(), b1.ravel()])
        resid = y[None, :] - betas @ X.T
        vals = np.mean(resid**2, axis=1)
        i = int(np.argmin(vals))
        return float(vals[i]), betas[i]

    for _ in range(8):
        coarse_step = step * (radius / 4.0)
        best, argmin = scan(np.zeros(d), radius, coarse_step)
        if np.all(np.abs(argmin) < radius - 2 * coarse_step):
            break
        radius *= 2.0
    fine, _ = scan(argmin, 2 * coarse_step, coarse_step / 100.0)
    return min(best, fine)


def shrinkage_root_bisect(rhs, iters=120):
    """Plain bisection for -delta - log(1 - delta) = rhs on delta in (0, 1)."""
    lo, hi = 0.0, 1.0 - 1e-16
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if -mid - math.log1p(-mid) < rhs:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def birthday_all_distinct(n, m):
    """Exact probability that n uniform draws from m cells are all distinct."""
    if n > m:
        return 0.0
    p = 1.0
    for i in range(n):
        p *= (m - i) / m
    return p


def mean_min_capped(values, probs, m, B=None):
    """Population best-m-values risk of a discrete distribution, by dense search.

    Used to double-check the closed-form true risks of the signal
    generators; minimizes over center grids, so it is approximate.
    """
    values = np.asarray(values, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    if m >= len(values):
        return 0.0
    span = max(values.max() - values.min(), 1.0)
    grid = np.arange(values.min() - span, values.max() + span, 1e-3 * span)
    if m == 1:
        d2 = (values[:, None] - grid[None, :]) ** 2
        if B is not None:
            d2 = np.minimum(d2, B)
        return float(np.min(probs @ d2))
    # contiguity of optimal clusters lets us enumerate split points
    order = np.argsort(values)
    values, probs = values[order], probs[order]
    best = math.inf
    for cuts in combinations(range(1, len(values)), m - 1):
        edges = (0,) + cuts + (len(values),)
        total = 0.0
        for s, e in zip(edges[:-1], edges[1:]):
            d2 = (values[s:e, None] - grid[None, :]) ** 2
            if B is not None:
                d2 = np.minimum(d2, B)
            total += float(np.min(probs[s:e] @ d2))
        best = min(best, total)
    return best
