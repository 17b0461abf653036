"""Exact 1-D k-means on weighted instances, plain and loss-truncated.

The empirical risk of the piecewise-constant class reduces to optimal
1-D clustering of the responses (after merging duplicate feature rows),
so exactness here is what makes the downstream bounds certified.

Plain squared loss: clusters of weighted points are contiguous in sorted
order, so an interval dynamic program over segment costs is exact; the
costs are accumulated by a Welford-style extension that stays exact on
tied values. Truncated squared loss keeps the contiguity property
(nearest-center assignment is monotone in distance, and capping the loss
does not change which center is nearest), but the per-segment objective
becomes piecewise quadratic in the center. Its minimum is found by exact
candidate enumeration: weighted means of every value-window of spread at
most ``2 sqrt(B)``, plus the breakpoints ``v_i +- sqrt(B)``, which is
O(len^2) per segment in the worst case.

Since a segment can always be split without increasing cost, an optimal
partition into at most k clusters exists with exactly ``min(k, size)``
nonempty segments, so no segment needs to exceed ``size - k + 1`` points;
the DP and the cost tables are banded accordingly.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .exceptions import DomainError


@dataclass(frozen=True)
class WeightedInstance:
    """A sorted weighted 1-D instance.

    Each point carries a value (group key), a positive weight, and a
    nonnegative constant offset added to any clustering cost (the
    irreducible within-group scatter when duplicate feature rows were
    merged).
    """

    values: np.ndarray
    weights: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        off = np.asarray(self.offsets, dtype=np.float64)
        if not (v.ndim == w.ndim == off.ndim == 1):
            raise DomainError("instance arrays must be 1-D")
        if not (len(v) == len(w) == len(off)):
            raise DomainError("instance arrays must have equal length")
        if len(v) == 0:
            raise DomainError("instance must be nonempty")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(w)) and np.all(np.isfinite(off))):
            raise DomainError("instance arrays must be finite")
        if np.any(w <= 0):
            raise DomainError("weights must be positive")
        if np.any(off < 0):
            raise DomainError("offsets must be nonnegative")
        if np.any(np.diff(v) < 0):
            raise DomainError("values must be sorted ascending")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "offsets", off)

    @classmethod
    def from_values(cls, y):
        """Singleton instance: unit weights, zero offsets, sorted values."""
        y = np.sort(np.asarray(y, dtype=np.float64))
        return cls(y, np.ones_like(y), np.zeros_like(y))

    @property
    def size(self):
        return len(self.values)

    @property
    def total_offset(self):
        return float(np.sum(self.offsets))


@dataclass(frozen=True)
class KmeansSolution:
    """Optimal clustering: total (unnormalized) cost, sorted centers, and
    the center index assigned to each instance point."""

    cost: float
    centers: np.ndarray
    assignment: np.ndarray


def group_by_x(X, y):
    """Merge points with identical feature rows into a weighted instance.

    A function must output a single value per distinct x, so a group of
    duplicates behaves like one point at the group mean with the group's
    total weight, plus an irreducible constant offset (the within-group
    scatter): sum_i (y_i - c)^2 = w (c - ybar)^2 + sum_i (y_i - ybar)^2.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] == 1:
        _, inverse = np.unique(X[:, 0], return_inverse=True)
    else:
        _, inverse = np.unique(X, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    counts = np.bincount(inverse).astype(np.float64)
    means = np.bincount(inverse, weights=y) / counts
    # deviations-from-mean form: exactly zero for constant groups
    offsets = np.bincount(inverse, weights=(y - means[inverse]) ** 2)
    order = np.argsort(means, kind="stable")
    return WeightedInstance(means[order], counts[order], offsets[order])


def kmeans1d_exact(instance, k):
    """Globally optimal clustering into at most ``k`` clusters, squared loss."""
    inst, k = _coerce(instance, k)
    G = inst.size
    if k >= G:
        return _singleton_solution(inst)
    Lmax = G - k + 1
    C = _band_costs_plain(inst.values, inst.weights, G, Lmax)
    cost, cuts = _run_dp(C, G, k, Lmax)
    centers = np.array(
        [_plain_segment(inst.values, inst.weights, s, e)[1] for s, e in cuts],
        dtype=np.float64,
    )
    return _assemble(inst, cost, centers, cuts)


def kmeans1d_exact_trunc(instance, k, B):
    """Optimal clustering under the per-point loss ``w * min((v - c)^2, B)``.

    Offsets are carried through additively, exactly as in the plain case.
    Identical to :func:`kmeans1d_exact` whenever ``B`` exceeds the squared
    value range.
    """
    inst, k = _coerce(instance, k)
    if not (B > 0 and math.isfinite(B)):
        raise DomainError(f"B must be a positive finite real, got {B}")
    B = float(B)
    G = inst.size
    if k >= G:
        return _singleton_solution(inst)
    pw, pwv, pwv2 = _prefix_sums(inst)
    Lmax = G - k + 1
    sqB = math.sqrt(B)
    C = _band_costs_trunc(inst.values, inst.weights, pw, pwv, pwv2, G, Lmax, B, sqB)
    cost, cuts = _run_dp(C, G, k, Lmax)
    centers = np.array(
        [
            _trunc_segment_best(inst.values, inst.weights, pw, pwv, pwv2, s, e, B, sqB)[1]
            for s, e in cuts
        ],
        dtype=np.float64,
    )
    return _assemble(inst, cost, centers, cuts)


def _coerce(instance, k):
    if not isinstance(instance, WeightedInstance):
        instance = WeightedInstance.from_values(instance)
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    return instance, int(k)


def _prefix_sums(inst):
    pw = np.concatenate(([0.0], np.cumsum(inst.weights)))
    pwv = np.concatenate(([0.0], np.cumsum(inst.weights * inst.values)))
    pwv2 = np.concatenate(([0.0], np.cumsum(inst.weights * inst.values**2)))
    return pw, pwv, pwv2


def _singleton_solution(inst):
    return KmeansSolution(
        cost=inst.total_offset,
        centers=inst.values.copy(),
        assignment=np.arange(inst.size, dtype=np.int64),
    )


def _run_dp(C, G, k, Lmax):
    cost, parent = _dp_band(C, G, k, Lmax)
    cuts = []
    i = G
    for layer in range(k - 1, -1, -1):
        L = int(parent[layer, i])
        cuts.append((i - L, i))
        i -= L
    cuts.reverse()
    return float(cost), cuts


def _assemble(inst, dp_cost, centers, cuts):
    assignment = np.empty(inst.size, dtype=np.int64)
    for j, (s, e) in enumerate(cuts):
        assignment[s:e] = j
    order = np.argsort(centers, kind="stable")
    remap = np.empty_like(order)
    remap[order] = np.arange(len(order))
    return KmeansSolution(
        cost=max(dp_cost, 0.0) + inst.total_offset,
        centers=centers[order],
        assignment=remap[assignment],
    )


@njit(cache=True)
def _band_costs_plain(v, w, G, Lmax):
    # Welford-style extension of each segment: no catastrophic
    # cancellation, and exactly zero cost on tied values.
    C = np.full((Lmax, G), np.inf)
    for s in range(G):
        sw = 0.0
        mean = 0.0
        cost = 0.0
        emax = min(G, s + Lmax)
        for e in range(s, emax):
            we = w[e]
            sw_new = sw + we
            diff = v[e] - mean
            cost += diff * diff * (sw * we / sw_new)
            mean += diff * we / sw_new
            sw = sw_new
            C[e - s, s] = cost
    return C


@njit(cache=True)
def _plain_segment(v, w, s, e):
    sw = 0.0
    mean = 0.0
    cost = 0.0
    for i in range(s, e):
        wi = w[i]
        sw_new = sw + wi
        diff = v[i] - mean
        cost += diff * diff * (sw * wi / sw_new)
        mean += diff * wi / sw_new
        sw = sw_new
    return cost, mean


@njit(cache=True)
def _bisect_left(v, x, lo, hi):
    while lo < hi:
        mid = (lo + hi) // 2
        if v[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def _bisect_right(v, x, lo, hi):
    while lo < hi:
        mid = (lo + hi) // 2
        if v[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def _eval_trunc(v, pw, pwv, pwv2, s, e, B, sqB, c):
    # Points at |v - c| = sqrt(B) contribute exactly B either way, so the
    # open/closed choice of the active window is immaterial.
    lo = _bisect_left(v, c - sqB, s, e)
    hi = _bisect_right(v, c + sqB, s, e)
    quad = (pwv2[hi] - pwv2[lo]) - 2.0 * c * (pwv[hi] - pwv[lo]) + c * c * (pw[hi] - pw[lo])
    cost = quad + B * ((pw[e] - pw[s]) - (pw[hi] - pw[lo]))
    return cost if cost > 0.0 else 0.0


@njit(cache=True)
def _trunc_segment_best(v, w, pw, pwv, pwv2, s, e, B, sqB):
    rng = v[e - 1] - v[s]
    if rng * rng <= B:
        return _plain_segment(v, w, s, e)
    # All-truncated plateau: any center out of reach of every point.
    best = B * (pw[e] - pw[s])
    bestc = v[s] - 2.0 * sqB
    span = 2.0 * sqB
    b = s
    for a in range(s, e):
        if b < a:
            b = a
        while b + 1 < e and v[b + 1] - v[a] <= span:
            b += 1
        for t in range(a, b + 1):
            c = (pwv[t + 1] - pwv[a]) / (pw[t + 1] - pw[a])
            cost = _eval_trunc(v, pw, pwv, pwv2, s, e, B, sqB, c)
            if cost < best:
                best = cost
                bestc = c
    for i in range(s, e):
        for c in (v[i] - sqB, v[i] + sqB):
            cost = _eval_trunc(v, pw, pwv, pwv2, s, e, B, sqB, c)
            if cost < best:
                best = cost
                bestc = c
    return best, bestc


@njit(cache=True)
def _band_costs_trunc(v, w, pw, pwv, pwv2, G, Lmax, B, sqB):
    # Incremental plain-cost state per start index; the candidate search
    # only runs for segments whose value range makes truncation active.
    C = np.full((Lmax, G), np.inf)
    for s in range(G):
        sw = 0.0
        mean = 0.0
        cost = 0.0
        emax = min(G, s + Lmax)
        for e in range(s, emax):
            we = w[e]
            sw_new = sw + we
            diff = v[e] - mean
            cost += diff * diff * (sw * we / sw_new)
            mean += diff * we / sw_new
            sw = sw_new
            rng = v[e] - v[s]
            if rng * rng <= B:
                C[e - s, s] = cost
            else:
                C[e - s, s] = _trunc_segment_best(
                    v, w, pw, pwv, pwv2, s, e + 1, B, sqB
                )[0]
    return C


@njit(cache=True)
def _dp_band(C, G, k, Lmax):
    # dp[i] after layer j: best cost of the first i points in exactly j
    # nonempty segments. Splitting never increases cost, so exactly
    # min(k, G) segments is optimal and the band Lmax = G - k + 1 is safe.
    prev = np.full(G + 1, np.inf)
    prev[0] = 0.0
    cur = np.empty(G + 1)
    parent = np.zeros((k, G + 1), dtype=np.int32)
    for layer in range(k):
        cur[0] = np.inf
        for i in range(1, G + 1):
            best = np.inf
            bestL = 0
            Lcap = Lmax if Lmax < i else i
            for L in range(1, Lcap + 1):
                p = prev[i - L]
                if p == np.inf:
                    continue
                val = p + C[L - 1, i - L]
                if val < best:
                    best = val
                    bestL = L
            cur[i] = best
            parent[layer, i] = bestL
        prev, cur = cur, prev
    return prev[G], parent
