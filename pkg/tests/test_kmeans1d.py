import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskfloor import oracles
from riskfloor.exceptions import DomainError
from riskfloor.kmeans1d import (
    WeightedInstance,
    group_by_x,
    kmeans1d_exact,
    kmeans1d_exact_trunc,
)


def random_instance(rng, max_size=9, with_offsets=True):
    size = int(rng.integers(1, max_size + 1))
    values = np.sort(rng.normal(size=size) * rng.uniform(0.5, 3.0))
    weights = rng.uniform(0.5, 3.0, size=size)
    offsets = rng.uniform(0.0, 0.5, size=size) if with_offsets else np.zeros(size)
    return WeightedInstance(values, weights, offsets)


class TestGroupByX:
    def test_all_distinct(self):
        X = np.arange(6.0).reshape(3, 2)
        y = np.array([3.0, 1.0, 2.0])
        inst = group_by_x(X, y)
        assert inst.size == 3
        assert np.array_equal(inst.values, np.sort(y))
        assert np.all(inst.weights == 1.0)
        assert np.all(inst.offsets == 0.0)

    def test_single_duplicate_pair(self):
        inst = group_by_x(np.array([[1.0], [1.0]]), np.array([0.0, 2.0]))
        assert np.array_equal(inst.values, [1.0])
        assert np.array_equal(inst.weights, [2.0])
        assert inst.offsets[0] == pytest.approx(2.0)

    def test_mixed_groups(self):
        inst = group_by_x(
            np.array([[1.0], [1.0], [2.0]]), np.array([0.0, 2.0, 5.0])
        )
        assert np.array_equal(inst.values, [1.0, 5.0])
        assert np.array_equal(inst.weights, [2.0, 1.0])
        assert inst.offsets == pytest.approx([2.0, 0.0])

    def test_grouped_cost_matches_raw_cost(self):
        # the merged representation preserves the objective for any centers
        rng = np.random.default_rng(5)
        X = rng.integers(0, 4, size=(30, 2)).astype(float)
        y = rng.normal(size=30)
        inst = group_by_x(X, y)
        sol = kmeans1d_exact(inst, 3)
        # recompute from raw data: each x-group must use one center
        _, inverse = np.unique(X, axis=0, return_inverse=True)
        means = np.bincount(inverse.ravel(), weights=y) / np.bincount(inverse.ravel())
        order = np.argsort(means, kind="stable")
        centers_per_group = sol.centers[sol.assignment][np.argsort(order)]
        raw = sum(
            (y[i] - centers_per_group[inverse.ravel()[i]]) ** 2 for i in range(30)
        )
        assert raw == pytest.approx(sol.cost, rel=1e-9)


class TestKmeansExact:
    def test_two_exact_levels(self):
        assert kmeans1d_exact(np.array([0.0, 0.0, 1.0, 1.0]), 2).cost == 0.0

    def test_single_cluster(self):
        sol = kmeans1d_exact(np.array([0.0, 0.0, 1.0, 1.0]), 1)
        assert sol.cost == pytest.approx(1.0)
        assert sol.centers == pytest.approx([0.5])

    def test_best_split(self):
        sol = kmeans1d_exact(np.array([0.0, 1.0, 4.0]), 2)
        assert sol.cost == pytest.approx(0.5)
        assert np.array_equal(sol.assignment, [0, 0, 1])

    def test_k_at_least_size(self):
        inst = WeightedInstance(
            np.array([0.0, 1.0]), np.array([2.0, 1.0]), np.array([0.3, 0.1])
        )
        assert kmeans1d_exact(inst, 5).cost == pytest.approx(0.4)

    def test_matches_enumeration(self):
        rng = np.random.default_rng(21)
        for _ in range(120):
            inst = random_instance(rng)
            k = int(rng.integers(1, 5))
            fast = kmeans1d_exact(inst, k).cost
            ref = oracles.kmeans1d_enumerate(inst, k)
            assert fast == pytest.approx(ref, rel=1e-10, abs=1e-10)

    def test_cost_nonincreasing_in_k(self):
        rng = np.random.default_rng(22)
        inst = random_instance(rng, max_size=12)
        costs = [kmeans1d_exact(inst, k).cost for k in range(1, inst.size + 2)]
        assert all(b <= a + 1e-12 for a, b in zip(costs, costs[1:]))
        assert costs[inst.size - 1] == pytest.approx(inst.total_offset)

    def test_cost_recomputable_and_contiguous(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            inst = random_instance(rng)
            k = int(rng.integers(1, 4))
            sol = kmeans1d_exact(inst, k)
            recomputed = float(
                np.sum(
                    inst.weights * (inst.values - sol.centers[sol.assignment]) ** 2
                )
                + inst.total_offset
            )
            assert recomputed == pytest.approx(sol.cost, rel=1e-9, abs=1e-9)
            assert np.all(np.diff(sol.assignment) >= 0)
            assert np.all(np.diff(sol.centers) >= 0)

    def test_ties_in_values(self):
        sol = kmeans1d_exact(np.array([1.0, 1.0, 1.0, 2.0]), 2)
        assert sol.cost == 0.0

    @given(
        st.lists(st.floats(-100, 100), min_size=1, max_size=8),
        st.integers(min_value=1, max_value=4),
    )
    @settings(max_examples=150, deadline=None)
    def test_enumeration_property(self, values, k):
        inst = WeightedInstance.from_values(np.array(values))
        fast = kmeans1d_exact(inst, k).cost
        ref = oracles.kmeans1d_enumerate(inst, k)
        assert fast == pytest.approx(ref, rel=1e-9, abs=1e-7)


class TestKmeansTruncated:
    def test_inactive_truncation_matches_plain(self):
        rng = np.random.default_rng(31)
        for _ in range(30):
            inst = random_instance(rng)
            k = int(rng.integers(1, 4))
            B = (inst.values[-1] - inst.values[0]) ** 2 + 1.0
            plain = kmeans1d_exact(inst, k)
            trunc = kmeans1d_exact_trunc(inst, k, B)
            assert trunc.cost == pytest.approx(plain.cost, rel=1e-12, abs=1e-12)

    def test_two_far_points_single_center(self):
        # the optimum parks the center on one point and pays B for the other
        sol = kmeans1d_exact_trunc(np.array([0.0, 10.0]), 1, 1.0)
        assert sol.cost == pytest.approx(
            oracles.kmeans1d_trunc_grid(WeightedInstance.from_values([0.0, 10.0]), 1, 1.0),
            abs=1e-9,
        )
        assert sol.cost == pytest.approx(1.0)

    def test_three_points_example(self):
        sol = kmeans1d_exact_trunc(np.array([0.0, 0.5, 10.0]), 1, 1.0)
        assert sol.cost == pytest.approx(1.125)
        assert sol.centers == pytest.approx([0.25])

    def test_matches_grid_oracle(self):
        rng = np.random.default_rng(32)
        for _ in range(40):
            size = int(rng.integers(2, 9))
            inst = WeightedInstance(
                np.sort(rng.normal(size=size) * 2.0),
                rng.uniform(0.5, 2.0, size=size),
                np.zeros(size),
            )
            k = int(rng.integers(1, 3))
            B = float(rng.uniform(0.2, 4.0))
            fast = kmeans1d_exact_trunc(inst, k, B).cost
            ref = oracles.kmeans1d_trunc_grid(inst, k, B)
            assert fast <= ref + 1e-9
            assert fast == pytest.approx(ref, abs=1e-6)

    def test_contiguity_assumption_via_full_assignments(self):
        # tiny instances, unrestricted assignment oracle
        rng = np.random.default_rng(33)
        for _ in range(8):
            size = int(rng.integers(2, 6))
            values = np.sort(rng.normal(size=size) * 2.0)
            B = float(rng.uniform(0.3, 2.0))
            fast = kmeans1d_exact_trunc(
                WeightedInstance.from_values(values), 2, B
            ).cost
            ref = oracles.kmeans1d_trunc_assignments(values, 2, B)
            assert fast <= ref + 1e-6
            assert fast == pytest.approx(ref, abs=2e-4)

    def test_offsets_added_through(self):
        inst = WeightedInstance(
            np.array([0.0, 10.0]), np.array([1.0, 1.0]), np.array([0.7, 0.3])
        )
        assert kmeans1d_exact_trunc(inst, 1, 1.0).cost == pytest.approx(2.0)

    def test_cost_nonincreasing_in_k(self):
        rng = np.random.default_rng(34)
        inst = random_instance(rng, max_size=10, with_offsets=False)
        B = 1.0
        costs = [
            kmeans1d_exact_trunc(inst, k, B).cost for k in range(1, inst.size + 1)
        ]
        assert all(b <= a + 1e-12 for a, b in zip(costs, costs[1:]))


class TestBandedAgainstFullDP:
    # the band caps segment length at size - k + 1 on the strength of the
    # split-never-hurts argument; cross-check against the uncapped DP

    def test_plain_medium_scale(self):
        from riskfloor.kmeans1d import _band_costs_plain, _dp_band

        rng = np.random.default_rng(41)
        for _ in range(10):
            G = int(rng.integers(20, 60))
            inst = WeightedInstance(
                np.sort(rng.normal(size=G) * 2.0),
                rng.uniform(0.5, 2.0, size=G),
                np.zeros(G),
            )
            for k in (1, 2, G // 3 or 1, G - 1):
                banded = kmeans1d_exact(inst, k).cost
                C_full = _band_costs_plain(inst.values, inst.weights, G, G)
                full, _ = _dp_band(C_full, G, min(k, G), G)
                assert banded == pytest.approx(float(full), rel=1e-12, abs=1e-12)

    def test_trunc_medium_scale(self):
        import math

        from riskfloor.kmeans1d import _band_costs_trunc, _dp_band, _prefix_sums

        rng = np.random.default_rng(42)
        for _ in range(6):
            G = int(rng.integers(15, 40))
            inst = WeightedInstance(
                np.sort(rng.normal(size=G) * 3.0),
                rng.uniform(0.5, 2.0, size=G),
                np.zeros(G),
            )
            B = float(rng.uniform(0.5, 6.0))
            for k in (1, 3, G // 2 or 1):
                banded = kmeans1d_exact_trunc(inst, k, B).cost
                pw, pwv, pwv2 = _prefix_sums(inst)
                C_full = _band_costs_trunc(
                    inst.values, inst.weights, pw, pwv, pwv2, G, G, B, math.sqrt(B)
                )
                full, _ = _dp_band(C_full, G, min(k, G), G)
                assert banded == pytest.approx(float(full), rel=1e-12, abs=1e-12)


class TestValidation:
    def test_unsorted_rejected(self):
        with pytest.raises(DomainError):
            WeightedInstance(np.array([1.0, 0.0]), np.ones(2), np.zeros(2))

    def test_bad_weights(self):
        with pytest.raises(DomainError):
            WeightedInstance(np.array([0.0, 1.0]), np.array([1.0, 0.0]), np.zeros(2))

    def test_empty(self):
        with pytest.raises(DomainError):
            WeightedInstance(np.array([]), np.array([]), np.array([]))

    def test_bad_k(self):
        with pytest.raises(DomainError):
            kmeans1d_exact(np.array([1.0, 2.0]), 0)

    def test_bad_B(self):
        with pytest.raises(DomainError):
            kmeans1d_exact_trunc(np.array([1.0, 2.0]), 1, 0.0)
