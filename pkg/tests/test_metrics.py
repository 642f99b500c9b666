import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfbench.metrics import LabeledScores, UndefinedMetricError, auc, auc_from_arrays, bootstrap_ci, per_group_auc
from dfbench.rng import RngStream

from conftest import pairwise_auc


def ls(scores, labels, groups=None):
    ids = tuple(f"i{k}" for k in range(len(scores)))
    return LabeledScores(ids=ids, scores=np.asarray(scores, float), labels=np.asarray(labels), groups=groups)


class TestAuc:
    def test_perfect_separation(self):
        assert auc(ls([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0])) == 1.0

    def test_all_ties_is_half(self):
        assert auc(ls([0.5] * 6, [1, 1, 1, 0, 0, 0])) == 0.5

    def test_four_item_fixture_is_three_quarters(self):
        # pairwise oracle: (0.9>0.6)+(0.9>0.1)+(0.4<0.6 -> 0)+(0.4>0.1) = 3 of 4
        scores = [0.9, 0.4, 0.6, 0.1]
        labels = [1, 1, 0, 0]
        assert pairwise_auc(scores, labels) == 0.75
        assert auc(ls(scores, labels)) == 0.75

    def test_single_class_raises_not_half(self):
        with pytest.raises(UndefinedMetricError):
            auc(ls([0.1, 0.2], [1, 1]))
        with pytest.raises(UndefinedMetricError):
            auc(ls([0.1, 0.2], [0, 0]))

    def test_matches_pairwise_oracle_on_random_instances(self):
        gen = RngStream(5, "auc-oracle").generator()
        for trial in range(300):
            n = int(gen.integers(2, 200))
            labels = gen.integers(0, 2, n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            # mix of continuous and heavily tied scores
            if trial % 3 == 0:
                scores = np.round(gen.random(n), 1)
            else:
                scores = gen.random(n)
            assert abs(auc_from_arrays(scores, labels) - pairwise_auc(scores, labels)) <= 1e-12

    def test_nonfinite_scores_rejected(self):
        with pytest.raises(ValueError):
            ls([0.1, np.nan, 0.3], [1, 0, 1])

    @settings(max_examples=60, deadline=None)
    @given(
        data=st.lists(
            st.tuples(st.floats(-50, 50, allow_nan=False), st.integers(0, 1)), min_size=2, max_size=60
        )
    )
    def test_monotone_invariance_exact_transform(self, data):
        # power-of-two scaling is exact in floats, hence order- and
        # tie-preserving even for adversarial inputs
        labels = [l for _, l in data]
        if len(set(labels)) < 2:
            labels[0] = 1 - labels[0]
        scores = np.array([s for s, _ in data])
        base = auc_from_arrays(scores, np.array(labels))
        transformed = auc_from_arrays(8.0 * scores, np.array(labels))
        assert abs(base - transformed) <= 1e-12

    def test_monotone_invariance_smooth_transforms(self):
        gen = RngStream(23, "monotone").generator()
        transforms = [
            lambda x: 3.0 * x + 7.0,
            np.expm1,
            np.arctan,
            lambda x: x**3,
            np.sqrt,
        ]
        for trial in range(40):
            n = int(gen.integers(2, 120))
            scores = gen.random(n)
            labels = gen.integers(0, 2, n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            base = auc_from_arrays(scores, labels)
            for f in transforms:
                assert abs(auc_from_arrays(f(scores), labels) - base) <= 1e-12

    def test_complement_symmetry_without_ties(self):
        gen = RngStream(8, "flip").generator()
        for _ in range(50):
            n = int(gen.integers(4, 80))
            scores = gen.permutation(n).astype(float)  # tie-free
            labels = gen.integers(0, 2, n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            a = auc_from_arrays(scores, labels)
            flipped = auc_from_arrays(scores, 1 - labels)
            assert abs((1.0 - a) - flipped) <= 1e-12


class TestPerGroup:
    def test_single_group_equals_plain_auc(self):
        scores, labels = [0.9, 0.4, 0.6, 0.1], [1, 1, 0, 0]
        out = per_group_auc(ls(scores, labels, groups=("m", "m", "m", "m")))
        assert out == {"m": auc(ls(scores, labels))}

    def test_group_without_fakes_is_omitted(self):
        out = per_group_auc(ls([0.9, 0.2, 0.1], [1, 0, 0], groups=("swap", "none", "none")))
        assert set(out) == {"swap"}

    def test_two_groups_match_pairwise_oracle(self):
        # fakes: a=0.9, b=0.3; reals: 0.5, 0.2 (tagged arbitrarily)
        scores = [0.9, 0.3, 0.5, 0.2]
        labels = [1, 1, 0, 0]
        groups = ("a", "b", "none", "none")
        out = per_group_auc(ls(scores, labels, groups=groups))
        assert out["a"] == pairwise_auc([0.9, 0.5, 0.2], [1, 0, 0])  # 1.0
        assert out["b"] == pairwise_auc([0.3, 0.5, 0.2], [1, 0, 0])  # 0.5
        assert out == {"a": 1.0, "b": 0.5}

    def test_requires_groups(self):
        with pytest.raises(ValueError):
            per_group_auc(ls([0.9, 0.1], [1, 0]))


class TestBootstrap:
    def test_perfect_separation_gives_degenerate_interval(self):
        data = ls([0.9, 0.8, 0.7, 0.2, 0.15, 0.1], [1, 1, 1, 0, 0, 0])
        assert bootstrap_ci(data, n_resamples=200, seed=4) == (1.0, 1.0)

    def test_deterministic_under_seed(self):
        gen = RngStream(10, "bs").generator()
        data = ls(gen.random(60), gen.integers(0, 2, 60))
        a = bootstrap_ci(data, n_resamples=300, seed=9)
        b = bootstrap_ci(data, n_resamples=300, seed=9)
        assert a == b
        c = bootstrap_ci(data, n_resamples=300, seed=10)
        assert a != c

    def test_interval_shrinks_with_ten_times_the_data(self):
        def synthetic(n, seed):
            gen = RngStream(seed, "width").generator()
            fake = gen.normal(0.65, 0.2, n)
            real = gen.normal(0.35, 0.2, n)
            scores = np.concatenate([fake, real])
            labels = np.concatenate([np.ones(n, int), np.zeros(n, int)])
            return ls(scores, labels)

        lo_s, hi_s = bootstrap_ci(synthetic(30, 1), n_resamples=400, seed=2)
        lo_l, hi_l = bootstrap_ci(synthetic(300, 1), n_resamples=400, seed=2)
        assert (hi_l - lo_l) < (hi_s - lo_s)

    def test_minimum_resamples_enforced(self):
        data = ls([0.9, 0.1], [1, 0])
        with pytest.raises(ValueError):
            bootstrap_ci(data, n_resamples=50)

    def test_interval_contains_point_estimate(self):
        gen = RngStream(12, "contain").generator()
        data = ls(gen.random(80), gen.integers(0, 2, 80))
        low, high = bootstrap_ci(data, n_resamples=500, seed=3)
        assert low <= auc(data) <= high
