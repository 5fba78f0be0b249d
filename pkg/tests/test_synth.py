import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nope_coarsen.synth import (
    _pair_from_index,
    cluster_labels,
    gen_cluster_features,
    gen_erdos_renyi,
    gen_planted_partition,
)


class TestErdosRenyi:
    def test_p0_edgeless(self):
        assert gen_erdos_renyi(50, 0.0, 1).m == 0

    def test_p1_complete(self):
        g = gen_erdos_renyi(4, 1.0, 1)
        assert g.m == 6

    def test_edge_count_within_three_sigma(self):
        n, p = 1000, 0.008
        pairs = n * (n - 1) // 2
        mean, sd = pairs * p, np.sqrt(pairs * p * (1 - p))
        assert mean == pytest.approx(3996)
        assert abs(gen_erdos_renyi(n, p, 42).m - mean) <= 3 * sd

    def test_deterministic(self):
        a, b = gen_erdos_renyi(300, 0.05, 9), gen_erdos_renyi(300, 0.05, 9)
        assert a.edge_array().tobytes() == b.edge_array().tobytes()
        assert a.edge_array().tolist() != gen_erdos_renyi(300, 0.05, 10).edge_array().tolist()

    @pytest.mark.parametrize("n,p", [(0, 0.5), (5, -0.1), (5, 1.1)])
    def test_bad_params(self, n, p):
        with pytest.raises(ValueError):
            gen_erdos_renyi(n, p, 0)

    def test_single_node(self):
        assert gen_erdos_renyi(1, 1.0, 0).m == 0


@pytest.mark.parametrize("n", [2, 3, 7, 40])
def test_pair_index_decoding_matches_combinations(n):
    total = n * (n - 1) // 2
    u, v = _pair_from_index(np.arange(total, dtype=np.int64), n)
    assert list(zip(u.tolist(), v.tolist())) == list(itertools.combinations(range(n), 2))


class TestPlanted:
    def test_no_cross_edges_when_p_out_zero(self):
        g, labels = gen_planted_partition(200, 4, 0.2, 0.0, 5)
        e = g.edge_array()
        assert g.m > 0
        assert (labels[e[:, 0]] == labels[e[:, 1]]).all()

    def test_labels_near_equal(self):
        _, labels = gen_planted_partition(10, 3, 0.5, 0.1, 0)
        assert np.bincount(labels).tolist() == [4, 3, 3]
        assert labels.tolist() == cluster_labels(10, 3).tolist()

    def test_modular_instance(self):
        g, labels = gen_planted_partition(2000, 4, 0.02, 0.002, 7)
        e = g.edge_array()
        intra = (labels[e[:, 0]] == labels[e[:, 1]]).mean()
        # expected intra fraction: 4*C(500,2)*0.02 / (that + 6*500^2*0.002) ~ 0.77
        assert 0.7 < intra < 0.85

    def test_equal_probabilities_match_er_density(self):
        g, _ = gen_planted_partition(600, 3, 0.03, 0.03, 1)
        pairs = 600 * 599 // 2
        assert abs(g.m - 0.03 * pairs) <= 3 * np.sqrt(pairs * 0.03 * 0.97)

    def test_cross_edges_span_blocks(self):
        g, labels = gen_planted_partition(90, 3, 0.0, 1.0, 0)
        assert g.m == 3 * 30 * 30
        e = g.edge_array()
        assert (labels[e[:, 0]] != labels[e[:, 1]]).all()


class TestFeatures:
    def test_no_noise_rows_equal_centers(self):
        labels = cluster_labels(12, 3)
        x = gen_cluster_features(labels, 5, 1.0, 0.0, 3)
        for c in range(3):
            rows = x[labels == c]
            assert (rows == rows[0]).all()
        assert not np.allclose(x[0], x[-1])

    def test_all_zero(self):
        assert not gen_cluster_features(cluster_labels(8, 2), 3, 0.0, 0.0, 1).any()

    def test_deterministic(self):
        labels = cluster_labels(50, 4)
        a = gen_cluster_features(labels, 7, 1.0, 0.5, 2)
        assert a.tobytes() == gen_cluster_features(labels, 7, 1.0, 0.5, 2).tobytes()
        assert a.shape == (50, 7) and a.dtype == np.float64

    def test_bad_dim(self):
        with pytest.raises(ValueError):
            gen_cluster_features([0, 1], 0, 1.0, 1.0, 0)

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=20)
    def test_finite(self, seed):
        x = gen_cluster_features(cluster_labels(20, 4), 3, 2.0, 0.3, seed)
        assert np.isfinite(x).all()
