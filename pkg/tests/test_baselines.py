import numpy as np
import pytest

from bregclust.baselines import PeakConfig, agglomerative, density_peak
from bregclust.clustering import ClusteringError
from bregclust.data import DataMatrix
from bregclust.metrics import ari

from conftest import two_blobs

LINE = DataMatrix(np.array([[0.0], [1.0], [2.0], [10.0], [11.0]]))


def test_agglomerative_splits_the_gap():
    res = agglomerative(LINE, 2)
    assert res.assignments.tolist() == [0, 0, 0, 1, 1]
    np.testing.assert_allclose(res.centroids.centroids.ravel(), [1.0, 10.5])
    assert res.objective == pytest.approx(2.0 + 0.5)


def test_agglomerative_average_linkage_choice():
    # after {0, 1} merges, 2.9 sits 2.4 from it on average but 2.3 from 5.2;
    # single linkage (1.9) would attach it to {0, 1} instead
    X = DataMatrix(np.array([[0.0], [1.0], [2.9], [5.2]]))
    assert agglomerative(X, 2).assignments.tolist() == [0, 0, 1, 1]


def test_agglomerative_tie_takes_smallest_pair():
    # 0-2 and 2-4 tie at distance 2; the (0, 1) pair merges first
    X = DataMatrix(np.array([[4.0], [2.0], [0.0]]))
    assert agglomerative(X, 2).assignments.tolist() == [0, 0, 1]
    X = DataMatrix(np.array([[0.0], [2.0], [4.0]]))
    assert agglomerative(X, 2).assignments.tolist() == [0, 0, 1]


def test_agglomerative_matches_scipy_without_ties(rng):
    hierarchy = pytest.importorskip("scipy.cluster.hierarchy")
    for _ in range(20):
        X = rng.normal(size=(30, 3))
        for k in (2, 4, 7):
            ours = agglomerative(DataMatrix(X), k).assignments
            ref = hierarchy.cut_tree(hierarchy.linkage(X, "average"), n_clusters=k).ravel()
            assert ari(ours, ref) == 1.0


def test_agglomerative_k_equals_n_is_singletons():
    res = agglomerative(LINE, 5)
    assert res.assignments.tolist() == [0, 1, 2, 3, 4]
    assert res.objective == 0.0


def test_agglomerative_k1_and_bad_k():
    assert set(agglomerative(LINE, 1).assignments.tolist()) == {0}
    with pytest.raises(ClusteringError):
        agglomerative(LINE, 6)


def test_agglomerative_coincident_pairs():
    X = DataMatrix(np.array([[0.0, 0.0], [0.0, 0.0], [5.0, 5.0], [5.0, 5.0]]))
    assert agglomerative(X, 2).assignments.tolist() == [0, 0, 1, 1]


def test_agglomerative_recovers_blobs():
    data = two_blobs()
    assert ari(data.labels, agglomerative(data, 2).assignments) == 1.0


def test_peak_recovers_blobs():
    data = two_blobs(n=30)
    res = density_peak(data, PeakConfig(2, dc_percentile=0.05))
    assert ari(data.labels, res.assignments) == 1.0
    assert res.method == "peak"


def test_peak_k1_and_exact_k(rng):
    data = DataMatrix(rng.normal(size=(50, 2)))
    assert set(density_peak(data, PeakConfig(1)).assignments.tolist()) == {0}
    for k in (2, 3, 5):
        assert len(set(density_peak(data, PeakConfig(k)).assignments.tolist())) == k


def test_peak_deterministic(rng):
    data = DataMatrix(rng.normal(size=(40, 3)))
    a = density_peak(data, PeakConfig(3)).assignments
    b = density_peak(data, PeakConfig(3)).assignments
    np.testing.assert_array_equal(a, b)


def test_peak_every_point_follows_a_center():
    res = density_peak(LINE, PeakConfig(2, dc_percentile=0.3))
    assert res.assignments.tolist() == [0, 0, 0, 1, 1]


def test_peak_errors():
    with pytest.raises(ClusteringError, match="zero"):
        density_peak(DataMatrix(np.zeros((4, 2))), PeakConfig(2))
    with pytest.raises(ClusteringError):
        density_peak(LINE, PeakConfig(6))
    with pytest.raises(ValueError):
        PeakConfig(2, dc_percentile=1.5)
