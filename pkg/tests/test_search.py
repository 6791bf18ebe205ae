import numpy as np
import pytest

from bregclust.clustering import ClusterConfig, fit
from bregclust.data import DataMatrix
from bregclust.divergence import SQUARED_EUCLIDEAN
from bregclust.search import (
    ParamCandidate,
    SearchError,
    SearchGrid,
    _better,
    centroid_objective,
    enumerate_grid,
    score_candidate,
    search,
)

from conftest import two_blobs


def three_blobs(seed=0, n=30, sd=1.3):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [4.0, 0.0], [2.0, 3.5]])
    X = np.vstack([rng.normal(c, sd, size=(n, 2)) for c in centers])
    return DataMatrix(X, np.repeat([0, 1, 2], n), name="three")


def test_default_grid():
    cands = enumerate_grid(SearchGrid())
    assert len(cands) == 100
    assert cands[0] == (0.99, 1, 1)
    assert cands[-1] == (0.0, 10, 10)
    assert cands[1] == (0.98, 1, 2)


def test_decoupled_grid():
    cands = enumerate_grid(SearchGrid(K_range=(1, 2), d_range=(1, 1), decoupled=True,
                                      eta_count=3, delta_eta=0.25))
    assert cands == [(1.0, 1, 1), (0.75, 1, 1), (0.5, 1, 1), (1.0, 2, 1), (0.75, 2, 1), (0.5, 2, 1)]


def test_grid_validation():
    with pytest.raises(ValueError):
        SearchGrid(K_range=(0, 3))
    with pytest.raises(ValueError):
        SearchGrid(delta_eta=-0.1)


def test_nonpositive_eta_is_infeasible():
    c = score_candidate(two_blobs(), (0.0, 10, 10), k=2)
    assert not c.feasible and "eta" in c.rejection_reason


def test_large_k_is_infeasible():
    data = DataMatrix(np.arange(5.0)[:, None])
    c = score_candidate(data, (0.5, 5, 1), k=2)
    assert not c.feasible and "K=5" in c.rejection_reason


def test_centroid_objective_by_hand():
    X = np.array([[0.0, 0.0], [3.0, 4.0], [10.0, 0.0]])
    C = np.array([[0.0, 0.0], [10.0, 1.0]])
    assert centroid_objective(X, C) == pytest.approx(0 + 5 + 1)


def test_tie_break_order():
    base = ParamCandidate(0.5, 2, 2, objective=1.0)
    assert _better(ParamCandidate(0.5, 1, 9, objective=1.0), base)
    assert _better(ParamCandidate(0.5, 2, 1, objective=1.0), base)
    assert _better(ParamCandidate(0.6, 2, 2, objective=1.0), base)
    assert not _better(ParamCandidate(0.6, 3, 1, objective=1.0), base)
    assert _better(ParamCandidate(0.1, 9, 9, objective=0.5), base)


def test_single_feasible_candidate_wins():
    data = DataMatrix(np.array([[0.0], [1.0], [2.0], [9.0]]))
    # only K=1 is below n among K in 1..1; one d, one eta
    grid = SearchGrid(K_range=(1, 1), d_range=(1, 1), eta0=0.5, delta_eta=0.0)
    res = search(data, grid, k=2)
    assert (res.best.eta, res.best.K, res.best.d) == (0.5, 1, 1)
    assert len(res.all_candidates) == 1


def test_all_infeasible_raises_with_guard_count():
    data = DataMatrix(np.array([[0.0], [100.0], [200.0], [300.0]]))
    with pytest.raises(SearchError, match="guard"):
        search(data, SearchGrid(K_range=(1, 2), d_range=(1, 2)), k=2)


@pytest.fixture(scope="module")
def blob_search():
    data = three_blobs()
    return data, search(data, SearchGrid(), k=3, seed=4)


def test_search_is_exhaustive_and_optimal(blob_search):
    data, res = blob_search
    assert len(res.all_candidates) == 100
    feas = [c for c in res.all_candidates if c.feasible]
    assert min(c.objective for c in feas) == pytest.approx(res.best.objective, abs=1e-12)
    assert not any(_better(c, res.best) for c in feas if c is not res.best)
    infeasible = [c for c in res.all_candidates if not c.feasible]
    assert all(c.rejection_reason for c in infeasible)
    # eta = 1 - K*d/100 is zero only at K = d = 10
    assert any(c.K == 10 and c.d == 10 for c in infeasible)


def test_rescoring_the_winner_reproduces_it(blob_search):
    data, res = blob_search
    seed = res.centroid_source["seed"]
    again = score_candidate(data, (res.best.eta, res.best.K, res.best.d), 3, seed=seed)
    assert again.objective == res.best.objective


def test_winner_is_more_compact_than_raw_data(blob_search):
    data, res = blob_search
    seed = res.centroid_source["seed"]
    C = fit(data, ClusterConfig("bregman_power", k=3, seed=seed)).centroids.centroids
    assert res.best.objective < centroid_objective(data.values, C)


def test_workers_do_not_change_result():
    data = two_blobs(seed=9, n=15)
    grid = SearchGrid(K_range=(1, 4), d_range=(1, 3))
    a = search(data, grid, k=2, seed=1, workers=1)
    b = search(data, grid, k=2, seed=1, workers=2)
    assert [c.objective for c in a.all_candidates] == [c.objective for c in b.all_candidates]
    np.testing.assert_array_equal(a.improved_data.values, b.improved_data.values)


def test_raw_centroid_source():
    data = two_blobs(seed=9, n=15)
    grid = SearchGrid(K_range=(1, 3), d_range=(1, 3))
    res = search(data, grid, k=2, seed=1, centroid_source="raw")
    assert res.centroid_source["centroid_source"] == "raw"
    assert "objective" in res.centroid_source
    with pytest.raises(ValueError):
        search(data, grid, k=2, centroid_source="median")


def test_tiny_eta_candidate_leaves_data_nearly_fixed():
    data = two_blobs(seed=9, n=15)
    grid = SearchGrid(K_range=(2, 2), d_range=(1, 1), eta0=1e-9, delta_eta=0.0)
    res = search(data, grid, k=2, family=SQUARED_EUCLIDEAN)
    np.testing.assert_allclose(res.improved_data.values, data.values, atol=1e-7)
