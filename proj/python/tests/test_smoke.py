import numpy as np
import pytest

import gfa


def small_problem(seed=1, n=80):
    truth = gfa.generate_truth(3, [4, 5, 3], 3, gfa.FactorDistribution.uniform_subsets, seed)
    data, record = gfa.center(gfa.sample_collection(truth, n, seed))
    return truth, data, record


def test_truth_and_sampling():
    truth, data, record = small_problem()
    assert truth.W.shape == (12, 3)
    assert truth.F.shape == (3, 3)
    assert data.data.shape == (80, 12)
    assert np.allclose(data.data.mean(axis=0), 0.0, atol=1e-12)
    assert record.means.shape == (12,)
    assert data.partition.dims == [4, 5, 3]


def test_fit_and_activity():
    truth, data, _ = small_problem()
    result = gfa.fit_views(data, K=6, seed=3)
    assert result.converged
    trace = np.array(result.elbo_trace)
    assert np.all(np.diff(trace) >= -1e-8 * np.abs(trace[:-1]))
    act = gfa.activity(result.posterior, data)
    assert act.F.shape == (6, 3)
    match = gfa.match_factors(result.posterior.loadings(), truth.W)
    # well below the error of predicting all-zero loadings
    assert match.w_mse < 0.5 * np.mean(truth.W**2)
    assert 0.0 <= gfa.f_error(act.F, truth.F, match) <= 1.0
    assert sorted(gfa.rank_by_norm(result.posterior, 0)) == list(range(6))


def test_fit_options():
    _, data, _ = small_problem()
    a = gfa.fit_views(data, K=4, prior="bfa", seed=2, max_iter=30)
    b = gfa.fit_views(data, K=4, prior="bfa", seed=2, max_iter=30)
    assert a.n_iter == b.n_iter
    assert np.array_equal(a.posterior.z_mean, b.posterior.z_mean)
    with pytest.raises(TypeError):
        gfa.fit_views(data, K=4, bogus=1)
    with pytest.raises(ValueError):
        gfa.fit_views(data, K=0)


def test_rotation_functions():
    _, data, _ = small_problem()
    result = gfa.fit_views(data, K=4, seed=1, max_iter=20, rotation_enabled=False)
    problem = gfa.RotationProblem.from_posterior(result.posterior)
    eye = np.eye(4)
    g = gfa.rotation_gradient(eye, problem)
    h = 1e-6
    step = np.zeros((4, 4))
    step[1, 2] = h
    fd = (gfa.rotation_objective(eye + step, problem) - gfa.rotation_objective(eye - step, problem)) / (2 * h)
    assert g[1, 2] == pytest.approx(fd, rel=1e-5, abs=1e-6)
    opt = gfa.optimize_rotation(problem)
    assert opt.objective >= opt.initial_objective
    rotated = gfa.apply_rotation(result.posterior, np.linalg.inv(opt.R))
    assert gfa.elbo(rotated, data) >= gfa.elbo(result.posterior, data) - 1e-8


def test_evaluation_helpers():
    w = np.random.default_rng(0).normal(size=(6, 3))
    m = gfa.match_factors(w[:, [2, 0, 1]] * [1, -1, 1], w)
    assert m.w_mse == 0.0
    assert m.est_to_true == [2, 0, 1]
    F = np.array([[1, 1, 0], [0, 0, 0], [1, 0, 0]], dtype=np.int32)
    assert gfa.cardinality_curve(F) == [2, 1]
    z = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [3.0, -1.0, 0.0]])
    assert gfa.retrieval_map(z, [[0], [0], [1]]) == pytest.approx(1.0)
    scores = gfa.isc_scores(np.tile(np.arange(10.0)[:, None], (4, 2)), 4)
    assert np.allclose(scores.score, 1.0)


def test_collection_round_trip(tmp_path):
    _, data, _ = small_problem(n=10)
    gfa.save_collection(data, tmp_path / "d")
    back = gfa.load_collection(tmp_path / "d" / "manifest.json")
    assert np.array_equal(back.data, data.data)
    with pytest.raises(OSError):
        gfa.load_collection(tmp_path / "missing.json")
