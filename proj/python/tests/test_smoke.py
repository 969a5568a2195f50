import math

import numpy as np
import pytest

import detree


def two_leaf():
    data = detree.DataTable(np.array([0.1, 0.2, 0.3, 0.9]), ["x"])
    return detree.grow(data, detree.StopCondition(min_count=1, max_leaves=2), detree.Box([0.0], [1.0]))


def test_grow_and_evaluate():
    t = two_leaf()
    assert t.n_leaves == 2
    # best split falls between 0.2 and 0.3
    assert t.evaluate(np.array([0.1])) == pytest.approx(2 / (4 * 0.25))
    out = t.evaluate(np.array([[0.1], [0.9], [2.0]]))
    assert out.shape == (3,)
    assert out[2] == 0.0
    mass = sum(count / t.n_tot for _, count, _ in t.leaves())
    assert mass == 1.0


def test_train_and_round_trip(tmp_path):
    data = detree.synthetic("bench-2d", 800, seed=3)
    res = detree.train(data, detree.StopCondition(min_count=5))
    assert res.tree.n_leaves <= res.unpruned.n_leaves
    assert res.alpha in [a for a, _ in res.curve]
    path = tmp_path / "m.json"
    res.tree.save(path)
    back = detree.DensityTree.load(path)
    assert back.to_json() == res.tree.to_json()
    pts = data.values[:50]
    assert np.array_equal(back.evaluate(pts), res.tree.evaluate(pts))


def test_pruning_profile():
    data = detree.synthetic("mixture-1d", 300, seed=2)
    t = detree.grow(data, detree.StopCondition(min_count=5))
    prof = detree.prune_sequence(t)
    alphas = [s.alpha for s in prof.steps]
    assert alphas == sorted(alphas)
    assert prof.steps[-1].n_leaves_after == 1
    assert detree.apply_alpha(t, prof, math.inf).n_leaves == 1


def test_kernel_pieces():
    assert detree.overlap_integral(0.0, 1.0, 0.5, 0.25) == pytest.approx(0.25)
    kde = detree.KdeModel(detree.DataTable(np.array([0.5]), ["x"]), [0.5])
    assert kde.evaluate(np.array([0.5])) == pytest.approx(2.0)
    sm = detree.SmearedModel(detree.grow(detree.DataTable(np.array([0.5]), ["x"]), box=detree.Box([0.0], [1.0])), [0.25])
    assert sm.evaluate(np.array([0.0])) == pytest.approx(0.5)


def test_analysis():
    sig = detree.grow(detree.DataTable(np.linspace(0.01, 0.49, 10), ["x"]),
                      detree.StopCondition(min_count=1, max_leaves=2), detree.Box([0.0], [1.0]))
    assert detree.integrate_region(sig, [(0.0, 1.0)]) == 1.0
    bounds, metric = detree.optimize_selection(sig, sig, 10.0, 10.0, ["x"])
    assert bounds == [(0.0, 1.0)]
    assert metric == pytest.approx(10 / 21)
    assert detree.delta_log_likelihood(sig, sig, np.array([0.3])) == 0.0


def test_errors_map_to_python():
    with pytest.raises(detree.DataError):
        detree.load_csv("/nonexistent.csv")
    with pytest.raises(detree.ConfigError):
        detree.synthetic("no-such-preset", 10)
    with pytest.raises(detree.DetreeError):
        detree.Bandwidths([0.0])
