import numpy as np
import pytest

from walkcount import estimators
from walkcount.estimators import (
    InsufficientIntersectionsError,
    edges_horizon,
    estimate_edges,
    estimate_edges_burnin,
    estimate_vertices_general,
    estimate_vertices_regular,
    mean_degree_horizon,
    pair_profiles,
    profile_intersections,
    vertices_regular_horizon,
)
from walkcount.generators import (
    gen_barbell,
    gen_clique_expander,
    gen_clique_with_paths,
    gen_complete,
    gen_cycle,
    gen_random_regular_3,
)
from walkcount.graph import min_degree
from walkcount.intersections import pair_intersections
from walkcount.oracle import spectral_summary
from walkcount.seeding import make_rng
from walkcount.walks import simulate_lazy_walks


def _success(values, truth, tol=0.5):
    return np.mean(np.abs(np.asarray(values) / truth - 1) <= tol)


def test_formulas_with_fixed_counts(monkeypatch):
    monkeypatch.setattr(estimators, "profile_intersections", lambda pp, weighted: np.full(len(pp.ranks), 2.0))
    assert estimate_vertices_regular(gen_cycle(5), 0, 10, K=3).value == pytest.approx(50)
    monkeypatch.setattr(estimators, "profile_intersections", lambda pp, weighted: np.full(len(pp.ranks), 1.5))
    assert estimate_edges(gen_cycle(5), 0, 12, K=3).value == pytest.approx(48)


def test_profile_counts_match_id_counts():
    g = gen_barbell(4, 3)
    rng = make_rng(8)
    w = simulate_lazy_walks(g, np.zeros(40, dtype=np.int64), 25, rng)
    xs, ys = w[:20], w[20:]
    pp = pair_profiles(xs, ys, g)
    assert np.allclose(profile_intersections(pp, True), pair_intersections(xs, ys, g, True))
    assert np.array_equal(profile_intersections(pp, False), pair_intersections(xs, ys, g, False))


def test_determinism_and_diagnostics():
    g = gen_barbell(4, 4)
    a = estimate_edges_burnin(g, 0, 30, K=50, burn_in=7, seed=3)
    b = estimate_edges_burnin(g, 0, 30, K=50, burn_in=7, seed=3)
    assert a == b
    assert a.diagnostics["burn_in"] == 7 and a.diagnostics["steps"] == 2 * 50 * 37
    assert a.value == pytest.approx(30 * 30 / (2 * a.diagnostics["mean_intersections"]))


def test_burn_in_zero_is_plain_estimator():
    g = gen_barbell(3, 2)
    assert estimate_edges(g, 1, 20, 30, seed=5).value == estimate_edges_burnin(g, 1, 20, 30, 0, seed=5).value


def test_errors():
    with pytest.raises(ValueError, match="regular"):
        estimate_vertices_regular(gen_barbell(3, 2), 0, 10)
    with pytest.raises(ValueError):
        estimate_edges(gen_cycle(5), 0, 0)
    # walks from a common start always meet at time 0, so force an empty sample
    with pytest.raises(InsufficientIntersectionsError):
        estimators._finish(np.zeros(4), 1.0, 1, 4, 0)


def test_k4_vertices():
    vals = [estimate_vertices_regular(gen_complete(4), 0, 16, 400, seed=s).value for s in range(100)]
    assert _success(vals, 4) >= 0.9


def test_cycle_consistency():
    g = gen_cycle(32)
    t = vertices_regular_horizon(spectral_summary(g, with_t_unif=False).t_rel, 32)
    n_hat = np.mean([estimate_vertices_regular(g, 0, t, 400, seed=s).value for s in range(100)])
    m_hat = np.mean([estimate_edges(g, 0, t, 400, seed=s).value for s in range(100)])
    assert abs(m_hat / n_hat - 1) <= 0.1


def test_clique_expander_burnin_estimator():
    g = gen_clique_expander(4, 3, seed=2)
    s = spectral_summary(g)
    t = int(np.ceil(s.t_rel ** (5 / 6) * np.sqrt(g.vertex_count)))
    vals = [estimate_edges_burnin(g, 0, t, 400, s.t_unif, seed=i).value for i in range(100)]
    assert _success(vals, g.edge_count) >= 0.9


def test_mean_degree_estimator_regular_exact():
    g = gen_random_regular_3(20, seed=1)
    r = estimate_vertices_general(g, 0, 30.0, burn_in=5, t=17, seed=0)
    assert r.value == 2 * 30.0 / 3


def test_mean_degree_estimator_clique_with_paths():
    g = gen_clique_with_paths(8, 3)
    s = spectral_summary(g)
    t = mean_degree_horizon(g, s.t_rel, 0.25)
    vals = [estimate_vertices_general(g, 0, g.edge_count, s.t_unif, t, seed=i).value for i in range(100)]
    assert _success(vals, g.vertex_count) >= 0.9


def test_horizons():
    assert vertices_regular_horizon(1, 6) == int(np.ceil(2 * np.sqrt(6) * np.sqrt(6)))
    g = gen_barbell(6, 6)
    t_rel = spectral_summary(g, with_t_unif=False).t_rel
    assert edges_horizon(t_rel, 36, min_degree(g)) == int(np.ceil(4 * np.sqrt(3) * t_rel**0.75 * np.sqrt(18)))
