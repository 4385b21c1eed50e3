from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from walkcount.generators import (
    GenerationError,
    GenSpec,
    RegularSampleLog,
    gen_barbell,
    gen_clique_expander,
    gen_clique_with_paths,
    gen_complete,
    gen_cycle,
    gen_random_regular_3,
    gen_subdivided_expander,
    parse_params,
)
from walkcount.graph import min_degree
from walkcount.oracle import spectral_summary


def test_cycles_and_cliques():
    assert gen_cycle(3) == gen_complete(3)
    c4 = gen_cycle(4)
    assert c4.edge_count == 4 and c4.degrees.tolist() == [2] * 4
    c64 = gen_cycle(64)
    assert c64.edge_count == 64 and min_degree(c64) == 2
    assert gen_complete(4).edge_count == 6
    assert gen_complete(2).edges() == [(0, 1)]
    assert gen_complete(10).edge_count == 45
    with pytest.raises(ValueError):
        gen_cycle(2)


@pytest.mark.parametrize("c,p,n,m", [(4, 4, 11, 16), (3, 1, 6, 7), (5, 5, 14, 25), (6, 6, 17, 36)])
def test_barbell_counts(c, p, n, m):
    g = gen_barbell(c, p)
    assert (g.vertex_count, g.edge_count) == (n, m)


def test_barbell_degrees():
    g = gen_barbell(4, 4)
    deg = g.degrees
    assert sorted(deg.tolist()).count(4) == 2  # clique attachment vertices
    assert min(deg) == 2


def test_random_cubic_small():
    assert gen_random_regular_3(4, seed=0) == gen_complete(4)
    g = gen_random_regular_3(20, seed=1)
    assert g.edge_count == 30 and g.is_regular and g.degrees[0] == 3
    with pytest.raises(ValueError, match="even"):
        gen_random_regular_3(5, seed=0)


def test_random_cubic_deterministic_and_seed_sensitive():
    a, b = gen_random_regular_3(30, seed=3), gen_random_regular_3(30, seed=3)
    assert a == b
    assert any(gen_random_regular_3(30, seed=s) != a for s in range(4, 8))


def test_expander_check_logged():
    log = RegularSampleLog()
    g = gen_random_regular_3(20, seed=5, stats=log)
    assert log.spectral_checked and log.attempts >= 1
    assert spectral_summary(g, with_t_unif=False).lambda2 <= 0.975 + 1e-12
    assert abs(log.lambda2 - spectral_summary(g, with_t_unif=False).lambda2) < 1e-12


def test_subdivided_expander_counts():
    g = gen_subdivided_expander(8, 5, seed=7)
    assert g.vertex_count == 8 * (3 * 5 - 1) // 2 == 56
    assert g.edge_count == 84 and g.is_regular and g.degrees[0] == 3
    with pytest.raises(ValueError):
        gen_subdivided_expander(8, 4, seed=7)


def test_subdivided_expander_chords():
    # ell=5 on K4: the first subdivided edge occupies interior vertices 4..7
    g = gen_subdivided_expander(4, 5, seed=0)
    i1, i2, i3, i4 = range(4, 8)
    assert g.has_edge(i1, i3) and g.has_edge(i2, i4)
    assert g.has_edge(i1, i2) and g.has_edge(i3, i4) and not g.has_edge(i1, i4)


@pytest.mark.parametrize("k,q,n,m", [(4, 3, 24, 30), (4, 2, 14, None)])
def test_clique_expander_counts(k, q, n, m):
    g = gen_clique_expander(k, q, seed=2)
    assert g.vertex_count == n == k * q + (3 * k // 2) * (q - 1)
    assert g.edge_count == k * comb(q, 2) + (3 * k // 2) * q
    if m is not None:
        assert g.edge_count == m


def test_clique_expander_degrees():
    q, k = 4, 6
    g = gen_clique_expander(k, q, seed=0)
    deg = g.degrees
    interior = deg[k * q:]
    assert (interior == 2).all()
    clique = deg[: k * q].reshape(k, q)
    # three paths leave from clique vertices 0, 1, 2; vertex 3 has none
    assert (clique[:, :3] == q).all() and (clique[:, 3] == q - 1).all()


@pytest.mark.parametrize("ell,q,n,m", [(3, 2, 9, 9), (5, 1, 10, 15), (4, 3, 16, 18)])
def test_clique_with_paths_counts(ell, q, n, m):
    g = gen_clique_with_paths(ell, q)
    assert (g.vertex_count, g.edge_count) == (n, m)


def test_genspec_and_params():
    assert parse_params("k=8,ell=5") == {"k": 8, "ell": 5}
    spec = GenSpec("subdivided_expander", {"k": 8, "ell": 5}, 7)
    assert spec.build() == gen_subdivided_expander(8, 5, seed=7)
    assert spec.to_dict()["family"] == "subdivided_expander"
    with pytest.raises((GenerationError, ValueError)):
        GenSpec("nope", {}, 0).build()


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 40).map(lambda h: 2 * h), st.integers(0, 10_000))
def test_random_cubic_property(k, seed):
    g = gen_random_regular_3(k, seed=seed)
    assert g.vertex_count == k and g.edge_count == 3 * k // 2
    assert np.all(g.degrees == 3)
