import json

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from gamma_stft import convex as cg
from gamma_stft.simplex import InfeasibleLP, UnboundedLP, lp_maximize

from conftest import brute_vertices, random_body, random_hpolytope

UNIT_SQUARE = cg.box([0, 0], [1, 1])


# support_function -----------------------------------------------------------


def test_ball_support():
    assert cg.support_function(cg.Ball([0, 0], 2), [3, 4]) == pytest.approx(10.0, abs=1e-12)


def test_vpolytope_support():
    assert cg.support_function(cg.VPolytope([[0, 0], [1, 0], [0, 1]]), [1, 1]) == 1.0


def test_hpolytope_support_matches_vertex_max():
    V = brute_vertices(UNIT_SQUARE.A, UNIT_SQUARE.b)
    expected = max(V @ np.array([2.0, -1.0]))
    assert expected == 2.0
    assert cg.support_function(UNIT_SQUARE, [2, -1]) == pytest.approx(2.0, abs=1e-12)


def test_vectorised_support_matches_pointwise(rng):
    K = random_body(rng, 2)
    X = rng.standard_normal((20, 2))
    vec = cg.support_function(K, X)
    assert np.allclose(vec, [cg.support_function(K, x) for x in X], atol=1e-12)


def test_zero_direction_gives_zero(rng):
    for d in (1, 2, 3):
        assert cg.support_function(random_hpolytope(rng, d), np.zeros(d)) == 0.0


# construction invariants ------------------------------------------------------


@pytest.mark.parametrize(
    "build",
    [
        lambda: cg.Ball([0, 0], -1),
        lambda: cg.Scaled(-1.0, cg.Ball([0], 1)),
        lambda: cg.HPolytope([[1.0]], [1.0]),  # unbounded
        lambda: cg.HPolytope([[1.0], [-1.0]], [0.0, -1.0]),  # empty
        lambda: cg.VPolytope(np.empty((0, 2))),
        lambda: cg.Ball(np.zeros(4), 1.0),
        lambda: cg.VPolytope([[np.inf, 0.0]]),
    ],
)
def test_invalid_bodies_rejected(build):
    with pytest.raises(ValueError):
        build()


def test_vpolytope_duplicates_canonicalised():
    P = cg.VPolytope([[0, 0], [1, 0], [0, 0], [1, 0]])
    assert P.vertices.shape == (2, 2)


# minkowski / fatten -------------------------------------------------------------


def test_sum_of_balls(rng):
    K = cg.minkowski_sum(cg.Ball([0, 0], 1), cg.Ball([0, 0], 2))
    X = rng.standard_normal((100, 2))
    assert np.allclose(cg.support_function(K, X), 3 * np.linalg.norm(X, axis=1), atol=1e-12)


def test_origin_is_identity(rng):
    K = random_body(rng, 3)
    U = cg.probe_directions(3, 100, seed=5)[6:]
    Z = cg.minkowski_sum(K, cg.point([0, 0, 0]))
    assert np.allclose(cg.support_function(Z, U), cg.support_function(K, U), atol=1e-12)


def test_square_plus_ball(rng):
    eps = 0.3
    K = cg.minkowski_sum(UNIT_SQUARE, cg.Ball([0, 0], eps))
    X = rng.standard_normal((100, 2))
    expected = cg.support_function(UNIT_SQUARE, X) + eps * np.linalg.norm(X, axis=1)
    assert np.allclose(cg.support_function(K, X), expected, atol=1e-12)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        cg.minkowski_sum(cg.Ball([0], 1), cg.Ball([0, 0], 1))


def test_fatten_point_is_ball(rng):
    a = np.array([0.5, -1.0])
    K = cg.fatten(cg.point(a), 0.2)
    X = rng.standard_normal((50, 2))
    assert np.allclose(cg.support_function(K, X), X @ a + 0.2 * np.linalg.norm(X, axis=1), atol=1e-12)


def test_fatten_square_axis_increment():
    base = cg.support_function(UNIT_SQUARE, [1, 0])
    assert cg.support_function(cg.fatten(UNIT_SQUARE, 0.1), [1, 0]) - base == pytest.approx(0.1, abs=1e-14)


def test_fatten_radii_add():
    U = cg.probe_directions(2, 100, seed=1)[4:]
    K = cg.VPolytope([[0, 0], [2, 1], [1, 3]])
    twice = cg.fatten(cg.fatten(K, 0.25), 0.5)
    once = cg.fatten(K, 0.75)
    assert np.max(np.abs(cg.support_function(twice, U) - cg.support_function(once, U))) < 1e-12


@pytest.mark.parametrize("eps", [0.0, -0.1])
def test_fatten_rejects_nonpositive(eps):
    with pytest.raises(ValueError):
        cg.fatten(UNIT_SQUARE, eps)


# contains ----------------------------------------------------------------------


def test_contains_in_fattening():
    assert cg.contains(UNIT_SQUARE, cg.fatten(UNIT_SQUARE, 0.1)).verdict == "certified"


def test_bigger_ball_not_contained():
    rep = cg.contains(cg.Ball([0, 0], 2), cg.Ball([0, 0], 1))
    assert rep.verdict == "falsified"
    u = np.array(rep.witness)
    assert np.linalg.norm(u) == pytest.approx(1.0)
    assert cg.support_function(cg.Ball([0, 0], 2), u) > cg.support_function(cg.Ball([0, 0], 1), u) + 1e-10


def test_segment_in_square_exact():
    seg = cg.VPolytope([[0.25, 0.25], [0.5, 0.5]])
    # oracle: direct inequality check A v <= b
    assert np.all(seg.vertices @ UNIT_SQUARE.A.T <= UNIT_SQUARE.b + 1e-10)
    assert cg.contains(seg, UNIT_SQUARE).verdict == "certified"


def test_polytope_pair_falsified_with_witness():
    tri = cg.VPolytope([[0, 0], [2, 0], [0, 2]])
    small = cg.VPolytope([[0, 0], [1, 0], [0, 1]])
    rep = cg.contains(tri, small)
    assert rep.verdict == "falsified"
    u = np.array(rep.witness)
    assert cg.support_function(tri, u) > cg.support_function(small, u)
    assert cg.contains(small, tri).verdict == "certified"


def test_sampled_case_is_undetermined():
    inner = cg.Ball([0.0, 0.0], 0.5)
    outer = cg.MinkowskiSum((cg.VPolytope([[0, 0], [1, 0]]), cg.Ball([0, 0], 1.0)))
    assert cg.contains(inner, outer).verdict in ("certified", "undetermined")
    assert cg.contains(cg.Ball([5.0, 0.0], 0.5), outer).verdict == "falsified"


def test_contains_requires_enough_directions():
    with pytest.raises(ValueError):
        cg.contains(UNIT_SQUARE, UNIT_SQUARE, n_dirs=3)


def test_certified_inclusion_implies_h_order(rng):
    U = cg.probe_directions(2, 10_000, seed=11)
    for _ in range(20):
        K = random_body(rng, 2)
        eps = rng.uniform(0.01, 1.0)
        for inner, outer in [(K, cg.fatten(K, eps))]:
            rep = cg.contains(inner, outer)
            assert rep.verdict == "certified"
            assert np.all(cg.support_function(inner, U) <= cg.support_function(outer, U) + 1e-10)


# exhaust -----------------------------------------------------------------------


def test_exhaust_half_line():
    K = cg.exhaust(cg.HRegion([[-1.0]], [0.0]), 3)
    V = brute_vertices(K.A, K.b)
    assert sorted(V.ravel()) == pytest.approx([1 / 3, 3.0])


def test_exhaust_full_space():
    K = cg.exhaust(cg.FullSpace(2), 5)
    assert isinstance(K, cg.Ball) and K.radius == 5.0 and np.all(K.center == 0)


def test_exhaust_open_ball():
    K = cg.exhaust(cg.OpenBall([1.0, 0.0], 2.0), 3)
    assert K.radius == pytest.approx(1.5)


def test_exhaust_monotone_open_square():
    G = cg.open_box([0, 0], [1, 1])
    assert cg.min_exhaustion_index(G) == 2
    for N in range(2, 11):
        assert cg.contains(cg.exhaust(G, N), cg.exhaust(G, N + 1)).verdict == "certified"


def test_exhaust_too_small_index():
    G = cg.open_box([0, 0], [1, 1])
    with pytest.raises(ValueError, match="exhaustion index too small"):
        cg.exhaust(G, 1)


def test_exhaustion_covers_compacts():
    G = cg.HRegion([[-1, 0], [0, -1], [1, 1]], [0, 0, 1])
    K = cg.VPolytope([[0.05, 0.05], [0.9, 0.05], [0.05, 0.9]])
    covered = [N for N in range(1, 200) if N >= cg.min_exhaustion_index(G) and cg.contains(K, cg.exhaust(G, N)).certified]
    assert covered and covered[0] < 100
    assert all(cg.region_contains_body(G, cg.exhaust(G, N)) for N in range(cg.min_exhaustion_index(G), 30))


def test_region_checks():
    G = cg.HRegion([[-1.0]], [-0.5])
    assert cg.region_contains_body(G, cg.interval(0.6, 3))
    assert not cg.region_contains_body(G, cg.interval(0.5, 3))
    assert cg.fatten_margin(G, cg.interval(0.6, 3)) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        cg.HRegion([[1.0], [-1.0]], [0.0, 0.0])  # {x < 0} and {x > 0}


# lp_maximize -------------------------------------------------------------------


def test_lp_unit_square():
    val, x = lp_maximize(UNIT_SQUARE.A, UNIT_SQUARE.b, [2, -1])
    assert val == pytest.approx(2.0) and np.allclose(x, [1, 0])


def test_lp_zero_objective():
    val, x = lp_maximize(UNIT_SQUARE.A, UNIT_SQUARE.b, [0, 0])
    assert val == 0.0
    assert np.all(UNIT_SQUARE.A @ x <= UNIT_SQUARE.b + 1e-12)


def test_lp_simplex_diagonal_facet():
    A = [[-1, 0], [0, -1], [1, 1]]
    val, x = lp_maximize(A, [0, 0, 1], [1, 1])
    assert val == pytest.approx(1.0)
    assert x.sum() == pytest.approx(1.0) and np.all(x >= -1e-12)


def test_lp_errors():
    with pytest.raises(InfeasibleLP):
        lp_maximize([[1.0], [-1.0]], [0.0, -1.0], [1.0])
    with pytest.raises(UnboundedLP):
        lp_maximize([[1.0, 0.0]], [1.0], [0.0, 1.0])


def test_lp_degenerate_point():
    # several redundant constraints meeting at one point (cycling-prone)
    A = [[1, 0], [0, 1], [1, 1], [-1, 0], [0, -1], [-1, -1], [1, -1]]
    b = [0.5, 0.5, 1.0, -0.5, -0.5, -1.0, 0.0]
    val, x = lp_maximize(A, b, [1, 3])
    assert val == pytest.approx(2.0) and np.allclose(x, [0.5, 0.5])


def test_lp_against_vertex_enumeration(rng):
    for _ in range(200):
        d = int(rng.integers(1, 4))
        P = random_hpolytope(rng, d)
        c = rng.standard_normal(d)
        V = brute_vertices(P.A, P.b)
        val, x = lp_maximize(P.A, P.b, c)
        assert abs(val - np.max(V @ c)) < 1e-9
        assert np.all(P.A @ x <= P.b + 1e-9)


# properties --------------------------------------------------------------------


def test_positive_homogeneity(rng):
    for _ in range(1000):
        d = int(rng.integers(1, 4))
        K = random_body(rng, d, depth=1)
        x = rng.standard_normal(d)
        lam = rng.uniform(0, 10)
        lhs = cg.support_function(K, lam * x)
        rhs = lam * cg.support_function(K, x)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_subadditivity(rng):
    for _ in range(1000):
        d = int(rng.integers(1, 4))
        K = random_body(rng, d, depth=1)
        x, y = rng.standard_normal((2, d))
        assert cg.support_function(K, x + y) <= cg.support_function(K, x) + cg.support_function(K, y) + 1e-10


@seed(7)
@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_minkowski_additivity(s, d):
    rng = np.random.default_rng(s)
    K1, K2 = random_body(rng, d), random_body(rng, d)
    X = rng.standard_normal((10, d))
    total = cg.support_function(cg.minkowski_sum(K1, K2), X)
    parts = cg.support_function(K1, X) + cg.support_function(K2, X)
    assert np.max(np.abs(total - parts)) <= 1e-12 * max(1.0, np.max(np.abs(parts)))


# serialisation -----------------------------------------------------------------


def test_json_roundtrip(rng):
    for _ in range(30):
        d = int(rng.integers(1, 4))
        K = random_body(rng, d)
        text = json.dumps(K.to_json())
        K2 = cg.body_from_json(json.loads(text))
        X = rng.standard_normal((5, d))
        assert np.allclose(cg.support_function(K, X), cg.support_function(K2, X), atol=1e-12)
    for G in [cg.HRegion([[-1.0]], [0.0]), cg.OpenBall([0, 0], 1.0), cg.FullSpace(3)]:
        assert cg.region_from_json(json.loads(json.dumps(G.to_json()))).to_json() == G.to_json()


def test_eta_lattice_stays_inside(rng):
    K = cg.exhaust(cg.open_box([0, 0], [1, 1]), 4)
    pts = cg.eta_lattice(K, 50, seed=3)
    assert pts.shape[0] == 50
    assert np.all(pts @ K.A.T <= K.b + 1e-9)
    assert cg.max_norm(cg.interval(-3, 2)) == 3.0


def test_batched_hpolytope_support_agrees_with_lp(rng):
    for d in (1, 2, 3):
        P = random_hpolytope(rng, d)
        X = rng.standard_normal((200, d))
        batched = cg.support_function(P, X)
        one_by_one = np.array([lp_maximize(P.A, P.b, x)[0] for x in X])
        assert np.max(np.abs(batched - one_by_one)) < 1e-9
