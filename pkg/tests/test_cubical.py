import random

import pytest

from cubelink.complexes import build_cube_polytope, link_polytope
from cubelink.linkage.cubical import solve_cubical, solve_cubical_strong
from cubelink.oracle import oracle_linkage
from cubelink.paths import validate_linkage


def random_pairing(rng, verts, k):
    X = rng.sample(verts, 2 * k)
    return [(X[2 * i], X[2 * i + 1]) for i in range(k)]


def assert_linked(P, pairs, cert, avoid=()):
    assert cert.obstruction is None, cert.trace
    ok, msg = validate_linkage(P.graph, pairs, cert.paths, avoid)
    assert ok, msg


@pytest.mark.parametrize("host,n", [
    ("Q4", 250), ("Q5", 400), ("Q6", 150), ("Q7", 80), ("linkQ6", 250),
])
def test_full_capacity_random(host, n):
    P = {"Q4": lambda: build_cube_polytope(4),
         "Q5": lambda: build_cube_polytope(5),
         "Q6": lambda: build_cube_polytope(6),
         "Q7": lambda: build_cube_polytope(7),
         "linkQ6": lambda: link_polytope(6, 0)}[host]()
    k = (P.dim + 1) // 2
    rng = random.Random(len(host) + P.dim)
    for _ in range(n):
        pairs = random_pairing(rng, P.vertices, k)
        cert = solve_cubical(P, pairs)
        if cert.obstruction is None:
            assert_linked(P, pairs, cert)
        else:
            assert oracle_linkage(P.graph, pairs) is None


def test_partial_capacity_mixed():
    rng = random.Random(8)
    for P in (build_cube_polytope(5), build_cube_polytope(6), link_polytope(6, 0)):
        k_max = (P.dim + 1) // 2
        for k in range(1, k_max):
            for _ in range(40):
                pairs = random_pairing(rng, P.vertices, k)
                cert = solve_cubical(P, pairs)
                assert_linked(P, pairs, cert)


@pytest.mark.parametrize("host,n", [("Q4", 120), ("Q5", 120), ("linkQ5", 80)])
def test_oracle_cross_check(host, n):
    P = {"Q4": lambda: build_cube_polytope(4),
         "Q5": lambda: build_cube_polytope(5),
         "linkQ5": lambda: link_polytope(5, 0)}[host]()
    k = (P.dim + 1) // 2
    rng = random.Random(31)
    for _ in range(n):
        pairs = random_pairing(rng, P.vertices, k)
        cert = solve_cubical(P, pairs)
        truth = oracle_linkage(P.graph, pairs)
        assert (cert.obstruction is None) == (truth is not None), pairs
        if cert.paths:
            assert_linked(P, pairs, cert)


def test_config_case2_relink_through_neighbour():
    P = build_cube_polytope(5)
    pairs = [(0, 15), (14, 13), (11, 7)]
    cert = solve_cubical(P, pairs)
    assert "cubical/config-neighbour-facet" in cert.trace
    assert_linked(P, pairs, cert)
    # the same instance is obstructed inside the star but not in the polytope
    from cubelink.linkage.star import solve_star

    assert solve_star(P, 0, pairs).obstruction is not None


def test_config_case1_redirect():
    P = link_polytope(6, 0)
    seen = False
    for pairs in ([(1, 31), (23, 27), (29, 14)],
                  [(1, 31), (23, 27), (29, 30)],
                  [(1, 31), (15, 27), (29, 22)],
                  [(1, 31), (15, 27), (29, 30)]):
        cert = solve_cubical(P, pairs)
        assert_linked(P, pairs, cert)
        seen = seen or "cubical/config-redirect" in cert.trace
    assert seen


def test_config_case2_q7():
    P = build_cube_polytope(7)
    pairs = [(0, 63), (62, 61), (59, 55), (47, 31)]
    cert = solve_cubical(P, pairs)
    assert "cubical/config-neighbour-facet" in cert.trace
    assert_linked(P, pairs, cert)


def test_dim3_obstruction_certificate():
    P = build_cube_polytope(3)
    cert = solve_cubical(P, [(0, 3), (1, 2)])
    assert cert.obstruction is not None
    assert cert.obstruction.kind == "config-3F"


def test_single_pair_any_host():
    P = link_polytope(5, 0)
    cert = solve_cubical(P, [(1, 30)])
    assert_linked(P, [(1, 30)], cert)


@pytest.mark.parametrize("host,n", [("Q4", 150), ("Q6", 100), ("linkQ5", 80)])
def test_strong_random(host, n):
    P = {"Q4": lambda: build_cube_polytope(4),
         "Q6": lambda: build_cube_polytope(6),
         "linkQ5": lambda: link_polytope(5, 0)}[host]()
    d = P.dim
    assert d % 2 == 0
    rng = random.Random(d + n)
    for _ in range(n):
        verts = rng.sample(P.vertices, d + 1)
        pairs = [(verts[2 * i], verts[2 * i + 1]) for i in range(d // 2)]
        x = verts[-1]
        cert = solve_cubical_strong(P, pairs, x)
        assert_linked(P, pairs, cert, avoid=(x,))
        assert all(x not in p for p in cert.paths)


def test_strong_oracle_cross_q4():
    P = build_cube_polytope(4)
    rng = random.Random(44)
    for _ in range(60):
        verts = rng.sample(P.vertices, 5)
        pairs = [(verts[0], verts[1]), (verts[2], verts[3])]
        x = verts[4]
        cert = solve_cubical_strong(P, pairs, x)
        truth = oracle_linkage(P.graph, pairs, avoid={x})
        assert truth is not None
        assert_linked(P, pairs, cert, avoid=(x,))


def test_strong_rejects_odd_dim_and_bad_x():
    P5 = build_cube_polytope(5)
    with pytest.raises(ValueError):
        solve_cubical_strong(P5, [(0, 31), (1, 30)], 2)
    P4 = build_cube_polytope(4)
    with pytest.raises(ValueError):
        solve_cubical_strong(P4, [(0, 15), (1, 14)], 1)  # x is a terminal


def test_cubical_deterministic():
    P = link_polytope(6, 0)
    pairs = [(1, 62), (3, 60), (7, 56)]
    a = solve_cubical(P, pairs)
    b = solve_cubical(P, pairs)
    assert a.paths == b.paths and a.trace == b.trace
