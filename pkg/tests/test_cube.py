import itertools
import random

import pytest

from cubelink.complexes import build_cube_polytope
from cubelink.errors import CaseNotCovered
from cubelink.hypercube import cube_graph, facet, opposite_facet, project
from cubelink.linkage.cube import (
    build_Mx_paths,
    cube_linkage,
    scenario2_partition,
    short_distance_paths,
    solve_3polytope,
    solve_cube,
    solve_cube_strong,
)
from cubelink.oracle import all_pairings, oracle_linkage
from cubelink.paths import validate_linkage


def random_pairing(rng, d, k):
    X = rng.sample(range(1 << d), 2 * k)
    return [(X[2 * i], X[2 * i + 1]) for i in range(k)]


def assert_linked(cert, d, pairs, avoid=()):
    assert cert.obstruction is None, cert.trace
    ok, msg = validate_linkage(cube_graph(d), pairs, cert.paths, avoid)
    assert ok, msg


def test_q3_exhaustive_matches_oracle():
    G = cube_graph(3)
    for X in itertools.combinations(range(8), 4):
        for pairs in all_pairings(X):
            cert = solve_cube(3, pairs)
            expect = oracle_linkage(G, pairs)
            if expect is None:
                assert cert.obstruction is not None
                assert cert.obstruction.kind == "config-3F"
            else:
                assert_linked(cert, 3, pairs)


@pytest.mark.parametrize("d,k,n", [(4, 2, 300), (5, 3, 300), (6, 3, 200),
                                   (7, 4, 150), (8, 4, 60), (9, 5, 40)])
def test_random_instances_link(d, k, n):
    rng = random.Random(100 * d + k)
    for _ in range(n):
        pairs = random_pairing(rng, d, k)
        cert = solve_cube(d, pairs)
        assert_linked(cert, d, pairs)


def test_partial_capacity_and_single_pair():
    rng = random.Random(1)
    for d in (5, 6, 7):
        for k in range(1, (d + 1) // 2):
            pairs = random_pairing(rng, d, k)
            assert_linked(solve_cube(d, pairs), d, pairs)


def test_solve_cube_rejects_overcapacity():
    with pytest.raises(ValueError):
        solve_cube(4, [(0, 15), (1, 14), (2, 13)])
    with pytest.raises(ValueError):
        solve_cube(3, [(0, 7), (0, 6)])  # repeated terminal


def test_cube_linkage_avoid():
    rng = random.Random(2)
    for d in (5, 6, 7):
        k_max = (d + 1) // 2
        for _ in range(80):
            k = rng.randint(1, k_max - 1)
            room = 2 * k_max - 2 * k + (1 if d % 2 == 0 else 0)
            verts = rng.sample(range(1 << d), 2 * k + rng.randint(0, room))
            pairs = [(verts[2 * i], verts[2 * i + 1]) for i in range(k)]
            avoid = verts[2 * k:]
            cert = cube_linkage(d, pairs, avoid)
            assert_linked(cert, d, pairs, avoid)


def test_cube_linkage_capacity_errors():
    with pytest.raises(ValueError):
        cube_linkage(5, [(0, 31), (1, 30), (2, 29)], avoid=[3])
    with pytest.raises(ValueError):
        cube_linkage(5, [(0, 31)], avoid=[0])


@pytest.mark.parametrize("d", [4, 6, 8])
def test_strong_random(d):
    rng = random.Random(d)
    for _ in range(150):
        verts = rng.sample(range(1 << d), d + 1)
        pairs = [(verts[2 * i], verts[2 * i + 1]) for i in range(d // 2)]
        x = verts[-1]
        cert = solve_cube_strong(d, pairs, x)
        assert_linked(cert, d, pairs, (x,))
        assert all(x not in p for p in cert.paths)


def test_strong_rejects_bad_inputs():
    with pytest.raises(ValueError):
        solve_cube_strong(5, [(0, 1), (2, 3)], 4)  # odd d
    with pytest.raises(ValueError):
        solve_cube_strong(4, [(0, 1)], 2)  # wrong pair count
    with pytest.raises(ValueError):
        solve_cube_strong(4, [(0, 1), (2, 3)], 3)  # x is a terminal


def test_short_distance_paths_contract():
    F = facet(4, 3, 0)
    X = {0b0000, 0b0011, 0b0101, 0b0110}
    pairs = [(0b0000, 0b0011), (0b0101, 0b0110)]
    found = short_distance_paths(F, X, pairs)
    assert len(found) >= len(pairs) - 1
    for (s, t), p in found.items():
        assert p[0] == s and p[-1] == t
        assert not (set(p[1:-1]) & X)
    with pytest.raises(ValueError):
        short_distance_paths(F, {0b1000}, [])


def test_scenario2_partition_classes():
    d = 5
    F = facet(d, 4, 0)
    # pair 0 in F; one adjacent pair, one projection pair, one free pair
    pairs = [(0b00000, 0b00011), (0b00100, 0b00101), (0b01000, 0b11000),
             ]
    classes = scenario2_partition(d, F, pairs)
    assert 0b00100 in classes[0] and 0b00101 in classes[0]
    assert 0b01000 in classes[1]
    M = build_Mx_paths(d, F, pairs, classes)
    for x, p in M.items():
        assert p[0] == x and len(p) <= 3
        assert opposite_facet(F).contains(p[-1])


def test_solve_3polytope_against_oracle():
    P = build_cube_polytope(3)
    hits = {"linked": 0, "obstructed": 0}
    for X in itertools.combinations(range(8), 4):
        for pairs in all_pairings(X):
            cert = solve_3polytope(P, pairs)
            truth = oracle_linkage(P.graph, pairs)
            if truth is None:
                assert cert.obstruction is not None
                hits["obstructed"] += 1
            else:
                ok, msg = validate_linkage(P.graph, pairs, cert.paths)
                assert ok, msg
                hits["linked"] += 1
    assert hits == {"linked": 204, "obstructed": 6}


def test_certificates_report_instance_and_trace():
    cert = solve_cube(5, [(0, 31), (1, 30), (2, 29)])
    assert cert.instance["host"] == "Q_5"
    assert cert.instance["pairs"][0] == ["00000", "11111"]
    assert cert.trace and all(isinstance(t, str) for t in cert.trace)
    j = cert.to_json()
    assert j["valid"] and j["result"]["linkage"]


def test_deterministic_output():
    pairs = [(0, 63), (5, 58), (17, 46)]
    a = solve_cube(6, pairs)
    b = solve_cube(6, pairs)
    assert a.paths == b.paths and a.trace == b.trace


def test_scenario_traces_cover_all_three():
    # scenario 1: all six terminals inside one facet of Q_5
    pairs = [(0b00000, 0b01110), (0b00011, 0b01100), (0b00101, 0b01010)]
    cert = solve_cube(5, pairs)
    assert "cube/scenario-1" in cert.trace
    assert_linked(cert, 5, pairs)
    # scenario 2: pair 0 inside a facet, others leave it
    pairs = [(0b00000, 0b00111), (0b10001, 0b01110), (0b11100, 0b00011)]
    cert = solve_cube(5, pairs)
    assert "cube/scenario-2" in cert.trace
    assert_linked(cert, 5, pairs)
    # scenario 3: all pairs antipodal
    pairs = [(0, 31), (1, 30), (2, 29)]
    cert = solve_cube(5, pairs)
    assert "cube/scenario-3" in cert.trace
    assert_linked(cert, 5, pairs)
