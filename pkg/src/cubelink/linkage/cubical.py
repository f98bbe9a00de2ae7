"""Linkage in cubical d-polytopes, plain and strong.

The top-level strategy reduces a polytope instance to a solved subhost.  When
the pair count leaves slack (even dimension, or fewer pairs than capacity),
all terminals are routed into a single facet, a (d-1)-cube, and linked there.
At full capacity in odd dimension the terminals are routed into the star of
one of them and handed to the star solver; the one blocking configuration is
dismantled first by redirecting a routing path (when one strays near the
escape ridge) or by relinking through the neighbouring facet.

Strong linkage (even d, one extra vertex to avoid) routes the terminals into
the link of the avoided vertex, itself a cubical (d-1)-polytope.
"""

from __future__ import annotations

from collections import deque

from ..complexes import Polytope, star_complex
from ..errors import CaseNotCovered
from ..oracle import oracle_linkage
from ..paths import Cut, disjoint_paths, shortest_path, validate_linkage
from .certs import (LinkageCertificate, Unlinkable, check_pairing, terminals)
from .cube import detect_config_3F
from .star import (_chain, _face_graph, _face_link, _other_facet, _star_solve,
                   detect_config_dF)


def _bfs_to_set(G, s, targets, forbidden=()):
    """Shortest path from s to the nearest vertex of `targets`, or None."""
    targets = set(targets)
    forbidden = set(forbidden) - {s}
    if s in targets:
        return [s]
    prev = {s: None}
    q = deque([s])
    while q:
        u = q.popleft()
        for w in G[u]:
            if w in prev or w in forbidden:
                continue
            prev[w] = u
            if w in targets:
                path = [w]
                while path[-1] != s:
                    path.append(prev[path[-1]])
                return path[::-1]
            q.append(w)
    return None


def _route_into(G, X, B, forbidden=(), trace=None):
    """One path per vertex of X into B, pairwise disjoint, keyed by start.

    Terminals already in B stay put as single-vertex paths; every other path
    meets B only at its last vertex.
    """
    X = list(X)
    try:
        sys = disjoint_paths(G, set(X), set(B), len(X), forbidden=forbidden)
    except Cut as e:
        raise CaseNotCovered(
            f"routing cut by {len(e.separator)} vertices",
            trace=list(trace or ()) + [sorted(e.separator)])
    route = {p[0]: list(p) for p in sys}
    assert set(route) == set(X)
    return route


def link_via_subgraph(G, pairs, subV, sub_solver, forbidden=(), trace=None):
    """Linkage through a linked subgraph: route every terminal into subV,
    link the entry vertices there, and concatenate."""
    X = [v for p in pairs for v in p]
    route = _route_into(G, X, subV, forbidden=forbidden, trace=trace)
    epairs = [(route[s][-1], route[t][-1]) for s, t in pairs]
    sub = sub_solver(epairs)
    out = []
    for (s, t), (es, et), p in zip(pairs, epairs, sub):
        if p[0] != es:
            p = p[::-1]
        out.append(_chain(route[s], p, route[t][::-1]))
    return out


def _facet_route(P, pairs, trace):
    """Route all terminals into one facet cube and link them there.

    Facets are tried in order of decreasing terminal count; only d = 4 can
    reject a facet (entries in a 3-cube may be obstructed), and if every
    facet fails the bounded search takes over.
    """
    X = terminals(pairs)
    cand = sorted(P.facets, key=lambda f: (-len(X & f), sorted(f)))
    if P.dim > 4:
        cand = cand[:1]
    for F in cand:
        try:
            trace.append("cubical/facet-route")
            return link_via_subgraph(
                P.graph, pairs, F,
                lambda ep: _face_link(P, F, ep, trace=trace), trace=trace)
        except Unlinkable:
            trace.append("cubical/facet-route-obstructed")
            continue
    trace.append("cubical/facet-route-search")
    sol = oracle_linkage(P.graph, pairs)
    if sol is None:
        raise CaseNotCovered("every facet entry obstructed and no linkage "
                             "found", trace=list(trace))
    return sol


def _cubical_solve(P, pairs, trace):
    """Y-linkage in the graph of a cubical d-polytope, aligned to pairs.

    Raises Unlinkable only for d = 3 (blocking configuration on a 2-face).
    """
    d = P.dim
    k = (d + 1) // 2
    if len(pairs) > k:
        raise ValueError(f"at most {k} pairs in a cubical {d}-polytope")
    G = P.graph
    if len(pairs) == 1:
        trace.append("cubical/single-pair")
        return [shortest_path(G, *pairs[0])]
    if d == 3:
        witness = detect_config_3F(P, pairs)
        if witness is not None:
            trace.append("cubical/d3-obstructed")
            raise Unlinkable(witness)
        trace.append("cubical/d3-search")
        sol = oracle_linkage(G, pairs)
        if sol is None:
            raise CaseNotCovered("unobstructed 3-polytope instance with no "
                                 "linkage", trace=list(trace))
        return sol
    if d % 2 == 0 or len(pairs) < k:
        return _facet_route(P, pairs, trace)

    # odd dimension at full capacity: reduce to the star of a terminal
    trace.append("cubical/star-route")
    X = terminals(pairs)
    s1 = min(X)
    i1 = next(i for i, p in enumerate(pairs) if s1 in p)
    a, b = pairs[i1]
    t1 = b if a == s1 else a
    rest = [p for i, p in enumerate(pairs) if i != i1]
    S1verts = star_complex(P, s1).vertex_set()
    route = _route_into(G, X - {s1}, S1verts - {s1}, forbidden={s1},
                        trace=trace)
    route[s1] = [s1]
    bar = {x: route[x][-1] for x in X}

    def bar_pairs():
        return [(s1, bar[t1])] + [(bar[a], bar[b]) for a, b in rest]

    witness = detect_config_dF(P, s1, bar_pairs())
    out = None
    if witness is not None:
        out = _break_config(P, s1, bar, route, bar_pairs(), witness, trace)
    if out is None:
        bpairs = bar_pairs()
        bpaths = _star_solve(P, s1, bpairs, trace)
        out = {frozenset(bp): p for bp, p in zip(bpairs, bpaths)}

    full = []
    for s, t in pairs:
        p = out[frozenset((bar[s], bar[t]))]
        if p[0] != bar[s]:
            p = p[::-1]
        full.append(_chain(route[s], p, route[t][::-1]))
    return full


def _break_config(P, s1, bar, route, bpairs, witness, trace):
    """Dismantle the blocking facet configuration around s1.

    Either redirects one routing path toward the escape ridge (mutating
    `route` and `bar` in place and returning None so the caller re-runs the
    star solver) or, when no routing path comes near any escape ridge,
    returns the star-level linkage built through the neighbouring facet.
    """
    F1 = frozenset(witness.facet)
    bt1 = witness.pair[1]
    S1verts = star_complex(P, s1).vertex_set()
    barX = set(bar.values()) | {s1}
    ridges = [R for R in P.ridges_of_facet(F1) if bt1 in R]
    for R in ridges:
        J = _other_facet(P, R, F1)
        RJ = P.opposite_subface(J, R)
        assert not (RJ & F1)
        touching = [x for x in sorted(route) if set(route[x]) & RJ]
        if touching:
            trace.append("cubical/config-redirect")
            _redirect_path(P, s1, bar, route, barX, R, J, RJ, bt1, touching,
                           S1verts, trace)
            return None
    trace.append("cubical/config-neighbour-facet")
    return _relink_through_neighbour(P, s1, bar, bpairs, F1, ridges[0], bt1,
                                     trace)


def _redirect_path(P, s1, bar, route, barX, R, J, RJ, bt1, touching, S1verts,
                   trace):
    """Reroute one routing path so its star entry leaves the blocked facet."""
    good = set(RJ) - {P.project_in_face(J, RJ, v) for v in barX & R}
    pi_t1 = P.project_in_face(J, RJ, bt1)
    pick = next((x for x in touching if set(route[x]) & good), None)
    if pick is not None:
        p = route[pick]
        i = next(i for i, v in enumerate(p) if v in good)
        newpath = p[:i + 1] + [P.project_in_face(J, R, p[i])]
    else:
        pick = next((x for x in touching if pi_t1 not in route[x]),
                    touching[0])
        p = route[pick]
        i = next(i for i, v in enumerate(p) if v in RJ)
        used = set(p[:i])
        for y in route:
            if y != pick:
                used |= set(route[y])
        M = _bfs_to_set(_face_graph(P, RJ), p[i], good, forbidden=used)
        if M is None:
            raise CaseNotCovered("no escape into the free part of the ridge",
                                 trace=list(trace))
        newpath = p[:i] + M
        if M[-1] not in S1verts:
            newpath = newpath + [P.project_in_face(J, R, M[-1])]
    stop = next(i for i, v in enumerate(newpath) if v in S1verts)
    route[pick] = newpath[:stop + 1]
    bar[pick] = newpath[stop]


def _relink_through_neighbour(P, s1, bar, bpairs, F1, R, bt1, trace):
    """Star linkage when the blocked facet is clear of all routing paths.

    One pair crosses into the ridge of the neighbouring facet opposite R;
    the pair next to the far corner resolves inside the facet; everyone else
    is projected into that far ridge and linked there.
    """
    RF = P.opposite_subface(F1, R)
    J = _other_facet(P, R, F1)
    RJ = P.opposite_subface(J, R)
    sk = P.project_in_face(F1, RF, bt1)
    ik = next(i for i, p in enumerate(bpairs) if sk in p)
    a, b = bpairs[ik]
    tk = b if a == sk else a
    middle = [p for i, p in enumerate(bpairs) if i not in (0, ik)]

    def pi(v):
        return P.project_in_face(J, RJ, v)

    s1p = P.project_in_face(F1, R, s1)
    rpairs = [(pi(s1p), pi(bt1))] + [(pi(a), pi(b)) for a, b in middle]
    try:
        sub = _face_link(P, RJ, rpairs, trace=trace)
    except Unlinkable:
        raise CaseNotCovered("escape ridge linkage obstructed",
                             trace=list(trace))
    out = {}
    p0 = sub[0] if sub[0][0] == rpairs[0][0] else sub[0][::-1]
    out[frozenset((s1, bt1))] = [s1, s1p] + p0 + [bt1]
    for (a, b), p in zip(middle, sub[1:]):
        if p[0] != pi(a):
            p = p[::-1]
        out[frozenset((a, b))] = [a] + p + [b]
    out[frozenset((sk, tk))] = [sk, P.project_in_face(F1, RF, tk), tk]
    return out


def vertex_link(P: Polytope, x) -> Polytope:
    """The link of a vertex as a cubical (dim-1)-polytope.

    Its facets are the ridges of the star facets that miss x; vertex ids are
    inherited from P, so its paths are paths of P avoiding x.  Built lattices
    are cached on P, as the construction is face-lattice heavy.
    """
    cache = getattr(P, "_vertex_link_cache", None)
    if cache is None:
        cache = P._vertex_link_cache = {}
    if x in cache:
        return cache[x]
    star_facets = [F for F in P.facets if x in F]
    facets = set()
    for F in star_facets:
        for R in P.ridges_of_facet(F):
            if x not in R:
                facets.add(R)
    verts = set().union(*star_facets) - {x}
    labels = {v: P.labels[v] for v in verts}
    cache[x] = Polytope(P.dim - 1, verts, facets, labels=labels)
    return cache[x]


def _cubical_strong_solve(P, pairs, x, trace):
    """Linkage avoiding the unpaired vertex x (even dimension)."""
    d = P.dim
    if d % 2:
        raise ValueError("strong linkage with an avoided vertex needs even "
                         "dimension")
    if 2 * len(pairs) != d:
        raise ValueError(f"need exactly {d // 2} pairs")
    if x in terminals(pairs):
        raise ValueError("the avoided vertex must not be a terminal")
    G = P.graph
    if d == 2:
        trace.append("cubical/strong-base")
        return [shortest_path(G, *pairs[0], {x})]
    lkP = vertex_link(P, x)
    trace.append("cubical/strong-link-route")
    try:
        return link_via_subgraph(
            G, pairs, set(lkP.vertices),
            lambda ep: _cubical_solve(lkP, ep, trace),
            forbidden={x}, trace=trace)
    except Unlinkable:
        # only d = 4: the entries may be blocked in the 3-dimensional link
        trace.append("cubical/strong-search")
        sol = oracle_linkage(G, pairs, avoid={x})
        if sol is None:
            raise CaseNotCovered("obstructed link entries and no linkage "
                                 "found", trace=list(trace))
        return sol


def _instance(P, pairs, avoid=()):
    label = P.labels.get
    return {
        "host": f"cubical {P.dim}-polytope ({len(P.vertices)}v)",
        "pairs": [[label(s), label(t)] for s, t in pairs],
        "avoid": [label(v) for v in sorted(avoid)],
    }


def solve_cubical(P: Polytope, pairs) -> LinkageCertificate:
    """Linkage of up to floor((dim+1)/2) pairs in a cubical polytope.

    Dimension 3 at two pairs may return an obstruction certificate.
    """
    pairs = check_pairing(pairs)
    trace: list = []
    instance = _instance(P, pairs)
    try:
        paths = _cubical_solve(P, pairs, trace)
    except Unlinkable as e:
        return LinkageCertificate(instance=instance, obstruction=e.witness,
                                  trace=trace, valid=True)
    ok, msg = validate_linkage(P.graph, pairs, paths)
    assert ok, msg
    return LinkageCertificate(instance=instance, paths=paths, trace=trace,
                              valid=True)


def solve_cubical_strong(P: Polytope, pairs, x) -> LinkageCertificate:
    """Linkage of dim/2 pairs whose paths avoid the extra vertex x."""
    pairs = check_pairing(pairs)
    trace: list = []
    instance = _instance(P, pairs, (x,))
    paths = _cubical_strong_solve(P, pairs, x, trace)
    ok, msg = validate_linkage(P.graph, pairs, paths, (x,))
    assert ok, msg
    return LinkageCertificate(instance=instance, paths=paths, trace=trace,
                              valid=True)
