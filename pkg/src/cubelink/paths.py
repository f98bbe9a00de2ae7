"""Disjoint-path primitives over plain adjacency dicts.

A graph here is a dict mapping each vertex to an iterable of neighbours
(undirected: both directions present).  A path is a list of vertices; a
PathSystem is a list of paths.  Everything is deterministic: neighbours are
scanned in sorted order so repeated runs produce identical certificates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import NoPath


@dataclass
class PathSystem:
    """A list of pairwise vertex-disjoint paths."""

    paths: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.paths)

    def __len__(self):
        return len(self.paths)

    def vertices(self) -> set:
        out = set()
        for p in self.paths:
            out.update(p)
        return out


class Cut(Exception):
    """Raised by disjoint_paths when fewer than k paths exist.

    Carries a vertex separator of size < k witnessing the failure.
    """

    def __init__(self, separator):
        super().__init__(f"A-B separator of size {len(separator)}")
        self.separator = sorted(separator)


def is_path(G, p) -> bool:
    if len(set(p)) != len(p):
        return False
    return all(p[i + 1] in G[p[i]] for i in range(len(p) - 1))


def shortest_path(G, s, t, forbidden=()):
    """Deterministic BFS shortest s-t path avoiding `forbidden` (inner or not).

    s and t themselves are never treated as forbidden.  Raises NoPath.
    """
    forbidden = set(forbidden) - {s, t}
    if s == t:
        return [s]
    prev = {s: None}
    q = deque([s])
    while q:
        u = q.popleft()
        for w in sorted(G[u]):
            if w in prev or w in forbidden:
                continue
            prev[w] = u
            if w == t:
                path = [t]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            q.append(w)
    raise NoPath(f"no {s}-{t} path avoiding {len(forbidden)} vertices")


def x_valid_path(G, s, t, X):
    """Shortest s-t path with no inner vertex in the terminal set X."""
    return shortest_path(G, s, t, set(X) - {s, t})


def reachable(G, sources, forbidden=()):
    """Set of vertices reachable from `sources` without entering `forbidden`."""
    forbidden = set(forbidden)
    seen = set(s for s in sources if s not in forbidden)
    q = deque(seen)
    while q:
        u = q.popleft()
        for w in G[u]:
            if w not in seen and w not in forbidden:
                seen.add(w)
                q.append(w)
    return seen


_SRC, _SNK = ("#src",), ("#snk",)


def _menger_flow(G, A, B, need, forbidden, acap=1, bcap=1):
    """Unit-capacity vertex-splitting max-flow for vertex-disjoint A-B paths.

    Nodes are (v, 0) = in-copy and (v, 1) = out-copy plus source/sink
    sentinels.  Vertex arcs (v,0)->(v,1) and terminal arcs have capacity 1;
    edge arcs (v,1)->(w,0) are uncuttable (capacity 2 suffices at unit vertex
    capacity).  Deterministic: arcs scanned in sorted vertex order.

    Returns (flow_value, flowed_arc_set, residual_reachable_or_None).
    """
    A, B = set(A), set(B)
    forbidden = set(forbidden)
    fwd = {_SRC: [(a, 0) for a in sorted(A) if a not in forbidden], _SNK: []}
    cap = {}
    for a in fwd[_SRC]:
        cap[(_SRC, a)] = acap
    for v in G:
        if v in forbidden:
            continue
        vin, vout = (v, 0), (v, 1)
        fwd[vin] = [vout]
        cap[(vin, vout)] = acap if v in A else (bcap if v in B else 1)
        if v in B:
            # a path stops at its first B-vertex
            fwd[vout] = [_SNK]
            cap[(vout, _SNK)] = bcap
            continue
        # A-vertices are sources only: no arcs back into them
        outs = [(w, 0) for w in sorted(G[v]) if w not in forbidden and w not in A]
        for w in outs:
            cap[(vout, w)] = 2
        fwd[vout] = outs
    rev = {n: [] for n in fwd}
    for u in fwd:
        for w in fwd[u]:
            rev[w].append(u)
    flow = {arc: 0 for arc in cap}

    value = 0
    while value < need:
        prev = {_SRC: None}
        q = deque([_SRC])
        while q and _SNK not in prev:
            u = q.popleft()
            for w in fwd[u]:
                if w not in prev and flow[(u, w)] < cap[(u, w)]:
                    prev[w] = u
                    if w == _SNK:
                        break
                    q.append(w)
            else:
                for w in rev[u]:
                    if w not in prev and flow[(w, u)] > 0:
                        prev[w] = (u, "back")
                        q.append(w)
        if _SNK not in prev:
            return value, flow, set(prev)
        node = _SNK
        while node is not None:
            p = prev[node]
            if isinstance(p, tuple) and len(p) == 2 and p[1] == "back":
                flow[(node, p[0])] -= 1
                node = p[0]
            else:
                if p is not None:
                    flow[(p, node)] += 1
                node = p
        value += 1
    return value, flow, None


def disjoint_paths(G, A, B, k, forbidden=()):
    """k vertex-disjoint A-B paths avoiding `forbidden` (Menger routing).

    Each path meets A only at its first vertex and B only at its last.
    Vertices in both A and B become length-0 paths first.  When |A| < k or
    |B| < k the scarce side is treated as a fan hub: paths may share that
    endpoint but are otherwise disjoint.  Raises Cut with a separator witness
    when no k such paths exist.  k = 0 returns an empty system.
    """
    A, B = set(A), set(B)
    forbidden = set(forbidden)
    if forbidden & (A | B):
        raise ValueError("forbidden overlaps terminals")
    if k == 0:
        return PathSystem([])
    shared = sorted(A & B)
    paths = [[v] for v in shared[:k]]
    need = k - len(paths)
    if need <= 0:
        return PathSystem(paths)
    A2 = A - set(shared)
    B2 = B - set(shared)
    blocked = forbidden | set(shared)
    acap = k if len(A2) < need else 1
    bcap = k if len(B2) < need else 1
    value, flow, reached = _menger_flow(G, A2, B2, need, blocked, acap, bcap)
    if value < need:
        # min cut across the residual boundary, one vertex per saturated arc
        cut = {v for v in G if v not in blocked
               and (v, 0) in reached and (v, 1) not in reached}
        cut |= {a for a in A2 if (a, 0) not in reached}
        cut |= {b for b in B2 if (b, 1) in reached}
        cut |= set(shared)
        raise Cut(cut)
    # decompose flow into paths, consuming one unit per step
    left = {arc: f for arc, f in flow.items() if f > 0}

    def step(node):
        for w in sorted(left_keys.get(node, ()), key=str):
            if left.get((node, w), 0) > 0:
                left[(node, w)] -= 1
                return w
        raise AssertionError("flow decomposition stuck")

    left_keys = {}
    for (u, w) in left:
        left_keys.setdefault(u, []).append(w)
    paths2 = []
    for _ in range(value):
        node = step(_SRC)
        p = []
        while node != _SNK:
            if node[1] == 0:
                p.append(node[0])
            node = step(node)
        paths2.append(p)
    return PathSystem(paths + sorted(paths2))


def min_vertex_cut_value(G, s, t):
    """Size of a minimum vertex cut between non-adjacent s and t."""
    if t in G[s]:
        raise ValueError("adjacent vertices have no separating cut")
    value, _, _ = _menger_flow(G, G[s], G[t], len(G), {s, t})
    return value


def vertex_connectivity(G) -> int:
    """Exact vertex connectivity via max-flow over non-adjacent pairs.

    Test-only auditor; desk-scale graphs only.
    """
    verts = sorted(G)
    n = len(verts)
    if n <= 1:
        return 0
    best = n - 1
    # fix one vertex, pair against all non-neighbours; then pairs among N(v0)
    v0 = verts[0]
    others = [v for v in verts[1:] if v not in G[v0]]
    if not others and all(set(G[v]) >= set(verts) - {v} for v in verts):
        return n - 1  # complete graph
    for t in others:
        best = min(best, min_vertex_cut_value(G, v0, t))
    for s in sorted(G[v0]):
        for t in verts:
            if t != s and t != v0 and t not in G[s] and s < t:
                best = min(best, min_vertex_cut_value(G, s, t))
    return best


def evaluate_affine(coeffs, const, v):
    return sum(c for i, c in enumerate(coeffs) if (v >> i) & 1) + const


def linear_function_path(d, coeffs, const, u, v):
    """A u-v path in Q_d whose inner vertices x all satisfy f(x) > 0.

    f is the affine functional with the given coefficients and constant.
    Requires f(u) >= 0, f(v) >= 0, and f > 0 somewhere.  The contract is
    verified on the result; if the greedy construction fails, falls back to
    exhaustive search over {f > 0} plus the endpoints.
    """
    from .hypercube import cube_graph

    f = lambda x: evaluate_affine(coeffs, const, x)
    if f(u) < 0 or f(v) < 0:
        raise ValueError("endpoints must have f >= 0")
    G = cube_graph(d)
    if not any(f(x) > 0 for x in G):
        raise ValueError("f must be positive somewhere")
    if u == v:
        return [u]

    def climb(start):
        # strictly f-increasing walk until f > 0
        p = [start]
        while f(p[-1]) <= 0:
            nxt = max(sorted(G[p[-1]]), key=f)
            if f(nxt) <= f(p[-1]):
                return None
            p.append(nxt)
        return p

    pu, pv = climb(u), climb(v)
    if pu is not None and pv is not None:
        positive = {x for x in G if f(x) > 0} | {pu[-1], pv[-1]}
        try:
            mid = shortest_path(G, pu[-1], pv[-1],
                                set(G) - positive - set(pu) - set(pv))
            cand = pu + mid[1:]
            rest = pv[::-1]
            if cand[-1] == rest[0]:
                cand = cand + rest[1:]
            if _inner_positive(cand, f) and is_path(G, cand):
                return cand
        except NoPath:
            pass
    # exhaustive fallback over the positive region plus endpoints
    allowed = {x for x in G if f(x) > 0} | {u, v}
    sub = {x: [w for w in G[x] if w in allowed] for x in allowed}
    path = shortest_path(sub, u, v)
    assert _inner_positive(path, f)
    return path


def _inner_positive(path, f):
    return all(f(x) > 0 for x in path[1:-1])


def validate_linkage(G, pairs, paths, avoid=()):
    """Check that `paths` is a Y-linkage for `pairs` avoiding `avoid`.

    Returns (True, "ok") or (False, first violation).  Report-only.
    """
    if len(paths) != len(pairs):
        return False, f"expected {len(pairs)} paths, got {len(paths)}"
    avoid = set(avoid)
    seen = set()
    for i, (pair, p) in enumerate(zip(pairs, paths)):
        if not p:
            return False, f"path {i} empty"
        if {p[0], p[-1]} != set(pair):
            return False, f"path {i} joins {p[0]}-{p[-1]}, wanted {sorted(pair)}"
        if len(set(p)) != len(p):
            return False, f"path {i} repeats a vertex"
        for a, b in zip(p, p[1:]):
            if b not in G[a]:
                return False, f"path {i} uses non-edge {a}-{b}"
        overlap = seen & set(p)
        if overlap:
            return False, f"paths share vertex {sorted(overlap)[0]}"
        hit = avoid & set(p)
        if hit:
            return False, f"path {i} meets avoided vertex {sorted(hit)[0]}"
        seen |= set(p)
    return True, "ok"
