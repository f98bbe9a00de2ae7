"""Linkage inside the star of a vertex of a cubical d-polytope, d odd.

All terminals live in the closed star of s1 (s1 itself being one of them).
The construction splits on how many terminals the facet F1 (the facet of the
star through s1's partner holding the most terminals) contains, and routes
the remaining pairs through ridges of F1, the antistar of F1, or the link of
s1 in F1.  The single obstruction is the dF-configuration, reported as a
witness.
"""

from __future__ import annotations

from ..complexes import Complex, Polytope, star_complex
from ..errors import CaseNotCovered, NoPath
from ..hypercube import find_unassociated_pair
from ..paths import Cut, disjoint_paths, shortest_path, validate_linkage
from .certs import (LinkageCertificate, ObstructionWitness, Unlinkable,
                    check_pairing, terminals)
from .cube import _linkage
from .link import _link_solve


# -- face-level helpers ------------------------------------------------------


def _induced(G, verts):
    vs = set(verts)
    return {v: tuple(w for w in G[v] if w in vs) for v in G if v in vs}


def _face_graph(P, f):
    f = frozenset(f)
    return {v: tuple(w for w in P.graph[v] if w in f) for v in sorted(f)}


def _face_path(P, f, s, t, forbidden=()):
    return shortest_path(_face_graph(P, f), s, t, forbidden)


def _face_link(P, f, pairs, avoid=(), trace=None):
    """Cube linkage inside a face of P, through its canonical coordinates."""
    coords, j = P.embed_face(f)
    inv = {c: v for v, c in coords.items()}
    sub = _linkage(j, [(coords[s], coords[t]) for s, t in pairs],
                   [coords[a] for a in avoid],
                   trace if trace is not None else [])
    return [[inv[c] for c in p] for p in sub]


def _face_dist(P, f, u, v):
    coords, _ = P.embed_face(f)
    return bin(coords[u] ^ coords[v]).count("1")


def _coord_split(P, f, axis):
    """The two opposite ridges of the cube face f along one coordinate."""
    coords, _ = P.embed_face(f)
    lo = frozenset(v for v in f if not (coords[v] >> axis) & 1)
    return lo, frozenset(f) - lo


def _unassoc_ridge(P, f, pts, anchor):
    """An opposite-ridge pair of f unassociated with pts; anchor's side first."""
    coords, j = P.embed_face(f)
    axis = find_unassociated_pair(j, [coords[x] for x in pts])
    lo, hi = _coord_split(P, f, axis)
    return (lo, hi) if anchor in lo else (hi, lo)


def _other_facet(P, R, F):
    """The facet besides F containing the (d-2)-face R."""
    cands = [g for g in P.facets_containing(R) if g != frozenset(F)]
    if len(cands) != 1:
        raise ValueError("ridge not on exactly two facets")
    return cands[0]


def _chain(*segs):
    """Concatenate path segments, merging equal junction vertices.

    Segments may share their junction vertex or abut along an edge; the final
    linkage validation catches any non-edge, so no graph is needed here.
    """
    out: list = []
    for seg in segs:
        seg = list(seg)
        if not seg:
            continue
        if out and out[-1] == seg[0]:
            out.extend(seg[1:])
        else:
            out.extend(seg)
    return out


def _short_hop(P, src, target_face, allowed_end, banned, within):
    """A path of length at most 2 from src into target_face, inside `within`.

    Vertices after src must avoid `banned`, except that the endpoint may be
    `allowed_end`.  Candidates are scanned deterministically; None if all are
    blocked.
    """
    tgt = frozenset(target_face)
    box = frozenset(within)
    direct = [w for w in P.graph[src] if w in tgt]
    cands = []
    if direct:
        cands.append([src, direct[0]])
    for w in sorted(P.graph[src]):
        if w in tgt or w not in box:
            continue
        nxt = [u for u in P.graph[w] if u in tgt]
        if nxt:
            cands.append([src, w, nxt[0]])
    for c in cands:
        inner, end = c[1:-1], c[-1]
        if any(v in banned for v in inner):
            continue
        if end in banned and end != allowed_end:
            continue
        return c
    return None


# -- dF-configuration --------------------------------------------------------


def projections_star_injection(P, s, F):
    """The standard injection V(F) minus the antipode of s into the antistar.

    Built ridge by ridge: each ridge of F through s is pushed through the
    neighbouring facet onto its opposite ridge, first-come first-served in
    lexicographic ridge order.  Every image is a neighbour of its preimage
    outside F.
    """
    F = frozenset(F)
    so = P.opposite_in_face(F, s)
    ridges = [R for R in P.ridges_of_facet(F) if s in R]
    f = {}
    for R in ridges:
        J = _other_facet(P, R, F)
        Ro = P.opposite_subface(J, R)
        for v in sorted(R):
            if v not in f:
                f[v] = P.project_in_face(J, Ro, v)
    assert set(f) == set(F) - {so}
    assert len(set(f.values())) == len(f)
    assert not set(f.values()) & set(F)
    return f


def detect_config_dF(P, s1, pairs):
    """Witness for the dF-configuration blocking a star linkage, or None.

    Some facet holds at least d+1 terminals, s1's partner sits at facet
    diameter from s1, and every facet-neighbour of the partner is a terminal.
    """
    d = P.dim
    X = terminals(pairs)
    t1 = next(b if a == s1 else a for a, b in pairs if s1 in (a, b))
    for F in sorted(P.facets, key=sorted):
        if len(X & F) < d + 1 or s1 not in F or t1 not in F:
            continue
        if _face_dist(P, F, s1, t1) != d - 1:
            continue
        nbrs = [w for w in P.graph[t1] if w in F]
        if all(w in X for w in nbrs):
            return ObstructionWitness(kind="config-dF", facet=sorted(F),
                                      pair=(s1, t1), blocking=nbrs)
    return None


# -- the star solver ---------------------------------------------------------


class _StarSolver:
    def __init__(self, P: Polytope, s1, pairs, trace):
        self.P = P
        self.d = P.dim
        self.k = (self.d + 1) // 2
        self.trace = trace
        i1 = next(i for i, p in enumerate(pairs) if s1 in p)
        a, b = pairs[i1]
        self.s1, self.t1 = (a, b) if a == s1 else (b, a)
        self.rest = [p for i, p in enumerate(pairs) if i != i1]
        self.pairs = [(self.s1, self.t1)] + self.rest
        self.X = terminals(pairs)
        self.out = {}

    # -- shared geometry --

    def setup(self):
        P, s1, t1 = self.P, self.s1, self.t1
        S1 = star_complex(P, s1)
        self.S1verts = S1.vertex_set()
        if not self.X <= self.S1verts:
            raise ValueError("terminals must lie in the star of s1")
        self.S1g = S1.graph()
        cands = [f for f in P.facets if s1 in f and t1 in f]
        self.F1 = min(cands, key=lambda f: (-len(self.X & f), sorted(f)))
        self.A1verts = self.S1verts - self.F1
        self.A1g = _induced(self.S1g, self.A1verts)
        self.inj = projections_star_injection(P, s1, self.F1)
        self.s1o = P.opposite_in_face(self.F1, s1)

    def record(self, s, t, path):
        if path[0] != s:
            path = path[::-1]
        assert path[0] == s and path[-1] == t, (s, t, path)
        self.out[frozenset((s, t))] = path

    def record_sub(self, pairs, paths):
        for (s, t), p in zip(pairs, paths):
            self.record(s, t, p)

    def a1_path(self, a, b, forbidden=()):
        return shortest_path(self.A1g, a, b, forbidden)

    def a1_2link(self, pairs2):
        """Two disjoint paths in the antistar via a ridge-cube inside it."""
        P, F1 = self.P, self.F1
        R1 = next(R for R in P.ridges_of_facet(F1) if self.s1 in R)
        J1 = _other_facet(P, R1, F1)
        RA = P.opposite_subface(J1, R1)
        assert not RA & F1
        terms = [v for p in pairs2 for v in p]
        try:
            sys = disjoint_paths(self.A1g, set(terms), set(RA), 4)
        except Cut as e:
            raise CaseNotCovered("antistar routing blocked",
                                 trace=list(self.trace) + [sorted(e.separator)])
        route = {p[0]: list(p) for p in sys}
        sub = _face_link(P, RA, [(route[a][-1], route[b][-1])
                                 for a, b in pairs2], trace=self.trace)
        outs = []
        for (a, b), p in zip(pairs2, sub):
            if p[0] != route[a][-1]:
                p = p[::-1]
            outs.append(_chain(route[a], p, route[b][::-1]))
        return outs

    def link_in_F1(self, lpairs):
        """Linkage in the link of s1 inside the cube F1 (avoids s1 and s1o)."""
        coords, j = self.P.embed_face(self.F1)
        inv = {c: v for v, c in coords.items()}
        sub = _link_solve(j, coords[self.s1],
                          [(coords[a], coords[b]) for a, b in lpairs],
                          self.trace)
        return [[inv[c] for c in p] for p in sub]

    # -- dispatch --

    def solve(self):
        self.setup()
        n1 = len(self.X & self.F1)
        self.trace.append(f"star/F1-terminals={n1}")
        if n1 == self.d + 1:
            self.case4()
        elif n1 == self.d:
            self.case1()
        elif n1 >= 3:
            self.case2()
        else:
            self.case3()
        return [self._aligned(p) for p in self.pairs]

    def _aligned(self, pair):
        p = self.out[frozenset(pair)]
        return p if p[0] == pair[0] else p[::-1]

    # -- case 1: one terminal outside F1 --------------------------------

    def case1(self):
        P, F1, s1, t1 = self.P, self.F1, self.s1, self.t1
        t2 = next(iter(self.X - F1))
        i2 = next(i for i, p in enumerate(self.rest) if t2 in p)
        a, b = self.rest[i2]
        s2 = a if b == t2 else b
        rest = [p for i, p in enumerate(self.rest) if i != i2]
        if _face_dist(P, F1, s2, s1) < self.d - 1:
            self.trace.append("star/case1-near")
            inside = [(s1, t1)] + rest
            self.record_sub(inside,
                            _face_link(P, F1, inside, avoid=[s2],
                                       trace=self.trace))
            s2p = self.inj[s2]
            p2 = [s2, t2] if s2p == t2 else _chain([s2],
                                                   self.a1_path(s2p, t2))
            self.record(s2, t2, p2)
            return
        # s2 is s1's antipode in F1
        R, Ro = _unassoc_ridge(P, F1, (self.X & F1) - {s2}, s2)
        piRo = lambda v: P.project_in_face(F1, Ro, v)
        piR = lambda v: P.project_in_face(F1, R, v)
        NR2 = [w for w in P.graph[s2] if w in R]
        if all(w in self.X for w in NR2):
            self.trace.append("star/case1-far-crowded")
            # every rest pair and t1 are the R-neighbours of s2
            self.record_sub(rest, _face_link(P, R, rest, avoid=[s2, t1],
                                             trace=self.trace))
            ps2 = piRo(s2)
            s2p = self.inj[ps2]
            self.record(s2, t2, _chain([s2, ps2, s2p],
                                       self.a1_path(s2p, t2)))
            p1 = _face_path(P, Ro, piRo(t1), s1, forbidden={ps2})
            self.record(s1, t1, _chain([t1], p1))
            return
        self.trace.append("star/case1-far")
        s2bar = min(w for w in NR2 if w not in self.X)
        s2p = self.inj[s2bar]
        self.record(s2, t2, _chain([s2, s2bar, s2p], self.a1_path(s2p, t2)))
        inside = [(s1, t1)] + rest
        ent = lambda x: x if x in Ro else piRo(x)
        try:
            sub = _face_link(P, Ro, [(ent(a), ent(b)) for a, b in inside],
                             trace=self.trace)
        except Unlinkable:
            # 3-cube corner at d = 5: route the other pair through R instead
            self.trace.append("star/case1-far-d5-flip")
            (s3, t3) = rest[0]
            entR = lambda x: x if x in R else piR(x)
            forb = {s2, s2bar} | (self.X - {s3, t3})
            p3 = _face_path(P, R, entR(s3), entR(t3), forbidden=forb)
            self.record(s3, t3, _chain([s3] if s3 in Ro else [], p3,
                                       [t3] if t3 in Ro else []))
            e3 = {ent(s3), ent(t3)}
            p1 = _face_path(P, Ro, s1, ent(t1),
                            forbidden=(self.X | e3) - {s1, t1})
            self.record(s1, t1, _chain(p1, [t1] if t1 in R else []))
            return
        for (a, b), p in zip(inside, sub):
            if p[0] != ent(a):
                p = p[::-1]
            self.record(a, b, _chain([a] if a in R else [], p,
                                     [b] if b in R else []))

    # -- case 2: between 3 and d-1 terminals in F1 ----------------------

    def case2(self):
        P, F1, s1, t1 = self.P, self.F1, self.s1, self.t1
        R, Ro = _unassoc_ridge(P, F1, self.X & F1, s1)
        piRo = lambda v: P.project_in_face(F1, Ro, v)
        piR = lambda v: P.project_in_face(F1, R, v)
        a1_terms = sorted(self.X & self.A1verts)
        if t1 in R:
            self.trace.append("star/case2-near-ridge")
            ent = {}
            route = {}
            for x in (self.X & F1) - {s1, t1}:
                ent[x] = x if x in Ro else piRo(x)
                route[x] = [x] if x in Ro else [x, ent[x]]
            XRo = set(ent.values())
            pool = sorted(set(Ro) - XRo - {self.s1o})
            need = len(a1_terms)
            zbars = self._pick_zbars(P, Ro, XRo, pool, need)
            z2bar = {self.inj[zb]: zb for zb in zbars}
            try:
                sys = disjoint_paths(self.A1g, set(a1_terms), set(z2bar), need)
            except Cut as e:
                raise CaseNotCovered("antistar routing blocked",
                                     trace=list(self.trace) + [sorted(e.separator)])
            for p in sys:
                zb = z2bar[p[-1]]
                route[p[0]] = list(p) + [zb]
                ent[p[0]] = zb
            sub = self._must_link(Ro, [(ent[a], ent[b]) for a, b in self.rest])
            for (a, b), p in zip(self.rest, sub):
                if p[0] != ent[a]:
                    p = p[::-1]
                self.record(a, b, _chain(route[a], p, route[b][::-1]))
            self.record(s1, t1, _face_path(P, R, s1, t1, forbidden=self.X))
            return
        self.trace.append("star/case2-far-ridge")
        ps1 = piRo(s1)
        p1 = _face_path(P, Ro, ps1, t1, forbidden=self.X)
        self.record(s1, t1, _chain([s1], p1))
        J = _other_facet(P, R, F1)
        RJ = P.opposite_subface(J, R)
        assert not RJ & F1
        try:
            sys = disjoint_paths(self.A1g, set(a1_terms), set(RJ),
                                 len(a1_terms))
        except Cut as e:
            raise CaseNotCovered("antistar routing blocked",
                                 trace=list(self.trace) + [sorted(e.separator)])
        ent = {p[0]: p[-1] for p in sys}
        route = {p[0]: list(p) for p in sys}
        for x in (self.X & F1) - {s1, t1}:
            if x in R:
                ent[x], route[x] = x, [x]
            else:
                ent[x], route[x] = piR(x), [x, piR(x)]
        sub = _face_link(P, J, [(ent[a], ent[b]) for a, b in self.rest],
                         avoid=[s1], trace=self.trace)
        for (a, b), p in zip(self.rest, sub):
            if p[0] != ent[a]:
                p = p[::-1]
            self.record(a, b, _chain(route[a], p, route[b][::-1]))

    def _pick_zbars(self, P, Ro, XRo, pool, need):
        """Landing spots in the far ridge for the antistar terminals.

        At d = 5 the far ridge is a 3-cube, so if no two of the fixed entries
        are at distance three we seed the pool with a vertex antipodal to one
        of them, which rules out the cyclic 2-face obstruction.
        """
        if need > len(pool):
            raise CaseNotCovered("not enough landing spots in the far ridge",
                                 trace=list(self.trace))
        if self.d == 5 and XRo:
            spread = any(_face_dist(P, Ro, x, y) == 3
                         for x in XRo for y in XRo if x < y)
            if not spread:
                far = [z for z in pool
                       if any(_face_dist(P, Ro, z, x) == 3 for x in XRo)]
                if far and need >= 1:
                    z0 = far[0]
                    return [z0] + [z for z in pool if z != z0][:need - 1]
        return pool[:need]

    def _must_link(self, face, epairs):
        try:
            return _face_link(self.P, face, epairs, trace=self.trace)
        except Unlinkable:
            raise CaseNotCovered("unexpected obstruction in a 3-cube ridge",
                                 trace=list(self.trace))

    # -- case 3: only the first pair meets F1 ---------------------------

    def case3(self):
        P, F1, s1, t1 = self.P, self.F1, self.s1, self.t1
        self.trace.append("star/case3")
        s2, t2 = self.rest[0]
        S12_facets = sorted((f for f in P.facets if s1 in f and s2 in f),
                            key=sorted)
        S12 = Complex.generated_by(P, S12_facets)
        G12_all = S12.graph()
        gamma_verts = S12.vertex_set() - F1
        a1_terms = sorted(self.X - {s1, t1})
        hat = {}
        route1 = {x: [x] for x in a1_terms if x in gamma_verts}
        outside = [x for x in a1_terms if x not in gamma_verts]
        if outside:
            resident = self.X & gamma_verts
            try:
                sys = disjoint_paths(self.A1g, set(outside),
                                     gamma_verts - resident, len(outside),
                                     forbidden=resident)
            except Cut as e:
                raise CaseNotCovered("antistar routing blocked",
                                     trace=list(self.trace) + [sorted(e.separator)])
            for p in sys:
                route1[p[0]] = list(p)
        for x in a1_terms:
            hat[x] = route1[x][-1]
        F12 = next(f for f in S12_facets if hat[t2] in f)
        if t1 in F12:
            raise CaseNotCovered("second facet meets the far terminal",
                                 trace=list(self.trace))
        # first pair: leave through the ridge of F1 away from F12
        inter = frozenset(F12) & frozenset(F1)
        R = next(r for r in P.ridges_of_facet(F1)
                 if inter <= r and s1 in r and t1 not in r)
        Ro = P.opposite_subface(F1, R)
        p1 = _face_path(P, Ro, P.project_in_face(F1, Ro, s1), t1)
        self.record(s1, t1, _chain([s1], p1))
        if len(S12_facets) == 1:
            epairs = [(hat[a], hat[b]) for a, b in self.rest]
            sub = _face_link(P, F12, epairs, avoid=[s1], trace=self.trace)
            for (a, b), p in zip(self.rest, sub):
                if p[0] != hat[a]:
                    p = p[::-1]
                self.record(a, b, _chain(route1[a], p, route1[b][::-1]))
            return
        # several facets around s1-s2: funnel strays through a far ridge cube
        A12verts = S12.vertex_set() - F1 - frozenset(F12)
        GA12 = _induced(G12_all, A12verts)
        U = next(u for u in P.ridges_of_facet(F12) if s1 in u and s2 in u)
        J12 = _other_facet(P, U, F12)
        UJ = P.opposite_subface(J12, U)
        C_UJ = set(UJ) - F1
        hatX = set(hat.values())
        blocked = {P.project_in_face(J12, UJ, v)
                   for v in (hatX | {s1}) & set(U)}
        strays = sorted(x for x in a1_terms if hat[x] in A12verts)
        W = [w for w in sorted(C_UJ - blocked)][:len(strays)]
        if len(W) < len(strays):
            raise CaseNotCovered("not enough landing spots off the far ridge",
                                 trace=list(self.trace))
        route2 = {x: [hat[x]] for x in a1_terms}
        if strays:
            try:
                sys = disjoint_paths(GA12, {hat[x] for x in strays}, set(W),
                                     len(strays))
            except Cut as e:
                raise CaseNotCovered("inner antistar routing blocked",
                                     trace=list(self.trace) + [sorted(e.separator)])
            back = {p[0]: p for p in sys}
            for x in strays:
                p = list(back[hat[x]])
                w = p[-1]
                route2[x] = p + [P.project_in_face(J12, U, w)]
        tilde = {x: route2[x][-1] for x in a1_terms}
        assert not {tilde[x] for x in strays} & (hatX | {s1})
        epairs = [(tilde[a], tilde[b]) for a, b in self.rest]
        sub = _face_link(P, F12, epairs, avoid=[s1], trace=self.trace)
        for (a, b), p in zip(self.rest, sub):
            if p[0] != tilde[a]:
                p = p[::-1]
            self.record(a, b, _chain(route1[a], route2[a], p,
                                     route2[b][::-1], route1[b][::-1]))

    # -- case 4: every terminal in F1 -----------------------------------

    def case4(self):
        if self.d == 5:
            if self.s1o == self.t1:
                self.case4_d5_antipodal()
            else:
                self.case4_d5()
            return
        if self.s1o not in self.X:
            self.case4_free()
        elif self.s1o == self.t1:
            self.case4_antipodal()
        else:
            self.case4_blocked()

    def case4_free(self):
        self.trace.append("star/case4-free")
        s1, t1 = self.s1, self.t1
        sub = _face_link(self.P, self.F1, self.rest, avoid=[s1],
                         trace=self.trace)
        hit = next((i for i, p in enumerate(sub) if t1 in p), None)
        if hit is None:
            p = self.a1_path(self.inj[s1], self.inj[t1])
            self.record_sub(self.rest, sub)
            self.record(s1, t1, _chain([s1], p, [t1]))
            return
        a, b = self.rest[hit]
        two = self.a1_2link([(self.inj[s1], self.inj[t1]),
                             (self.inj[a], self.inj[b])])
        self.record_sub([q for i, q in enumerate(self.rest) if i != hit],
                        [q for i, q in enumerate(sub) if i != hit])
        self.record(a, b, _chain([a], two[1], [b]))
        self.record(s1, t1, _chain([s1], two[0], [t1]))

    def case4_antipodal(self):
        self.trace.append("star/case4-antipodal")
        P, s1, t1 = self.P, self.s1, self.t1
        nbrs = [w for w in P.graph[t1] if w in self.F1]
        free = [w for w in nbrs if w not in self.X]
        t1F = min(free)
        sub = self.link_in_F1(self.rest)
        hit = next((i for i, p in enumerate(sub) if t1F in p), None)
        if hit is None:
            p = self.a1_path(self.inj[s1], self.inj[t1F])
            self.record_sub(self.rest, sub)
            self.record(s1, t1, _chain([s1], p, [t1F, t1]))
            return
        a, b = self.rest[hit]
        two = self.a1_2link([(self.inj[s1], self.inj[t1F]),
                             (self.inj[a], self.inj[b])])
        self.record_sub([q for i, q in enumerate(self.rest) if i != hit],
                        [q for i, q in enumerate(sub) if i != hit])
        self.record(a, b, _chain([a], two[1], [b]))
        self.record(s1, t1, _chain([s1], two[0], [t1F, t1]))

    def case4_blocked(self):
        self.trace.append("star/case4-blocked")
        P, s1, t1 = self.P, self.s1, self.t1
        i2 = next(i for i, p in enumerate(self.rest) if self.s1o in p)
        a, b = self.rest[i2]
        s2, t2 = (a, b) if a == self.s1o else (b, a)
        others = [p for i, p in enumerate(self.rest) if i != i2]
        nbrs = sorted(w for w in P.graph[s2] if w in self.F1)
        if t2 in nbrs:
            self.record(s2, t2, [s2, t2])
            sub = self.link_in_F1([(t1, t2)] + others)
            # the t1-t2 path only shields t1 and t2; it is discarded
            self.record_sub(others, sub[1:])
            p = self.a1_path(self.inj[s1], self.inj[t1])
            self.record(s1, t1, _chain([s1], p, [t1]))
            return
        s2F = min(w for w in nbrs if w not in self.X)
        lpairs = [(s2F, t2)] + others
        sub = self.link_in_F1(lpairs)
        hit = next((i for i, p in enumerate(sub) if t1 in p), None)
        if hit is None:
            p = self.a1_path(self.inj[s1], self.inj[t1])
            self.record(s1, t1, _chain([s1], p, [t1]))
            self.record(s2, t2, _chain([s2], self._orient(sub[0], s2F)))
            self.record_sub(others, sub[1:])
            return
        a, b = lpairs[hit]
        two = self.a1_2link([(self.inj[s1], self.inj[t1]),
                             (self.inj[a], self.inj[b])])
        self.record(s1, t1, _chain([s1], two[0], [t1]))
        if hit == 0:
            self.record(s2, t2, _chain([s2, s2F], two[1], [t2]))
            self.record_sub(others, sub[1:])
        else:
            self.record(a, b, _chain([a], two[1], [b]))
            self.record(s2, t2, _chain([s2], self._orient(sub[0], s2F)))
            self.record_sub([q for i, q in enumerate(others) if i != hit - 1],
                            [q for i, q in enumerate(sub[1:]) if i != hit - 1])

    @staticmethod
    def _orient(path, start):
        return path if path[0] == start else path[::-1]

    # -- case 4 at d = 5 -------------------------------------------------

    def _split_3face(self, anchor_a, anchor_b):
        """The 3-face of F1 holding both anchors, with its companions."""
        P, F1 = self.P, self.F1
        coords, j = P.embed_face(F1)
        agree = [i for i in range(j)
                 if ((coords[anchor_a] ^ coords[anchor_b]) >> i) & 1 == 0]
        axis = agree[0]
        lo, hi = _coord_split(P, F1, axis)
        R = lo if anchor_a in lo else hi
        RF = frozenset(F1) - R
        J1 = _other_facet(P, R, F1)
        RJ = P.opposite_subface(J1, R)
        return R, RF, J1, RJ

    def case4_d5(self):
        self.trace.append("star/case4-d5")
        P, s1, t1 = self.P, self.s1, self.t1
        R, RF, J1, RJ = self._split_3face(s1, t1)
        if self.X <= R:
            self._d5_all_in(R, RF, J1, RJ)
            return
        inR_pair = next((i for i, p in enumerate(self.rest)
                         if p[0] in R and p[1] in R), None)
        if inR_pair is not None:
            self._d5_pair_in_R(inR_pair, R, RF, J1, RJ)
            return
        inRF_pair = next((i for i, p in enumerate(self.rest)
                          if p[0] in RF and p[1] in RF), None)
        if inRF_pair is not None:
            self._d5_pair_in_RF(inRF_pair, R, RF, J1, RJ)
            return
        self._d5_split_pairs(R, RF, J1, RJ)

    def _d5_all_in(self, R, RF, J1, RJ):
        self.trace.append("star/case4-d5-all-in")
        P = self.P
        piRJ = lambda v: P.project_in_face(J1, RJ, v)
        piRF = lambda v: P.project_in_face(self.F1, RF, v)
        allp = self.pairs
        for i, j in ((0, 1), (0, 2), (1, 2)):
            epairs = [(piRJ(allp[m][0]), piRJ(allp[m][1])) for m in (i, j)]
            try:
                sub = _face_link(P, RJ, epairs, trace=self.trace)
            except Unlinkable:
                continue
            for m, p in zip((i, j), sub):
                a, b = allp[m]
                self.record(a, b, _chain([a], self._orient(p, piRJ(a)), [b]))
            c = ({0, 1, 2} - {i, j}).pop()
            a, b = allp[c]
            p = _face_path(P, RF, piRF(a), piRF(b))
            self.record(a, b, _chain([a], self._orient(p, piRF(a)), [b]))
            return
        raise CaseNotCovered("no non-cyclic pair selection in the 3-face",
                             trace=list(self.trace))

    def _d5_pair_in_R(self, i2, R, RF, J1, RJ):
        self.trace.append("star/case4-d5-pair-in-R")
        P, s1, t1 = self.P, self.s1, self.t1
        piRJ = lambda v: P.project_in_face(J1, RJ, v)
        piRF = lambda v: P.project_in_face(self.F1, RF, v)
        s2, t2 = self.rest[i2]
        i3 = 1 - i2
        s3, t3 = self.rest[i3]
        cands = [(s1, t1), (s2, t2)]
        pa = None
        for a, b in cands:
            try:
                p = _face_path(P, R, a, b, forbidden=self.X)
            except NoPath:
                continue
            pa = (a, b)
            self.record(a, b, p)
            break
        if pa is None:
            raise CaseNotCovered("both short pairs blocked in the 3-face",
                                 trace=list(self.trace))
        b_pair = cands[0] if pa == cands[1] else cands[1]
        a, b = b_pair
        p = _face_path(P, RJ, piRJ(a), piRJ(b))
        self.record(a, b, _chain([a], self._orient(p, piRJ(a)), [b]))
        e3 = lambda x: x if x in RF else piRF(x)
        p3 = _face_path(P, RF, e3(s3), e3(t3), forbidden=self.X)
        self.record(s3, t3, _chain([s3] if s3 in R else [],
                                   self._orient(p3, e3(s3)),
                                   [t3] if t3 in R else []))

    def _d5_pair_in_RF(self, i2, R, RF, J1, RJ):
        P, s1, t1 = self.P, self.s1, self.t1
        s2, t2 = self.rest[i2]
        i3 = 1 - i2
        p3 = self.rest[i3]
        if p3[0] in R or p3[1] in R:
            s3, t3 = p3 if p3[0] in R else p3[::-1]
            banned = self.X - {s3, t3}
            T3 = _short_hop(P, t3, R, None, banned, self.F1)
            if T3 is not None:
                self.trace.append("star/case4-d5-hop")
                t3r = T3[-1]
                if t3r == s3:
                    # the hop already closes the pair
                    self.record(s3, t3, T3[::-1])
                    sub = _face_link(P, J1, [(s1, t1)],
                                     avoid=[v for v in T3 if v in J1],
                                     trace=self.trace)
                    self.record(s1, t1, sub[0])
                else:
                    sub = _face_link(P, J1, [(s1, t1), (s3, t3r)],
                                     trace=self.trace)
                    self.record(s1, t1, sub[0])
                    self.record(s3, t3, _chain(self._orient(sub[1], s3),
                                               T3[::-1][1:]))
                p2 = _face_path(P, RF, s2, t2,
                                forbidden=(self.X | set(T3)) - {s2, t2})
                self.record(s2, t2, p2)
                return
            self.trace.append("star/case4-d5-adjacent")
            if t1 not in P.graph[s1]:
                raise CaseNotCovered("expected adjacent first pair",
                                     trace=list(self.trace))
            self.record(s1, t1, [s1, t1])
            self.record(s2, t2, _face_path(P, RF, s2, t2, forbidden=self.X))
            if s3 not in self.inj or t3 not in self.inj:
                raise CaseNotCovered("terminal with no antistar neighbour",
                                     trace=list(self.trace))
            mid = self.a1_path(self.inj[s3], self.inj[t3])
            self.record(s3, t3, _chain([s3], mid, [t3]))
            return
        # the last pair also lives in the far ridge
        self.trace.append("star/case4-d5-both-far")
        pairA, pairB = (s2, t2), tuple(p3)
        if self.s1o in pairB:
            pairA, pairB = pairB, pairA
        s2, t2 = pairA if pairA[1] != self.s1o else pairA[::-1]
        s3, t3 = pairB
        self.record(s1, t1, _face_path(P, R, s1, t1, forbidden=self.X))
        self.record(s2, t2, _face_path(P, RF, s2, t2, forbidden=self.X))
        mid = self.a1_path(self.inj[s3], self.inj[t3])
        self.record(s3, t3, _chain([s3], mid, [t3]))

    def _d5_split_pairs(self, R, RF, J1, RJ):
        self.trace.append("star/case4-d5-split")
        P, s1, t1 = self.P, self.s1, self.t1
        duo = []
        for a, b in self.rest:
            duo.append((a, b) if a in R else (b, a))
        (s2, t2), (s3, t3) = duo
        if t2 == self.s1o:
            (s2, t2), (s3, t3) = (s3, t3), (s2, t2)
        S3 = _short_hop(P, s3, RF, t3, self.X - {s3, t3}, self.F1)
        if S3 is None:
            alt = _short_hop(P, s2, RF, t2, self.X - {s2, t2}, self.F1)
            if alt is not None and t3 != self.s1o:
                (s2, t2), (s3, t3) = (s3, t3), (s2, t2)
                S3 = alt
        if S3 is not None:
            sh3 = S3[-1]
            mid = self.a1_path(self.inj[s2], self.inj[t2])
            self.record(s2, t2, _chain([s2], mid, [t2]))
            p3 = _face_path(P, RF, sh3, t3, forbidden=self.X | set(S3[1:-1]))
            self.record(s3, t3, _chain(S3, p3[1:] if len(p3) > 1 else []))
            forb = {s2, s3} | (set(S3) & set(R))
            self.record(s1, t1, _face_path(P, R, s1, t1, forbidden=forb))
            return
        self.trace.append("star/case4-d5-split-tight")
        s3p = self.inj[s3]
        if t3 != self.s1o:
            T3 = [t3, self.inj[t3]]
        else:
            u = min(w for w in P.graph[t3] if w in RF and w != t2)
            T3 = [t3, u, self.inj[u]]
        mid = self.a1_path(s3p, T3[-1])
        self.record(s3, t3, _chain([s3], mid, T3[::-1]))
        S2 = _short_hop(P, s2, RF, t2, (self.X | set(T3)) - {s2, t2}, self.F1)
        if S2 is None:
            raise CaseNotCovered("no short escape for the second pair",
                                 trace=list(self.trace))
        sh2 = S2[-1]
        p2 = _face_path(P, RF, sh2, t2,
                        forbidden=(self.X | set(T3) | set(S2[1:-1])) - {t2})
        self.record(s2, t2, _chain(S2, p2[1:] if len(p2) > 1 else []))
        forb = {s2, s3} | (set(S2) & set(R))
        self.record(s1, t1, _face_path(P, R, s1, t1, forbidden=forb))

    def case4_d5_antipodal(self):
        self.trace.append("star/case4-d5-antipodal")
        P, s1, t1 = self.P, self.s1, self.t1
        free = [w for w in sorted(P.graph[t1]) if w in self.F1
                and w not in self.X]
        t1p = min(free)
        R, RF, J1, RJ = self._split_3face(s1, t1p)
        piRJ = lambda v: P.project_in_face(J1, RJ, v)
        piRF = lambda v: P.project_in_face(self.F1, RF, v)
        inR = next((i for i, p in enumerate(self.rest)
                    if p[0] in R and p[1] in R), None)
        if inR is not None:
            self.trace.append("star/case4-d5-anti-ridge")
            s2, t2 = self.rest[inR]
            s3, t3 = self.rest[1 - inR]
            epairs = [(piRJ(s1), piRJ(t1p)), (piRJ(s2), piRJ(t2))]
            sub = self._must_link(RJ, epairs)
            self.record(s1, t1, _chain([s1], self._orient(sub[0], piRJ(s1)),
                                       [t1p, t1]))
            self.record(s2, t2, _chain([s2], self._orient(sub[1], piRJ(s2)),
                                       [t2]))
            e3 = lambda x: x if x in RF else piRF(x)
            if e3(s3) in self.X - {s3, t3} or e3(t3) in self.X - {s3, t3}:
                raise CaseNotCovered("blocked projection for the last pair",
                                     trace=list(self.trace))
            p3 = _face_path(P, RF, e3(s3), e3(t3), forbidden=self.X)
            self.record(s3, t3, _chain([s3] if s3 in R else [],
                                       self._orient(p3, e3(s3)),
                                       [t3] if t3 in R else []))
            return
        inRF = next((i for i, p in enumerate(self.rest)
                     if p[0] in RF and p[1] in RF), None)
        if inRF is not None:
            self.trace.append("star/case4-d5-anti-far")
            cands = [self.rest[inRF]]
            other = self.rest[1 - inRF]
            if other[0] in RF and other[1] in RF:
                cands.append(other)
            done = None
            for a, b in cands:
                try:
                    p = _face_path(P, RF, a, b, forbidden=self.X)
                except NoPath:
                    continue
                done = (a, b)
                self.record(a, b, p)
                break
            if done is None:
                raise CaseNotCovered("far-ridge pair blocked",
                                     trace=list(self.trace))
            s3, t3 = next(q for q in self.rest if set(q) != set(done))
            mid = self.a1_path(self.inj[s3], self.inj[t3])
            self.record(s3, t3, _chain([s3], mid, [t3]))
            p1 = _face_path(P, R, s1, t1p, forbidden=self.X)
            self.record(s1, t1, _chain(p1, [t1]))
            return
        self.trace.append("star/case4-d5-anti-split")
        duo = []
        for a, b in self.rest:
            duo.append((a, b) if a in R else (b, a))
        (s2, t2), (s3, t3) = duo
        S3 = _short_hop(P, s3, RF, t3, (self.X | {t1p}) - {s3, t3}, self.F1)
        if S3 is None:
            alt = _short_hop(P, s2, RF, t2, (self.X | {t1p}) - {s2, t2}, self.F1)
            if alt is None:
                raise CaseNotCovered("no short escape into the far ridge",
                                     trace=list(self.trace))
            (s2, t2), (s3, t3) = (s3, t3), (s2, t2)
            S3 = alt
        sh3 = S3[-1]
        p3 = _face_path(P, RF, sh3, t3, forbidden=self.X | set(S3[1:-1]))
        self.record(s3, t3, _chain(S3, p3[1:] if len(p3) > 1 else []))
        mid = self.a1_path(self.inj[s2], self.inj[t2])
        self.record(s2, t2, _chain([s2], mid, [t2]))
        forb = {s2, s3} | (set(S3) & set(R))
        p1 = _face_path(P, R, s1, t1p, forbidden=forb)
        self.record(s1, t1, _chain(p1, [t1]))


def _star_solve(P, s1, pairs, trace):
    """Paths aligned with `pairs`, or Unlinkable with a dF-witness."""
    witness = detect_config_dF(P, s1, pairs)
    if witness is not None:
        trace.append("star/config-dF")
        raise Unlinkable(witness)
    solver = _StarSolver(P, s1, pairs, trace)
    paths = solver.solve()
    by_pair = {frozenset(p): q for p, q in zip(solver.pairs, paths)}
    out = []
    for a, b in pairs:
        p = by_pair[frozenset((a, b))]
        out.append(p if p[0] == a else p[::-1])
    return out


def solve_star(P, s1, pairs) -> LinkageCertificate:
    """Linkage for (d+1)/2 pairs inside the star of s1; s1 is a terminal."""
    pairs = check_pairing(pairs)
    label = lambda v: P.labels[v]
    trace: list = []
    instance = {
        "host": f"star({label(s1)}) in {P.dim}-polytope",
        "pairs": [[label(s), label(t)] for s, t in pairs],
        "avoid": [],
    }
    try:
        paths = _star_solve(P, s1, pairs, trace)
    except Unlinkable as e:
        return LinkageCertificate(instance=instance, obstruction=e.witness,
                                  trace=trace, valid=True)
    S1g = star_complex(P, s1).graph()
    ok, msg = validate_linkage(S1g, pairs, paths)
    assert ok, msg
    return LinkageCertificate(instance=instance, paths=paths, trace=trace,
                              valid=True)
