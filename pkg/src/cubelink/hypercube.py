"""Bit-level representation of the d-cube Q_d.

Vertices are plain ints interpreted as little-endian bit vectors: coordinate i
of vertex v is ``(v >> i) & 1``.  Two vertices are adjacent iff their XOR is a
power of two.  Faces are (fixed_mask, fixed_values) pairs; a vertex belongs to
a face iff it agrees with fixed_values on every fixed coordinate.

Serialization: a vertex renders as a fixed-width binary string with coordinate
0 leftmost, e.g. vertex 1 in Q_3 is "100".
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

MAX_DIM = 30


def _check_dim(d: int) -> None:
    if not 1 <= d <= MAX_DIM:
        raise ValueError(f"dimension {d} out of range [1, {MAX_DIM}]")


def vertex_to_str(v: int, d: int) -> str:
    """Fixed-width binary string, coordinate 0 leftmost."""
    return "".join(str((v >> i) & 1) for i in range(d))


def vertex_from_str(s: str) -> int:
    if not s or any(c not in "01" for c in s):
        raise ValueError(f"bad vertex string {s!r}")
    return sum((1 << i) for i, c in enumerate(s) if c == "1")


def popcount(x: int) -> int:
    return x.bit_count()


def dist(u: int, v: int) -> int:
    """Hamming distance; equals graph distance in Q_d."""
    return (u ^ v).bit_count()


@dataclass(frozen=True, order=True)
class CubeFace:
    """A face of Q_d: coordinates in fixed_mask are frozen to fixed_values.

    Ordering is lexicographic on (mask, values), giving canonical keys.
    """

    d: int
    fixed_mask: int
    fixed_values: int

    def __post_init__(self):
        _check_dim(self.d)
        full = (1 << self.d) - 1
        if self.fixed_mask & ~full:
            raise ValueError("fixed_mask outside dimension")
        if self.fixed_values & ~self.fixed_mask:
            # keep values meaningful only on the mask so equality is canonical
            object.__setattr__(self, "fixed_values", self.fixed_values & self.fixed_mask)

    @property
    def dim(self) -> int:
        return self.d - self.fixed_mask.bit_count()

    @property
    def free_mask(self) -> int:
        return ((1 << self.d) - 1) & ~self.fixed_mask

    def contains(self, v: int) -> bool:
        return (v & self.fixed_mask) == self.fixed_values

    def vertices(self) -> list[int]:
        free = [i for i in range(self.d) if not (self.fixed_mask >> i) & 1]
        out = []
        for bits in range(1 << len(free)):
            v = self.fixed_values
            for j, i in enumerate(free):
                if (bits >> j) & 1:
                    v |= 1 << i
            out.append(v)
        return out

    def to_json(self) -> dict:
        return {
            "mask": vertex_to_str(self.fixed_mask, self.d),
            "values": vertex_to_str(self.fixed_values, self.d),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CubeFace":
        mask = obj["mask"]
        return cls(len(mask), vertex_from_str(mask), vertex_from_str(obj["values"]))


def whole_cube(d: int) -> CubeFace:
    _check_dim(d)
    return CubeFace(d, 0, 0)


def facet(d: int, axis: int, value: int) -> CubeFace:
    """The facet {x_axis = value} of Q_d."""
    _check_dim(d)
    if not 0 <= axis < d:
        raise ValueError(f"axis {axis} out of range")
    return CubeFace(d, 1 << axis, value << axis)


def opposite_vertex(v: int, K: CubeFace) -> int:
    """The vertex of K at distance dim(K) from v (complement on free coords)."""
    if not K.contains(v):
        raise ValueError("vertex not in face")
    return v ^ K.free_mask


def opposite_facet(F: CubeFace) -> CubeFace:
    """F^o: same axis, flipped value.  Requires F to be a facet."""
    if F.fixed_mask.bit_count() != 1:
        raise ValueError("opposite_facet requires a facet (one fixed coordinate)")
    return CubeFace(F.d, F.fixed_mask, F.fixed_values ^ F.fixed_mask)


def opposite_face(K: CubeFace) -> CubeFace:
    """Flip every fixed coordinate; for facets this is opposite_facet."""
    return CubeFace(K.d, K.fixed_mask, K.fixed_values ^ K.fixed_mask)


def project(x, F_target: CubeFace):
    """Projection onto F_target of an opposite facet pair.

    A vertex of the facet opposite F_target maps to its unique neighbour in
    F_target; a vertex already in F_target maps to itself.  Faces and vertex
    collections map element-wise.
    """
    if F_target.fixed_mask.bit_count() != 1:
        raise ValueError("projection target must be a facet")
    axis_bit = F_target.fixed_mask
    value = F_target.fixed_values
    if isinstance(x, int):
        return (x & ~axis_bit) | value
    if isinstance(x, CubeFace):
        if not (x.fixed_mask & axis_bit):
            raise ValueError("face straddles the opposite facet pair")
        return CubeFace(x.d, x.fixed_mask, (x.fixed_values & ~axis_bit) | value)
    return type(x)(project(v, F_target) for v in x)


def smallest_face(d: int, S) -> CubeFace:
    """The inclusion-minimal face of Q_d containing the vertex set S."""
    S = list(S)
    if not S:
        raise ValueError("empty vertex set")
    _check_dim(d)
    ones = S[0]
    zeros = ~S[0]
    for v in S[1:]:
        ones &= v
        zeros &= ~v
    full = (1 << d) - 1
    mask = (ones | zeros) & full
    return CubeFace(d, mask, ones & mask)


def associated_pairs(d: int, Z) -> set[int]:
    """Axes a such that the subgraph induced by Z has an edge in direction a.

    Equivalently: the opposite facet pair along axis a is associated with Z.
    Always at most |Z| - 1 axes (spanning-forest bound).
    """
    Z = set(Z)
    if not Z:
        raise ValueError("empty vertex set")
    out = set()
    for a in range(d):
        bit = 1 << a
        if any((z ^ bit) in Z for z in Z):
            out.add(a)
    return out


def find_unassociated_pair(d: int, Z) -> int:
    """Lowest axis whose opposite facet pair is not associated with Z.

    Exists whenever |Z| <= d by the association bound.
    """
    assoc = associated_pairs(d, Z)
    for a in range(d):
        if a not in assoc:
            return a
    raise ValueError(f"all {d} directions associated with Z (|Z|={len(list(Z))})")


@lru_cache(maxsize=None)
def cube_graph(d: int) -> dict[int, tuple[int, ...]]:
    """Adjacency of Q_d with neighbours in increasing order."""
    _check_dim(d)
    return {
        v: tuple(sorted(v ^ (1 << i) for i in range(d)))
        for v in range(1 << d)
    }


def face_graph(K: CubeFace) -> dict[int, tuple[int, ...]]:
    """Adjacency of the subgraph of Q_d induced by a face."""
    verts = K.vertices()
    free = [i for i in range(K.d) if (K.free_mask >> i) & 1]
    return {v: tuple(sorted(v ^ (1 << i) for i in free)) for v in verts}


def all_faces(d: int, dim: int) -> list[CubeFace]:
    """All faces of Q_d of a given dimension, in canonical order."""
    _check_dim(d)
    if not 0 <= dim <= d:
        raise ValueError("face dimension out of range")
    out = []
    for fixed in combinations(range(d), d - dim):
        mask = sum(1 << i for i in fixed)
        for bits in range(1 << len(fixed)):
            values = 0
            for j, i in enumerate(fixed):
                if (bits >> j) & 1:
                    values |= 1 << i
            out.append(CubeFace(d, mask, values))
    return sorted(out)
