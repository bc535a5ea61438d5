"""Combinatorics of the hypercube Q_n.

Vertices are the integers ``0 .. 2**n - 1`` read as bit masks; direction ``i``
flips bit ``2**i``.  Edges are stored canonically as ``(base, direction)`` with
bit ``direction`` of ``base`` cleared, and are enumerated direction-major,
base-minor.  The highest direction ``n - 1`` plays the role of the "first
coordinate" when a cube is split into a bottom and a top half, so the vertex
numbers 0..7 of the usual Q_3 drawing load unchanged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import comb, factorial

MAX_DIM = 10
MAX_GROUP_DIM = 4


class CubeError(ValueError):
    """Raised for out-of-range dimensions, vertices or directions."""


def insert_bit(x: int, d: int, bit: int) -> int:
    """Insert ``bit`` at position ``d`` of ``x``, shifting higher bits up."""
    low = x & ((1 << d) - 1)
    return ((x >> d) << (d + 1)) | (bit << d) | low


def remove_bit(x: int, d: int) -> int:
    """Drop bit ``d`` of ``x``, shifting higher bits down."""
    low = x & ((1 << d) - 1)
    return ((x >> (d + 1)) << d) | low


def spread_bits(x: int, dirs) -> int:
    """Place bit ``k`` of ``x`` at position ``dirs[k]``."""
    out = 0
    for k, d in enumerate(dirs):
        if (x >> k) & 1:
            out |= 1 << d
    return out


@dataclass(frozen=True, order=True)
class Edge:
    """An edge of Q_n in canonical form."""

    base: int
    direction: int

    def __post_init__(self):
        if self.base < 0 or self.direction < 0:
            raise CubeError(f"negative edge coordinates: {self.base}, {self.direction}")
        if (self.base >> self.direction) & 1:
            raise CubeError(
                f"edge base {self.base} has bit {self.direction} set; not canonical"
            )

    @classmethod
    def between(cls, u: int, v: int) -> Edge:
        """The edge joining two vertices at Hamming distance one."""
        x = u ^ v
        if u < 0 or v < 0 or x == 0 or x & (x - 1):
            raise CubeError(f"vertices {u} and {v} are not adjacent (Hamming distance != 1)")
        d = x.bit_length() - 1
        return cls(min(u, v), d)

    @property
    def endpoints(self) -> tuple[int, int]:
        return self.base, self.base | (1 << self.direction)

    def __str__(self) -> str:
        a, b = self.endpoints
        return f"{a}-{b}"


@dataclass(frozen=True)
class TwoFace:
    """A 2-dimensional subcube spanned by directions ``dirs[0] < dirs[1]``."""

    base: int
    dirs: tuple[int, int]

    @property
    def vertices(self) -> tuple[int, int, int, int]:
        i, j = self.dirs
        b = self.base
        return b, b | (1 << i), b | (1 << j), b | (1 << i) | (1 << j)

    @property
    def edges(self) -> tuple[Edge, Edge, Edge, Edge]:
        """The two ``dirs[0]`` edges followed by the two ``dirs[1]`` edges."""
        i, j = self.dirs
        b = self.base
        return (
            Edge(b, i),
            Edge(b | (1 << j), i),
            Edge(b, j),
            Edge(b | (1 << i), j),
        )


@dataclass(frozen=True)
class Subcube:
    """The face of Q_n where every direction outside ``free_dirs`` is fixed by ``base``."""

    n: int
    free_dirs: tuple[int, ...]
    base: int = 0

    def __post_init__(self):
        dirs = tuple(self.free_dirs)
        if list(dirs) != sorted(set(dirs)):
            raise CubeError(f"free directions must be strictly increasing: {dirs}")
        if any(d < 0 or d >= self.n for d in dirs):
            raise CubeError(f"free directions {dirs} out of range for n={self.n}")
        if not dirs:
            raise CubeError("a subcube needs at least one free direction")
        if self.base < 0 or self.base >= (1 << self.n):
            raise CubeError(f"base {self.base} out of range for n={self.n}")
        mask = sum(1 << d for d in dirs)
        if self.base & mask:
            raise CubeError(f"base {self.base} must have zero bits on free directions {dirs}")
        object.__setattr__(self, "free_dirs", dirs)

    @property
    def m(self) -> int:
        return len(self.free_dirs)

    def vertex(self, local: int) -> int:
        """Map a vertex of Q_m to the corresponding vertex of Q_n."""
        return self.base | spread_bits(local, self.free_dirs)

    def vertices(self) -> list[int]:
        return [self.vertex(x) for x in range(1 << self.m)]

    def edge(self, local: Edge) -> Edge:
        return Edge(self.vertex(local.base), self.free_dirs[local.direction])


@dataclass(frozen=True)
class Hypercube:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not 1 <= self.n <= MAX_DIM:
            raise CubeError(f"dimension must be in 1..{MAX_DIM}, got {self.n!r}")

    @property
    def num_vertices(self) -> int:
        return 1 << self.n

    @property
    def num_edges(self) -> int:
        return self.n << (self.n - 1)

    @property
    def num_two_faces(self) -> int:
        return comb(self.n, 2) << (self.n - 2) if self.n >= 2 else 0

    def vertices(self) -> range:
        return range(self.num_vertices)

    @cached_property
    def _edges(self) -> tuple[Edge, ...]:
        half = 1 << (self.n - 1)
        return tuple(
            Edge(insert_bit(k, d, 0), d) for d in range(self.n) for k in range(half)
        )

    def edges(self) -> list[Edge]:
        """All edges, direction-major and base-minor."""
        return list(self._edges)

    def edge_index(self, e: Edge) -> int:
        self._check_direction(e.direction)
        self._check_vertex(e.base)
        return (e.direction << (self.n - 1)) | remove_bit(e.base, e.direction)

    def edge_at(self, index: int) -> Edge:
        return self._edges[index]

    def incident_edge(self, vertex: int, direction: int) -> Edge:
        self._check_vertex(vertex)
        self._check_direction(direction)
        return Edge(vertex & ~(1 << direction), direction)

    def incident_index(self, vertex: int, direction: int) -> int:
        return (direction << (self.n - 1)) | remove_bit(vertex, direction)

    def two_faces(self) -> list[TwoFace]:
        faces = []
        for i, j in itertools.combinations(range(self.n), 2):
            for k in range(1 << (self.n - 2)):
                base = insert_bit(insert_bit(k, i, 0), j, 0)
                faces.append(TwoFace(base, (i, j)))
        return faces

    def split(self, direction: int) -> tuple[Subcube, Subcube]:
        """Bottom and top copies of Q_{n-1} separated by ``direction``."""
        self._check_direction(direction)
        if self.n < 2:
            raise CubeError("cannot split Q_1 into two copies of Q_0")
        free = tuple(d for d in range(self.n) if d != direction)
        return Subcube(self.n, free, 0), Subcube(self.n, free, 1 << direction)

    def subcubes(self, m: int) -> list[Subcube]:
        if not 1 <= m <= self.n:
            raise CubeError(f"subcube dimension {m} out of range for n={self.n}")
        out = []
        for free in itertools.combinations(range(self.n), m):
            fixed = [d for d in range(self.n) if d not in free]
            for bits in range(1 << len(fixed)):
                out.append(Subcube(self.n, free, spread_bits(bits, fixed)))
        return out

    def automorphisms(self) -> list[CubeAutomorphism]:
        """The full symmetry group (order ``2**n * n!``), only for n <= 4."""
        if self.n > MAX_GROUP_DIM:
            raise CubeError(f"automorphism group is only enumerated for n <= {MAX_GROUP_DIM}")
        return [
            CubeAutomorphism(perm, flips)
            for perm in itertools.permutations(range(self.n))
            for flips in range(1 << self.n)
        ]

    def _check_vertex(self, v: int):
        if not 0 <= v < self.num_vertices:
            raise CubeError(f"vertex {v} out of range for n={self.n}")

    def _check_direction(self, d: int):
        if not 0 <= d < self.n:
            raise CubeError(f"direction {d} out of range for n={self.n}")


@dataclass(frozen=True)
class CubeAutomorphism:
    """``v -> P(v) XOR flips`` where ``P`` moves bit ``i`` to bit ``perm[i]``."""

    perm: tuple[int, ...]
    flips: int = 0

    def __post_init__(self):
        perm = tuple(self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise CubeError(f"not a permutation: {perm}")
        if not 0 <= self.flips < (1 << len(perm)):
            raise CubeError(f"flip mask {self.flips} out of range")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, n: int) -> CubeAutomorphism:
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.perm)

    def vertex(self, v: int) -> int:
        out = 0
        for i, p in enumerate(self.perm):
            if (v >> i) & 1:
                out |= 1 << p
        return out ^ self.flips

    def edge(self, e: Edge) -> Edge:
        a, b = e.endpoints
        if b >= (1 << self.n):
            raise CubeError(f"edge {e} does not belong to Q_{self.n}")
        return Edge.between(self.vertex(a), self.vertex(b))

    def compose(self, other: CubeAutomorphism) -> CubeAutomorphism:
        """``self`` after ``other``."""
        if other.n != self.n:
            raise CubeError("dimension mismatch in composition")
        perm = tuple(self.perm[other.perm[i]] for i in range(self.n))
        return CubeAutomorphism(perm, self.vertex(other.flips))

    def inverse(self) -> CubeAutomorphism:
        inv = [0] * self.n
        for i, p in enumerate(self.perm):
            inv[p] = i
        g = CubeAutomorphism(tuple(inv))
        return CubeAutomorphism(g.perm, g.vertex(self.flips))


def apply_automorphism(g: CubeAutomorphism, e: Edge) -> Edge:
    return g.edge(e)


def group_order(n: int) -> int:
    return (1 << n) * factorial(n)


@lru_cache(maxsize=None)
def edge_permutations(n: int):
    """Array ``P`` with ``P[g, j] = index(g^-1(edge j))`` for every automorphism ``g``.

    Recoloring by ``g`` is then ``colors[P[g]]``.
    """
    import numpy as np

    cube = Hypercube(n)
    edges = cube.edges()
    group = cube.automorphisms()
    out = np.empty((len(group), len(edges)), dtype=np.int64)
    for gi, g in enumerate(group):
        for k, e in enumerate(edges):
            out[gi, cube.edge_index(g.edge(e))] = k
    out.setflags(write=False)
    return out
