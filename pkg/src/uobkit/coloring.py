"""Edge colorings of Q_n and the combinatorial predicates on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from .cube import MAX_GROUP_DIM, CubeError, Edge, Hypercube, Subcube, edge_permutations


class ColoringError(ValueError):
    """Malformed coloring or a violated precondition (e.g. not admissible)."""


def normalize_word(colors: Iterable[int]) -> tuple[int, ...]:
    """Rename colors by first occurrence (restricted-growth form)."""
    seen: dict[int, int] = {}
    out = []
    for c in colors:
        if c not in seen:
            seen[c] = len(seen)
        out.append(seen[c])
    return tuple(out)


@dataclass(frozen=True)
class EdgeColoring:
    """Total map from the edges of Q_n to integer color ids.

    ``colors[k]`` is the color of ``Hypercube(n).edge_at(k)``.
    """

    n: int
    colors: tuple[int, ...]

    def __post_init__(self):
        cube = Hypercube(self.n)
        colors = tuple(int(c) for c in self.colors)
        if len(colors) != cube.num_edges:
            raise ColoringError(
                f"Q_{self.n} has {cube.num_edges} edges, got {len(colors)} colors"
            )
        if any(c < 0 for c in colors):
            raise ColoringError("color ids must be nonnegative")
        object.__setattr__(self, "colors", colors)

    @classmethod
    def from_edge_map(cls, n: int, mapping: Mapping) -> EdgeColoring:
        """Build from ``{Edge or (u, v): color}``; every edge must appear once."""
        cube = Hypercube(n)
        out: list[Optional[int]] = [None] * cube.num_edges
        for key, color in mapping.items():
            e = key if isinstance(key, Edge) else Edge.between(*key)
            k = cube.edge_index(e)
            if out[k] is not None:
                raise ColoringError(f"edge {e} colored twice")
            out[k] = color
        missing = [str(cube.edge_at(k)) for k, c in enumerate(out) if c is None]
        if missing:
            raise ColoringError(f"uncolored edges: {', '.join(missing)}")
        return cls(n, tuple(out))

    @classmethod
    def from_function(cls, n: int, f: Callable[[Edge], int]) -> EdgeColoring:
        return cls(n, tuple(f(e) for e in Hypercube(n).edges()))

    @property
    def cube(self) -> Hypercube:
        return Hypercube(self.n)

    def color_of(self, e: Edge) -> int:
        return self.colors[self.cube.edge_index(e)]

    def vertex_tuple(self, v: int) -> tuple[int, ...]:
        """Colors of the ``n`` edges at ``v``, indexed by direction."""
        return tuple(self.table[v])

    @cached_property
    def table(self) -> np.ndarray:
        """``table[v, d]`` is the color of the direction-``d`` edge at ``v``."""
        n = self.n
        v = np.arange(1 << n)
        idx = np.empty((1 << n, n), dtype=np.int64)
        for d in range(n):
            low = v & ((1 << d) - 1)
            idx[:, d] = (d << (n - 1)) | ((v >> (d + 1)) << d) | low
        t = np.asarray(self.colors, dtype=np.int64)[idx]
        t.setflags(write=False)
        return t

    def normalized(self) -> EdgeColoring:
        return EdgeColoring(self.n, normalize_word(self.colors))

    def classes(self) -> dict[int, list[Edge]]:
        out: dict[int, list[Edge]] = {}
        for e, c in zip(self.cube.edges(), self.colors):
            out.setdefault(c, []).append(e)
        return out

    def direction_word(self, d: int) -> tuple[int, ...]:
        half = 1 << (self.n - 1)
        return self.colors[d * half:(d + 1) * half]

    def __str__(self) -> str:
        parts = []
        for c, edges in sorted(self.classes().items()):
            parts.append(f"{c}: " + " ".join(str(e) for e in edges))
        return f"Q_{self.n} [" + "; ".join(parts) + "]"


@dataclass(frozen=True)
class ColorForest:
    edges: tuple[Edge, ...]

    def is_acyclic(self) -> bool:
        parent: dict[int, int] = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            a, b = (find(v) for v in e.endpoints)
            if a == b:
                return False
            parent[a] = b
        return True

    def vertices(self) -> set[int]:
        return {v for e in self.edges for v in e.endpoints}

    def is_spanning_tree(self, n: int) -> bool:
        return (
            self.is_acyclic()
            and len(self.edges) == (1 << n) - 1
            and self.vertices() == set(range(1 << n))
        )


@dataclass(frozen=True)
class RefinementWitness:
    """An admissible strict refinement ``finer`` of a coloring.

    ``merged_from[c]`` is the input color that finer color ``c`` merges back to.
    """

    finer: EdgeColoring
    merged_from: dict = field(hash=False)


# -- predicates ---------------------------------------------------------------


def is_admissible(c: EdgeColoring) -> bool:
    """Every vertex pair differs in some direction whose two incident edges share a color."""
    n = c.n
    v = np.arange(1 << n)
    xor = v[:, None] ^ v[None, :]
    ok = np.eye(1 << n, dtype=bool)
    t = c.table
    for d in range(n):
        col = t[:, d]
        ok |= (((xor >> d) & 1) == 1) & (col[:, None] == col[None, :])
    return bool(ok.all())


def is_two_face_admissible(c: EdgeColoring) -> bool:
    if c.n < 2:
        raise ColoringError("2-face admissibility needs n >= 2")
    for a, b, x, y in _face_quads(c.n):
        if c.colors[a] != c.colors[b] and c.colors[x] != c.colors[y]:
            return False
    return True


@lru_cache(maxsize=None)
def _face_quads(n: int) -> tuple[tuple[int, int, int, int], ...]:
    cube = Hypercube(n)
    return tuple(
        tuple(cube.edge_index(e) for e in f.edges) for f in cube.two_faces()
    )


def require_admissible(c: EdgeColoring):
    if not is_admissible(c):
        raise ColoringError("coloring is not admissible")


def color_count(c: EdgeColoring) -> int:
    return len(set(c.colors))


def direction_classes(c: EdgeColoring) -> list[set[int]]:
    return [set(c.direction_word(d)) for d in range(c.n)]


def has_disjoint_directions(c: EdgeColoring) -> bool:
    seen: set[int] = set()
    for palette in direction_classes(c):
        if palette & seen:
            return False
        seen |= palette
    return True


def separate_directions(c: EdgeColoring) -> EdgeColoring:
    require_admissible(c)
    half = 1 << (c.n - 1)
    pairs = [(k // half, col) for k, col in enumerate(c.colors)]
    return EdgeColoring(c.n, normalize_word(pairs))


def precedes(c1: EdgeColoring, c2: EdgeColoring) -> bool:
    """True if ``c1`` is obtained from ``c2`` by merging color classes."""
    if c1.n != c2.n:
        raise ColoringError("colorings of different dimensions")
    merge: dict[int, int] = {}
    for a, b in zip(c1.colors, c2.colors):
        if merge.setdefault(b, a) != a:
            return False
    return True


def same_up_to_renaming(c1: EdgeColoring, c2: EdgeColoring) -> bool:
    return c1.n == c2.n and normalize_word(c1.colors) == normalize_word(c2.colors)


def uniform_direction(c: EdgeColoring) -> Optional[int]:
    for d in range(c.n):
        if len(set(c.direction_word(d))) == 1:
            return d
    return None


# -- refinement search ----------------------------------------------------------


@lru_cache(maxsize=None)
def _pair_candidates(n: int):
    """For each non-adjacent vertex pair, the edge-index pairs that could witness it."""
    cube = Hypercube(n)
    out = []
    for a in range(1 << n):
        for b in range(a + 1, 1 << n):
            x = a ^ b
            if x & (x - 1) == 0:
                continue
            out.append(tuple(
                (cube.incident_index(a, d), cube.incident_index(b, d))
                for d in range(n) if (x >> d) & 1
            ))
    return tuple(out)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def find_refinement(c: EdgeColoring) -> Optional[RefinementWitness]:
    """An admissible coloring with more colors that coarsens back to ``c``, or None if maximal.

    Merging classes never destroys a witness, so a strict refinement exists iff
    some single class can be split in two.  For each class, vertex pairs whose
    only witnesses lie inside it constrain the split: a lone witness pins its
    two edges to the same side (union-find), several witnesses need at least one
    pair kept together (checked by backtracking over the union-find components).
    Classes are tried in order of their first edge; the first split found wins.
    """
    require_admissible(c)
    col = normalize_word(c.colors)
    clauses_by_color: dict[int, list[tuple[tuple[int, int], ...]]] = {}
    for cands in _pair_candidates(c.n):
        wit = [(e1, e2) for e1, e2 in cands if col[e1] == col[e2]]
        colors = {col[e1] for e1, _ in wit}
        if len(colors) == 1:
            clauses_by_color.setdefault(colors.pop(), []).append(tuple(wit))

    for k in range(max(col) + 1):
        members = [i for i, x in enumerate(col) if x == k]
        if len(members) < 2:
            continue
        side = _split_class(members, clauses_by_color.get(k, []))
        if side is None:
            continue
        fresh = max(col) + 1
        finer = tuple(fresh if side.get(i) else x for i, x in enumerate(col))
        merged = {x: x for x in set(col)}
        merged[fresh] = k
        return RefinementWitness(EdgeColoring(c.n, finer), merged)
    return None


def _split_class(members, clauses) -> Optional[dict[int, int]]:
    uf = _UnionFind(members)
    multi = []
    for wit in clauses:
        if len(wit) == 1:
            uf.union(*wit[0])
        else:
            multi.append(wit)
    roots = sorted({uf.find(i) for i in members})
    if len(roots) < 2:
        return None
    pos = {r: i for i, r in enumerate(roots)}
    comp_clauses = []
    for wit in multi:
        pairs = {tuple(sorted((pos[uf.find(a)], pos[uf.find(b)]))) for a, b in wit}
        if any(p == q for p, q in pairs):
            continue
        comp_clauses.append(tuple(sorted(pairs)))
    # a clause is checkable once its largest component index is assigned
    by_last: dict[int, list] = {}
    for cl in comp_clauses:
        by_last.setdefault(max(q for _, q in cl), []).append(cl)

    m = len(roots)
    assign = [0] * m

    def ok_at(i):
        return all(any(assign[p] == assign[q] for p, q in cl) for cl in by_last.get(i, ()))

    def search(i, any_one):
        if i == m:
            return any_one
        for s in (0, 1):
            assign[i] = s
            if ok_at(i) and search(i + 1, any_one or s == 1):
                return True
        return False

    # component 0 stays on side 0
    if not ok_at(0) or not search(1, False):
        return None
    return {i: assign[pos[uf.find(i)]] for i in members}


def is_maximal(c: EdgeColoring) -> bool:
    return find_refinement(c) is None


# -- structure --------------------------------------------------------------------


def restrict_to_subcube(c: EdgeColoring, sub: Subcube) -> EdgeColoring:
    """Inherited coloring of a subcube, with free directions renumbered 0..m-1."""
    if sub.n != c.n:
        raise CubeError(f"subcube of Q_{sub.n} applied to a coloring of Q_{c.n}")
    small = Hypercube(sub.m)
    return EdgeColoring(
        sub.m, normalize_word(c.color_of(sub.edge(e)) for e in small.edges())
    )


def extract_forest(c: EdgeColoring) -> ColorForest:
    """An acyclic edge set carrying every color exactly once.

    Split along the top free direction, recurse into both halves, drop from the
    top forest every edge whose color the bottom forest already has, and add one
    vertical edge for each color still missing.
    """
    require_admissible(c)
    cube = c.cube

    def forest(sub: Subcube) -> list[Edge]:
        if sub.m == 1:
            return [sub.edge(Edge(0, 0))]
        top_dir = sub.free_dirs[-1]
        rest = sub.free_dirs[:-1]
        bottom = forest(Subcube(c.n, rest, sub.base))
        top = forest(Subcube(c.n, rest, sub.base | (1 << top_dir)))
        have = {c.color_of(e) for e in bottom}
        top = [e for e in top if c.color_of(e) not in have]
        have |= {c.color_of(e) for e in top}
        vertical = []
        for v in Subcube(c.n, rest, sub.base).vertices():
            e = Edge(v, top_dir)
            col = c.color_of(e)
            if col not in have:
                have.add(col)
                vertical.append(e)
        return bottom + top + vertical

    edges = forest(Subcube(c.n, tuple(range(c.n)), 0))
    return ColorForest(tuple(sorted(edges, key=cube.edge_index)))


def is_max_family(c: EdgeColoring) -> bool:
    """Recognizer for colorings built by the fresh-color splitting recursion.

    True iff some direction is monochromatic in a color used nowhere else and
    the two halves it separates carry disjoint palettes and are themselves in
    the family (Q_1 is the base case).
    """
    require_admissible(c)

    def rec(sub: Subcube) -> bool:
        if sub.m == 1:
            return True
        for d in sub.free_dirs:
            rest = tuple(x for x in sub.free_dirs if x != d)
            lo = Subcube(c.n, rest, sub.base)
            hi = Subcube(c.n, rest, sub.base | (1 << d))
            vert = {c.color_of(Edge(v, d)) for v in lo.vertices()}
            if len(vert) != 1:
                continue
            pal_lo = {c.color_of(lo.edge(e)) for e in Hypercube(lo.m).edges()}
            pal_hi = {c.color_of(hi.edge(e)) for e in Hypercube(hi.m).edges()}
            if vert & (pal_lo | pal_hi) or pal_lo & pal_hi:
                continue
            if rec(lo) and rec(hi):
                return True
        return False

    return rec(Subcube(c.n, tuple(range(c.n)), 0))


# -- canonical forms ------------------------------------------------------------------


def canonical_form(c: EdgeColoring, use_symmetry: bool = False) -> EdgeColoring:
    """Renaming-normalized coloring; with ``use_symmetry`` the least such word over Aut(Q_n)."""
    if not use_symmetry:
        return c.normalized()
    if c.n > MAX_GROUP_DIM:
        raise ColoringError(f"symmetry canonical form is only available for n <= {MAX_GROUP_DIM}")
    words = _normalize_rows(np.asarray(c.colors)[edge_permutations(c.n)])
    best = min(map(tuple, words.tolist()))
    return EdgeColoring(c.n, best)


def orbit_size(c: EdgeColoring) -> int:
    """Number of renaming classes in the Aut(Q_n)-orbit of ``c``."""
    if c.n > MAX_GROUP_DIM:
        raise ColoringError(f"orbits are only computed for n <= {MAX_GROUP_DIM}")
    words = _normalize_rows(np.asarray(c.colors)[edge_permutations(c.n)])
    return len(np.unique(words, axis=0))


def _normalize_rows(words: np.ndarray) -> np.ndarray:
    """Restricted-growth renaming of every row of a 2-D integer array."""
    g, e = words.shape
    k = int(words.max()) + 1
    first = np.full((g, k), e, dtype=np.int64)
    pos = np.broadcast_to(np.arange(e), (g, e))
    np.minimum.at(first, (np.repeat(np.arange(g), e), words.ravel()), pos.ravel())
    rank = np.argsort(np.argsort(first, axis=1, kind="stable"), axis=1, kind="stable")
    return np.take_along_axis(rank, words, axis=1)
