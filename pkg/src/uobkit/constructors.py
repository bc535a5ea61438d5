"""Explicit admissible colorings: the printed examples and the recursive families."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coloring import (
    ColoringError,
    EdgeColoring,
    canonical_form,
    normalize_word,
    require_admissible,
)
from .cube import CubeError, Edge, Hypercube, insert_bit

# Color names and edge lists of the two Q_3 fixtures.
FIG1_CLASSES = {
    "red": ["0-4", "1-5", "3-7", "2-6"],
    "blue": ["0-2", "1-3"],
    "violet": ["4-6", "5-7"],
    "green": ["0-1"],
    "purple": ["4-5"],
    "brown": ["6-7"],
    "orange": ["2-3"],
}

FIG2_CLASSES = {
    "orange": ["0-4", "3-7", "2-6"],
    "red": ["0-1", "4-5", "2-3"],
    "violet": ["4-6", "5-7", "1-3"],
    "purple": ["1-5"],
    "green": ["0-2"],
    "blue": ["6-7"],
}

# The 4-qubit basis of the generalized construction, one row per vertex 0..15,
# tensor factors left to right; "^k" is the hat of u_k.
BDF4_DISPLAY = [
    "4 3 2 1", "4 6 5 ^1",
    "4 3 ^2 1", "7 3 ^5 ^1",
    "8 ^3 5 1", "4 ^6 5 ^1",
    "4 ^3 ^5 9", "4 ^3 ^5 ^9",
    "^4 3 5 10", "^4 3 5 ^10",
    "^4 11 ^5 1", "^7 3 ^5 ^1",
    "^8 ^3 5 1", "^4 ^3 12 ^1",
    "^4 ^11 ^5 1", "^4 ^3 ^12 ^1",
]

FIXTURE_NAMES = ("fig1", "fig2", "bdf4")


def _from_classes(n: int, classes: dict[str, list[str]]) -> tuple[EdgeColoring, list[str]]:
    names = list(classes)
    mapping = {}
    for k, name in enumerate(names):
        for pair in classes[name]:
            u, v = (int(x) for x in pair.split("-"))
            mapping[(u, v)] = k
    return EdgeColoring.from_edge_map(n, mapping), names


def coloring_from_display(rows: list[str]) -> tuple[EdgeColoring, list[str]]:
    """Read a coloring off a displayed product basis.

    Row ``v`` lists the subscripts of the factors of the state at vertex ``v``;
    the factor at tensor position ``p`` sits on the edge in direction ``n-1-p``
    and must be hatted exactly when that bit of ``v`` is set.
    """
    n = len(rows[0].split())
    if len(rows) != 1 << n:
        raise ColoringError(f"expected {1 << n} rows for {n} factors, got {len(rows)}")
    cube = Hypercube(n)
    found: dict[Edge, str] = {}
    for v, row in enumerate(rows):
        tokens = row.split()
        if len(tokens) != n:
            raise ColoringError(f"row {v} has {len(tokens)} factors, expected {n}")
        for p, tok in enumerate(tokens):
            d = n - 1 - p
            hatted = tok.startswith("^")
            if hatted != bool((v >> d) & 1):
                raise ColoringError(f"row {v}, factor {p}: hat does not match vertex bit")
            e = cube.incident_edge(v, d)
            label = tok.lstrip("^")
            if found.setdefault(e, label) != label:
                raise ColoringError(f"edge {e} read as both u{found[e]} and u{label}")
    labels = sorted(set(found.values()), key=int)
    ids = {lab: k for k, lab in enumerate(labels)}
    c = EdgeColoring.from_edge_map(n, {e: ids[lab] for e, lab in found.items()})
    return c, [f"u{lab}" for lab in labels]


def fixture(name: str) -> EdgeColoring:
    return fixture_with_names(name)[0]


def fixture_with_names(name: str) -> tuple[EdgeColoring, list[str]]:
    """A printed coloring plus the names of its colors (index = color id)."""
    if name == "fig1":
        return _from_classes(3, FIG1_CLASSES)
    if name == "fig2":
        return _from_classes(3, FIG2_CLASSES)
    if name == "bdf4":
        return coloring_from_display(BDF4_DISPLAY)
    raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}")


def minimal_coloring(n: int) -> EdgeColoring:
    return EdgeColoring(n, (0,) * Hypercube(n).num_edges)


def _join(c0: EdgeColoring, c1: EdgeColoring, direction: int, vertical) -> EdgeColoring:
    """Q_n from two Q_{n-1} colorings glued along ``direction``.

    ``vertical(k)`` colors the vertical edge over bottom vertex ``k``.
    """
    if c0.n != c1.n:
        raise ColoringError(f"dimension mismatch: Q_{c0.n} and Q_{c1.n}")
    n = c0.n + 1
    if not 0 <= direction < n:
        raise CubeError(f"direction {direction} out of range for n={n}")
    small = Hypercube(c0.n)

    def color(e: Edge) -> int:
        if e.direction == direction:
            return vertical(_drop(e.base, direction))
        d = e.direction - (e.direction > direction)
        local = small.incident_edge(_drop(e.base, direction), d)
        side = c1 if (e.base >> direction) & 1 else c0
        return side.color_of(local)

    return EdgeColoring.from_function(n, color)


def _drop(v: int, d: int) -> int:
    return ((v >> (d + 1)) << d) | (v & ((1 << d) - 1))


def construct_max_from(c0: EdgeColoring, c1: EdgeColoring, direction: int) -> EdgeColoring:
    """Top half recolored past the bottom palette, one fresh color on every vertical edge."""
    require_admissible(c0)
    require_admissible(c1)
    offset = max(c0.colors) + 1
    shifted = EdgeColoring(c1.n, tuple(x + offset for x in c1.colors))
    fresh = max(shifted.colors) + 1
    return _join(c0, shifted, direction, lambda k: fresh).normalized()


def cone(c0: EdgeColoring, c1: EdgeColoring) -> EdgeColoring:
    return construct_max_from(c0, c1, c0.n)


def construct_max(n: int) -> EdgeColoring:
    """The 2**n - 1 color coloring obtained by repeatedly adding a top direction."""
    c = minimal_coloring(1)
    for _ in range(n - 1):
        c = construct_max_from(c, c, c.n)
    return c


def random_max_family(n: int, rng: np.random.Generator) -> EdgeColoring:
    """Same recursion with a random splitting direction at every node."""
    if n == 1:
        return minimal_coloring(1)
    d = int(rng.integers(n))
    return construct_max_from(random_max_family(n - 1, rng), random_max_family(n - 1, rng), d)


def doubling(c: EdgeColoring) -> EdgeColoring:
    """Both halves colored by ``c``; every vertical edge gets its own fresh color."""
    require_admissible(c)
    fresh = max(c.colors) + 1
    return _join(c, c, c.n, lambda k: fresh + k).normalized()


# -- dominant / non-dominant patterns -----------------------------------------------


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class DominantPattern:
    n: int
    nondominant: frozenset

    def __post_init__(self):
        cube = Hypercube(self.n)
        if self.n < 3:
            raise PatternError("patterns need n >= 3")
        for f in cube.two_faces():
            k = sum(e in self.nondominant for e in f.edges)
            if k != 1:
                raise PatternError(f"2-face {f} has {k} non-dominant edges")
        per_dir = [0] * self.n
        for e in self.nondominant:
            per_dir[e.direction] += 1
        if any(k != 1 << (self.n - 3) for k in per_dir):
            raise PatternError(f"non-dominant edges per direction {per_dir}, expected {1 << (self.n - 3)}")

    def sorted_edges(self) -> list[Edge]:
        cube = Hypercube(self.n)
        return sorted(self.nondominant, key=cube.edge_index)


def dominant_pattern(n: int, seed: Optional[Edge] = None, limit: Optional[int] = None) -> list[DominantPattern]:
    """All two-class labelings with one non-dominant edge per 2-face, ``seed`` non-dominant.

    Unit propagation over the faces, branching on the lowest undecided edge
    (dominant first).  Results come in discovery order.
    """
    cube = Hypercube(n)
    if n < 3:
        raise PatternError("patterns need n >= 3")
    if seed is None:
        seed = Edge(1, n - 1)
    cube.edge_index(seed)
    faces = [tuple(cube.edge_index(e) for e in f.edges) for f in cube.two_faces()]
    faces_of: list[list[int]] = [[] for _ in range(cube.num_edges)]
    for fi, f in enumerate(faces):
        for k in f:
            faces_of[k].append(fi)

    def propagate(state, queue):
        while queue:
            k = queue.pop()
            for fi in faces_of[k]:
                vals = [state[x] for x in faces[fi]]
                nd = vals.count(1)
                unknown = [x for x, s in zip(faces[fi], vals) if s is None]
                if nd > 1 or (nd == 0 and not unknown):
                    return False
                if nd == 1:
                    for x in unknown:
                        state[x] = 0
                        queue.append(x)
                elif len(unknown) == 1:
                    state[unknown[0]] = 1
                    queue.append(unknown[0])
        return True

    results: list[DominantPattern] = []

    def search(state):
        if limit is not None and len(results) >= limit:
            return
        try:
            k = state.index(None)
        except ValueError:
            nd = frozenset(cube.edge_at(i) for i, s in enumerate(state) if s == 1)
            results.append(DominantPattern(n, nd))
            return
        for val in (0, 1):
            trial = list(state)
            trial[k] = val
            if propagate(trial, [k]):
                search(trial)

    start: list[Optional[int]] = [None] * cube.num_edges
    s = cube.edge_index(seed)
    start[s] = 1
    if propagate(start, [s]):
        search(start)
    if not results:
        raise PatternError(f"no dominant pattern on Q_{n} with {seed} non-dominant")
    return results


def generalized_bdf(n: int, pattern: Optional[DominantPattern] = None) -> EdgeColoring:
    """Dominant edges colored by direction, each non-dominant edge its own color."""
    if pattern is None:
        pattern = dominant_pattern(n, limit=1)[0]
    if pattern.n != n:
        raise PatternError(f"pattern for Q_{pattern.n} used on Q_{n}")
    cube = Hypercube(n)
    nd_ids = {e: n + k for k, e in enumerate(pattern.sorted_edges())}
    return canonical_form(EdgeColoring.from_function(n, lambda e: nd_ids.get(e, e.direction)))


# -- random inputs for property checks ------------------------------------------


def random_admissible(n: int, rng: np.random.Generator, p_new: float = 0.35, tries: int = 1000) -> EdgeColoring:
    """A random admissible coloring, grown edge by edge with 2-face pruning.

    Each edge reuses a random earlier color or opens a new one with probability
    ``p_new``; dead ends restart.  The distribution is not uniform.
    """
    from .coloring import is_admissible, _face_quads

    cube = Hypercube(n)
    quads_at: list[list[tuple[int, int, int, int]]] = [[] for _ in range(cube.num_edges)]
    for q in _face_quads(n) if n >= 2 else ():
        quads_at[max(q)].append(q)
    for _ in range(tries):
        col: list[int] = []
        used = 0
        dead = False
        for k in range(cube.num_edges):
            options = list(range(used))
            rng.shuffle(options)
            if used == 0 or rng.random() < p_new:
                options.insert(0, used)
            else:
                options.append(used)
            for x in options:
                col.append(x)
                if all(col[a] == col[b] or col[c] == col[d] for a, b, c, d in quads_at[k]):
                    used = max(used, x + 1)
                    break
                col.pop()
            else:
                dead = True
                break
        if dead:
            continue
        c = EdgeColoring(n, tuple(col))
        if is_admissible(c):
            return c
    raise ColoringError(f"no admissible coloring of Q_{n} found in {tries} tries")
