"""Local distinguishability: the coloring test, the first-measurement test on
concrete bases, and adaptive one-qubit-at-a-time protocols.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .coloring import EdgeColoring, color_count, is_max_family, require_admissible
from .cube import Edge, Subcube
from .uob import (
    DEFAULT_TOL,
    QubitRay,
    Uob,
    direction_of,
    hat,
    position_of,
    t0_representative,
)


class ClassifierDisagreement(AssertionError):
    """The color-count test and the recursive recognizer gave different answers."""


class ProtocolError(ValueError):
    pass


def is_locc_distinguishable(c: EdgeColoring) -> bool:
    """True iff the basis of ``c`` can be read out by local measurements with certainty.

    Decided by the color count and cross-checked against the recursive
    recognizer; a mismatch raises :class:`ClassifierDisagreement`.
    """
    require_admissible(c)
    by_count = color_count(c) == (1 << c.n) - 1
    by_shape = is_max_family(c)
    if by_count != by_shape:
        raise ClassifierDisagreement(
            f"color count says {by_count}, recursive recognizer says {by_shape} for {c}"
        )
    return by_count


def wh_first_choices(u: Uob, tol: float = DEFAULT_TOL.hat_pair) -> list[tuple[int, QubitRay]]:
    """Positions where every factor is ``a`` or ``hat(a)`` for a single ray ``a``.

    ``a`` is returned as the T0 member of its pair.  An empty list means no
    single-qubit measurement can start a perfect discrimination.
    """
    out = []
    for p in range(u.n):
        a = t0_representative(u.states[0].factors[p])
        b = hat(a)
        if all(min(s.factors[p].distance(a), s.factors[p].distance(b)) <= tol for s in u.states):
            out.append((p, a))
    return out


# -- protocol trees -------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    vertex: int

    def to_dict(self) -> dict:
        return {"leaf": self.vertex}


@dataclass(frozen=True)
class Measure:
    """Measure ``position`` in the basis {ray, hat(ray)}; outcome 0 is ``ray``."""

    position: int
    ray: QubitRay
    on_ray: ProtocolTree
    on_hat: ProtocolTree

    def child(self, outcome: int) -> ProtocolTree:
        return self.on_hat if outcome else self.on_ray

    def to_dict(self) -> dict:
        return {
            "measure": self.position,
            "ray": _ray_json(self.ray),
            "outcomes": {"0": self.on_ray.to_dict(), "1": self.on_hat.to_dict()},
        }


ProtocolTree = Union[Leaf, Measure]


def _ray_json(r: QubitRay) -> list[list[float]]:
    return [[r.alpha.real, r.alpha.imag], [r.beta.real, r.beta.imag]]


def tree_from_dict(d: Mapping) -> ProtocolTree:
    if "leaf" in d:
        return Leaf(int(d["leaf"]))
    (ar, ai), (br, bi) = d["ray"]
    return Measure(
        int(d["measure"]),
        QubitRay(complex(ar, ai), complex(br, bi)),
        tree_from_dict(d["outcomes"]["0"]),
        tree_from_dict(d["outcomes"]["1"]),
    )


def leaves(t: ProtocolTree) -> list[int]:
    if isinstance(t, Leaf):
        return [t.vertex]
    return leaves(t.on_ray) + leaves(t.on_hat)


def depth(t: ProtocolTree) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + max(depth(t.on_ray), depth(t.on_hat))


def validate_tree(t: ProtocolTree, n: Optional[int] = None):
    """Raise if a path measures a position twice or leaves the range ``0..n-1``."""

    def walk(node, seen):
        if isinstance(node, Leaf):
            return
        p = node.position
        if p in seen:
            raise ProtocolError(f"position {p} measured twice on one path")
        if p < 0 or (n is not None and p >= n):
            raise ProtocolError(f"position {p} out of range")
        walk(node.on_ray, seen | {p})
        walk(node.on_hat, seen | {p})

    walk(t, frozenset())


def _uniform_in(c: EdgeColoring, sub: Subcube, d: int) -> Optional[int]:
    cols = {c.color_of(Edge(v, d)) for v in sub.vertices() if not (v >> d) & 1}
    return cols.pop() if len(cols) == 1 else None


def extract_protocol(c: EdgeColoring, assignment: Mapping[int, QubitRay]) -> ProtocolTree:
    """Adaptive tree: at each node measure a direction that is uniform on the current subcube.

    Ties go to the smallest tensor position.  Outcome ``ray`` fixes the bit to 0.
    """
    if not is_locc_distinguishable(c):
        raise ProtocolError("coloring is not locally distinguishable; no protocol exists")
    n = c.n

    def build(free: tuple[int, ...], base: int) -> ProtocolTree:
        if not free:
            return Leaf(base)
        sub = Subcube(n, free, base)
        for d in sorted(free, reverse=True):
            k = _uniform_in(c, sub, d)
            if k is not None:
                break
        else:
            raise ProtocolError(f"no uniform direction on subcube {free} at base {base}")
        rest = tuple(x for x in free if x != d)
        return Measure(position_of(d, n), assignment[k], build(rest, base), build(rest, base | (1 << d)))

    return build(tuple(range(n)), 0)


def fixed_order_protocol(
    c: EdgeColoring, assignment: Mapping[int, QubitRay], order: Sequence[int]
) -> ProtocolTree:
    """Measure positions in a fixed ``order`` regardless of outcomes.

    At each node the ray is the color of the edge at the vertex whose
    already-measured bits follow the outcomes and whose other bits are 0.
    Useful as a deliberately wrong protocol.
    """
    n = c.n
    if sorted(order) != list(range(n)):
        raise ProtocolError(f"order {list(order)} is not a permutation of positions")

    def build(k: int, v: int) -> ProtocolTree:
        if k == n:
            return Leaf(v)
        d = direction_of(order[k], n)
        ray = assignment[c.color_of(c.cube.incident_edge(v, d))]
        return Measure(order[k], ray, build(k + 1, v), build(k + 1, v | (1 << d)))

    return build(0, 0)


# -- simulation -----------------------------------------------------------------


@dataclass
class Step:
    position: int
    outcome: int
    probability: float


@dataclass
class SimulationResult:
    secret: int
    steps: list[Step] = field(default_factory=list)
    identified: Optional[int] = None
    certain: bool = False

    def to_dict(self) -> dict:
        return {
            "secret": self.secret,
            "identified": self.identified,
            "certain": self.certain,
            "steps": [[s.position, s.outcome, s.probability] for s in self.steps],
        }


def simulate(
    u: Uob,
    t: ProtocolTree,
    secret: int,
    tol: float = DEFAULT_TOL.certainty,
    rng: Optional[np.random.Generator] = None,
    seed: int = 0,
) -> SimulationResult:
    """Run the protocol on the state at vertex ``secret`` with Born-rule outcomes.

    Without an explicit ``rng`` the outcomes are drawn from
    ``default_rng([seed, secret])``, so a secret's run does not depend on which
    other secrets are simulated or in what order.
    """
    if not 0 <= secret < len(u.states):
        raise ProtocolError(f"secret {secret} out of range")
    if rng is None:
        rng = np.random.default_rng([seed, secret])
    state = u.states[secret]
    res = SimulationResult(secret)
    seen: set[int] = set()
    node = t
    while isinstance(node, Measure):
        p = node.position
        if p in seen:
            raise ProtocolError(f"position {p} measured twice on one path")
        if not 0 <= p < u.n:
            raise ProtocolError(f"position {p} out of range for n={u.n}")
        seen.add(p)
        p0 = min(1.0, abs(node.ray.inner(state.factors[p])) ** 2)
        outcome = 0 if rng.random() < p0 else 1
        res.steps.append(Step(p, outcome, p0 if outcome == 0 else 1.0 - p0))
        node = node.child(outcome)
    res.identified = node.vertex
    res.certain = node.vertex == secret and all(s.probability >= 1 - tol for s in res.steps)
    return res


def _simulate_chunk(args):
    u, t, secrets, tol, seed = args
    return [simulate(u, t, s, tol, seed=seed) for s in secrets]


def simulate_all(
    u: Uob,
    t: ProtocolTree,
    seed: int = 0,
    tol: float = DEFAULT_TOL.certainty,
    workers: Optional[int] = None,
    secrets: Optional[Sequence[int]] = None,
) -> list[SimulationResult]:
    """Simulate every secret; results are in secret order for any worker count."""
    from .census import default_workers

    secrets = list(range(len(u.states)) if secrets is None else secrets)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(secrets) < 2:
        return _simulate_chunk((u, t, secrets, tol, seed))
    chunks = [secrets[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_simulate_chunk, [(u, t, ch, tol, seed) for ch in chunks if ch]))
    by_secret = {r.secret: r for part in parts for r in part}
    return [by_secret[s] for s in secrets]
