"""Product bases of n qubits built from admissible colorings, and the way back.

Tensor position ``p`` (0 = leftmost factor) carries hypercube direction
``n - 1 - p``, so the state at vertex ``v`` expands to computational-basis
index ``v`` when every factor is |0> or |1>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .coloring import EdgeColoring, is_admissible
from .cube import Hypercube


@dataclass(frozen=True)
class Tolerances:
    ray_equal: float = 1e-9
    ray_distinct: float = 1e-6
    gram: float = 1e-10
    hat_pair: float = 1e-8
    certainty: float = 1e-9


DEFAULT_TOL = Tolerances()


class UobError(ValueError):
    pass


class RecoveryError(UobError):
    """The input does not decompose as a product basis of the expected shape."""


@dataclass(frozen=True)
class QubitRay:
    """A unit vector in C^2 with its global phase fixed.

    The first component with modulus above ``1e-12`` is made real and positive.
    """

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        norm = math.hypot(abs(a), abs(b))
        if not norm > 0 or not math.isfinite(norm):
            raise UobError("a ray needs a nonzero finite vector")
        pivot = a if abs(a) > 1e-12 else b
        if abs(norm - 1) < 1e-14 and pivot.imag == 0 and pivot.real > 0:
            # already canonical; leave the bits alone so serialization round-trips
            object.__setattr__(self, "alpha", a)
            object.__setattr__(self, "beta", b)
            return
        a, b = a / norm, b / norm
        pivot = a if abs(a) > 1e-12 else b
        phase = pivot.conjugate() / abs(pivot)
        a, b = a * phase, b * phase
        if abs(a) > 1e-12:
            a = complex(a.real, 0.0)
        else:
            b = complex(b.real, 0.0)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def zero(cls) -> QubitRay:
        return cls(1, 0)

    @classmethod
    def one(cls) -> QubitRay:
        return cls(0, 1)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def key(self) -> tuple[float, float, float, float]:
        return (self.alpha.real, self.alpha.imag, self.beta.real, self.beta.imag)

    def inner(self, other: QubitRay) -> complex:
        """<self|other>."""
        return self.alpha.conjugate() * other.alpha + self.beta.conjugate() * other.beta

    def distance(self, other: QubitRay) -> float:
        """Euclidean distance between the phase-fixed amplitude vectors."""
        return math.hypot(abs(self.alpha - other.alpha), abs(self.beta - other.beta))

    def fubini_study(self, other: QubitRay) -> float:
        return math.acos(min(1.0, abs(self.inner(other))))


def hat(r: QubitRay) -> QubitRay:
    """The orthogonal ray: (a, b) -> (-conj(b), conj(a))."""
    return QubitRay(-r.beta.conjugate(), r.alpha.conjugate())


def _lex_less(x: tuple, y: tuple, tol: float) -> bool:
    for a, b in zip(x, y):
        if abs(a - b) > tol:
            return a < b
    return False


def t0_representative(r: QubitRay, tol: float = DEFAULT_TOL.ray_equal) -> QubitRay:
    """The member of ``{r, hat(r)}`` with the lexicographically smaller amplitudes."""
    h = hat(r)
    return h if _lex_less(h.key(), r.key(), tol) else r


@dataclass(frozen=True)
class ProductState:
    factors: tuple[QubitRay, ...]

    def vector(self) -> np.ndarray:
        out = np.ones(1, dtype=complex)
        for f in self.factors:
            out = np.kron(out, f.vector)
        return out

    def inner(self, other: ProductState) -> complex:
        out = 1 + 0j
        for a, b in zip(self.factors, other.factors):
            out *= a.inner(b)
        return out


@dataclass(frozen=True)
class Uob:
    """2**n product states; ``states[v]`` belongs to vertex ``v``."""

    states: tuple[ProductState, ...]

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise UobError("empty basis")
        n = len(states[0].factors)
        if n < 1 or len(states) != 1 << n or any(len(s.factors) != n for s in states):
            raise UobError(f"need 2**n states of n factors each, got {len(states)} states")
        object.__setattr__(self, "states", states)

    @property
    def n(self) -> int:
        return len(self.states[0].factors)

    def matrix(self) -> np.ndarray:
        """Full tensor vectors as columns."""
        return np.stack([s.vector() for s in self.states], axis=1)

    def gram(self) -> np.ndarray:
        m = self.matrix()
        return m.conj().T @ m

    def factor_array(self) -> np.ndarray:
        """Complex array of shape (2**n, n, 2)."""
        return np.array([[f.vector for f in s.factors] for s in self.states])


ColorAssignment = Mapping[int, QubitRay]


def position_of(direction: int, n: int) -> int:
    return n - 1 - direction


def direction_of(position: int, n: int) -> int:
    return n - 1 - position


def synthesize(c: EdgeColoring, assignment: ColorAssignment) -> Uob:
    """Vertex ``v`` gets, in direction ``d``, the ray of its edge's color, hatted when bit ``d`` is set."""
    if not is_admissible(c):
        raise UobError("coloring is not admissible")
    missing = sorted(set(c.colors) - set(assignment))
    if missing:
        raise UobError(f"assignment has no ray for colors {missing}")
    hats = {k: hat(r) for k, r in assignment.items()}
    n = c.n
    states = []
    for v in range(1 << n):
        row = c.table[v]
        factors = []
        for p in range(n):
            d = direction_of(p, n)
            k = int(row[d])
            factors.append(hats[k] if (v >> d) & 1 else assignment[k])
        states.append(ProductState(tuple(factors)))
    return Uob(tuple(states))


@dataclass
class UobReport:
    passed: bool
    max_offdiag: float
    worst_pair: Optional[tuple[int, int]]
    witnesses: dict
    failures: list

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_offdiag": self.max_offdiag,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "failures": [list(p) for p in self.failures],
        }


def verify_uob(u: Uob, tol: float = DEFAULT_TOL.gram) -> UobReport:
    """Gram matrix of the full tensors, plus the factor that makes each pair orthogonal.

    ``witnesses[(i, j)]`` is the tensor position with the smallest factor
    overlap for that pair (None when even that overlap exceeds ``tol``).
    """
    g = u.gram()
    n_states = g.shape[0]
    off = np.abs(g - np.eye(n_states))
    worst = np.unravel_index(int(np.argmax(off)), off.shape)
    max_off = float(off.max())
    f = u.factor_array()
    # overlaps[p, i, j] = |<f_ip | f_jp>|
    overlaps = np.abs(np.einsum("ipk,jpk->pij", f.conj(), f))
    best = overlaps.argmin(axis=0)
    best_val = overlaps.min(axis=0)
    witnesses = {}
    failures = []
    for i in range(n_states):
        for j in range(i + 1, n_states):
            ok = best_val[i, j] < tol
            witnesses[(i, j)] = int(best[i, j]) if ok else None
            if off[i, j] >= tol:
                failures.append((i, j))
    return UobReport(
        passed=max_off < tol,
        max_offdiag=max_off,
        worst_pair=(int(worst[0]), int(worst[1])) if max_off > 0 else None,
        witnesses=witnesses,
        failures=failures,
    )


@dataclass
class Recovery:
    """A coloring read off a product basis.

    ``vertex_of_state[j]`` is the vertex the ``j``-th input state lands on;
    ``assignment`` maps each color to its ray in the T0 half of the hat pairs.
    """

    coloring: EdgeColoring
    assignment: dict
    vertex_of_state: tuple[int, ...]
    t0: tuple[QubitRay, ...]
    t1: tuple[QubitRay, ...]


def recover_coloring(u: Uob, tol: Tolerances = DEFAULT_TOL) -> Recovery:
    """Rebuild the coloring whose synthesis gives ``u`` (up to the recorded relabeling).

    Factor rays are clustered (equal within ``tol.ray_equal``) and paired with
    their hats; in each pair the lexicographically smaller member goes to T0.
    A state's bit in a direction is 0 when its factor there is in T0, and the
    bit vector is the vertex the state is moved to.  Each hat pair is one color.
    """
    n = u.n
    reps: list[QubitRay] = []
    cluster = np.empty((1 << n, n), dtype=np.int64)
    for j, s in enumerate(u.states):
        for p, f in enumerate(s.factors):
            cluster[j, p] = _cluster_of(f, reps, tol)

    pair_of: dict[int, int] = {}
    pairs: list[tuple[QubitRay, QubitRay]] = []
    for i, r in enumerate(reps):
        if i in pair_of:
            continue
        h = hat(r)
        partner = [k for k, q in enumerate(reps) if k != i and q.distance(h) <= tol.hat_pair]
        if len(partner) > 1:
            raise RecoveryError(f"ray {i} has several hat partners")
        t0 = t0_representative(r, tol.ray_equal)
        pairs.append((t0, hat(t0)))
        pair_of[i] = len(pairs) - 1
        if partner:
            pair_of[partner[0]] = len(pairs) - 1

    bits = np.zeros((1 << n, n), dtype=np.int64)
    for j in range(1 << n):
        for p in range(n):
            r = reps[cluster[j, p]]
            t0 = pairs[pair_of[int(cluster[j, p])]][0]
            bits[j, p] = 0 if r.distance(t0) <= tol.hat_pair else 1
    weights = 1 << (n - 1 - np.arange(n))
    vertex_of_state = tuple(int(x) for x in bits @ weights)
    if sorted(vertex_of_state) != list(range(1 << n)):
        raise RecoveryError("bit vectors of the states are not all of {0,1}^n")
    state_at = {v: j for j, v in enumerate(vertex_of_state)}

    cube = Hypercube(n)
    colors = []
    for e in cube.edges():
        a, b = e.endpoints
        p = position_of(e.direction, n)
        ka = pair_of[int(cluster[state_at[a], p])]
        kb = pair_of[int(cluster[state_at[b], p])]
        if ka != kb:
            raise RecoveryError(f"edge {e} gets colors {ka} and {kb} from its endpoints")
        colors.append(ka)
    coloring = EdgeColoring(n, tuple(colors))
    if not is_admissible(coloring):
        raise RecoveryError("recovered coloring is not admissible")
    used = sorted(set(colors))
    return Recovery(
        coloring=coloring,
        assignment={k: pairs[k][0] for k in used},
        vertex_of_state=vertex_of_state,
        t0=tuple(p[0] for p in pairs),
        t1=tuple(p[1] for p in pairs),
    )


def _cluster_of(f: QubitRay, reps: list[QubitRay], tol: Tolerances) -> int:
    near = []
    for i, r in enumerate(reps):
        d = r.distance(f)
        if d <= tol.ray_equal:
            near.append(i)
        elif d < tol.ray_distinct:
            raise RecoveryError(
                f"rays at distance {d:.3g}: neither equal (<= {tol.ray_equal}) nor distinct (>= {tol.ray_distinct})"
            )
    if len(near) > 1:
        raise RecoveryError("ray matches several clusters")
    if near:
        return near[0]
    reps.append(f)
    return len(reps) - 1


def random_ray(rng: np.random.Generator) -> QubitRay:
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    return QubitRay(z[0], z[1])


def sample_assignment(
    c: EdgeColoring,
    min_separation: float = 0.1,
    seed: int = 0,
    max_rejections: int = 100_000,
) -> dict[int, QubitRay]:
    """Haar-random rays for every color, kept apart within each direction's palette.

    Two colors sharing a direction get rays at Fubini-Study distance at least
    ``min_separation`` from each other and from each other's hats.  Rays are
    returned as T0 representatives so that :func:`recover_coloring` puts every
    vertex back in place.
    """
    return sample_with_rejections(c, min_separation, seed, max_rejections)[0]


def sample_with_rejections(
    c: EdgeColoring, min_separation: float, seed: int, max_rejections: int = 100_000
) -> tuple[dict[int, QubitRay], int]:
    """:func:`sample_assignment` plus the number of rejected draws."""
    if not 0 <= min_separation < math.pi / 4:
        raise UobError("min_separation must lie in [0, pi/4)")
    rng = np.random.default_rng(seed)
    neighbors: dict[int, set[int]] = {k: set() for k in set(c.colors)}
    for d in range(c.n):
        palette = set(c.direction_word(d))
        for k in palette:
            neighbors[k] |= palette - {k}
    out: dict[int, QubitRay] = {}
    rejections = 0
    for k in sorted(neighbors):
        while True:
            r = t0_representative(random_ray(rng))
            if all(
                min_separation <= r.fubini_study(out[j]) <= math.pi / 2 - min_separation
                for j in neighbors[k] if j in out
            ):
                out[k] = r
                break
            rejections += 1
            if rejections > max_rejections:
                raise UobError(f"gave up after {max_rejections} rejections; min_separation too large")
    return out, rejections


def standard_basis(n: int) -> Uob:
    z, o = QubitRay.zero(), QubitRay.one()
    return Uob(tuple(
        ProductState(tuple(o if (v >> (n - 1 - p)) & 1 else z for p in range(n)))
        for v in range(1 << n)
    ))


def replace_factor(u: Uob, state: int, position: int, ray: QubitRay) -> Uob:
    states = list(u.states)
    factors = list(states[state].factors)
    factors[position] = ray
    states[state] = ProductState(tuple(factors))
    return Uob(tuple(states))


def assignment_from_rays(rays: Sequence[QubitRay]) -> dict[int, QubitRay]:
    return dict(enumerate(rays))
