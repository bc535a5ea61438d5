"""Exhaustive enumeration of admissible colorings and the extremal statistics built on it.

Colorings are searched as restricted-growth strings over the canonical edge
order, so each renaming class is visited once.  Every fully colored 2-face is
checked as soon as its last edge is assigned; leaves are then filtered by the
full pairwise admissibility test.  Work is split into shards by fixed-length
prefixes and merged back in prefix order, so the output does not depend on
the number of workers.
"""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Optional

from .coloring import (
    EdgeColoring,
    _face_quads,
    _pair_candidates,
    canonical_form,
    color_count,
    extract_forest,
    find_refinement,
    is_max_family,
    restrict_to_subcube,
    uniform_direction,
)
from .cube import Hypercube

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "uobkit-census-checkpoint"
CHECKPOINT_VERSION = 1
FULL_CENSUS_MAX_N = 3
WORKERS_ENV = "UOBKIT_WORKERS"


class CensusError(RuntimeError):
    pass


class BudgetExceeded(CensusError):
    """The node or time budget ran out before the search finished."""


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class CensusReport:
    n: int
    mode: str
    complete: bool
    total_two_face_admissible: int
    total_admissible: int
    total_up_to_symmetry: Optional[int]
    max_colors_seen: int
    counts_by_colors: dict
    maximal_by_colors: dict
    maximal_up_to_symmetry_by_colors: Optional[dict]
    c_n: Optional[int]
    nodes: int
    wall_time: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        d = asdict(self)
        for key in ("counts_by_colors", "maximal_by_colors", "maximal_up_to_symmetry_by_colors"):
            if d[key] is not None:
                d[key] = {str(k): v for k, v in sorted(d[key].items())}
        if not timing:
            del d["wall_time"]
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


@dataclass
class _Shard:
    prefix: tuple
    two_face: int = 0
    admissible: int = 0
    nodes: int = 0
    complete: bool = True
    colorings: list = field(default_factory=list)
    by_colors: dict = field(default_factory=dict)


@lru_cache(maxsize=None)
def _quads_by_last(n: int):
    out = [[] for _ in range(Hypercube(n).num_edges)]
    for q in _face_quads(n):
        out[max(q)].append(q)
    return tuple(tuple(x) for x in out)


def _options(col: list, k: int, used: int, half: int, separated: bool) -> range:
    if separated:
        # colors opened in an earlier direction block are off limits
        start = max(col[: (k // half) * half], default=-1) + 1
        return range(start, used + 1)
    return range(used + 1)


def _prefixes(n: int, depth: int, separated: bool) -> list[tuple]:
    half = 1 << (n - 1)
    depth = min(depth, Hypercube(n).num_edges)
    quads = _quads_by_last(n)
    out = []

    def rec(col, used):
        k = len(col)
        if k == depth:
            out.append(tuple(col))
            return
        for x in _options(col, k, used, half, separated):
            col.append(x)
            if all(col[a] == col[b] or col[c] == col[d] for a, b, c, d in quads[k]):
                rec(col, max(used, x + 1))
            col.pop()

    rec([], 0)
    return out


def _search_shard(args) -> _Shard:
    n, prefix, separated, maximal_only, min_count, deadline, node_budget = args
    cube = Hypercube(n)
    m = cube.num_edges
    half = 1 << (n - 1)
    quads = _quads_by_last(n)
    pairs = _pair_candidates(n)
    res = _Shard(prefix=tuple(prefix))
    col = list(prefix)

    def leaf():
        res.two_face += 1
        for cands in pairs:
            for e1, e2 in cands:
                if col[e1] == col[e2]:
                    break
            else:
                return
        res.admissible += 1
        k = max(col) + 1
        c = EdgeColoring(n, tuple(col))
        if maximal_only:
            if find_refinement(c) is not None:
                return
        res.by_colors[k] = res.by_colors.get(k, 0) + 1
        res.colorings.append(tuple(col))

    def rec(used):
        res.nodes += 1
        if node_budget is not None and res.nodes > node_budget:
            raise BudgetExceeded(f"node budget {node_budget} exceeded in shard {prefix}")
        if deadline is not None and res.nodes % 4096 == 0 and time.time() > deadline:
            raise BudgetExceeded(f"time budget exceeded in shard {prefix}")
        k = len(col)
        if k == m:
            leaf()
            return
        if min_count is not None and used + (m - k) < min_count:
            return
        for x in _options(col, k, used, half, separated):
            col.append(x)
            if all(col[a] == col[b] or col[c] == col[d] for a, b, c, d in quads[k]):
                rec(max(used, x + 1))
            col.pop()

    used = max(prefix, default=-1) + 1
    try:
        if deadline is not None and time.time() > deadline:
            raise BudgetExceeded("time budget exhausted before shard start")
        rec(used)
    except BudgetExceeded:
        res.complete = False
        res.colorings = []
    return res


def _load_checkpoint(path: Path, header: dict) -> dict[tuple, _Shard]:
    if not path.exists():
        return {}
    data = json.loads(path.read_text())
    if data.get("format") != CHECKPOINT_FORMAT or data.get("version") != CHECKPOINT_VERSION:
        raise CensusError(f"{path}: not a version-{CHECKPOINT_VERSION} census checkpoint")
    for key, value in header.items():
        if data.get(key) != value:
            raise CensusError(f"{path}: checkpoint {key}={data.get(key)!r} does not match {value!r}")
    done = {}
    for rec in data["completed"]:
        s = _Shard(
            prefix=tuple(rec["prefix"]),
            two_face=rec["two_face"],
            admissible=rec["admissible"],
            nodes=rec["nodes"],
            colorings=[tuple(c) for c in rec["colorings"]],
            by_colors={int(k): v for k, v in rec["by_colors"].items()},
        )
        done[s.prefix] = s
    return done


def _save_checkpoint(path: Path, header: dict, done: dict[tuple, _Shard]):
    data = dict(format=CHECKPOINT_FORMAT, version=CHECKPOINT_VERSION, **header)
    data["completed"] = [
        {
            "prefix": list(s.prefix),
            "two_face": s.two_face,
            "admissible": s.admissible,
            "nodes": s.nodes,
            "by_colors": {str(k): v for k, v in sorted(s.by_colors.items())},
            "colorings": [list(c) for c in s.colorings],
        }
        for _, s in sorted(done.items())
    ]
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data))
    tmp.replace(path)


def _check_scope(n: int, maximal_only: bool, up_to_symmetry: bool):
    if n < 1:
        raise CensusError("n must be positive")
    if n > 4:
        raise CensusError("enumeration is limited to n <= 4")
    if n == 4 and not (maximal_only and up_to_symmetry):
        raise CensusError("n = 4 is only searched in maximal-only mode with symmetry reduction")


def _run(n, *, maximal_only, workers, time_budget, node_budget, checkpoint, depth):
    workers = workers or default_workers()
    if depth is None:
        depth = 4 if n <= 3 else 10
    separated = maximal_only
    # a maximal coloring never shares a color between two directions
    min_count = None
    prefixes = _prefixes(n, depth, separated)
    header = {"n": n, "maximal_only": maximal_only, "depth": depth}
    done: dict[tuple, _Shard] = {}
    ckpt = Path(checkpoint) if checkpoint else None
    if ckpt is not None:
        done = _load_checkpoint(ckpt, header)
        log.info("resuming with %d of %d shards done", len(done), len(prefixes))
    deadline = time.time() + time_budget if time_budget is not None else None
    todo = [p for p in prefixes if p not in done]
    args = [(n, p, separated, maximal_only, min_count, deadline, node_budget) for p in todo]
    complete = True
    if workers > 1 and len(args) > 1:
        pool = ProcessPoolExecutor(max_workers=workers)
        try:
            results = pool.map(_search_shard, args, chunksize=max(1, len(args) // (8 * workers)))
            complete = _collect(results, done, ckpt, header)
        finally:
            pool.shutdown(wait=True, cancel_futures=True)
    else:
        complete = _collect(map(_search_shard, args), done, ckpt, header)
    shards = [done[p] for p in prefixes if p in done]
    return shards, complete and len(shards) == len(prefixes)


def _collect(results, done, ckpt, header) -> bool:
    """Store finished shards; stop at the first shard that ran out of budget."""
    for r in results:
        if not r.complete:
            return False
        done[r.prefix] = r
        if ckpt is not None:
            _save_checkpoint(ckpt, header, done)
    return True


def enumerate_admissible(
    n: int,
    up_to_symmetry: bool = False,
    *,
    maximal_only: bool = False,
    workers: Optional[int] = None,
    time_budget: Optional[float] = None,
    node_budget: Optional[int] = None,
    checkpoint: Optional[str] = None,
    depth: Optional[int] = None,
) -> Iterator[EdgeColoring]:
    """Every admissible coloring of Q_n once up to renaming (or up to symmetry).

    Output is sorted by color word.  Raises :class:`BudgetExceeded` if a budget
    runs out before the search is complete.  ``node_budget`` caps the search
    nodes of each prefix shard; shards are visited in prefix order and the run
    stops at the first one that exceeds a budget.
    """
    _check_scope(n, maximal_only, up_to_symmetry)
    shards, complete = _run(
        n, maximal_only=maximal_only, workers=workers, time_budget=time_budget,
        node_budget=node_budget, checkpoint=checkpoint, depth=depth,
    )
    if not complete:
        raise BudgetExceeded(f"census of Q_{n} did not finish within budget")
    words = [w for s in shards for w in s.colorings]
    if up_to_symmetry:
        words = sorted({canonical_form(EdgeColoring(n, w), True).colors for w in words})
    for w in words:
        yield EdgeColoring(n, w)


def run_census(
    n: int,
    up_to_symmetry: bool = True,
    *,
    maximal_only: bool = False,
    workers: Optional[int] = None,
    time_budget: Optional[float] = None,
    node_budget: Optional[int] = None,
    checkpoint: Optional[str] = None,
    depth: Optional[int] = None,
) -> tuple[CensusReport, list[EdgeColoring]]:
    """Census report plus the admissible colorings found (renaming classes).

    Unlike :func:`enumerate_admissible`, an exhausted budget yields a partial
    report with ``complete=False``.
    """
    _check_scope(n, maximal_only, up_to_symmetry)
    t0 = time.time()
    shards, complete = _run(
        n, maximal_only=maximal_only, workers=workers, time_budget=time_budget,
        node_budget=node_budget, checkpoint=checkpoint, depth=depth,
    )
    colorings = [EdgeColoring(n, w) for s in shards for w in s.colorings]
    counts: dict[int, int] = {}
    for s in shards:
        for k, v in s.by_colors.items():
            counts[k] = counts.get(k, 0) + v
    bound = (1 << n) - 1
    max_seen = max(counts, default=0)
    if max_seen > bound:
        worst = next(c for c in colorings if color_count(c) == max_seen)
        raise CensusError(f"coloring with {max_seen} > {bound} colors: {worst}")

    if maximal_only:
        maximal = colorings
    else:
        maximal = [c for c in colorings if _is_maximal_fast(c)]
    maximal_by: dict[int, int] = {}
    for c in maximal:
        k = color_count(c)
        maximal_by[k] = maximal_by.get(k, 0) + 1

    total_sym = None
    maximal_sym_by = None
    if up_to_symmetry:
        forms = {canonical_form(c, True).colors for c in colorings}
        total_sym = len(forms)
        max_forms = {canonical_form(c, True).colors for c in maximal}
        maximal_sym_by = {}
        for w in max_forms:
            k = max(w) + 1
            maximal_sym_by[k] = maximal_sym_by.get(k, 0) + 1

    report = CensusReport(
        n=n,
        mode="maximal-only" if maximal_only else "full",
        complete=complete,
        total_two_face_admissible=sum(s.two_face for s in shards),
        total_admissible=sum(s.admissible for s in shards),
        total_up_to_symmetry=None if maximal_only else total_sym,
        max_colors_seen=max_seen,
        counts_by_colors=dict(sorted(counts.items())) if not maximal_only else {},
        maximal_by_colors=dict(sorted(maximal_by.items())),
        maximal_up_to_symmetry_by_colors=maximal_sym_by and dict(sorted(maximal_sym_by.items())),
        c_n=min(maximal_by, default=None) if complete else None,
        nodes=sum(s.nodes for s in shards),
        wall_time=time.time() - t0,
    )
    if report.c_n is not None and report.c_n > report.max_colors_seen:
        raise CensusError("minimum over maximal colorings exceeds the maximum color count")
    return report, colorings


def _is_maximal_fast(c: EdgeColoring) -> bool:
    from .coloring import has_disjoint_directions

    # sharing a color across directions always leaves room to split it
    return has_disjoint_directions(c) and find_refinement(c) is None


# -- C(n) -------------------------------------------------------------------------------


@dataclass(frozen=True)
class MinColors:
    n: int
    provenance: str
    exact: Optional[int]
    lower: int
    upper: int
    constructive: Optional[int]
    witness: Optional[str]

    def to_dict(self) -> dict:
        return asdict(self)


def constructive_min_colors(n: int) -> tuple[int, str, EdgeColoring]:
    """Fewest colors among the constructors' maximal outputs, with the recipe used.

    Candidates are the dominant-pattern coloring (when a pattern exists) and the
    cone and doubling of the best Q_{n-1} candidate; every candidate is checked
    maximal before it counts.
    """
    from .constructors import PatternError, cone, doubling, generalized_bdf

    if n < 3:
        raise ValueError("constructive bound starts at n = 3")
    best = (6, "generalized_bdf(3)", generalized_bdf(3))
    for m in range(4, n + 1):
        prev_k, prev_name, prev = best
        cands = []
        try:
            cands.append((f"generalized_bdf({m})", generalized_bdf(m)))
        except PatternError:
            pass
        cands.append((f"cone({prev_name}, {prev_name})", cone(prev, prev)))
        cands.append((f"doubling({prev_name})", doubling(prev)))
        scored = [
            (color_count(c), name, c) for name, c in cands if find_refinement(c) is None
        ]
        if not scored:
            raise CensusError(f"no verified maximal candidate at n={m}")
        best = min(scored, key=lambda t: t[0])
    return best


def min_colors(n: int, workers: Optional[int] = None) -> MinColors:
    """C(n): exact from the census for n <= 3, otherwise bounds plus a constructive witness."""
    if n < 2:
        raise ValueError("C(n) is defined for n >= 2")
    if n <= FULL_CENSUS_MAX_N:
        report, _ = run_census(n, up_to_symmetry=False, workers=workers)
        return MinColors(n, "exact", report.c_n, report.c_n, report.c_n, None, None)
    k, name, _ = constructive_min_colors(n)
    return MinColors(n, "bounds", None, 2 * n, 13 * (1 << (n - 4)) - 1, k, name)


# -- theorem battery ----------------------------------------------------------------------


def verify_extremal_theorems(n: int, colorings: Optional[list[EdgeColoring]] = None, workers: Optional[int] = None) -> dict:
    """Run the extremal checks over every admissible coloring of Q_n (n <= 3).

    Failures are returned as data, with up to five counterexamples per check.
    """
    if n > FULL_CENSUS_MAX_N:
        raise CensusError("theorem battery runs on the full census, n <= 3")
    report = None
    if colorings is None:
        report, colorings = run_census(n, up_to_symmetry=False, workers=workers)
    bound = (1 << n) - 1
    checks = {
        "color_bound": [],
        "bound_attained": [],
        "uniform_direction": [],
        "forest": [],
        "spanning_tree": [],
        "subcube_restriction": [],
        "recognizer_equivalence": [],
    }
    counted = {k: 0 for k in checks}
    top = [c for c in colorings if color_count(c) == bound]

    for c in colorings:
        k = color_count(c)
        counted["color_bound"] += 1
        if k > bound:
            checks["color_bound"].append(c)
        counted["forest"] += 1
        f = extract_forest(c)
        if not f.is_acyclic() or {c.color_of(e) for e in f.edges} != set(c.colors) or len(f.edges) != k:
            checks["forest"].append(c)
        counted["recognizer_equivalence"] += 1
        if is_max_family(c) != (k == bound):
            checks["recognizer_equivalence"].append(c)
    counted["bound_attained"] = 1
    if not top:
        checks["bound_attained"].append(None)

    cube = Hypercube(n)
    for c in top:
        counted["uniform_direction"] += 1
        if uniform_direction(c) is None:
            checks["uniform_direction"].append(c)
        counted["spanning_tree"] += 1
        if not extract_forest(c).is_spanning_tree(n):
            checks["spanning_tree"].append(c)
        counted["subcube_restriction"] += 1
        for m in range(1, n):
            if any(color_count(restrict_to_subcube(c, s)) != (1 << m) - 1 for s in cube.subcubes(m)):
                checks["subcube_restriction"].append(c)
                break

    out = {
        name: {
            "passed": not bad,
            "checked": counted[name],
            "counterexamples": [None if c is None else list(c.colors) for c in bad[:5]],
        }
        for name, bad in checks.items()
    }
    out["census"] = {
        "admissible": len(colorings),
        "with_max_colors": len(top),
        "two_face_admissible": report.total_two_face_admissible if report else None,
    }
    return out
