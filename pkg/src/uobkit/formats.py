"""JSON documents for colorings, bases, protocols and simulation rows."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from .coloring import EdgeColoring
from .cube import CubeError, Edge, Hypercube, MAX_DIM
from .uob import ProductState, QubitRay, Uob

SCHEMA_VERSION = 1
COLORING_FORMAT = "uobkit-coloring"
UOB_FORMAT = "uobkit-uob"
PROTOCOL_FORMAT = "uobkit-protocol"

PathLike = Union[str, Path]


class FormatError(ValueError):
    """Malformed document; ``location`` is a JSON path such as ``$.edges[3].to``."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location
        self.message = message


@dataclass
class ColoringDocument:
    coloring: EdgeColoring
    color_names: Optional[list[str]] = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        c = self.coloring
        names = self.color_names
        edges = []
        for e in c.cube.edges():
            a, b = e.endpoints
            k = c.color_of(e)
            edges.append({"from": a, "to": b, "color": names[k] if names else k})
        meta = dict(self.metadata)
        if names:
            meta["color_names"] = list(names)
        return {
            "format": COLORING_FORMAT,
            "schema_version": SCHEMA_VERSION,
            "n": c.n,
            "edges": edges,
            "metadata": meta,
        }

    def to_json(self) -> str:
        """Indented JSON with one line per edge record."""
        d = self.to_dict()
        edges = d.pop("edges")
        head = json.dumps(d, indent=2)
        body = ",\n".join("    " + json.dumps(e) for e in edges)
        meta_at = head.index('  "metadata"')
        return head[:meta_at] + '  "edges": [\n' + body + "\n  ],\n" + head[meta_at:] + "\n"


_DOC_FIELDS = {"format", "schema_version", "n", "edges", "metadata"}
_EDGE_FIELDS = {"from", "to", "color"}


def _reject_unknown(obj: dict, allowed: set, where: str):
    for key in obj:
        if key not in allowed:
            raise FormatError(f"{where}.{key}", "unknown field")


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise FormatError(where, f"missing field {key!r}")
    val = obj[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise FormatError(f"{where}.{key}", f"expected an integer, got {val!r}")
    if kind is not int and not isinstance(val, kind):
        raise FormatError(f"{where}.{key}", f"expected {kind.__name__}, got {type(val).__name__}")
    return val


def _parse_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{source}:{e.lineno}:{e.colno}", f"malformed JSON ({e.msg})") from None


def coloring_from_dict(doc: Any) -> ColoringDocument:
    if not isinstance(doc, dict):
        raise FormatError("$", "expected a JSON object")
    _reject_unknown(doc, _DOC_FIELDS, "$")
    if doc.get("format", COLORING_FORMAT) != COLORING_FORMAT:
        raise FormatError("$.format", f"expected {COLORING_FORMAT!r}, got {doc['format']!r}")
    version = _require(doc, "schema_version", int, "$")
    if version != SCHEMA_VERSION:
        raise FormatError("$.schema_version", f"unsupported version {version}")
    n = _require(doc, "n", int, "$")
    if not 1 <= n <= MAX_DIM:
        raise FormatError("$.n", f"dimension must be in 1..{MAX_DIM}")
    edges = _require(doc, "edges", list, "$")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise FormatError("$.metadata", "expected an object")

    cube = Hypercube(n)
    labels: dict[Edge, Any] = {}
    first_at: dict[Edge, int] = {}
    for i, rec in enumerate(edges):
        where = f"$.edges[{i}]"
        if not isinstance(rec, dict):
            raise FormatError(where, "expected an object")
        _reject_unknown(rec, _EDGE_FIELDS, where)
        a = _require(rec, "from", int, where)
        b = _require(rec, "to", int, where)
        if "color" not in rec:
            raise FormatError(where, "missing field 'color'")
        label = rec["color"]
        if isinstance(label, bool) or not isinstance(label, (int, str)):
            raise FormatError(f"{where}.color", "expected a color name or integer id")
        for key, v in (("from", a), ("to", b)):
            if not 0 <= v < cube.num_vertices:
                raise FormatError(f"{where}.{key}", f"vertex {v} out of range for n={n}")
        try:
            e = Edge.between(a, b)
        except CubeError:
            raise FormatError(where, f"{a} and {b} are not adjacent (Hamming distance {bin(a ^ b).count('1')})") from None
        if e in labels:
            raise FormatError(where, f"duplicate edge {e} (first at $.edges[{first_at[e]}])")
        labels[e] = label
        first_at[e] = i
    for e in cube.edges():
        if e not in labels:
            raise FormatError("$.edges", f"missing edge {e}")

    values = [labels[e] for e in cube.edges()]
    names = None
    if all(isinstance(v, int) for v in values):
        if min(values) < 0:
            raise FormatError("$.edges", "color ids must be non-negative")
        colors = values
        given = meta.get("color_names")
        if isinstance(given, list) and len(given) > max(values):
            names = [str(x) for x in given]
    else:
        order: dict[Any, int] = {}
        given = meta.get("color_names")
        if isinstance(given, list) and set(map(_label_key, values)) <= set(map(_label_key, given)):
            for g in given:
                order.setdefault(_label_key(g), len(order))
        for rec in edges:
            order.setdefault(_label_key(rec["color"]), len(order))
        colors = [order[_label_key(v)] for v in values]
        names = [str(k[1]) for k in order]
    meta = {k: v for k, v in meta.items() if k != "color_names"}
    return ColoringDocument(EdgeColoring(n, tuple(colors)), names, meta)


def _label_key(v):
    return (type(v).__name__, v)


def loads_coloring(text: str, source: str = "<string>") -> ColoringDocument:
    return coloring_from_dict(_parse_json(text, source))


def load_coloring_document(path: PathLike) -> ColoringDocument:
    p = Path(path)
    return loads_coloring(p.read_text(), str(p))


def load_coloring(path: PathLike) -> EdgeColoring:
    return load_coloring_document(path).coloring


def save_coloring(
    c: EdgeColoring,
    path: PathLike,
    color_names: Optional[Sequence[str]] = None,
    metadata: Optional[dict] = None,
):
    doc = ColoringDocument(c, list(color_names) if color_names else None, dict(metadata or {}))
    Path(path).write_text(doc.to_json())


def packaged_fixture(name: str) -> ColoringDocument:
    """The fixture documents shipped in ``uobkit/data``."""
    ref = resources.files("uobkit").joinpath("data", f"{name}.json")
    if not ref.is_file():
        raise KeyError(f"no packaged fixture {name!r}")
    return loads_coloring(ref.read_text(), f"uobkit/data/{name}.json")


# -- bases ----------------------------------------------------------------------


def uob_to_dict(u: Uob, tolerance: float, provenance: Optional[dict] = None) -> dict:
    """Amplitudes as ``[re, im]`` pairs; floats use the shortest round-trip repr."""
    return {
        "format": UOB_FORMAT,
        "schema_version": SCHEMA_VERSION,
        "n": u.n,
        "tolerance": tolerance,
        "provenance": dict(provenance or {}),
        "states": [
            [[[f.alpha.real, f.alpha.imag], [f.beta.real, f.beta.imag]] for f in s.factors]
            for s in u.states
        ],
    }


def uob_from_dict(doc: Any) -> tuple[Uob, dict]:
    if not isinstance(doc, dict):
        raise FormatError("$", "expected a JSON object")
    _reject_unknown(doc, {"format", "schema_version", "n", "tolerance", "provenance", "states"}, "$")
    if doc.get("format", UOB_FORMAT) != UOB_FORMAT:
        raise FormatError("$.format", f"expected {UOB_FORMAT!r}")
    n = _require(doc, "n", int, "$")
    states = _require(doc, "states", list, "$")
    if len(states) != 1 << n:
        raise FormatError("$.states", f"expected {1 << n} states, got {len(states)}")
    out = []
    for i, s in enumerate(states):
        if not isinstance(s, list) or len(s) != n:
            raise FormatError(f"$.states[{i}]", f"expected {n} factors")
        factors = []
        for p, f in enumerate(s):
            where = f"$.states[{i}][{p}]"
            try:
                (ar, ai), (br, bi) = f
                factors.append(QubitRay(complex(float(ar), float(ai)), complex(float(br), float(bi))))
            except (TypeError, ValueError) as e:
                raise FormatError(where, f"expected [[re, im], [re, im]] ({e})") from None
        out.append(ProductState(tuple(factors)))
    header = {k: doc[k] for k in ("tolerance", "provenance") if k in doc}
    return Uob(tuple(out)), header


def save_uob(u: Uob, path: PathLike, tolerance: float, provenance: Optional[dict] = None):
    Path(path).write_text(json.dumps(uob_to_dict(u, tolerance, provenance), indent=1) + "\n")


def load_uob(path: PathLike) -> tuple[Uob, dict]:
    p = Path(path)
    return uob_from_dict(_parse_json(p.read_text(), str(p)))


# -- protocols and simulations ----------------------------------------------------


def protocol_to_dict(t, n: int) -> dict:
    return {"format": PROTOCOL_FORMAT, "schema_version": SCHEMA_VERSION, "n": n, "tree": t.to_dict()}


def protocol_from_dict(doc: Any):
    from .locc import tree_from_dict, validate_tree

    if not isinstance(doc, dict) or doc.get("format") != PROTOCOL_FORMAT:
        raise FormatError("$.format", f"expected {PROTOCOL_FORMAT!r}")
    n = _require(doc, "n", int, "$")
    try:
        t = tree_from_dict(_require(doc, "tree", dict, "$"))
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError("$.tree", f"malformed tree ({e})") from None
    validate_tree(t, n)
    return t, n


def simulation_rows(results) -> list[dict]:
    return [r.to_dict() for r in results]


def dumps(obj: Any) -> str:
    """Stable JSON text used for every command output."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
