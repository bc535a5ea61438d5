"""Command-line entry point: ``uobkit <command> ...``.

Every command prints JSON on standard output.  Exit status is 0 on success,
1 when a check or verification fails (the JSON then says why), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import census, constructors, formats
from .coloring import (
    ColoringError,
    EdgeColoring,
    color_count,
    is_admissible,
    is_max_family,
    is_maximal,
    is_two_face_admissible,
    separate_directions,
    uniform_direction,
)
from .cube import MAX_DIM, CubeError
from .dot import export_dot
from .locc import (
    ProtocolError,
    extract_protocol,
    fixed_order_protocol,
    is_locc_distinguishable,
    simulate_all,
)
from .uob import DEFAULT_TOL, UobError, position_of, recover_coloring, sample_assignment, synthesize, verify_uob


class Failure(Exception):
    """A command ran but its check failed; ``payload`` is printed as JSON."""

    def __init__(self, payload: dict):
        super().__init__(payload.get("error", "failure"))
        self.payload = payload


def _dim(lo: int, hi: int = MAX_DIM):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if not lo <= v <= hi:
            raise argparse.ArgumentTypeError(f"must be in {lo}..{hi}, got {v}")
        return v

    return parse


def _positive_int(text: str) -> int:
    return _dim(1, 1 << 30)(text)


def _load(spec: str) -> formats.ColoringDocument:
    """A coloring file, or ``fixture:NAME`` for a packaged fixture."""
    if spec.startswith("fixture:"):
        return formats.packaged_fixture(spec.split(":", 1)[1])
    return formats.load_coloring_document(spec)


def _emit(obj, output: Optional[str] = None, text: Optional[str] = None):
    body = text if text is not None else formats.dumps(obj)
    if output:
        Path(output).write_text(body)
    else:
        sys.stdout.write(body)


def _summary(c: EdgeColoring) -> dict:
    return {"n": c.n, "colors": color_count(c)}


# -- commands -----------------------------------------------------------------------


def cmd_check(args) -> int:
    c = _load(args.input).coloring
    admissible = is_admissible(c)
    report = {
        "n": c.n,
        "admissible": admissible,
        "two_face_admissible": is_two_face_admissible(c),
        "colors": color_count(c),
        "maximal": is_maximal(c) if admissible else None,
        "locc": is_locc_distinguishable(c) if admissible else None,
    }
    if not admissible:
        report["error"] = "coloring is not admissible"
    _emit(report)
    return 0 if admissible else 1


def cmd_classify(args) -> int:
    c = _load(args.input).coloring
    if not is_admissible(c):
        raise Failure({"error": "coloring is not admissible", **_summary(c)})
    d = uniform_direction(c)
    _emit({
        **_summary(c),
        "bound": (1 << c.n) - 1,
        "max_family": is_max_family(c),
        "locc": is_locc_distinguishable(c),
        "uniform_direction": d,
        "uniform_position": None if d is None else position_of(d, c.n),
    })
    return 0


def cmd_enumerate(args) -> int:
    report, colorings = census.run_census(
        args.n,
        up_to_symmetry=args.up_to_symmetry,
        maximal_only=args.maximal_only,
        workers=args.workers,
        time_budget=args.time_budget,
        node_budget=args.node_budget,
        checkpoint=args.checkpoint,
    )
    if args.output:
        Path(args.output).write_text(
            "".join(json.dumps(list(c.colors)) + "\n" for c in colorings)
        )
    _emit(report.to_dict(timing=args.timing))
    return 0 if report.complete else 1


def cmd_construct(args) -> int:
    kind = args.kind
    names = None
    meta: dict = {"generator": kind}
    if kind == "max":
        _need(args, "n")
        if args.seed is None:
            c = constructors.construct_max(args.n)
        else:
            import numpy as np

            c = constructors.random_max_family(args.n, np.random.default_rng(args.seed))
            meta["seed"] = args.seed
    elif kind == "minimal":
        _need(args, "n")
        c = constructors.minimal_coloring(args.n)
    elif kind == "bdf":
        _need(args, "n")
        try:
            c = constructors.generalized_bdf(args.n)
        except constructors.PatternError as e:
            raise Failure({"error": str(e), "n": args.n})
    elif kind == "cone":
        if not args.input or len(args.input) != 2:
            raise _usage("construct cone needs --input twice (bottom and top)")
        c = constructors.cone(_load(args.input[0]).coloring, _load(args.input[1]).coloring)
        meta["inputs"] = args.input
    elif kind == "double":
        if not args.input or len(args.input) != 1:
            raise _usage("construct double needs exactly one --input")
        c = constructors.doubling(_load(args.input[0]).coloring)
        meta["inputs"] = args.input
    else:  # fixture
        if not args.name:
            raise _usage("construct fixture needs --name")
        c, names = constructors.fixture_with_names(args.name)
        meta["name"] = args.name
    if kind in ("max", "minimal", "bdf"):
        meta["n"] = args.n
    doc = formats.ColoringDocument(c, names, meta)
    if args.output:
        Path(args.output).write_text(doc.to_json())
        _emit({**_summary(c), "written": args.output})
    else:
        sys.stdout.write(doc.to_json())
    return 0


def cmd_synthesize(args) -> int:
    c = _load(args.coloring).coloring
    a = sample_assignment(c, args.min_separation, args.seed)
    u = synthesize(c, a)
    rep = verify_uob(u, args.tolerance)
    if not rep.passed:
        raise Failure({"error": "synthesized basis is not orthonormal", **rep.to_dict()})
    doc = formats.uob_to_dict(u, args.tolerance, {
        "generator": "synthesize",
        "coloring": args.coloring,
        "seed": args.seed,
        "min_separation": args.min_separation,
    })
    _emit(doc, args.output)
    return 0


def cmd_recover(args) -> int:
    u, _ = formats.load_uob(args.input)
    rep = verify_uob(u, args.tolerance)
    if not rep.passed:
        raise Failure({"error": "input basis is not orthonormal", **rep.to_dict()})
    rec = recover_coloring(u)
    c = separate_directions(rec.coloring) if args.separate_directions else rec.coloring
    doc = formats.ColoringDocument(c, None, {"generator": "recover", "source": args.input})
    _emit({
        "coloring": doc.to_dict(),
        "colors": color_count(c),
        "vertex_of_state": list(rec.vertex_of_state),
        "t0": [[[r.alpha.real, r.alpha.imag], [r.beta.real, r.beta.imag]] for r in rec.t0],
    }, args.output)
    return 0


def cmd_simulate(args) -> int:
    c = _load(args.coloring).coloring
    a = sample_assignment(c, args.min_separation, args.seed)
    u = synthesize(c, a)
    if args.order:
        order = [int(x) for x in args.order.split(",")]
        t = fixed_order_protocol(c, a, order)
    else:
        t = extract_protocol(c, a)
    if args.protocol_out:
        Path(args.protocol_out).write_text(formats.dumps(formats.protocol_to_dict(t, c.n)))
    secrets = None if args.secret is None else [args.secret]
    if args.secret is not None and not 0 <= args.secret < (1 << c.n):
        raise _usage(f"--secret must be in 0..{(1 << c.n) - 1}")
    rows = simulate_all(u, t, seed=args.seed, tol=args.tolerance, workers=args.workers, secrets=secrets)
    certain = all(r.certain for r in rows)
    _emit({"certain": certain, "rows": formats.simulation_rows(rows)}, args.output)
    return 0 if certain else 1


def cmd_min_colors(args) -> int:
    _emit(census.min_colors(args.n, workers=args.workers).to_dict())
    return 0


def cmd_verify_theorems(args) -> int:
    out = census.verify_extremal_theorems(args.n, workers=args.workers)
    passed = all(v["passed"] for k, v in out.items() if k != "census")
    _emit({"passed": passed, **out})
    return 0 if passed else 1


def cmd_export_dot(args) -> int:
    doc = _load(args.input)
    _emit(None, args.output, export_dot(doc.coloring, doc.color_names, layout=args.layout))
    return 0


# -- parser ---------------------------------------------------------------------


class _UsageError(Exception):
    pass


def _usage(msg: str) -> _UsageError:
    return _UsageError(msg)


def _need(args, flag: str):
    if getattr(args, flag) is None:
        raise _usage(f"--{flag} is required for construct {args.kind}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uobkit", description="Hypercube colorings and product bases of qubits.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def workers(sp):
        sp.add_argument("--workers", type=_positive_int, default=None,
                        help=f"worker processes (default: ${census.WORKERS_ENV} or 1)")

    sp = sub.add_parser("check", help="admissibility, color count, maximality, local distinguishability")
    sp.add_argument("input", help="coloring JSON file or fixture:NAME")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("classify", help="local distinguishability of an admissible coloring")
    sp.add_argument("input")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("enumerate", help="census of admissible colorings")
    sp.add_argument("--n", type=_dim(1, 4), required=True)
    sp.add_argument("--up-to-symmetry", action="store_true")
    sp.add_argument("--maximal-only", action="store_true")
    sp.add_argument("--time-budget", type=float, default=None, help="seconds")
    sp.add_argument("--node-budget", type=_positive_int, default=None)
    sp.add_argument("--checkpoint", default=None, help="resume file")
    sp.add_argument("--output", default=None, help="write the colorings, one JSON word per line")
    sp.add_argument("--timing", action="store_true", help="include wall time (breaks byte stability)")
    workers(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("construct", help="build a coloring")
    sp.add_argument("kind", choices=["max", "bdf", "cone", "double", "minimal", "fixture"])
    sp.add_argument("--n", type=_dim(1))
    sp.add_argument("--input", action="append", help="input coloring (twice for cone)")
    sp.add_argument("--name", choices=constructors.FIXTURE_NAMES)
    sp.add_argument("--seed", type=int, default=None, help="random splitting directions for max")
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_construct)

    for name, func, helptext in (
        ("synthesize", cmd_synthesize, "random separated assignment and the resulting basis"),
        ("simulate", cmd_simulate, "run the adaptive measurement protocol"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--coloring", required=True)
        sp.add_argument("--seed", type=int, required=True)
        sp.add_argument("--min-separation", type=float, default=0.1)
        sp.add_argument("--output", default=None)
        sp.set_defaults(func=func)
        if name == "synthesize":
            sp.add_argument("--tolerance", type=float, default=DEFAULT_TOL.gram)
        else:
            sp.add_argument("--tolerance", type=float, default=DEFAULT_TOL.certainty)
            sp.add_argument("--secret", type=int, default=None, help="one vertex (default: all)")
            sp.add_argument("--order", default=None, help="fixed comma-separated position order")
            sp.add_argument("--protocol-out", default=None, help="write the protocol tree JSON")
            workers(sp)

    sp = sub.add_parser("recover", help="read a coloring off a basis file")
    sp.add_argument("--input", required=True)
    sp.add_argument("--tolerance", type=float, default=DEFAULT_TOL.gram)
    sp.add_argument("--separate-directions", action="store_true")
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_recover)

    sp = sub.add_parser("min-colors", help="C(n), exact or bounds")
    sp.add_argument("--n", type=_dim(2), required=True)
    workers(sp)
    sp.set_defaults(func=cmd_min_colors)

    sp = sub.add_parser("verify-theorems", help="extremal checks over the full census")
    sp.add_argument("--n", type=_dim(1, census.FULL_CENSUS_MAX_N), required=True)
    workers(sp)
    sp.set_defaults(func=cmd_verify_theorems)

    sp = sub.add_parser("export-dot", help="GraphViz text")
    sp.add_argument("input")
    sp.add_argument("--layout", choices=["cube", "auto"], default="cube")
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_export_dot)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as e:
        parser.error(str(e))
    except Failure as e:
        _emit(e.payload)
    except formats.FormatError as e:
        _emit({"error": "invalid input", "location": e.location, "message": e.message})
    except (OSError, KeyError) as e:
        _emit({"error": type(e).__name__, "message": str(e)})
    except (ColoringError, CubeError, UobError, ProtocolError, census.CensusError, ValueError) as e:
        _emit({"error": type(e).__name__, "message": str(e)})
    return 1


if __name__ == "__main__":
    sys.exit(main())
