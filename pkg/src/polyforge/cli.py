"""Command line front end.

Every subcommand maps onto one library entry point and obeys a common
contract: primary outputs (JSON, CSV, text tables) are byte-identical
across reruns with the same inputs and seed, every written file gets a
manifest entry with its digest, and exit codes mean 0 = success,
1 = a verification failed, 2 = usage or input-file problems.
"""

import argparse
import hashlib
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .constructions import (ConstructionError, GoodStructure, hexagon_good,
                            lift_w3, perp_plane, planar_one_good,
                            random_section, verify_tgood)
from .geometry import GeometryError
from .gf import FieldError
from .permgroup import (GroupError, PermGroup, Permutation,
                        collineation_generators, quadrangle_duality)
from .polygons import (IncidencePolygon, PolygonError, build_hexagon,
                       build_polygon, verify_polygon)
from .search import (SearchError, classify_solutions, class_table,
                     enumerate_with_group, lift_signatures, parallel_enumerate)
from .spectral import (SpectralError, cage_bounds, moore_bound,
                       polygon_second_eigenvalue_theory, second_eigenvalue,
                       tgood_upper_bound)

USER_ERRORS = (ConstructionError, GeometryError, FieldError, GroupError,
               PolygonError, SearchError, SpectralError,
               OSError, json.JSONDecodeError, KeyError, ValueError)

FLOAT_FMT = "{:.9f}"


class VerificationFailure(Exception):
    """Raised by handlers when a check fails; maps to exit code 1."""


@dataclass
class RunManifest:
    """Record of one CLI run: inputs, outputs, digests, timing."""

    command: str
    parameters: dict
    seed: int | None = None
    versions: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    def __post_init__(self):
        import matplotlib
        import numpy
        self.versions = {
            "polyforge": __version__,
            "python": sys.version.split()[0],
            "numpy": numpy.__version__,
            "matplotlib": matplotlib.__version__,
        }

    def add_input(self, path):
        self.inputs[os.path.basename(path)] = _digest(path)

    def add_output(self, path):
        self.outputs[os.path.basename(path)] = _digest(path)

    def write(self, path):
        data = {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "versions": self.versions,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "wall_time_s": round(self.wall_time_s, 3),
        }
        with open(path, "w") as fh:
            json.dump(data, fh, indent=1, sort_keys=True)
            fh.write("\n")


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_text(path, text, manifest):
    with open(path, "w") as fh:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")
    manifest.add_output(path)


def _manifest_path(out):
    base, _ = os.path.splitext(out)
    return base + ".manifest.json"


def _load_polygon(path, manifest=None):
    try:
        with open(path) as fh:
            text = fh.read()
        poly = IncidencePolygon.from_json(text)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConstructionError(f"cannot load polygon {path!r}: {exc}")
    if manifest is not None:
        manifest.add_input(path)
    return poly


def _load_structure(path, host, manifest=None):
    try:
        with open(path) as fh:
            struct = GoodStructure.from_json(fh.read(), host)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConstructionError(f"cannot load structure {path!r}: {exc}")
    if manifest is not None:
        manifest.add_input(path)
    return struct


def _aligned(rows):
    """Fixed-width text table from string rows (first row = header)."""
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join(
        "  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip()
        for r in rows)


def _jobs_default():
    return int(os.environ.get("POLYFORGE_JOBS", "1"))


# ---------------------------------------------------------------------
# subcommand handlers


def _cmd_build(args):
    manifest = RunManifest("build", {"polygon": args.polygon, "q": args.q})
    poly = build_polygon(args.polygon, args.q)
    text = poly.to_json()
    summary = (f"{args.polygon} q={args.q}: {poly.n_points} points, "
               f"{poly.n_lines} lines")
    if args.out:
        _write_text(args.out, text, manifest)
        manifest.write(_manifest_path(args.out))
        print(summary)
    else:
        print(text)
    return 0


def _cmd_verify_polygon(args):
    manifest = RunManifest("verify-polygon", {"host": args.host})
    poly = _load_polygon(args.host, manifest)
    rep = verify_polygon(poly)
    print(json.dumps(rep, indent=1, sort_keys=True))
    return 0 if rep["valid"] else 1


def _build_construct_host(args, manifest):
    if args.host:
        poly = _load_polygon(args.host, manifest)
        if poly.kind == "hexagon":
            fresh, ann = build_hexagon(poly.q)
            if fresh.line_points != poly.line_points:
                raise ConstructionError(
                    "hexagon host file disagrees with the fixed builder")
            return fresh, ann
        return poly, None
    if not args.polygon or args.q is None:
        raise ConstructionError("need --host or both --polygon and --q")
    if args.polygon == "hexagon":
        return build_hexagon(args.q)
    return build_polygon(args.polygon, args.q), None


def _cmd_construct(args):
    params = {k: getattr(args, k) for k in
              ("host", "polygon", "q", "kind", "point", "line", "base", "seed")}
    manifest = RunManifest("construct", params, seed=args.seed)
    poly, ann = _build_construct_host(args, manifest)

    planar_kinds = ("point-on-line", "point-off-line", "baer")
    if args.kind in planar_kinds:
        if poly.gon != 3:
            raise ConstructionError(f"{args.kind} needs a projective plane host")
        struct = planar_one_good(poly, args.kind, point=args.point,
                                 line=args.line)
    elif args.kind.startswith("lift-"):
        if poly.kind != "w3":
            raise ConstructionError("lift constructions need a w3 host")
        plane = perp_plane(poly, args.base)
        planar = planar_one_good(plane, args.kind[len("lift-"):],
                                 point=args.point, line=args.line)
        struct = lift_w3(poly, args.base, planar)
    elif args.kind == "hexagon-section":
        if poly.kind != "hexagon":
            raise ConstructionError("hexagon-section needs a hexagon host")
        rng = random.Random(args.seed)
        struct = _random_hexagon_structure(poly, ann, rng)
    else:
        raise ConstructionError(f"unknown construction kind {args.kind!r}")

    rep = verify_tgood(struct, girth=False)
    if not rep["valid"]:
        raise VerificationFailure(
            f"constructed structure failed verification: {rep}")
    summary = (f"{args.kind}: size {struct.size} "
               f"({len(struct.point_ids)} points, {len(struct.line_ids)} lines)")
    if args.out:
        _write_text(args.out, struct.to_json(), manifest)
        manifest.write(_manifest_path(args.out))
        print(summary)
    else:
        print(struct.to_json())
    return 0


def _random_hexagon_structure(poly, ann, rng):
    from .constructions import _mask_ids, _section_mask
    # a 4-space always meets the quadric; retry only guards the rare
    # seeds whose section misses a usable base point
    for _ in range(64):
        section = random_section(poly.space, rng)
        inside = _mask_ids(_section_mask(poly, ann, section))
        if not inside:
            continue
        return hexagon_good(poly, ann, section, inside[0])[0]
    raise ConstructionError("no usable hexagon section found")


def _cmd_verify_good(args):
    manifest = RunManifest("verify-good",
                           {"host": args.host, "structure": args.structure,
                            "girth": args.girth})
    poly = _load_polygon(args.host, manifest)
    struct = _load_structure(args.structure, poly, manifest)
    rep = verify_tgood(struct, girth=args.girth)
    print(json.dumps(rep, indent=1, sort_keys=True))
    return 0 if rep["valid"] else 1


def _bound_report(args):
    picked = [args.tgood, args.moore, args.cage]
    if sum(picked) != 1:
        raise ConstructionError("pick exactly one of --tgood, --moore, --cage")
    if args.tgood:
        if args.n is None or args.q is None:
            raise ConstructionError("--tgood needs --n and --q")
        return tgood_upper_bound(args.n, args.q, args.t)
    if args.moore:
        if args.k is None or args.g is None:
            raise ConstructionError("--moore needs --k and --g")
        return moore_bound(args.k, args.g)
    if args.q is None or args.g is None:
        raise ConstructionError("--cage needs --q and --g")
    return cage_bounds(args.q, args.g)


def _cmd_bound(args):
    rep = _bound_report(args)
    data = {"name": rep.name, "params": rep.params,
            "value": rep.value, "floor": rep.floor, "note": rep.note}
    if args.json:
        print(json.dumps(data, indent=1, sort_keys=True))
    else:
        params = " ".join(f"{k}={v}" for k, v in sorted(rep.params.items()))
        print(f"{rep.name} ({params})")
        print(f"value {FLOAT_FMT.format(rep.value)}")
        print(f"floor {rep.floor}")
        if rep.note:
            print(f"note  {rep.note}")
    return 0


def _cmd_spectrum(args):
    manifest = RunManifest("spectrum", {"host": args.host,
                                        "polygon": args.polygon, "q": args.q})
    if args.host:
        poly = _load_polygon(args.host, manifest)
    elif args.polygon and args.q is not None:
        poly = build_polygon(args.polygon, args.q)
    else:
        raise ConstructionError("need --host or both --polygon and --q")
    lam1, lam2 = second_eigenvalue(poly)
    theory = polygon_second_eigenvalue_theory(poly.gon, poly.q)
    diff = abs(lam2 - theory)
    data = {"kind": poly.kind, "q": poly.q,
            "lambda1": lam1, "lambda2": lam2,
            "theory": theory, "difference": diff, "tolerance": args.tol}
    if args.json:
        print(json.dumps(data, indent=1, sort_keys=True))
    else:
        print(_aligned([
            ("field", "value"),
            ("kind", poly.kind),
            ("q", str(poly.q)),
            ("lambda1", FLOAT_FMT.format(lam1)),
            ("lambda2", FLOAT_FMT.format(lam2)),
            ("theory", FLOAT_FMT.format(theory)),
            ("difference", FLOAT_FMT.format(diff)),
        ]))
    return 0 if diff <= args.tol else 1


def _solutions_json(poly, solutions):
    data = {
        "host": {"kind": poly.kind, "q": poly.q,
                 "points": poly.n_points, "lines": poly.n_lines},
        "t": solutions[0].t if solutions else 1,
        "count": len(solutions),
        "solutions": [[list(s.point_ids), list(s.line_ids)]
                      for s in solutions],
    }
    return json.dumps(data, sort_keys=True, indent=1)


def _load_solutions(path, poly, manifest):
    try:
        with open(path) as fh:
            data = json.load(fh)
        hd = data["host"]
        if (hd["kind"], hd["q"]) != (poly.kind, poly.q):
            raise ConstructionError("solutions were saved for a different host")
        t = data["t"]
        sols = [GoodStructure(poly, t, pts, lns)
                for pts, lns in data["solutions"]]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConstructionError(f"cannot load solutions {path!r}: {exc}")
    manifest.add_input(path)
    return sols


def _classes_json(classes):
    rows = [{
        "subgraph_size": c.subgraph_size,
        "stabilizer_order": c.stabilizer_order,
        "orbits_subgraph": list(c.orbits_subgraph),
        "orbits_structure": list(c.orbits_structure),
        "from_lift": c.from_lift,
        "class_size": c.class_size,
        "representative": [list(c.structure.point_ids),
                           list(c.structure.line_ids)],
    } for c in classes]
    return json.dumps({"count": len(rows), "classes": rows},
                      sort_keys=True, indent=1)


def _classify(poly, solutions):
    group = collineation_generators(poly)
    masks = lift_signatures(poly) if poly.kind == "w3" else None
    # even-q quadrangles are self-dual; tables of their solution
    # classes are conventionally given up to dualities as well
    fuse = ()
    if poly.kind == "w3" and poly.q % 2 == 0:
        fuse = (quadrangle_duality(poly),)
    return classify_solutions(solutions, group, lift_masks=masks, fuse=fuse)


def _size_histogram(solutions):
    hist = {}
    for s in solutions:
        hist[s.size] = hist.get(s.size, 0) + 1
    return hist


def _cmd_search(args):
    params = {k: getattr(args, k) for k in
              ("host", "t", "jobs", "checkpoint", "root_break",
               "include_full", "classify", "group")}
    manifest = RunManifest("search", params)
    t0 = time.time()
    poly = _load_polygon(args.host, manifest)
    if args.group:
        sub = _load_group(args.group, poly, manifest)
        solutions = sorted(
            enumerate_with_group(poly, sub, t=args.t,
                                 include_full=args.include_full),
            key=lambda s: (s.size, s.point_ids, s.line_ids))
    else:
        solutions = parallel_enumerate(
            poly, t=args.t, jobs=args.jobs, root_break=args.root_break,
            include_full=args.include_full, checkpoint=args.checkpoint)
    hist = _size_histogram(solutions)
    print(f"solutions: {len(solutions)}")
    print(_aligned([("size", "count")] +
                   [(str(k), str(v)) for k, v in sorted(hist.items())]))

    classes = None
    if args.classify:
        classes = _classify(poly, solutions)
        print(f"classes: {len(classes)}")
        print(class_table(classes))

    if args.out:
        _write_text(args.out + ".solutions.json",
                    _solutions_json(poly, solutions), manifest)
        if classes is not None:
            _write_text(args.out + ".classes.json", _classes_json(classes),
                        manifest)
            _write_text(args.out + ".classes.txt", class_table(classes),
                        manifest)
        manifest.wall_time_s = time.time() - t0
        manifest.write(args.out + ".manifest.json")
    return 0


def _load_group(path, poly, manifest):
    try:
        with open(path) as fh:
            data = json.load(fh)
        degree = data["degree"]
        gens = [Permutation(g) for g in data["generators"]]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConstructionError(f"cannot load group {path!r}: {exc}")
    if degree != poly.n_points + poly.n_lines:
        raise ConstructionError("group degree does not match the host")
    manifest.add_input(path)
    return PermGroup(degree, gens)


def _cmd_classify(args):
    manifest = RunManifest("classify", {"host": args.host,
                                        "solutions": args.solutions})
    t0 = time.time()
    poly = _load_polygon(args.host, manifest)
    solutions = _load_solutions(args.solutions, poly, manifest)
    classes = _classify(poly, solutions)
    print(f"classes: {len(classes)}")
    print(class_table(classes))
    if args.out:
        _write_text(args.out + ".classes.json", _classes_json(classes),
                    manifest)
        _write_text(args.out + ".classes.txt", class_table(classes), manifest)
        manifest.wall_time_s = time.time() - t0
        manifest.write(args.out + ".manifest.json")
    return 0


def _cmd_report(args):
    from .report import write_report
    t0 = time.time()
    manifest = RunManifest("report", {"outdir": args.outdir,
                                      "skip_search": args.skip_search},
                           seed=args.seed)
    files = write_report(args.outdir, skip_search=args.skip_search)
    for path in files:
        manifest.add_output(path)
    manifest.wall_time_s = time.time() - t0
    manifest.write(os.path.join(args.outdir, "manifest.json"))
    for path in files:
        print(os.path.relpath(path, args.outdir))
    return 0


# ---------------------------------------------------------------------
# parser


def _build_parser():
    top = argparse.ArgumentParser(
        prog="polyforge",
        description="generalized polygons, t-good structures, bounds, searches")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a polygon and write its JSON")
    p.add_argument("--polygon", required=True,
                   choices=("pg2", "w3", "hexagon"))
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("verify-polygon", help="check the polygon axioms")
    p.add_argument("--host", required=True)
    p.set_defaults(func=_cmd_verify_polygon)

    p = sub.add_parser("construct", help="build a t-good structure")
    p.add_argument("--host")
    p.add_argument("--polygon", choices=("pg2", "w3", "hexagon"))
    p.add_argument("--q", type=int)
    p.add_argument("--kind", required=True)
    p.add_argument("--point", type=int)
    p.add_argument("--line", type=int)
    p.add_argument("--base", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("verify-good", help="verify a t-good structure")
    p.add_argument("--host", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("--girth", action=argparse.BooleanOptionalAction,
                   default=True)
    p.set_defaults(func=_cmd_verify_good)

    p = sub.add_parser("bound", help="evaluate a size or cage bound")
    p.add_argument("--tgood", action="store_true")
    p.add_argument("--moore", action="store_true")
    p.add_argument("--cage", action="store_true")
    p.add_argument("--n", type=int, help="gonality for --tgood")
    p.add_argument("--q", type=int)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--k", type=int, help="degree for --moore")
    p.add_argument("--g", type=int, help="girth for --moore/--cage")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("spectrum", help="second eigenvalue vs theory")
    p.add_argument("--host")
    p.add_argument("--polygon", choices=("pg2", "w3", "hexagon"))
    p.add_argument("--q", type=int)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("search", help="enumerate t-good structures")
    p.add_argument("--host", required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--jobs", type=int, default=_jobs_default())
    p.add_argument("--checkpoint")
    p.add_argument("--root-break", dest="root_break",
                   action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--include-full", action="store_true")
    p.add_argument("--classify", action="store_true")
    p.add_argument("--group", help="JSON file restricting to a subgroup")
    p.add_argument("--out", help="prefix for output files")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("classify", help="classify stored solutions")
    p.add_argument("--host", required=True)
    p.add_argument("--solutions", required=True)
    p.add_argument("--out", help="prefix for output files")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("report", help="render tables, CSVs and figures")
    p.add_argument("--outdir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skip-search", action="store_true")
    p.set_defaults(func=_cmd_report)

    return top


def cli_dispatch(argv):
    """Parse argv and run one subcommand; returns the exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return args.func(args)
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    return cli_dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
