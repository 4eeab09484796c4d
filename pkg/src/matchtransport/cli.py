"""Deterministic command-line interface.

Subcommands:
  delta      matching distance between two measure files
  transport  build a transport map between two measure files
  transport eval  apply a saved transport map to a point
  weyl       matrix-level distances between unitary orbits

Exit codes: 2 malformed input, 3 space mismatch, 4 constructive failure,
5 normality defect exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import circle as circle_mod
from . import convex as convex_mod
from . import serialize as io
from .errors import ConstructiveFailure, MalformedInput, NormalityDefectExceeded, SpaceMismatch
from .interval import increasing_rearrangement
from .measure import (
    CdfMeasure,
    EmpiricalMeasure,
    delta_cdf_interval,
    delta_circle,
    delta_empirical,
)
from .spaces import Circle, ConvexBody, Interval
from .spectral import (
    distance_to_set_probe,
    lipschitz_probe,
    minimize_orbit_distance,
    realizing_unitary,
    weyl_delta,
)

SEED_ENV = "SPECTRAL_TRANSPORT_SEED"


def _emit(rep, out_path, as_json):
    text = io.dumps(rep)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    if as_json and not out_path:
        sys.stdout.write(text)


def _load_pair(a_path, b_path):
    sa, ma = io.measure_from_dict(io.load_json(a_path))
    sb, mb = io.measure_from_dict(io.load_json(b_path))
    if sa != sb:
        raise SpaceMismatch(f"measure spaces differ: {sa!r} vs {sb!r}")
    if type(ma) is not type(mb):
        raise SpaceMismatch("measure kinds differ (field: kind)")
    return sa, ma, mb


def _cmd_delta(args):
    space, ma, mb = _load_pair(args.a, args.b)
    certs = []
    bound = None
    if isinstance(ma, EmpiricalMeasure):
        value = delta_empirical(ma, mb)
    elif isinstance(space, Interval):
        value = delta_cdf_interval(ma, mb) * space.diameter
    elif isinstance(space, Circle):
        value, bound = delta_circle(ma, mb, args.depth, radius=space.radius)
        certs.append(io.certificate("discretization_error_bound", bound, 4.0 * np.pi * space.radius / 2 ** args.depth))
        if args.dump_series:
            with open(args.dump_series, "w") as fh:
                fh.write("depth,estimate,bound\n")
                for d in range(2, args.depth + 1):
                    est_d, b_d = delta_circle(ma, mb, d, radius=space.radius)
                    fh.write(f"{d},{est_d!r},{b_d!r}\n")
    else:
        raise MalformedInput("cdf measures on convex bodies are not supported; use empirical")
    outputs = {"delta": value}
    if bound is not None:
        outputs["error_bound"] = bound
    print(f"delta = {value!r}" + (f" (error bound {bound!r})" if bound is not None else ""))
    rep = io.report(
        "delta",
        {"a": io.file_digest(args.a), "b": io.file_digest(args.b)},
        outputs,
        certs,
    )
    _emit(rep, args.out, args.json)
    return 0


def _cmd_transport(args):
    space, ma, mb = _load_pair(args.a, args.b)
    certs = []
    if isinstance(space, Interval):
        if not isinstance(ma, CdfMeasure):
            raise MalformedInput("interval transport needs cdf measures")
        h = increasing_rearrangement(ma, mb)
        outputs = {"map": io.transport1d_to_dict(h), "displacement": h.displacement}
        certs.append(
            io.certificate(
                "displacement_le_delta",
                h.displacement,
                delta_cdf_interval(ma, mb) + 1e-9,
            )
        )
        print(f"interval transport displacement = {h.displacement!r}")
    elif isinstance(space, Circle):
        if not isinstance(ma, CdfMeasure):
            raise MalformedInput("circle transport needs cdf measures")
        disc = circle_mod.discretize_circle(mb, ma, args.depth, radius=space.radius)
        homeo = circle_mod.build_circle_homeomorphism(disc)
        outputs = {
            "map": io.circle_homeo_to_dict(homeo),
            "displacement": homeo.displacement,
        }
        certs.append(
            io.certificate(
                "displacement_equals_discretized_delta",
                abs(homeo.displacement - disc.empirical_delta()),
                1e-9,
            )
        )
        certs.append(io.certificate("pushforward_defect_bound", 2.0 * disc.cell_bound, 4.0 * disc.cell_bound))
        print(f"circle transport displacement = {homeo.displacement!r}")
    elif isinstance(space, ConvexBody):
        if not isinstance(ma, EmpiricalMeasure):
            raise MalformedInput("convex transport takes empirical measures (point lists)")
        homeo = convex_mod.build_tube_homeomorphism(
            mb.points, ma.points, space, args.epsilon, seed=args.seed
        )
        outputs = {"map": io.tube_homeo_to_dict(homeo), "displacement_bound": homeo.displacement_bound}
        certs.extend(homeo.certificates())
        print(f"tube transport displacement bound = {homeo.displacement_bound!r}")
    else:
        raise MalformedInput("unknown space for transport")
    rep = io.report(
        "transport",
        {"a": io.file_digest(args.a), "b": io.file_digest(args.b)},
        outputs,
        certs,
        seed=args.seed,
    )
    _emit(rep, args.out, args.json)
    return 0


def _cmd_transport_eval(args):
    doc = io.load_json(args.map)
    if isinstance(doc, dict) and "outputs" in doc and "map" in doc.get("outputs", {}):
        doc = doc["outputs"]["map"]  # a transport report wraps the map
    point = [float(x) for x in args.point]
    if "anchors" in doc:
        h = io.circle_homeo_from_dict(doc)
        image = [float(h(point[0]))]
    elif "polylines" in doc:
        h = io.tube_homeo_from_dict(doc)
        image = h.evaluate([point])[0].tolist()
    elif "breakpoints" in doc:
        h = io.transport1d_from_dict(doc)
        image = [float(h(point[0]))]
    else:
        raise MalformedInput("unrecognized map document")
    print(" ".join(repr(x) for x in image))
    rep = io.report("transport eval", {"map": io.file_digest(args.map)}, {"point": point, "image": image})
    _emit(rep, args.out, args.json)
    return 0


def _cmd_weyl(args):
    a = io.matrix_from_dict(io.load_json(args.a))
    b = io.matrix_from_dict(io.load_json(args.b))
    value, perm = weyl_delta(a, b)
    u, achieved = realizing_unitary(a, b)
    outputs = {
        "delta": value,
        "achieved": achieved,
        "permutation": perm.tolist(),
    }
    certs = [io.certificate("realizing_unitary_achieves_delta", abs(achieved - value), 1e-8)]
    print(f"delta = {value!r}")
    print(f"achieved by conjugation = {achieved!r}")
    if args.minimize:
        best, _ = minimize_orbit_distance(a, b, budget=args.budget, seed=args.seed)
        outputs["optimizer_best"] = best
        certs.append(io.certificate("optimizer_not_below_delta", value - 1e-6, best, "<="))
        print(f"optimizer best = {best!r}")
    if args.probe:
        doc = io.load_json(args.probe)
        fns = [distance_to_set_probe(np.asarray(p["re"]) + 1j * np.asarray(p["im"])) for p in doc["probes"]]
        rep_probe = lipschitz_probe(a, b, fns)
        outputs["probe"] = {
            "values": rep_probe["values"].tolist(),
            "sup": rep_probe["sup"],
            "ok": rep_probe["ok"],
        }
        certs.append(io.certificate("lipschitz_probe_sup_le_delta", rep_probe["sup"], value + 1e-8))
        print(f"lipschitz probe sup = {rep_probe['sup']!r} (delta = {value!r})")
    rep = io.report(
        "weyl",
        {"a": io.file_digest(args.a), "b": io.file_digest(args.b)},
        outputs,
        certs,
        seed=args.seed if args.minimize else None,
    )
    _emit(rep, args.out, args.json)
    return 0


def _build_parser():
    p = argparse.ArgumentParser(prog="mtransport", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("delta", help="matching distance between two measure files")
    d.add_argument("--space", choices=["interval", "circle", "convex"], help="expected space kind (checked)")
    d.add_argument("--a", required=True)
    d.add_argument("--b", required=True)
    d.add_argument("--depth", type=int, default=10, help="circle discretization depth")
    d.add_argument("--epsilon", type=float, default=0.1)
    d.add_argument("--dump-series", help="write depth,estimate,bound CSV here")
    d.add_argument("--out")
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=_cmd_delta)

    t = sub.add_parser("transport", help="build a transport map")
    t.add_argument("--space", choices=["interval", "circle", "convex"])
    t.add_argument("--a", required=True)
    t.add_argument("--b", required=True)
    t.add_argument("--depth", type=int, default=8)
    t.add_argument("--epsilon", type=float, default=0.1)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out")
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=_cmd_transport)

    te = sub.add_parser("transport-eval", help="apply a saved map to a point")
    te.add_argument("--map", required=True)
    te.add_argument("--point", nargs="+", required=True)
    te.add_argument("--out")
    te.add_argument("--json", action="store_true")
    te.set_defaults(func=_cmd_transport_eval)

    w = sub.add_parser("weyl", help="unitary-orbit distances between normal matrices")
    w.add_argument("--a", required=True)
    w.add_argument("--b", required=True)
    w.add_argument("--minimize", action="store_true")
    w.add_argument("--budget", type=int, default=20000)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--probe", help="JSON file with probe point sets")
    w.add_argument("--out")
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=_cmd_weyl)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    # `transport eval` is spelled as a nested command
    if argv[:2] == ["transport", "eval"]:
        argv = ["transport-eval"] + argv[2:]
    parser = _build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "seed") and SEED_ENV in os.environ:
        args.seed = int(os.environ[SEED_ENV])
    if getattr(args, "space", None):
        # verify declared space kind matches the files
        kinds = {"interval": Interval, "circle": Circle, "convex": ConvexBody}
        try:
            sa, _, _ = _load_pair(args.a, args.b)
        except (MalformedInput, SpaceMismatch) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3 if isinstance(exc, SpaceMismatch) else 2
        if not isinstance(sa, kinds[args.space]):
            print(f"error: measures are not on a {args.space} (field: space.kind)", file=sys.stderr)
            return 3
    try:
        return args.func(args)
    except NormalityDefectExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except ConstructiveFailure as exc:
        print(f"error: constructive failure: {exc}", file=sys.stderr)
        return 4
    except SpaceMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except MalformedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
