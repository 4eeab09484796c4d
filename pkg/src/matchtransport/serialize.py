"""JSON serialization for measures, transport maps, matrices, and reports.

All writers use sorted keys and fixed separators; floats round-trip exactly
through Python's shortest-repr encoding, so identical inputs produce
byte-identical documents.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .circle import CircleHomeomorphism
from .convex import TubeHomeomorphism
from .errors import MalformedInput
from .interval import TransportMap1D
from .measure import CdfMeasure, EmpiricalMeasure
from .pwl import PiecewiseLinear
from .spaces import Circle, ConvexBody, Interval
from .spectral import NormalMatrix

VERSION = "0.1.0"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _tolist(a):
    return np.asarray(a, dtype=float).tolist()


# -- spaces ------------------------------------------------------------------


def space_to_dict(space):
    if isinstance(space, Interval):
        return {"kind": "interval", "lo": space.lo, "hi": space.hi}
    if isinstance(space, Circle):
        return {"kind": "circle", "radius": space.radius}
    if isinstance(space, ConvexBody):
        return {
            "kind": "convex",
            "dimension": space.dimension,
            "vertices": _tolist(space.vertices),
        }
    raise MalformedInput(f"unknown space type {type(space)!r}")


def space_from_dict(d):
    try:
        kind = d["kind"]
        if kind == "interval":
            return Interval(float(d["lo"]), float(d["hi"]))
        if kind == "circle":
            return Circle(float(d["radius"]))
        if kind == "convex":
            return ConvexBody(int(d["dimension"]), d["vertices"])
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"bad space document: missing {exc}")
    raise MalformedInput(f"unknown space kind {d.get('kind')!r}")


# -- measures ----------------------------------------------------------------


def measure_to_dict(measure, space=None):
    if isinstance(measure, EmpiricalMeasure):
        return {
            "space": space_to_dict(measure.space),
            "kind": "empirical",
            "points": _tolist(measure.points),
        }
    if isinstance(measure, CdfMeasure):
        if space is None:
            raise MalformedInput("cdf measures serialize with an explicit space")
        return {
            "space": space_to_dict(space),
            "kind": "cdf",
            "breakpoints": _tolist(measure.breakpoints()),
        }
    raise MalformedInput(f"unknown measure type {type(measure)!r}")


def measure_from_dict(d):
    """Returns (space, measure)."""
    try:
        space = space_from_dict(d["space"])
        kind = d["kind"]
        if kind == "empirical":
            return space, EmpiricalMeasure(space, d["points"])
        if kind == "cdf":
            return space, CdfMeasure(d["breakpoints"])
    except KeyError as exc:
        raise MalformedInput(f"bad measure document: missing {exc}")
    raise MalformedInput(f"unknown measure kind {d.get('kind')!r}")


# -- transport maps ----------------------------------------------------------


def transport1d_to_dict(t: TransportMap1D):
    return {"breakpoints": _tolist(t.breakpoints()), "displacement": t.displacement}


def transport1d_from_dict(d):
    bp = np.asarray(d["breakpoints"], dtype=float)
    return TransportMap1D(PiecewiseLinear(bp[:, 0], bp[:, 1]), float(d["displacement"]))


def circle_homeo_to_dict(h: CircleHomeomorphism):
    return {
        "anchors": _tolist(np.column_stack([h.source_angles, h.target_angles])),
        "displacement": h.displacement,
        "radius": h.radius,
    }


def circle_homeo_from_dict(d):
    anchors = np.asarray(d["anchors"], dtype=float)
    return CircleHomeomorphism(
        anchors[:, 0], anchors[:, 1], float(d["displacement"]), float(d["radius"])
    )


def tube_homeo_to_dict(h: TubeHomeomorphism):
    return {
        "space": space_to_dict(h.body),
        "sources": _tolist(h.sources),
        "targets": _tolist(h.targets),
        "fixed_points": _tolist(h.fixed_points),
        "polylines": [_tolist(p) for p in h.polylines],
        "tube_radius": h.tube_radius,
        "bottleneck": h.bottleneck,
        "epsilon": h.epsilon,
    }


def tube_homeo_from_dict(d):
    body = space_from_dict(d["space"])
    dim = body.dimension
    return TubeHomeomorphism(
        body=body,
        sources=np.asarray(d["sources"], dtype=float).reshape(-1, dim),
        targets=np.asarray(d["targets"], dtype=float).reshape(-1, dim),
        fixed_points=np.asarray(d["fixed_points"], dtype=float).reshape(-1, dim),
        polylines=[np.asarray(p, dtype=float) for p in d["polylines"]],
        tube_radius=float(d["tube_radius"]),
        bottleneck=float(d["bottleneck"]),
        epsilon=float(d["epsilon"]),
    )


# -- matrices ----------------------------------------------------------------


def matrix_to_dict(m: NormalMatrix):
    return {
        "n": m.n,
        "class": m.klass,
        "re": m.array.real.tolist(),
        "im": m.array.imag.tolist(),
    }


def matrix_from_dict(d):
    try:
        a = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
        if a.shape != (int(d["n"]), int(d["n"])):
            raise MalformedInput("matrix entries do not match declared dimension n")
        return NormalMatrix(a, d["class"])
    except KeyError as exc:
        raise MalformedInput(f"bad matrix document: missing {exc}")


# -- reports -----------------------------------------------------------------


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return "sha256:" + h.hexdigest()


def certificate(name, lhs, rhs, relation="<="):
    ok = {"<=": lhs <= rhs, ">=": lhs >= rhs, "==": lhs == rhs}[relation]
    return {"name": name, "lhs": lhs, "rhs": rhs, "relation": relation, "ok": bool(ok)}


def report(command, inputs, outputs, certificates=(), seed=None):
    return {
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "certificates": list(certificates),
        "seed": seed,
        "version": VERSION,
    }


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"cannot read JSON from {path}: {exc}")
