"""JSON wire formats and DOT export.

Rationals serialize as strings "p/q" (denominator omitted when 1),
Gaussian rationals as {"re", "im"}, matrices as {"rows", "cols",
"entries"} in row-major order, directions as {"c", "m", "k"}.  All
emitters sort keys so identical inputs produce byte-identical output.
"""

from __future__ import annotations

import json

from .bases import BaseCategory, make_circle_base, make_poset_base
from .directions import ExactAngle, StokesDirection
from .exactmath import GaussianRational, Matrix, rat, rat_str
from .fibrations import FibrationMorphism, LevelStructure, StokesFibration
from .functors import StokesFunctor, cover_arrow_id, lift_arrow_id
from .geometry import Arc, CircleSpace, ExponentialData, IrregularValue
from .posets import FinPoset, MonotoneMap


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# -- primitives --------------------------------------------------------------


def gaussian_to_json(c: GaussianRational) -> dict:
    return {"re": rat_str(c.re), "im": rat_str(c.im)}


def gaussian_from_json(d) -> GaussianRational:
    return GaussianRational(rat(str(d["re"])), rat(str(d["im"])))


def matrix_to_json(m: Matrix) -> dict:
    return {"rows": m.rows, "cols": m.cols, "entries": [rat_str(x) for x in m.entries]}


def matrix_from_json(d) -> Matrix:
    ent = tuple(rat(str(x)) for x in d["entries"])
    return Matrix(int(d["rows"]), int(d["cols"]), ent)


def direction_to_json(d: StokesDirection) -> dict:
    return {"c": gaussian_to_json(d.c), "m": d.m, "k": d.k}


def direction_from_json(d) -> StokesDirection:
    return StokesDirection(gaussian_from_json(d["c"]), int(d["m"]), int(d["k"]))


def angle_to_json(a) -> dict:
    if isinstance(a, ExactAngle):
        return {"kind": "exact", "t": rat_str(a.t)}
    return {"kind": "direction", **direction_to_json(a)}


def angle_from_json(d):
    if d["kind"] == "exact":
        return ExactAngle(rat(str(d["t"])))
    return direction_from_json(d)


# -- posets and maps ----------------------------------------------------------


def poset_to_json(p: FinPoset) -> dict:
    elems = list(p.elements)
    return {
        "elements": elems,
        "leq": [[p.le(a, b) for b in elems] for a in elems],
    }


def poset_from_json(d) -> FinPoset:
    elems = [str(e) for e in d["elements"]]
    rel = set()
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            if d["leq"][i][j]:
                rel.add((a, b))
    return FinPoset(tuple(elems), frozenset(rel))


def monotone_to_json(f: MonotoneMap) -> dict:
    return {
        "source": poset_to_json(f.source),
        "target": poset_to_json(f.target),
        "assignment": dict(f.assignment),
    }


def monotone_from_json(d) -> MonotoneMap:
    return MonotoneMap(
        poset_from_json(d["source"]),
        poset_from_json(d["target"]),
        {str(k): str(v) for k, v in d["assignment"].items()},
    )


# -- bases and fibrations ------------------------------------------------------


def base_to_json(b: BaseCategory) -> dict:
    if b.kind == "circle":
        return {"kind": "circle", "n": b.n}
    return {"kind": "poset", "poset": poset_to_json(b.poset)}


def base_from_json(d) -> BaseCategory:
    if d["kind"] == "circle":
        return make_circle_base(int(d["n"]))
    return make_poset_base(poset_from_json(d["poset"]))


def fibration_to_json(f: StokesFibration) -> dict:
    return {
        "base": base_to_json(f.base),
        "fibers": {x: poset_to_json(f.fiber(x)) for x in f.base.objects},
        "transitions": {a.name: dict(f.transition(a.name).assignment) for a in f.base.arrows},
    }


def fibration_from_json(d) -> StokesFibration:
    base = base_from_json(d["base"])
    fibers = {x: poset_from_json(d["fibers"][x]) for x in base.objects}
    transitions = {}
    for arr in base.arrows:
        assignment = {str(k): str(v) for k, v in d["transitions"][arr.name].items()}
        transitions[arr.name] = MonotoneMap(fibers[arr.source], fibers[arr.target], assignment)
    return StokesFibration(base, fibers, transitions)


def morphism_to_json(p: FibrationMorphism) -> dict:
    return {
        "source": fibration_to_json(p.source),
        "target": fibration_to_json(p.target),
        "maps": {x: dict(p.map_at(x).assignment) for x in p.source.base.objects},
    }


def morphism_from_json(d) -> FibrationMorphism:
    src = fibration_from_json(d["source"])
    tgt = fibration_from_json(d["target"])
    maps = {
        x: MonotoneMap(src.fiber(x), tgt.fiber(x), {str(k): str(v) for k, v in d["maps"][x].items()})
        for x in src.base.objects
    }
    return FibrationMorphism(src, tgt, maps)


def level_structure_to_json(ls: LevelStructure) -> dict:
    return {"stages": [morphism_to_json(p) for p in ls.stages]}


def level_structure_from_json(d) -> LevelStructure:
    return LevelStructure(tuple(morphism_from_json(s) for s in d["stages"]))


# -- functors -------------------------------------------------------------------


def _total_key(x: str, a: str) -> str:
    return f"({x},{a})"


def _parse_total_key(s: str) -> tuple[str, str]:
    body = s[1:-1]
    x, _, a = body.partition(",")
    return x, a


def functor_to_json(f: StokesFunctor) -> dict:
    return {
        "fibration": fibration_to_json(f.fibration),
        "spaces": {_total_key(x, a): d for (x, a), d in f.spaces.items()},
        "arrows": {aid: matrix_to_json(m) for aid, m in f.arrows.items()},
    }


def functor_from_json(d) -> StokesFunctor:
    fib = fibration_from_json(d["fibration"])
    spaces = {_parse_total_key(k): int(v) for k, v in d["spaces"].items()}
    arrows = {str(k): matrix_from_json(v) for k, v in d["arrows"].items()}
    return StokesFunctor(fib, spaces, arrows)


# -- exponential data and circle spaces -------------------------------------------


def value_to_json(v: IrregularValue) -> list:
    return [{"q": rat_str(q), "c": gaussian_to_json(c)} for q, c in v.terms]


def value_from_json(d) -> IrregularValue:
    return IrregularValue(tuple((rat(str(t["q"])), gaussian_from_json(t["c"])) for t in d))


def exponential_to_json(e: ExponentialData) -> dict:
    return {"values": {name: value_to_json(v) for name, v in e.values.items()}}


def exponential_from_json(d) -> ExponentialData:
    return ExponentialData({str(k): value_from_json(v) for k, v in d["values"].items()})


def circle_space_to_json(s: CircleSpace) -> dict:
    return {
        "data": exponential_to_json(s.data),
        "fibration": fibration_to_json(s.fibration),
        "points": [angle_to_json(p) for p in s.points],
        "arc_samples": [angle_to_json(a) for a in s.arc_samples],
        "provenance": {str(i): [[a, b] for a, b in prs] for i, prs in s.provenance.items()},
        "degenerate": s.degenerate,
    }


def circle_space_from_json(d) -> CircleSpace:
    return CircleSpace(
        exponential_from_json(d["data"]),
        fibration_from_json(d["fibration"]),
        tuple(angle_from_json(p) for p in d["points"]),
        tuple(angle_from_json(a) for a in d["arc_samples"]),
        {int(k): [tuple(pr) for pr in v] for k, v in d["provenance"].items()},
        bool(d["degenerate"]),
    )


def arc_to_json(a: Arc) -> dict:
    if a.full:
        return {"full": True}
    return {"start": angle_to_json(a.start), "end": angle_to_json(a.end)}


def arc_from_json(d) -> Arc:
    if d.get("full"):
        return Arc(None, None, full=True)
    return Arc(angle_from_json(d["start"]), angle_from_json(d["end"]))


# -- DOT export --------------------------------------------------------------------


def base_to_dot(b: BaseCategory) -> str:
    """The base category's generating arrow graph."""
    lines = ["digraph base {", '  rankdir="LR";']
    for x in b.objects:
        lines.append(f'  "{x}";')
    for a in b.arrows:
        lines.append(f'  "{a.source}" -> "{a.target}" [label="{a.name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def hom_complex_to_json(hc) -> dict:
    return {
        "dims": list(hc.dims),
        "differentials": [matrix_to_json(d) for d in hc.differentials],
    }


def fibration_to_dot(f: StokesFibration, functor: StokesFunctor | None = None) -> str:
    """The total category's generating arrows; cocartesian lifts are bold."""
    lines = ["digraph total {", '  rankdir="LR";']

    def node(x, a):
        label = f"{x}.{a}"
        if functor is not None:
            label += f" [{functor.dim(x, a)}]"
        return f'"{x}::{a}" [label="{label}"];'

    for x in f.base.objects:
        for a in f.fiber(x).elements:
            lines.append("  " + node(x, a))
    for x in f.base.objects:
        for a, b in f.fiber(x).covers():
            lines.append(f'  "{x}::{a}" -> "{x}::{b}" [label="{cover_arrow_id(x, a, b)}"];')
    for arr in f.base.arrows:
        t = f.transition(arr.name)
        for a in f.fiber(arr.source).elements:
            lines.append(
                f'  "{arr.source}::{a}" -> "{arr.target}::{t(a)}"'
                f' [style=bold, color=blue, label="{lift_arrow_id(arr.name, a)}"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
