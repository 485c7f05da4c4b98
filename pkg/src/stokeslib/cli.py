"""Command-line surface: exact verdicts and JSON/DOT interchange.

Every verdict subcommand prints a machine-readable JSON verdict plus a
human-readable summary line on stderr; witnesses are included on negative
verdicts.  Exit codes: 0 success / positive verdict, 1 negative verdict,
2 malformed or semantically invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import serial
from .directions import as_exact
from .exactmath import rat_str
from .fibrations import (
    cocartesian_sections,
    collapse_refinement,
    stokes_locus,
    validate_fibration,
)
from .functors import (
    ext_dims,
    grade,
    induce,
    is_stokes,
    level_assemble,
    level_disassemble,
    split_global,
    stokes_witness,
    tangent_dims,
    validate_functor,
)
from .geometry import (
    build_circle_space,
    check_polyhedral_elementarity,
    elementary_cover,
    is_elementary_arc,
    kummer_pullback,
    pole_level_structure,
    stokes_directions,
)


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _emit(payload, out_path: str | None, text: str | None = None) -> None:
    body = text if text is not None else serial.dumps(payload)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_functor(path: str):
    doc = _read_json(path)
    try:
        f = serial.functor_from_json(doc)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: not a functor document ({exc})") from exc
    ok, why = validate_functor(f)
    if not ok:
        raise InputError(f"{path}: invalid functor: {why}")
    return f


def _load_morphism(args):
    if args.morphism:
        doc = _read_json(args.morphism)
        return serial.morphism_from_json(doc)
    if args.space:
        space = serial.circle_space_from_json(_read_json(args.space))
        levels = pole_level_structure(space)
        k = args.level
        if k is None or not 1 <= k <= len(levels.stages):
            raise InputError(f"--level must be between 1 and {len(levels.stages)}")
        return levels.stages[k - 1]
    raise InputError("provide --morphism FILE or --space FILE with --level K")


def cmd_validate(args) -> int:
    doc = _read_json(args.input)
    if "spaces" in doc:
        f = serial.functor_from_json(doc)
        ok, why = validate_functor(f)
        kind = "functor"
    elif "fibers" in doc:
        fib = serial.fibration_from_json(doc)
        ok, why = validate_fibration(fib)
        kind = "fibration"
    else:
        raise InputError("document is neither a fibration nor a functor")
    _emit({"kind": kind, "valid": ok, "diagnostics": why}, args.output)
    _say(f"{kind}: {'valid' if ok else 'INVALID: ' + why}")
    return 0 if ok else 1


def cmd_build_circle(args) -> int:
    e = serial.exponential_from_json(_read_json(args.input))
    space = build_circle_space(e)
    _emit(serial.circle_space_to_json(space), args.output)
    _say(f"built circle with {len(space.points)} point strata" + (" (degenerate)" if space.degenerate else ""))
    return 0


def cmd_kummer(args) -> int:
    e = serial.exponential_from_json(_read_json(args.input))
    out = kummer_pullback(e, args.d)
    _emit(serial.exponential_to_json(out), args.output)
    _say(f"pulled back along the degree-{args.d} cover")
    return 0


def cmd_directions(args) -> int:
    e = serial.exponential_from_json(_read_json(args.input))
    names = e.names
    if len(names) != 2:
        raise InputError("directions expects exactly two named values")
    dirs = stokes_directions(e.values[names[0]], e.values[names[1]])
    payload = []
    for d in dirs:
        rec = serial.direction_to_json(d)
        exact = as_exact(d)
        if exact is not None:
            rec["angle_over_pi"] = rat_str(exact.t)
        payload.append(rec)
    _emit({"pair": names, "directions": payload}, args.output)
    _say(f"{len(dirs)} directions for the pair ({names[0]}, {names[1]})")
    return 0


def cmd_is_stokes(args) -> int:
    f = _load_functor(args.input)
    ok, why = stokes_witness(f)
    _emit({"stokes": ok, "witness": why}, args.output)
    _say("Stokes functor" if ok else f"not Stokes: {why}")
    return 0 if ok else 1


def cmd_split(args) -> int:
    f = _load_functor(args.input)
    gs = split_global(f)
    if gs is None:
        _emit({"split": False, "witness": "natural-section system is infeasible"}, args.output)
        _say("NotSplit: the natural-section linear system is infeasible")
        return 1
    payload = {
        "split": True,
        "graded": serial.functor_to_json(gs.graded),
        "iso": {f"({x},{a})": serial.matrix_to_json(m) for (x, a), m in gs.iso.items()},
    }
    _emit(payload, args.output)
    _say("split: global splitting found")
    return 0


def cmd_grade(args) -> int:
    f = _load_functor(args.input)
    p = _load_morphism(args)
    out = grade(p, f)
    _emit(serial.functor_to_json(out), args.output)
    _say("graded functor computed")
    return 0


def cmd_induce(args) -> int:
    f = _load_functor(args.input)
    p = _load_morphism(args)
    out = induce(p, f)
    _emit(serial.functor_to_json(out), args.output)
    _say("induced functor computed")
    return 0


def cmd_disassemble(args) -> int:
    f = _load_functor(args.input)
    p = _load_morphism(args)
    g, h, alpha = level_disassemble(p, f)
    payload = {
        "g": serial.functor_to_json(g),
        "h": serial.functor_to_json(h),
        "alpha": {f"({x},{c})": serial.matrix_to_json(m) for (x, c), m in alpha.items()},
        "morphism": serial.morphism_to_json(p),
    }
    _emit(payload, args.output)
    _say("level disassembly computed")
    return 0


def cmd_assemble(args) -> int:
    doc = _read_json(args.input)
    p = serial.morphism_from_json(doc["morphism"]) if "morphism" in doc else _load_morphism(args)
    g = serial.functor_from_json(doc["g"])
    h = serial.functor_from_json(doc["h"])
    alpha = {}
    for key, m in doc["alpha"].items():
        x, _, c = key[1:-1].partition(",")
        alpha[(x, c)] = serial.matrix_from_json(m)
    out = level_assemble(p, g, h, alpha)
    _emit(serial.functor_to_json(out), args.output)
    _say("level assembly computed")
    return 0


def cmd_ext(args) -> int:
    from .functors import hom_complex

    doc = _read_json(args.input)
    if "f" in doc and "g" in doc:
        f = serial.functor_from_json(doc["f"])
        g = serial.functor_from_json(doc["g"])
    else:
        f = serial.functor_from_json(doc)
        g = f
    hc = hom_complex(f, g)
    dims = hc.cohomology_dims()
    _emit(
        {
            "ext_dims": dims,
            "euler_characteristic": hc.euler_characteristic(),
            "complex": serial.hom_complex_to_json(hc),
        },
        args.output,
    )
    _say(f"ext dimensions {dims}")
    return 0


def cmd_tangent_dims(args) -> int:
    f = _load_functor(args.input)
    dims = tangent_dims(f)
    payload = {"tangent_dims": {str(i - 1): d for i, d in enumerate(dims)}}
    _emit(payload, args.output)
    _say(f"tangent dimensions (from degree -1): {dims}")
    return 0


def cmd_elementary(args) -> int:
    doc = _read_json(args.input)
    if "arc" in doc:
        space = serial.circle_space_from_json(doc["space"])
        arc = serial.arc_from_json(doc["arc"])
        ok = is_elementary_arc(space, arc)
    elif "pairs" in doc:
        ok = _polyhedral_from_doc(doc)
    else:
        raise InputError("expected {'space', 'arc'} or a polyhedral document")
    _emit({"elementary": ok}, args.output)
    _say("elementary" if ok else "not elementary")
    return 0 if ok else 1


def _polyhedral_from_doc(doc) -> bool:
    from .exactmath import rat
    from .geometry import AffineForm, build_polyhedral_space

    forms = [AffineForm.of([rat(str(c)) for c in f["coeffs"]], rat(str(f["const"]))) for f in doc["forms"]]
    pair_data = {}
    for key, v in doc["pairs"].items():
        a, _, b = key.partition("|")
        pair_data[(a, b)] = (int(v["form"]), str(v["orient"]))
    space = build_polyhedral_space(forms, [str(s) for s in doc["strata"]], pair_data)
    return check_polyhedral_elementarity(space)


def cmd_cover(args) -> int:
    space = serial.circle_space_from_json(_read_json(args.input))
    arcs = elementary_cover(space)
    if arcs is None:
        _emit({"cover": None, "witness": "no single-level arc system; apply a level structure first"}, args.output)
        _say("Failure: no single-level elementary cover")
        return 1
    _emit({"cover": [serial.arc_to_json(a) for a in arcs]}, args.output)
    _say(f"elementary cover with {len(arcs)} arcs")
    return 0


def cmd_collapse(args) -> int:
    fib = serial.fibration_from_json(_read_json(args.input))
    out, corr, flat = collapse_refinement(fib)
    _emit(
        {
            "fibration": serial.fibration_to_json(out),
            "correspondence": corr,
            "fully_constant": flat,
        },
        args.output,
    )
    _say("fully constant fibration" if flat else f"collapsed to {out.base.n} point strata")
    return 0


def cmd_export_dot(args) -> int:
    doc = _read_json(args.input)
    if "spaces" in doc:
        f = serial.functor_from_json(doc)
        text = serial.fibration_to_dot(f.fibration, f)
    elif "fibers" in doc:
        fib = serial.fibration_from_json(doc)
        text = serial.fibration_to_dot(fib)
    elif "kind" in doc:
        text = serial.base_to_dot(serial.base_from_json(doc))
    else:
        raise InputError("expected a functor, fibration or base document")
    _emit(None, args.output, text=text)
    _say("DOT export written")
    return 0


def cmd_sections(args) -> int:
    fib = serial.fibration_from_json(_read_json(args.input))
    secs = cocartesian_sections(fib)
    payload = {"sections": [s.choice for s in secs]}
    if len(secs) >= 2:
        loci = {}
        for i in range(len(secs)):
            for j in range(i + 1, len(secs)):
                loci[f"{i},{j}"] = sorted(stokes_locus(fib, secs[i], secs[j]))
        payload["stokes_loci"] = loci
    _emit(payload, args.output)
    _say(f"{len(secs)} cocartesian sections")
    return 0


_MULTI_INPUT = {"validate", "is-stokes", "split", "elementary"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stokeslib",
        description="exact computation with finite Stokes structures",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, multi=False, morphism=False, d_flag=False, level=False):
        p = sub.add_parser(name)
        if multi:
            p.add_argument("--input", action="append", required=True, help="input JSON (repeatable)")
            p.add_argument("--jobs", type=int, default=1, help="parallel workers for independent inputs")
        else:
            p.add_argument("--input", required=True, help="input JSON path")
        p.add_argument("--output", default=None, help="output path (default stdout; suffixed per input when repeated)")
        p.add_argument("--format", choices=["json", "dot"], default="json")
        if morphism:
            p.add_argument("--morphism", default=None, help="fibration morphism JSON")
            p.add_argument("--space", default=None, help="circle space JSON (with --level)")
            p.add_argument("--level", type=int, default=None, help="1-based level stage")
        if d_flag:
            p.add_argument("--d", type=int, required=True, help="cover degree")
        p.set_defaults(fn=fn)
        return p

    add("validate", cmd_validate, multi=True)
    add("build-circle", cmd_build_circle)
    add("kummer", cmd_kummer, d_flag=True)
    add("directions", cmd_directions)
    add("is-stokes", cmd_is_stokes, multi=True)
    add("split", cmd_split, multi=True)
    add("grade", cmd_grade, morphism=True)
    add("induce", cmd_induce, morphism=True)
    add("disassemble", cmd_disassemble, morphism=True)
    add("assemble", cmd_assemble, morphism=True)
    add("ext", cmd_ext)
    add("tangent-dims", cmd_tangent_dims)
    add("elementary", cmd_elementary, multi=True)
    add("cover", cmd_cover)
    add("collapse", cmd_collapse)
    add("export-dot", cmd_export_dot)
    add("sections", cmd_sections)
    return ap


def _run_single(fn, args) -> int:
    try:
        return fn(args)
    except InputError as exc:
        _say(f"input error: {exc}")
        return 2
    except (KeyError, ValueError, TypeError) as exc:
        _say(f"semantic error: {exc}")
        return 2


def _worker(payload):
    fn_name, args_dict, path = payload
    ns = argparse.Namespace(**args_dict)
    ns.input = path
    if ns.output:
        ns.output = f"{ns.output}.{abs(hash(path)) % 10**8}.json"
    return _run_single(globals()[fn_name], ns)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    fn = args.fn
    if args.command in _MULTI_INPUT:
        paths = args.input
        if len(paths) == 1:
            ns = argparse.Namespace(**vars(args))
            ns.input = paths[0]
            return _run_single(fn, ns)
        args_dict = {k: v for k, v in vars(args).items() if k not in {"fn", "input"}}
        payloads = [(fn.__name__, args_dict, p) for p in paths]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                codes = list(pool.map(_worker, payloads))
        else:
            codes = [_worker(p) for p in payloads]
        return max(codes)
    return _run_single(fn, args)


if __name__ == "__main__":
    sys.exit(main())
