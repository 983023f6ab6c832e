"""Command line front end.

Usage::

    tidgerm chardirs example.germ
    tidgerm classify example.germ --direction "[-c:1]" --json
    tidgerm resolve field.germ --dot tree.dot
    tidgerm orbit map.germ --start 0.1,0 --bind c=2.4674011002723397

Every command reads one or more input files in the germ grammar (see
:mod:`tidgerm.parse`), applies their ``blowup`` directives, and prints a text
summary or, with ``--json``, a report carrying ``"schema": 1``.  Exit status
is 0 on success, 2 when the pipeline raised a typed inapplicability error,
and 1 on parse or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .algebra.field import to_text
from .algebra.jet import Jet2
from .blowup import NON_SINGULAR, DivisorPoint, blow_up_diffeo, resolve
from .classify import classify_abate, classify_along_divisor, classify_direction
from .errors import InapplicableError, ParseError, TidgermError
from .germs import characteristic_directions, exp, fixed_curves, log, log_adaptive
from .index import tree_divisor_indices, validate_index_properties

__all__ = ["JobSpec", "run", "main", "build_parser", "EXIT_OK", "EXIT_ERROR", "EXIT_INAPPLICABLE"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INAPPLICABLE = 2

COMMANDS = ("log", "chardirs", "resolve", "index", "classify", "abate", "orbit", "vivas")


@dataclass
class JobSpec:
    """One input file with the command's options."""

    input: str
    command: str
    direction: Optional[str] = None
    order: int = 8
    max_depth: int = 16
    bindings: dict = field(default_factory=dict)
    dot: Optional[str] = None
    csv: Optional[str] = None
    options: dict = field(default_factory=dict)


class UsageError(TidgermError):
    """Bad command-line input that the argument parser cannot catch."""


# ---------------------------------------------------------------------------
# shared steps
# ---------------------------------------------------------------------------


def _load(job: JobSpec):
    from .parse import load_germ

    spec = load_germ(job.input)
    if spec.kind == "map":
        F = spec.F
        for v in spec.blowups:
            F = blow_up_diffeo(F, DivisorPoint.from_direction(v))
        spec.F = F
    elif spec.blowups:
        raise UsageError("blowup directives apply to maps only")
    return spec


def _need_map(spec, command):
    if spec.kind != "map":
        raise InapplicableError(f"'{command}' needs a map (F.x, F.y), not a vector field")
    return spec.F


def _direction(spec, text):
    from .parse import parse_direction

    return parse_direction(text, spec.field, source="--direction")


def _map_locus(F):
    """Exact singular-locus factor of ``log F`` (a unit when the fixed point is isolated)."""
    try:
        return fixed_curves(F).g
    except InapplicableError:
        return None


def _tree_of(spec, max_depth):
    """Resolution tree of the input field, or of the generator of the input map."""
    if spec.kind == "field":
        return resolve(spec.X, max_depth=max_depth), None
    F = spec.F
    locus = _map_locus(F)

    def action(X, _n):
        return resolve(X, max_depth=max_depth, locus=locus if locus is not None else Jet2.const(1))

    return log_adaptive(F, action)


def _write_dot(job, tree, name):
    if job.dot is None:
        return None
    path = Path(job.dot)
    path.write_text(tree.to_dot(name))
    return str(path)


def _leaf_ok(node) -> bool:
    return node.singularity.tag == NON_SINGULAR or node.singularity.reduced


def _envelope(job: JobSpec, **payload) -> dict:
    out = {"schema": 1, "command": job.command, "input": job.input}
    out.update(payload)
    return out


def _parse_complex_pair(text: str):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise UsageError("--start expects two comma-separated numbers, e.g. 0.1,0 or 0.1+0.02j,0")
    try:
        return complex(parts[0].replace(" ", "")), complex(parts[1].replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"bad start point {text!r}") from exc


def _check_bindings(spec, bindings):
    missing = [p for p in spec.field.params if p not in bindings]
    if missing:
        raise UsageError("numeric commands need --bind for " + ", ".join(missing))


def _cnum(z: complex):
    return [float(z.real), float(z.imag)]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_log(job, spec):
    F = _need_map(spec, "log")
    X = log(F, job.order)
    text = [f"log F = ({X.A.text(spec.names)}) d/d{spec.names[0]} + ({X.B.text(spec.names)}) d/d{spec.names[1]}"]
    text.append(f"certified through degree {job.order}")
    payload = {"order": job.order, "generator": {"dx": X.A.text(spec.names), "dy": X.B.text(spec.names)}}
    return payload, text


def _directions_of(spec, order):
    if spec.kind == "map":
        return characteristic_directions(spec.F, complete=False)
    X = spec.X
    k1 = X.order()
    if k1 is None or k1 < 2:
        raise InapplicableError("characteristic directions need a field of order at least 2")
    return characteristic_directions(exp(X, max(order, k1 + 1)), complete=False)


def _dir_key(cd):
    return (cd.root.orbit_degree, cd.point.text())


def _cmd_chardirs(job, spec):
    dirs = sorted(_directions_of(spec, job.order), key=_dir_key)
    rows = []
    text = []
    for cd in dirs:
        factor = ""
        if cd.root.orbit_degree > 1:
            from .algebra.field import p_text

            factor = p_text(cd.root.factor, "t")
        rows.append(
            {
                "direction": cd.point.text(),
                "multiplicity": cd.multiplicity,
                "degenerate": cd.degenerate,
                "conjugates": cd.root.orbit_degree,
                "factor": factor,
            }
        )
        line = cd.text()
        if factor:
            line += f" (root of {factor} = 0, {cd.root.orbit_degree} conjugates)"
        text.append(line)
    total = sum(r["conjugates"] for r in rows)
    text.append(f"{total} characteristic direction(s)")
    return {"directions": rows, "count": total}, text


def _cmd_resolve(job, spec):
    tree, n = _tree_of(spec, job.max_depth)
    dot = _write_dot(job, tree, "resolution")
    leaves = tree.leaves()
    ok = all(_leaf_ok(leaf) for leaf in leaves)
    checks = [nd.restriction_check for nd in tree.nodes if nd.depth == 1 and nd.restriction_check is not None]
    text = []
    for nd in tree.nodes:
        tag = "Dicritical" if nd.dicritical else nd.singularity.tag
        where = nd.center_text() or "origin"
        text.append(f"#{nd.id} depth {nd.depth} {nd.chart_text()} {where}: {tag}  X = {nd.field.text(nd.names)}")
    text.append(f"depth {tree.depth}; {len(leaves)} leaves; all leaves reduced or regular: {ok}")
    if dot:
        text.append(f"DOT written to {dot}")
    payload = {
        "generator_order": n,
        "tree": tree.to_dict(),
        "leaves": [leaf.id for leaf in leaves],
        "leaves_reduced": ok,
        "restriction_checks": all(checks) if checks else None,
        "dot": dot,
    }
    return payload, text


def _cmd_index(job, spec):
    tree, n = _tree_of(spec, job.max_depth)
    root = tree.root
    rows = []
    total = None
    if not root.dicritical and root.children:
        rows = tree_divisor_indices(tree, 0)
        total = 0
        for r in rows:
            total = total + r.orbit_sum
    rep = validate_index_properties(tree, strict=False)
    text = []
    for r in rows:
        extra = f" over {r.factor} = 0 ({r.conjugates} points, orbit sum {to_text(r.orbit_sum)})" if r.factor else ""
        text.append(f"CS(X_q, D) at {r.center}: {to_text(r.value)}{extra}")
    if total is not None:
        text.append(f"sum over the divisor: {to_text(total)}")
    elif root.dicritical:
        text.append("dicritical: the divisor is not invariant")
    else:
        text.append("no blow-up needed (regular or reduced origin)")
    for c in rep.checks:
        text.append(f"[{'ok' if c['ok'] else 'FAIL'}] {c['check']} {c['detail']}".rstrip())
    dot = _write_dot(job, tree, "resolution")
    payload = {
        "generator_order": n,
        "divisor_indices": [r.to_dict() for r in rows],
        "divisor_sum": to_text(total) if total is not None else None,
        "validation": rep.to_dict(),
        "dot": dot,
    }
    return payload, text


def _report_text(rep):
    lines = []
    where = rep.direction.text() if rep.direction is not None else "the fixed curve"
    lines.append(f"{where}: {rep.verdict} -- {rep.to_dict()['statement']}")
    if rep.verdict != "FixedCurve":
        lines.append(f"  guaranteed: {rep.guaranteed}")
    if rep.shape is not None:
        s = rep.shape
        lines.append(
            f"  shape: r={s.r} m={s.m} a={to_text(s.a)} b={to_text(s.b)} c={to_text(s.c)} p={s.p} "
            f"(leaf #{s.leaf}, {s.domains} model domain(s))"
        )
    for row in rep.indices:
        lines.append(f"  index along {row['separatrix']} at #{row['node']}: {row['index']}")
    for note in rep.notes:
        lines.append(f"  note: {note}")
    return lines


def _error_entry(direction, exc):
    return {"direction": direction, "error": {"type": type(exc).__name__, "message": str(exc)}}


def _classify_many(job, spec, fn):
    F = _need_map(spec, job.command)
    if job.direction is not None:
        rep = fn(F, _direction(spec, job.direction))
        if rep.tree is not None:
            _write_dot(job, rep.tree, "classification")
        payload = {"reports": [rep.to_dict(include_tree=job.options.get("include_tree", False))]}
        return payload, _report_text(rep)
    entries = []
    text = []
    ok = False
    dirs = sorted(characteristic_directions(F, complete=True), key=_dir_key)
    for cd in dirs:
        try:
            rep = fn(F, cd.point)
        except InapplicableError as exc:
            entries.append(_error_entry(cd.point.text(), exc))
            text.append(f"{cd.point.text()}: {type(exc).__name__}: {exc}")
            continue
        ok = True
        entries.append(rep.to_dict(include_tree=job.options.get("include_tree", False)))
        text.extend(_report_text(rep))
    if not ok and entries:
        raise _AllFailed({"reports": entries}, text)
    return {"reports": entries}, text


class _AllFailed(InapplicableError):
    def __init__(self, payload, text):
        self.payload = payload
        self.text = text
        super().__init__("no direction produced a verdict")


def _cmd_classify(job, spec):
    md = job.max_depth
    axis = job.options.get("along_divisor")
    if axis is not None:
        F = _need_map(spec, "classify")
        rep = classify_along_divisor(F, axis=axis, corner=job.options.get("corner", False), max_depth=md)
        if rep.tree is not None:
            _write_dot(job, rep.tree, "classification")
        return {"reports": [rep.to_dict(include_tree=job.options.get("include_tree", False))]}, _report_text(rep)
    return _classify_many(job, spec, lambda F, v: classify_direction(F, v, md))


def _cmd_abate(job, spec):
    md = job.max_depth
    fb = job.options.get("fallback", False)
    return _classify_many(job, spec, lambda F, v: classify_abate(F, v, fallback=fb, max_depth=md))


def _ctext(z: complex) -> str:
    """Compact text of a complex number (real part only when it is real)."""
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}j"


def _cmd_orbit(job, spec):
    from .dynamics import compile_map, iterate, iterated_tangents, numeric_directions, projective_distance, tangent_direction

    F = _need_map(spec, "orbit")
    _check_bindings(spec, job.bindings)
    o = job.options
    z0 = _parse_complex_pair(o.get("start", "0.1,0"))
    fnum = compile_map(F, job.bindings)
    orbit = iterate(fnum, z0, o.get("steps", 10000), radius=o.get("radius", 10.0), on_escape="flag")
    if job.csv:
        Path(job.csv).write_text(orbit.to_csv())
    last = orbit.points[-1]
    payload = {
        "start": [_cnum(z0[0]), _cnum(z0[1])],
        "steps": int(len(orbit.points) - 1),
        "escaped": orbit.escaped,
        "final": [_cnum(last[0]), _cnum(last[1])],
        "final_norm": float(orbit.norms[-1]),
        "bindings": dict(sorted(job.bindings.items())),
        "csv": job.csv,
        "tangent": None,
        "nearest_characteristic": None,
        "iterated_tangents": None,
        "convergence_error": None,
    }
    text = [f"{payload['steps']} steps from {z0}; final |z| = {payload['final_norm']:.3e}" + ("; escaped" if orbit.escaped else "")]
    if not orbit.escaped:
        try:
            v, res = tangent_direction(orbit, tail=o.get("tail", 50), ratio=o.get("ratio", 1e-4))
        except InapplicableError as exc:
            payload["convergence_error"] = str(exc)
            text.append(f"not convergent: {exc}")
        else:
            payload["tangent"] = {"direction": [_cnum(v[0]), _cnum(v[1])], "residual": float(res)}
            text.append(f"tangent direction [{v[0]:.12g}:{v[1]:.12g}], residual {res:.2e}")
            best = None
            for w in numeric_directions(F, job.bindings):
                d = projective_distance(v, w)
                if best is None or d < best[1]:
                    best = (f"[{_ctext(w[0])}:{_ctext(w[1])}]", d)
            if best is not None:
                payload["nearest_characteristic"] = {"direction": best[0], "distance": float(best[1])}
                text.append(f"nearest characteristic direction {best[0]} at distance {best[1]:.2e}")
            depth = o.get("depth", 0)
            if depth:
                try:
                    levels = iterated_tangents(orbit, depth, tail=o.get("tail", 50), ratio=o.get("ratio", 1e-4))
                    payload["iterated_tangents"] = [lv.to_dict() for lv in levels]
                    for lv in levels:
                        text.append(f"  level {lv.level}: {lv.chart} at {_ctext(lv.coordinate)} (residual {lv.residual:.2e})")
                except InapplicableError as exc:
                    payload["convergence_error"] = str(exc)
                    text.append(f"iterated tangents: {exc}")
    if job.csv:
        text.append(f"CSV written to {job.csv}")
    return payload, text


def _cmd_vivas(job, spec):
    from .classify import VivasShape
    from .dynamics import VivasDomain, compile_map, vivas_checks

    F = _need_map(spec, "vivas")
    _check_bindings(spec, job.bindings)
    o = job.options
    shape = VivasShape(o.get("r", 1), o.get("m", 0), -1, 0, -1, o.get("p", 1), leaf=None)
    try:
        domain = VivasDomain(o.get("eps", 0.1), o.get("delta", 0.1), o.get("eta", 0.3), o.get("M", 2), shape.r, shape.m, shape.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rep = vivas_checks(
        compile_map(F, job.bindings),
        shape,
        domain,
        samples=o.get("samples", 1000),
        N=o.get("N", 3),
        steps=o.get("steps", 2000),
        orbit_steps=o.get("orbit_steps", 20000),
        seed=o.get("seed", 0),
    )
    text = []
    if rep["empty"]:
        text.append("the domain looks empty for these parameters; nothing was checked")
    else:
        ex = rep["exponent"]
        text.append(f"sampled {rep['sampled']} points; invariance {rep['invariance_fraction']:.4f}; min image margin {rep['min_image_margin']:.3e}")
        text.append(f"argument drift toward 0: {rep['arg_drift_fraction']:.4f}")
        text.append(f"exponent: slope {ex['slope']:.3f} (N = {rep['N']}), n0 = {ex['n0']}, C = {ex['C']}")
    text.append("passed" if rep["passed"] else "FAILED")
    return {"vivas": _jsonable(rep)}, text


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and obj != obj:
        return None
    return obj


_DISPATCH = {
    "log": _cmd_log,
    "chardirs": _cmd_chardirs,
    "resolve": _cmd_resolve,
    "index": _cmd_index,
    "classify": _cmd_classify,
    "abate": _cmd_abate,
    "orbit": _cmd_orbit,
    "vivas": _cmd_vivas,
}


def run(command: str, job: JobSpec):
    """Run one job; returns ``(exit status, JSON payload, text lines)``."""
    if command not in _DISPATCH:
        raise ValueError(f"unknown command {command!r}")
    job.command = command
    try:
        spec = _load(job)
        payload, text = _DISPATCH[command](job, spec)
    except ParseError as exc:
        return EXIT_ERROR, _envelope(job, error={"type": "ParseError", "message": str(exc), "line": exc.line, "column": exc.col}), [str(exc)]
    except _AllFailed as exc:
        return EXIT_INAPPLICABLE, _envelope(job, **exc.payload), exc.text
    except InapplicableError as exc:
        return EXIT_INAPPLICABLE, _envelope(job, error={"type": type(exc).__name__, "message": str(exc)}), [f"{type(exc).__name__}: {exc}"]
    except (TidgermError, OSError) as exc:
        return EXIT_ERROR, _envelope(job, error={"type": type(exc).__name__, "message": str(exc)}), [f"{type(exc).__name__}: {exc}"]
    return EXIT_OK, _envelope(job, **payload), text


def _run_job(job: JobSpec):
    return run(job.command, job)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _binding(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected NAME=FLOAT")
    name, val = text.split("=", 1)
    try:
        return name.strip(), float(val)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number in {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("inputs", nargs="+", help="germ description files")
    common.add_argument("--json", action="store_true", help="print a JSON report instead of text")
    common.add_argument("--jobs", type=int, default=1, help="process input files in parallel")
    common.add_argument("--max-depth", type=int, default=16, help="maximal number of successive blow-ups")
    common.add_argument("--order", type=int, default=8, help="jet order for 'log' and for fields")
    common.add_argument("--bind", type=_binding, action="append", default=[], metavar="NAME=FLOAT", help="numeric value of a parameter")
    common.add_argument("--dot", default=None, help="write the resolution tree as DOT to this path")

    ap = argparse.ArgumentParser(prog="tidgerm", description="Parabolic curves and domains of tangent-to-the-identity maps of the plane.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("log", parents=[common], help="print the jet of the infinitesimal generator")
    sub.add_parser("chardirs", parents=[common], help="list characteristic directions")
    sub.add_parser("resolve", parents=[common], help="resolve the generator (or field) and print the tree")
    sub.add_parser("index", parents=[common], help="divisor index table and index identity checks")
    p = sub.add_parser("classify", parents=[common], help="curve / separatrix / domain trichotomy")
    p.add_argument("--direction", default=None, help='projective literal such as "[-c:1]"; all directions if omitted')
    p.add_argument("--along-divisor", choices=("x", "y"), default=None, help="study a map fixing {AXIS = 0} pointwise")
    p.add_argument("--corner", action="store_true", help="the point is a corner of the divisor")
    p.add_argument("--include-tree", action="store_true", help="embed the resolution tree in the JSON report")
    p = sub.add_parser("abate", parents=[common], help="trichotomy for directions with nonzero residual index")
    p.add_argument("--direction", default=None)
    p.add_argument("--fallback", action="store_true", help="fall back to 'classify' when the index vanishes")
    p.add_argument("--include-tree", action="store_true")
    p = sub.add_parser("orbit", parents=[common], help="iterate numerically and estimate the tangent direction")
    p.add_argument("--start", default="0.1,0", help="start point 'x,y' (complex literals allowed)")
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--radius", type=float, default=10.0, help="escape radius")
    p.add_argument("--tail", type=int, default=50, help="points used by the convergence test")
    p.add_argument("--ratio", type=float, default=1e-4, help="final norm must be below ratio * initial norm")
    p.add_argument("--depth", type=int, default=0, help="levels of iterated tangents")
    p.add_argument("--csv", default=None, help="write the orbit to this CSV file")
    p = sub.add_parser("vivas", parents=[common], help="sampled checks of a model parabolic domain (a = c = -1)")
    for name, typ, default in (
        ("--r", int, 1), ("--m", int, 0), ("--p", int, 1),
        ("--eps", float, 0.1), ("--delta", float, 0.1), ("--eta", float, 0.3), ("--M", int, 2),
        ("--samples", int, 1000), ("--N", int, 3), ("--steps", int, 2000), ("--orbit-steps", int, 20000), ("--seed", int, 0),
    ):  # fmt: skip
        p.add_argument(name, type=typ, default=default)
    return ap


_OPTION_KEYS = (
    "along_divisor", "corner", "include_tree", "fallback", "start", "steps", "radius", "tail", "ratio", "depth",
    "r", "m", "p", "eps", "delta", "eta", "M", "samples", "N", "orbit_steps", "seed",
)  # fmt: skip


def _jobs_from_args(args) -> list:
    jobs = []
    multi = len(args.inputs) > 1
    for path in args.inputs:
        dot = args.dot
        if dot and multi:
            d = Path(dot)
            dot = str(d.with_name(f"{Path(path).stem}.{d.name}"))
        csv = getattr(args, "csv", None)
        if csv and multi:
            c = Path(csv)
            csv = str(c.with_name(f"{Path(path).stem}.{c.name}"))
        options = {k: getattr(args, k) for k in _OPTION_KEYS if hasattr(args, k)}
        jobs.append(
            JobSpec(
                input=path,
                command=args.command,
                direction=getattr(args, "direction", None),
                order=args.order,
                max_depth=args.max_depth,
                bindings=dict(args.bind),
                dot=dot,
                csv=csv,
                options=options,
            )
        )
    return jobs


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    jobs = _jobs_from_args(args)
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(j) for j in jobs]
    status = max(r[0] for r in results)
    if args.json:
        payloads = [r[1] for r in results]
        out = payloads[0] if len(payloads) == 1 else payloads
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        for (code, _payload, text), job in zip(results, jobs):
            if len(jobs) > 1:
                print(f"== {job.input}")
            stream = sys.stdout if code == EXIT_OK else sys.stderr
            for line in text:
                print(line, file=stream)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
