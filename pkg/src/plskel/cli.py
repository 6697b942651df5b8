"""Command-line front end.

``plskel <command> <session-file> [--name X] [--args ...] [--cap N] [--probes D]``

Prints one JSON report on stdout.  Exit status: 0 on success, 1 for input or
validation errors, 2 when a resource cap is hit.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Callable, Dict, List, Optional

from . import logic, plspaces, polytopes, valuations
from .errors import PlskelError, ResourceCap, UnknownCommand, ValidationError
from .limits import DEFAULT_CELL_CAP, counting, limits
from .logic import GenPoint
from .plspaces import GroupAction, PLMap
from .polytopes import NEG_INFINITY, Definable
from .session import (MonoMap, Session, parse_session, render_definable,
                      render_formula, render_gs, render_point, render_term)
from .valuations import ZERO, GaussPoint, LaurentPoly

EXIT_OK, EXIT_INPUT, EXIT_CAP = 0, 1, 2


def _bool(b: bool) -> str:
    return "true" if b else "false"


def _need(args, k, cmd):
    if len(args) < k:
        raise ValidationError(f"{cmd} needs {k} argument(s) after the name")


def _formula_of(s: Session, name: str):
    obj = s.get(name)
    if isinstance(obj, Definable):
        return logic.from_definable(obj)
    if not isinstance(obj, (logic.FAtom, logic.And, logic.Or, logic.Not, logic.Exists, logic.Forall)):
        raise ValidationError(f"{name!r} is not a formula")
    return obj


def _gauss_point(s: Session, name: str) -> GaussPoint:
    return GaussPoint(tuple(s.get(name, GenPoint)))


def _cmd_empty(s, name, args, opts):
    return _bool(polytopes.is_empty(s.get(name, Definable)))


def _cmd_dim(s, name, args, opts):
    d = polytopes.dimension(s.get(name, Definable))
    return "-inf" if d == NEG_INFINITY else str(d)


def _cmd_boundary(s, name, args, opts):
    d = s.get(name, Definable)
    if len(d.cells) != 1:
        raise ValidationError("boundary needs a single cell")
    return render_definable(polytopes.boundary(d.cells[0]))


def _cmd_decompose(s, name, args, opts):
    target = s.get(name, Definable)
    fam = []
    for a in args:
        obj = s.get(a, Definable, MonoMap)
        fam.extend(obj.forms if isinstance(obj, MonoMap) else [x.form for x in obj.atoms()])
    if not args:
        fam = [a.form for a in target.atoms()]
    dec = polytopes.decompose(fam, target)
    fam_txt = " ".join(render_term(f) for f in dec.family)
    cells = []
    for c, sig, inc in zip(dec.cells, dec.signs, dec.incidence):
        cells.append(f"(cell (signs {' '.join(sig)}) {render_definable(c.as_definable())}"
                     f" (incidence{''.join(' ' + str(i) for i in inc)}))")
    return f"(decomposition (family {fam_txt}) {' '.join(cells)})"


def _cmd_image(s, name, args, opts):
    obj = s.get(name, Definable, PLMap)
    if isinstance(obj, PLMap):
        return render_definable(plspaces.image_pl(obj))
    _need(args, 1, "image")
    m = s.get(args[0], MonoMap)
    return render_definable(polytopes.image_affine(obj, m.forms))


def _cmd_qe(s, name, args, opts):
    f = _formula_of(s, name)
    return render_formula(logic.qe(f, s.registry, logic.width(f)), s.dim)


def _cmd_eval(s, name, args, opts):
    _need(args, 1, "eval")
    f = _formula_of(s, name)
    g = s.get(args[0], GenPoint)
    if not logic.is_quantifier_free(f):
        f = logic.qe(f, s.registry)
    return _bool(logic.evaluate(f, g, s.registry))


def _cmd_sample(s, name, args, opts):
    return render_point(logic.sample_type(s.get(name, Definable)))


def _cmd_member(s, name, args, opts):
    _need(args, 1, "member")
    return _bool(polytopes.member(s.get(name, Definable), s.get(args[0], GenPoint)))


def _cmd_quotient(s, name, args, opts):
    q = plspaces.quotient(s.get(name, GroupAction))
    checks = plspaces.certify(q)
    parts = " ".join(render_definable(p.as_definable()) for p in q.parts)
    pats = " ".join(f"({p.m} {p.rank})" for p in q.patterns)
    charts = " ".join(render_definable(v) for v in q.charts)
    proj = " ".join(f"(piece {render_definable(p.domain.as_definable())} (maps {' '.join(render_term(t) for t in p.forms)}))"
                    for p in q.projection.pieces)
    cert = " ".join(f"({k} {_bool(v)})" for k, v in sorted(checks.items()))
    reps = " ".join(map(str, q.representatives))
    return (f"(quotient (parts {parts}) (patterns {pats}) (representatives {reps}) "
            f"(charts {charts}) (projection {proj}) (certified {cert}))")


def _cmd_orbit(s, name, args, opts):
    _need(args, 1, "orbit")
    pts = plspaces.orbit(s.get(name, GroupAction), s.get(args[0], GenPoint))
    return "(orbit " + " ".join(render_point(p) for p in pts) + ")"


def _render_value(v) -> str:
    return "ZERO" if v is ZERO else render_gs(v)


def _cmd_gauss(s, name, args, opts):
    _need(args, 1, "gauss")
    return _render_value(valuations.gauss_eval(s.get(name, LaurentPoly), _gauss_point(s, args[0])))


def _cmd_sharp(s, name, args, opts):
    return render_point(valuations.gauss_sharp(_gauss_point(s, name)).r)


def _cmd_abhyankar(s, name, args, opts):
    x = _gauss_point(s, name)
    fs = [s.get(a, LaurentPoly) for a in args]
    if not fs:
        raise ValidationError("abhyankar needs the functions as arguments")
    probes = valuations.default_probes(len(fs), opts.get("probes", 2), s.registry)
    return _bool(valuations.abhyankar_check(fs, x, probes))


def _cmd_push(s, name, args, opts):
    _need(args, 1, "push")
    m = s.get(args[0], MonoMap)
    return render_point(valuations.pushforward_monomial(m.int_matrix(), m.consts, _gauss_point(s, name)).r)


COMMANDS: Dict[str, Callable] = {
    "empty?": _cmd_empty,
    "dim": _cmd_dim,
    "boundary": _cmd_boundary,
    "decompose": _cmd_decompose,
    "image": _cmd_image,
    "qe": _cmd_qe,
    "eval": _cmd_eval,
    "sample": _cmd_sample,
    "member": _cmd_member,
    "quotient": _cmd_quotient,
    "orbit": _cmd_orbit,
    "gauss": _cmd_gauss,
    "sharp": _cmd_sharp,
    "abhyankar": _cmd_abhyankar,
    "push": _cmd_push,
}


def _status_of(exc: BaseException) -> int:
    return EXIT_CAP if isinstance(exc, ResourceCap) else EXIT_INPUT


def run(session: Session, command: str, cap: Optional[int] = None, probes: int = 2) -> dict:
    """Execute ``"COMMAND NAME ARG..."`` against a session and build the report.

    The report has the keys ``command``, ``status`` (``ok`` or ``error``),
    ``payload``, ``counters``, ``wall_time_us`` and, on failure, ``error``
    and ``exit_code``.
    """
    words = command.split()
    if not words:
        raise UnknownCommand("empty command")
    cmd, rest = words[0], words[1:]
    if cmd not in COMMANDS:
        raise UnknownCommand(f"unknown command {cmd!r}")
    if not rest:
        raise ValidationError(f"{cmd} needs an object name")
    start = time.perf_counter_ns()
    report = {"command": " ".join(words)}
    with counting() as ctr, limits(cell_cap=_default_cap() if cap is None else cap):
        try:
            payload = COMMANDS[cmd](session, rest[0], rest[1:], {"probes": probes})
        except PlskelError as e:
            report.update(status="error", payload="", exit_code=_status_of(e),
                          error={"type": type(e).__name__, "message": str(e)})
        else:
            report.update(status="ok", payload=payload, exit_code=EXIT_OK)
    report["counters"] = dict(sorted(ctr.items()))
    report["wall_time_us"] = (time.perf_counter_ns() - start) // 1000
    return report


def _default_cap() -> int:
    env = os.environ.get("PLSKEL_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"PLSKEL_CAP={env!r} is not an integer") from None
    return DEFAULT_CELL_CAP


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"usage: {message}")


def _build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="plskel", description="Exact monomial polytope and skeleton computations.")
    p.add_argument("command", help="one of: " + ", ".join(COMMANDS))
    p.add_argument("session", help="session file")
    p.add_argument("--name", help="object the command acts on")
    p.add_argument("--args", nargs="*", default=[], help="further object names")
    p.add_argument("--cap", type=int, help="cell cap (default: PLSKEL_CAP or %d)" % DEFAULT_CELL_CAP)
    p.add_argument("--probes", type=int, default=2, help="probe degree for abhyankar")
    return p


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
        if ns.command not in COMMANDS:
            raise UnknownCommand(f"unknown command {ns.command!r}")
        try:
            with open(ns.session, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ValidationError(f"cannot read session file: {e.strerror}") from None
        cap = _default_cap() if ns.cap is None else ns.cap
        with limits(cell_cap=cap):
            session = parse_session(text)
        if not ns.name:
            raise ValidationError(f"{ns.command} needs --name")
        report = run(session, " ".join([ns.command, ns.name, *ns.args]), cap, ns.probes)
    except PlskelError as e:
        code = _status_of(e)
        print(f"plskel: {type(e).__name__}: {e}", file=sys.stderr)
        _emit({"command": " ".join(argv if argv is not None else sys.argv[1:]), "status": "error",
               "payload": "", "exit_code": code,
               "error": {"type": type(e).__name__, "message": str(e)}})
        return code
    if report["status"] != "ok":
        print(f"plskel: {report['error']['type']}: {report['error']['message']}", file=sys.stderr)
    _emit(report)
    return report["exit_code"]


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
