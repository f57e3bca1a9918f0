"""Command line front end.

Parses a presentation and dispatches to the library: condition checks,
minimal infinite emitters, the standing range hypothesis, witness
construction, group-word evaluation, and the differential oracle.  Output
ordering is deterministic and JSON documents carry a stable schema tag, so
identical invocations produce byte-identical reports.

Exit codes: 0 for Holds/ok outcomes, 1 for Fails with a certificate, 2 for
Unknown verdicts or a witness search that exhausted its bound, 3 for input
errors.
"""

import argparse
import json
import os
import re
import sys

from .conditions import (FAILS, UNKNOWN, check_K, check_L, check_ND, check_T,
                         check_W, check_infty)
from .constructions import (ConstructionError, WitnessNotFound, f1_record,
                            f2_record, f3_record, f3_witness)
from .cylinder import ClopenSet, Cylinder
from .dsl import DslError, parse_ultragraph
from .epset import EPSyntaxError, parse_epset
from .fullgroup import (FullGroupElement, FullGroupError, commutator, pi_hat,
                        pi_tilde)
from .groupoid import Bisection
from .oracle import TruncatedUniverse
from .ultragraph import EdgeRef, UltragraphError
from .ultrapath import BoundaryPoint, Path, PathError

SCHEMA = "ugk-report/1"
ORDER_CAP = 64

OK, FAILED, UNDECIDED, USAGE = 0, 1, 2, 3


class ScriptError(ValueError):
    """A group-word script or inline expression that cannot be read."""


# -- tiny expression language -----------------------------------------------------

_NAME_RE = re.compile(r"^[A-Za-z_]\w*$")
_EDGE_RE = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\[\s*(\d+)\s*\])?\s*$")
_ASSIGN_RE = re.compile(r"^([A-Za-z_]\w*)\s*=\s*(\S.*)$", re.S)
_CALL_RE = re.compile(r"^(pi_hat|pi_tilde|f3)\s*\((.*)\)$", re.S)
_POINT_START_RE = re.compile(r"\s(?=(?:fin|evp)\s*\()")

_OPENERS = {"(": ")", "[": "]", "{": "}"}
_CLOSERS = set(_OPENERS.values())


def _split_top(text: str, sep: str) -> list:
    """Split at separators outside every bracket pair."""
    parts, cur, depth = [], [], 0
    for ch in text:
        if ch in _OPENERS:
            depth += 1
        elif ch in _CLOSERS:
            depth -= 1
            if depth < 0:
                raise ScriptError(f"unbalanced brackets in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ScriptError(f"unbalanced brackets in {text!r}")
    parts.append("".join(cur))
    return parts


def _closes_at_end(text: str) -> bool:
    """True when the opening bracket at position 0 matches the last char."""
    depth = 0
    for i, ch in enumerate(text):
        if ch in _OPENERS:
            depth += 1
        elif ch in _CLOSERS:
            depth -= 1
            if depth == 0:
                return i == len(text) - 1
    return False


def _parse_edge(text: str) -> EdgeRef:
    m = _EDGE_RE.match(text)
    if not m:
        raise ScriptError(f"cannot read edge {text.strip()!r}")
    return EdgeRef(m.group(1), int(m.group(2) or 0))


def _parse_path(text: str, g) -> Path:
    text = text.strip()
    if not text:
        return Path((), g)
    return Path(tuple(_parse_edge(p) for p in text.split(".")), g)


def _parse_excludes(text: str, g):
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ScriptError(f"exclusions must be braced, got {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return frozenset()
    return frozenset(_parse_edge(p) for p in _split_top(inner, ","))


def _call_fields(text: str, head: str, low: int, high: int) -> list:
    text = text.strip()
    if not (text.startswith(head) and text.endswith(")")):
        raise ScriptError(f"expected {head}...), got {text!r}")
    fields = _split_top(text[len(head):-1], ";")
    if not low <= len(fields) <= high:
        raise ScriptError(
            f"{head}...) takes {low}..{high} ;-separated fields, "
            f"got {len(fields)}")
    return fields


def _parse_bisection(text: str, g) -> Bisection:
    f = _call_fields(text, "Z(", 3, 4)
    excl = _parse_excludes(f[3], g) if len(f) == 4 else frozenset()
    return Bisection.make(g, _parse_path(f[0], g), _parse_path(f[1], g),
                          parse_epset(f[2].strip()), excl)


def _parse_cylinder(text: str, g) -> Cylinder:
    f = _call_fields(text, "D(", 2, 3)
    excl = _parse_excludes(f[2], g) if len(f) == 3 else frozenset()
    return Cylinder.make(g, _parse_path(f[0], g), parse_epset(f[1].strip()),
                         excl)


def _parse_rows(text: str, g) -> list:
    text = text.strip()
    if text.startswith("{"):
        if not text.endswith("}"):
            raise ScriptError(f"unclosed row set in {text!r}")
        inner = text[1:-1].strip()
        if not inner:
            return []
        return [_parse_bisection(p, g) for p in _split_top(inner, ",")]
    return [_parse_bisection(text, g)]


def _whole(g) -> ClopenSet:
    return ClopenSet.of(g, Cylinder.make(g, Path((), g), g.active))


def _parse_set(text: str, g) -> ClopenSet:
    text = text.strip()
    if not text:
        return _whole(g)
    if text.startswith("{"):
        if not text.endswith("}"):
            raise ScriptError(f"unclosed set in {text!r}")
        cyls = [_parse_cylinder(p, g)
                for p in _split_top(text[1:-1], ",") if p.strip()]
        return ClopenSet.normalize(g, cyls)
    return ClopenSet.of(g, _parse_cylinder(text, g))


def _parse_point(text: str, g) -> BoundaryPoint:
    text = text.strip()
    kind = text[:3]
    if kind not in ("fin", "evp"):
        raise ScriptError(f"points look like fin(...) or evp(...), "
                          f"got {text!r}")
    f = _call_fields(text, kind + "(", 2, 2)
    if kind == "evp":
        return BoundaryPoint.evper(g, _parse_path(f[0], g),
                                   _parse_path(f[1], g))
    comp_text = f[1].strip()
    if comp_text.startswith("mie#"):
        mies = g.minimal_infinite_emitters()
        k = int(comp_text[4:])
        if k >= len(mies):
            raise ScriptError(f"no {comp_text}; the graph has {len(mies)} "
                              f"minimal infinite emitter(s)")
        comp = mies[k].vertices
    else:
        comp = parse_epset(comp_text)
    return BoundaryPoint.fin(g, _parse_path(f[0], g), comp)


def _eval_expr(text: str, env: dict, g, bound: int):
    text = text.strip()
    if not text:
        raise ScriptError("empty expression")
    factors = _split_top(text, "*")
    if len(factors) > 1:
        acc = _as_element(_eval_expr(factors[0], env, g, bound))
        for f in factors[1:]:
            acc = acc * _as_element(_eval_expr(f, env, g, bound))
        return acc
    if text.endswith("^-1"):
        return _as_element(_eval_expr(text[:-3], env, g, bound)).inverse()
    if text.startswith("[") and _closes_at_end(text):
        parts = _split_top(text[1:-1], ",")
        if len(parts) != 2:
            raise ScriptError("a commutator takes exactly two elements")
        return commutator(_as_element(_eval_expr(parts[0], env, g, bound)),
                          _as_element(_eval_expr(parts[1], env, g, bound)))
    if text.startswith("(") and _closes_at_end(text):
        return _eval_expr(text[1:-1], env, g, bound)
    m = _CALL_RE.match(text)
    if m and _closes_at_end(text[text.index("("):]):
        name, inner = m.group(1), m.group(2)
        if name == "f3":
            return f3_witness(_parse_set(inner, g), bound=bound)
        maker = pi_hat if name == "pi_hat" else pi_tilde
        return maker(_parse_rows(inner, g), g)
    if _NAME_RE.match(text):
        if text not in env:
            raise ScriptError(f"unknown name {text!r}")
        return env[text]
    raise ScriptError(f"cannot parse expression {text!r}")


def _as_element(value) -> FullGroupElement:
    if not isinstance(value, FullGroupElement):
        raise ScriptError(f"expected a group element, got "
                          f"{type(value).__name__}")
    return value


def _strip_comment(raw: str) -> str:
    # a comment hash sits at the start of the line or after whitespace,
    # which keeps mie#0 in point literals intact
    if raw.lstrip().startswith("#"):
        return ""
    m = re.search(r"\s#", raw)
    return raw[:m.start()] if m else raw


def run_script(lines, g, bound: int) -> list:
    """Execute a group-word script and collect the query results."""
    env, results = {}, []
    for no, raw in enumerate(lines, 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        try:
            if line.startswith("order "):
                n = _as_element(
                    _eval_expr(line[6:], env, g, bound)).order(ORDER_CAP)
                text = str(n) if n is not None else f">{ORDER_CAP}"
                results.append({"query": "order", "text": text})
            elif line.startswith("support "):
                elem = _as_element(_eval_expr(line[8:], env, g, bound))
                results.append({"query": "support",
                                "text": elem.support().pretty()})
            elif line.startswith("apply "):
                rest = line[6:]
                m = _POINT_START_RE.search(rest)
                if not m:
                    raise ScriptError("apply takes an element and a point")
                elem = _as_element(
                    _eval_expr(rest[:m.start()], env, g, bound))
                p = _parse_point(rest[m.start():], g)
                results.append({"query": "apply",
                                "text": elem.apply(p).pretty()})
            else:
                m = _ASSIGN_RE.match(line)
                if not m:
                    raise ScriptError("expected `name = expr`, `order e`, "
                                      "`support e` or `apply e point`")
                env[m.group(1)] = _eval_expr(m.group(2), env, g, bound)
        except WitnessNotFound:
            raise
        except (ScriptError, EPSyntaxError, PathError, ConstructionError,
                FullGroupError) as err:
            raise ScriptError(f"line {no}: {err}") from err
    return results


# -- subcommands --------------------------------------------------------------------

_CHECKS = {"L": check_L, "K": check_K, "T": check_T, "ND": check_ND,
           "INF": check_infty, "W": check_W}
_CHECK_ORDER = ["L", "K", "T", "ND", "INF", "W"]


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _paint(line: str, verdict: str) -> str:
    if not os.environ.get("UGK_COLOR"):
        return line
    code = {"Holds": "32", "Fails": "31"}.get(verdict, "33")
    return line.replace(verdict, f"\x1b[{code}m{verdict}\x1b[0m", 1)


def _cmd_check(args, g) -> int:
    if args.conditions:
        names = []
        for tok in args.conditions.split(","):
            name = tok.strip().upper()
            if name not in _CHECKS:
                raise ScriptError(f"unknown condition {tok.strip()!r}; "
                                  f"pick from {','.join(_CHECK_ORDER)}")
            names.append(name)
    else:
        names = list(_CHECK_ORDER)
    reports = [_CHECKS[n](g) if n == "ND" else _CHECKS[n](g, args.bound)
               for n in names]
    if args.json:
        _emit({"schema": SCHEMA, "command": "check", "bound": args.bound,
               "reports": [r.to_json() for r in reports]})
    else:
        for r in reports:
            print(_paint(r.pretty(), r.verdict))
    verdicts = {r.verdict for r in reports}
    if FAILS in verdicts:
        return FAILED
    return UNDECIDED if UNKNOWN in verdicts else OK


def _cmd_mie(args, g) -> int:
    mies = g.minimal_infinite_emitters()
    if args.json:
        _emit({"schema": SCHEMA, "command": "mie",
               "mies": [{"name": m.name, "vertices": m.vertices.pretty(),
                         "epset": m.vertices.to_json()} for m in mies]})
    elif not mies:
        print("no minimal infinite emitters")
    else:
        for m in mies:
            print(f"{m.name}: {m.vertices.pretty()}")
    return OK


def _cmd_rfum(args, g) -> int:
    rep = g.rfum_report()
    edge = (Path((rep.violating_edge,), g).pretty()
            if rep.violating_edge is not None else None)
    leftover = rep.leftover.pretty() if rep.leftover is not None else None
    if args.json:
        _emit({"schema": SCHEMA, "command": "rfum", "ok": rep.ok,
               "edge": edge, "leftover": leftover})
    elif rep.ok:
        print("ranges fully used: ok")
    else:
        print(f"range of {edge} is not fully used: {leftover} is infinite "
              f"but no minimal infinite emitter covers it")
    return OK if rep.ok else FAILED


def _cmd_witness(args, g) -> int:
    A = _parse_set(args.set or "", g)
    if args.kind == "f3":
        rec = f3_record(A, bound=args.bound)
    elif args.kind == "f1":
        if not args.point:
            raise ScriptError("witness --kind f1 needs --point")
        rec = f1_record(_parse_point(args.point, g), A, bound=args.bound)
    else:
        if not args.tau:
            raise ScriptError("witness --kind f2 needs --tau")
        tau = _as_element(_eval_expr(args.tau, {}, g, args.bound))
        if not args.set:
            A = tau.support()
        rec = f2_record(tau, A, bound=args.bound)

    def rowset(rows):
        return "{" + ", ".join(z.pretty() for z in rows) + "}"

    script = [f"V = pi_hat({rowset(rec.v_rows)})",
              f"W = pi_hat({rowset(rec.w_rows)})",
              "witness = [V, W]",
              "order witness"]
    if args.kind == "f1":
        script.append(f"apply witness {args.point.strip()}")
    doc = {"schema": SCHEMA, "command": "witness", "kind": rec.kind,
           "element": rec.element.pretty(),
           "checks": [{"name": n, "ok": ok} for n, ok in rec.checks],
           "notes": list(rec.notes), "verified": rec.verified(),
           "word": rec.word(), "script": script}
    if args.json:
        _emit(doc)
    else:
        for line in script:
            print(line)
        print()
        _emit(doc)
    return OK


def _cmd_eval(args, g) -> int:
    if args.script == "-":
        if args.file == "-":
            raise ScriptError("only one of the graph and the script may "
                              "come from stdin")
        text = sys.stdin.read()
    else:
        with open(args.script, encoding="utf-8") as fh:
            text = fh.read()
    results = run_script(text.splitlines(), g, args.bound)
    if args.json:
        _emit({"schema": SCHEMA, "command": "eval", "results": results})
    else:
        for r in results:
            print(r["text"])
    return OK


def _cmd_oracle_diff(args, g) -> int:
    uni = TruncatedUniverse(g, cutoff=args.truncate)
    rep = uni.diff_test(seed=args.seed, trials=args.trials)
    if args.json:
        _emit({"schema": SCHEMA, "command": "oracle-diff", "ok": rep.ok,
               "trials": rep.trials, "points": rep.points,
               "comparisons": rep.comparisons,
               "divergence": (rep.divergence.pretty()
                              if rep.divergence else None)})
    else:
        print(rep.pretty())
    return OK if rep.ok else FAILED


# -- argument plumbing ----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ugk",
        description="Check conditions, build witnesses and evaluate group "
                    "words over an ultragraph presentation.")
    subs = top.add_subparsers(dest="subcommand", required=True)

    def sub(name, func, help_text):
        p = subs.add_parser(name, help=help_text)
        p.add_argument("file", help="presentation file, or - for stdin")
        p.add_argument("--json", action="store_true",
                       help="emit a JSON report")
        p.set_defaults(func=func)
        return p

    p = sub("check", _cmd_check, "run condition checkers")
    p.add_argument("--conditions", default="",
                   help="comma separated subset of L,K,T,ND,INF,W")
    p.add_argument("--bound", type=int, default=16)

    sub("mie", _cmd_mie, "list minimal infinite emitters")
    sub("rfum", _cmd_rfum, "check that every range is fully used")

    p = sub("witness", _cmd_witness, "build and verify a witness element")
    p.add_argument("--kind", choices=["f1", "f2", "f3"], required=True)
    p.add_argument("--point", default="",
                   help="point the witness must move (f1)")
    p.add_argument("--tau", default="",
                   help="involution to agree with, e.g. "
                        "pi_hat({Z(e1; e2; ap(3,1))}) (f2)")
    p.add_argument("--set", default="",
                   help="clopen set D(prefix; comp; {excl}) to act inside; "
                        "defaults to the whole space")
    p.add_argument("--bound", type=int, default=16)

    p = sub("eval", _cmd_eval, "run a group-word script")
    p.add_argument("script", help="script file, or - for stdin")
    p.add_argument("--bound", type=int, default=16)

    p = sub("oracle-diff", _cmd_oracle_diff,
            "compare exact set algebra against the truncated oracle")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--truncate", type=int, default=40)

    return top


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse insists on exiting itself; fold its usage errors into
        # the input-error code and let --help stay a success
        return USAGE if exc.code else OK
    try:
        if args.file == "-":
            text = sys.stdin.read()
        else:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        g = parse_ultragraph(text)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE
    except (DslError, EPSyntaxError, UltragraphError) as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE
    try:
        return args.func(args, g)
    except WitnessNotFound as err:
        print(f"witness search exhausted: {err}", file=sys.stderr)
        return UNDECIDED
    except (ScriptError, DslError, EPSyntaxError, PathError,
            ConstructionError, FullGroupError, UltragraphError) as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
