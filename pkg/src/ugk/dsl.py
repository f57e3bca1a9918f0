"""Text format for ultragraph presentations and the expression syntaxes
used on the command line.

One declaration per line, `#` starts a comment:

    universe ap(1,1)
    edge e1 : src 1 -> { all \\ {0,2} }
    family en(n) for n in all : src 1*n+3 -> { 1*n+1, 1*n+3 }

Affine terms are written `INT`, `n`, `INT*n` or `INT*n+INT`.
"""

from __future__ import annotations

import re

from .epset import EPSet, EPSyntaxError, parse_epset, union_all
from .ultragraph import Affine, EdgeRef, EdgeSchema, Ultragraph, UltragraphError


class DslError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col


_AFFINE_RE = re.compile(
    r"^\s*(?:(?P<c1>\d+)\s*\*\s*(?P<v1>[A-Za-z_]\w*)\s*(?:\+\s*(?P<o1>\d+)\s*)?"
    r"|(?P<v2>[A-Za-z_]\w*)"
    r"|(?P<const>\d+))\s*$")

_EDGE_RE = re.compile(
    r"^\s*edge\s+(?P<name>[A-Za-z_]\w*)\s*:\s*src\s+(?P<src>[^-]*?)\s*->\s*"
    r"\{(?P<items>.*)\}\s*$")

_FAMILY_RE = re.compile(
    r"^\s*family\s+(?P<name>[A-Za-z_]\w*)\s*\(\s*(?P<var>[A-Za-z_]\w*)\s*\)\s*"
    r"for\s+(?P<var2>[A-Za-z_]\w*)\s+in\s+(?P<dom>.*?)\s*:\s*src\s+"
    r"(?P<src>[^-]*?)\s*->\s*\{(?P<items>.*)\}\s*$")


def _parse_affine(text: str, var: str | None, line: int) -> Affine | None:
    """Parse the strict affine grammar; None when the text is not affine."""
    m = _AFFINE_RE.match(text)
    if not m:
        return None
    if m.group("const") is not None:
        return Affine(0, int(m.group("const")))
    name = m.group("v1") or m.group("v2")
    if var is None or name != var:
        raise DslError(f"unknown variable {name!r} in affine term", line)
    coef = int(m.group("c1")) if m.group("c1") else 1
    off = int(m.group("o1")) if m.group("o1") else 0
    return Affine(coef, off)


def _split_top(text: str, sep: str) -> list[str]:
    """Split on sep at zero brace/paren depth."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "{(":
            depth += 1
        elif ch in "})":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append(text[start:i])
            start = i + 1
    out.append(text[start:])
    return out


def _parse_epset_at(text: str, line: int) -> EPSet:
    try:
        return parse_epset(text)
    except EPSyntaxError as exc:
        raise DslError(str(exc), line) from None


def _parse_range_items(items: str, var: str | None, line: int
                       ) -> tuple[tuple[Affine, ...], EPSet]:
    terms: list[Affine] = []
    consts: list[EPSet] = []
    if not items.strip():
        raise DslError("empty range", line)
    for raw in _split_top(items, ","):
        piece = raw.strip()
        if not piece:
            raise DslError("empty range item", line)
        aff = _parse_affine(piece, var, line)
        if aff is not None:
            terms.append(aff)
        else:
            consts.append(_parse_epset_at(piece, line))
    return tuple(terms), union_all(consts) if consts else EPSet.empty()


def parse_ultragraph(text: str) -> Ultragraph:
    """Parse a presentation; raises DslError with a line number on failure."""
    active: EPSet | None = None
    schemas: list[EdgeSchema] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stmt = raw.split("#", 1)[0].strip()
        if not stmt:
            continue
        if stmt.startswith("universe"):
            if active is not None:
                raise DslError("duplicate universe declaration", lineno)
            if schemas:
                raise DslError("universe must come before edge declarations", lineno)
            active = _parse_epset_at(stmt[len("universe"):].strip(), lineno)
            continue
        m = _EDGE_RE.match(stmt)
        if m:
            src = _parse_affine(m.group("src"), None, lineno)
            if src is None or not src.is_constant:
                raise DslError("edge source must be a single vertex", lineno)
            terms, const = _parse_range_items(m.group("items"), None, lineno)
            schemas.append(_schema(m.group("name"), EPSet.finite([0]), src,
                                    terms, const, True, lineno))
            continue
        m = _FAMILY_RE.match(stmt)
        if m:
            if m.group("var") != m.group("var2"):
                raise DslError("family variable mismatch", lineno)
            var = m.group("var")
            domain = _parse_epset_at(m.group("dom"), lineno)
            src = _parse_affine(m.group("src"), var, lineno)
            if src is None:
                raise DslError("family source must be an affine term", lineno)
            terms, const = _parse_range_items(m.group("items"), var, lineno)
            schemas.append(_schema(m.group("name"), domain, src,
                                    terms, const, False, lineno))
            continue
        word = stmt.split()[0]
        raise DslError(f"cannot parse declaration starting with {word!r}", lineno)
    try:
        return Ultragraph(schemas, active if active is not None else EPSet.naturals())
    except UltragraphError as exc:
        raise DslError(str(exc)) from None


def _schema(name, domain, src, terms, const, single, lineno) -> EdgeSchema:
    try:
        return EdgeSchema(name, domain, src, terms, const, single)
    except UltragraphError as exc:
        raise DslError(str(exc), lineno) from None


def pretty_ultragraph(g: Ultragraph) -> str:
    """Render a presentation; parsing the output reproduces the schemas."""
    lines = [f"universe {g.active.pretty()}"]
    for s in g.schemas:
        items = [t.pretty() for t in s.range_terms]
        if not s.range_const.is_empty():
            items.append(s.range_const.pretty())
        body = ", ".join(items)
        if s.single:
            lines.append(f"edge {s.name} : src {s.source.off} -> {{ {body} }}")
        else:
            lines.append(
                f"family {s.name}(n) for n in {s.domain.pretty()} : "
                f"src {s.source.pretty()} -> {{ {body} }}")
    return "\n".join(lines) + "\n"


# -- edge, path and point expressions -----------------------------------------

_EDGE_EXPR_RE = re.compile(
    r"^\s*(?P<name>[A-Za-z_]\w*)\s*(?:\[\s*(?P<idx>\d+)\s*\])?\s*$")


def parse_edge(text: str, g: Ultragraph) -> EdgeRef:
    """`e1` for a lone edge, `en[7]` for a family member."""
    m = _EDGE_EXPR_RE.match(text)
    if not m:
        raise DslError(f"cannot parse edge {text!r}")
    name = m.group("name")
    schema = g.by_name.get(name)
    if schema is None:
        raise DslError(f"unknown edge family {name!r}")
    if m.group("idx") is None:
        if not schema.single:
            raise DslError(f"{name!r} is a family; write {name}[index]")
        return EdgeRef(name, 0)
    if schema.single:
        raise DslError(f"{name!r} is a single edge; drop the index")
    idx = int(m.group("idx"))
    if idx not in schema.domain:
        raise DslError(f"index {idx} outside the domain of {name!r}")
    return EdgeRef(name, idx)


def parse_edge_path(text: str, g: Ultragraph) -> tuple[EdgeRef, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(parse_edge(part, g) for part in text.split("."))


def format_path(refs, g: Ultragraph) -> str:
    return ".".join(g.edge_name(ref) for ref in refs)


def _component_epset(text: str, g: Ultragraph) -> EPSet:
    """`mie#3` or any EP-set expression."""
    text = text.strip()
    if text.startswith("mie#"):
        try:
            ident = int(text[4:])
        except ValueError:
            raise DslError(f"bad minimal-emitter id {text!r}") from None
        return g.mie(ident).vertices
    return _parse_epset_at(text, None)


def parse_point(text: str, g: Ultragraph):
    """`fin(e1.e3; mie#0)`, `fin(; mie#0)` or `evp(e1; e5.e3)`."""
    from .ultrapath import BoundaryPoint, Path

    text = text.strip()
    m = re.match(r"^(fin|evp)\s*\((.*)\)\s*$", text, re.S)
    if not m:
        raise DslError(f"cannot parse point {text!r}")
    kind, body = m.group(1), m.group(2)
    parts = _split_top(body, ";")
    if len(parts) != 2:
        raise DslError(f"point {kind}(...) needs two ';'-separated parts")
    prefix = Path(parse_edge_path(parts[0], g), g)
    if kind == "fin":
        comp = _component_epset(parts[1], g)
        return BoundaryPoint.fin(g, prefix, comp)
    cycle = Path(parse_edge_path(parts[1], g), g)
    return BoundaryPoint.evper(g, prefix, cycle)


def _parse_excluded(text: str, g: Ultragraph) -> frozenset[EdgeRef]:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise DslError(f"excluded edges must be brace-listed, got {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return frozenset()
    return frozenset(parse_edge(part, g) for part in _split_top(inner, ","))


def parse_cylinder(text: str, g: Ultragraph):
    """`D(e1.e3; mie#0; {en[4], en[9]})`; the excluded part may be omitted."""
    from .cylinder import Cylinder
    from .ultrapath import Path

    m = re.match(r"^\s*D\s*\((.*)\)\s*$", text, re.S)
    if not m:
        raise DslError(f"cannot parse cylinder {text!r}")
    parts = _split_top(m.group(1), ";")
    if len(parts) not in (2, 3):
        raise DslError("cylinder D(...) needs 2 or 3 ';'-separated parts")
    prefix = Path(parse_edge_path(parts[0], g), g)
    comp = _component_epset(parts[1], g)
    excl = _parse_excluded(parts[2], g) if len(parts) == 3 else frozenset()
    return Cylinder.make(g, prefix, comp, excl)


def parse_clopen(text: str, g: Ultragraph):
    """`+`-joined cylinder expressions."""
    from .cylinder import ClopenSet

    parts = [p for p in (_split_top(text, "+")) if p.strip()]
    if not parts:
        return ClopenSet(g, ())
    return ClopenSet.normalize(g, [parse_cylinder(p, g) for p in parts])


def parse_bisection(text: str, g: Ultragraph):
    """`Z(out-path; in-path; mie#k or epset; {excluded})`."""
    from .groupoid import Bisection
    from .ultrapath import Path

    m = re.match(r"^\s*Z\s*\((.*)\)\s*$", text, re.S)
    if not m:
        raise DslError(f"cannot parse bisection {text!r}")
    parts = _split_top(m.group(1), ";")
    if len(parts) not in (3, 4):
        raise DslError("bisection Z(...) needs 3 or 4 ';'-separated parts")
    out_prefix = Path(parse_edge_path(parts[0], g), g)
    in_prefix = Path(parse_edge_path(parts[1], g), g)
    comp = _component_epset(parts[2], g)
    excl = _parse_excluded(parts[3], g) if len(parts) == 4 else frozenset()
    return Bisection.make(g, out_prefix, in_prefix, comp, excl)
