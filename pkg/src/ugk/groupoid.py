"""Basic compact open bisections of the boundary shift groupoid.

A bisection Z(alpha, beta, A, F) collects the arrows (alpha.xi, k, beta.xi)
with k = len(alpha) - len(beta), one for every point xi rooted in the
component A whose first edge avoids F.  It acts on the boundary by swapping
the prefix beta for alpha.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .cylinder import Cylinder
from .epset import EPSet
from .ultragraph import EdgeRef, Ultragraph
from .ultrapath import BoundaryPoint, Path, paths_disjoint


class GroupoidError(ValueError):
    pass


class NotInSource(GroupoidError):
    pass


@dataclass(frozen=True)
class Arrow:
    x: BoundaryPoint
    k: int
    y: BoundaryPoint

    def pretty(self) -> str:
        return f"({self.x.pretty()}, {self.k:+d}, {self.y.pretty()})"


class Bisection:
    __slots__ = ("graph", "out_prefix", "in_prefix", "component", "excluded")

    def __init__(self, graph, out_prefix, in_prefix, component, excluded):
        self.graph = graph
        self.out_prefix = out_prefix
        self.in_prefix = in_prefix
        self.component = component
        self.excluded = excluded

    @staticmethod
    def make(graph: Ultragraph, out_prefix: Path, in_prefix: Path,
             component: EPSet, excluded: Iterable[EdgeRef] = ()) -> "Bisection":
        graph.generalized(component)
        for p in (out_prefix, in_prefix):
            if len(p) >= 1 and not component.is_subset(p.range()):
                raise GroupoidError("component must sit inside both prefix ranges")
        emitted = graph.emitted_by(component)
        excl = frozenset(e for e in excluded if e in emitted)
        return Bisection(graph, out_prefix, in_prefix, component, excl)

    @property
    def degree(self) -> int:
        return len(self.out_prefix) - len(self.in_prefix)

    def source(self) -> Cylinder:
        return Cylinder.make(self.graph, self.in_prefix, self.component,
                             self.excluded)

    def range(self) -> Cylinder:
        return Cylinder.make(self.graph, self.out_prefix, self.component,
                             self.excluded)

    def inverse(self) -> "Bisection":
        return Bisection(self.graph, self.in_prefix, self.out_prefix,
                         self.component, self.excluded)

    def is_empty(self) -> bool:
        return self.source().is_empty()

    def __eq__(self, other):
        return (isinstance(other, Bisection)
                and self.out_prefix == other.out_prefix
                and self.in_prefix == other.in_prefix
                and self.component == other.component
                and self.excluded == other.excluded)

    def __hash__(self):
        return hash((self.out_prefix, self.in_prefix, self.component,
                     self.excluded))

    def __repr__(self):
        return f"Bisection({self.pretty()!r})"

    def pretty(self) -> str:
        g = self.graph
        excl = ", ".join(sorted(g.edge_name(e) for e in self.excluded))
        return (f"Z({self.out_prefix.pretty()}; {self.in_prefix.pretty()}; "
                f"{self.component.pretty()}; {{{excl}}})")

    # -- action -----------------------------------------------------------------

    def apply(self, p: BoundaryPoint) -> BoundaryPoint:
        if not self.source().contains(p):
            raise NotInSource(f"{p.pretty()} is not in {self.pretty()}")
        return p.shift_by(len(self.in_prefix)).prepend(self.out_prefix)

    def arrow_at(self, p: BoundaryPoint) -> Arrow:
        return Arrow(self.apply(p), self.degree, p)

    def contains_arrow(self, a: Arrow) -> bool:
        if a.k != self.degree or not self.source().contains(a.y):
            return False
        return self.apply(a.y) == a.x

    # -- algebra ------------------------------------------------------------------

    def intersect(self, other: "Bisection") -> Optional["Bisection"]:
        if self.degree != other.degree:
            return None
        b1, b2 = self.in_prefix, other.in_prefix
        if b1 == b2:
            if self.out_prefix != other.out_prefix:
                return None
            meet = self.component & other.component
            if meet.is_empty():
                return None
            z = Bisection.make(self.graph, self.out_prefix, b1, meet,
                               self.excluded | other.excluded)
            return None if z.is_empty() else z
        if b1.is_prefix_of(b2):
            coarse, fine = self, other
        elif b2.is_prefix_of(b1):
            coarse, fine = other, self
        else:
            return None
        rho = fine.in_prefix.slice(len(coarse.in_prefix), len(fine.in_prefix))
        if coarse.out_prefix + rho != fine.out_prefix:
            return None
        e = rho[0]
        if e in coarse.excluded:
            return None
        if self.graph.edge_source(e) not in coarse.component:
            return None
        return fine

    def compose(self, other: "Bisection") -> list["Bisection"]:
        """The arrow-set product self . other (apply other first), as a list
        of zero or one basic bisections."""
        g = self.graph
        mid_in, mid_out = self.in_prefix, other.out_prefix
        if paths_disjoint(mid_in, mid_out):
            return []
        if mid_in == mid_out:
            meet = self.component & other.component
            if meet.is_empty():
                return []
            z = Bisection.make(g, self.out_prefix, other.in_prefix, meet,
                               self.excluded | other.excluded)
            return [] if z.is_empty() else [z]
        if mid_in.is_prefix_of(mid_out):
            # other lands deeper: route the connector through self
            delta = mid_out.slice(len(mid_in), len(mid_out))
            e = delta[0]
            if e in self.excluded or g.edge_source(e) not in self.component:
                return []
            z = Bisection.make(g, self.out_prefix + delta, other.in_prefix,
                               other.component, other.excluded)
        else:
            delta = mid_in.slice(len(mid_out), len(mid_in))
            e = delta[0]
            if e in other.excluded or g.edge_source(e) not in other.component:
                return []
            z = Bisection.make(g, self.out_prefix, other.in_prefix + delta,
                               self.component, self.excluded)
        return [] if z.is_empty() else [z]


# -- orbits and isolation ------------------------------------------------------


def _tails(p: BoundaryPoint, budget: int) -> list[BoundaryPoint]:
    out, q = [p], p
    for _ in range(budget):
        if q.is_finite and q.length() == 0:
            break
        q = q.shift()
        if q in out:
            break
        out.append(q)
    return out


def _one_step_prepends(q: BoundaryPoint, per_schema: int) -> list[BoundaryPoint]:
    g = q.graph
    if q.is_finite and q.length() == 0:
        sel = g.range_covering_edges(q.component)
    else:
        sel = g.edges_into(g.edge_source(q.edge_at(0)))
    out = []
    for e in sel.iter_refs(per_schema=per_schema):
        out.append(q.prepend(Path([e], g)))
    return out


def orbit_enumerate(p: BoundaryPoint, budget: int = 6,
                    max_points: int = 2000) -> list[BoundaryPoint]:
    """Points reachable from p by cutting prefixes and re-prefixing with
    composable paths of length up to the budget.  Exhaustive on graphs with
    finite in-degrees; wide edge families are sampled up to the budget."""
    seen = set(_tails(p, budget + max(len_of(p), 0)))
    frontier = list(seen)
    for _ in range(budget):
        nxt = []
        for q in frontier:
            for r in _one_step_prepends(q, per_schema=budget):
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
                    if len(seen) >= max_points:
                        return sorted(seen, key=lambda s: s.pretty())
        frontier = nxt
    return sorted(seen, key=lambda s: s.pretty())


def len_of(p: BoundaryPoint) -> int:
    if p.is_finite:
        return p.length()
    return len(p.prefix) + len(p.cycle)


@dataclass(frozen=True)
class IsolationReport:
    isolated: bool
    reason: str
    witness: Optional[str] = None


def is_isolated(p: BoundaryPoint) -> IsolationReport:
    """A point is isolated exactly when it is eventually periodic and its
    periodic part admits no exit."""
    g = p.graph
    if p.is_finite:
        e = next(g.emitted_by(p.component).iter_refs(per_schema=1))
        return IsolationReport(
            False, "finite points accumulate their own continuations",
            witness=g.edge_name(e))
    n = len(p.cycle)
    for i in range(n):
        rng = g.edge_range(p.cycle[i])
        nxt = p.cycle[(i + 1) % n]
        # two refs per schema are enough to surface any edge besides nxt
        for e in g.emitted_by(rng).iter_refs(per_schema=2):
            if e != nxt:
                return IsolationReport(
                    False, "the periodic part has an exit",
                    witness=g.edge_name(e))
    return IsolationReport(True, "unique continuation along the periodic part",
                           witness=p.cycle.pretty())


@dataclass(frozen=True)
class EffectivenessReport:
    effective: Optional[bool]
    statements: tuple[str, ...]
    detail: object

    def pretty(self) -> str:
        verdict = {True: "effective", False: "NOT effective",
                   None: "undecided at the given bound"}[self.effective]
        lines = [f"groupoid of the boundary shift: {verdict}"]
        lines += [f"  = {s}" for s in self.statements]
        return "\n".join(lines)


EQUIVALENT_STATEMENTS = (
    "the boundary shift groupoid is effective",
    "the boundary shift groupoid is topologically principal",
    "every loop in the graph has an exit",
    "points with trivial isotropy are dense in the boundary",
)


def effectiveness_report(g: Ultragraph, bound: int = 16) -> EffectivenessReport:
    from .conditions import check_L
    rep = check_L(g, bound)
    effective = {"Holds": True, "Fails": False}.get(rep.verdict)
    return EffectivenessReport(effective, EQUIVALENT_STATEMENTS, rep)
