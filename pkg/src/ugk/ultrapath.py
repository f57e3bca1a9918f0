"""Finite paths, ultrapaths, and finitely presented boundary points.

A boundary point is either Fin(prefix, A) — a finite path ending in a
minimal infinite emitter A — or EvPer(head, cycle), the eventually periodic
infinite path head cycle cycle ...  EvPer values are kept in a canonical
form (primitive cycle, shortest head), which makes equality of records
coincide with equality of the presented points.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .epset import EPSet
from .ultragraph import EdgeRef, Ultragraph, UltragraphError


class PathError(ValueError):
    pass


class UndefinedConcatenation(PathError):
    pass


class UndefinedOnLengthZero(PathError):
    pass


class Path:
    """A composable finite sequence of edges (possibly empty)."""

    __slots__ = ("graph", "edges", "_n")

    def __init__(self, edges, graph: Ultragraph):
        edges = tuple(edges)
        for ref in edges:
            if not graph.has_edge(ref):
                raise PathError(f"no such edge {ref}")
        for a, b in zip(edges, edges[1:]):
            if graph.edge_source(b) not in graph.edge_range(a):
                raise PathError(
                    f"edges {graph.edge_name(a)} and {graph.edge_name(b)} "
                    "do not compose")
        self.graph = graph
        self.edges = edges
        self._n = len(edges)

    def __len__(self):
        return self._n

    def __iter__(self) -> Iterator[EdgeRef]:
        return iter(self.edges)

    def __getitem__(self, i) -> EdgeRef:
        return self.edges[i]

    def __eq__(self, other):
        return isinstance(other, Path) and self.edges == other.edges

    def __hash__(self):
        return hash(self.edges)

    def __repr__(self):
        return f"Path({self.pretty()!r})"

    def pretty(self) -> str:
        return ".".join(self.graph.edge_name(e) for e in self.edges)

    def source(self) -> Optional[int]:
        return self.graph.edge_source(self.edges[0]) if self.edges else None

    def range(self) -> EPSet:
        if not self.edges:
            raise PathError("the empty path has no range")
        return self.graph.edge_range(self.edges[-1])

    def slice(self, start: int, stop: int) -> "Path":
        return Path(self.edges[start:stop], self.graph)

    def __add__(self, other: "Path") -> "Path":
        return Path(self.edges + other.edges, self.graph)

    def is_prefix_of(self, other: "Path") -> bool:
        return self.edges == other.edges[: len(self.edges)]

    def extends(self, other: "Path") -> bool:
        return other.is_prefix_of(self)


def paths_disjoint(a: Path, b: Path) -> bool:
    """Neither path is an initial segment of the other."""
    return not a.is_prefix_of(b) and not b.is_prefix_of(a)


class Ultrapath:
    """A pair (prefix, A) with A a generalized vertex inside r(prefix);
    with an empty prefix this is the length-zero pair (A, A)."""

    __slots__ = ("graph", "prefix", "component")

    def __init__(self, prefix: Path, component: EPSet, graph: Ultragraph):
        graph.generalized(component)  # raises when not a generalized vertex
        if len(prefix) >= 1 and not component.is_subset(prefix.range()):
            raise PathError("component must sit inside the final edge range")
        self.graph = graph
        self.prefix = prefix
        self.component = component

    def __len__(self):
        return len(self.prefix)

    def __eq__(self, other):
        return (isinstance(other, Ultrapath)
                and self.prefix == other.prefix
                and self.component == other.component)

    def __hash__(self):
        return hash((self.prefix, self.component))

    def __repr__(self):
        return f"Ultrapath({self.prefix.pretty()!r}, {self.component})"

    def concat(self, other: "Ultrapath") -> "Ultrapath":
        """x.y: append y behind x when the junction matches."""
        g = self.graph
        if len(other) == 0:
            meet = self.component & other.component
            if meet.is_empty():
                raise UndefinedConcatenation("components do not meet")
            return Ultrapath(self.prefix, meet, g)
        if other.prefix.source() not in self.component:
            raise UndefinedConcatenation("source of the right factor not in "
                                         "the left component")
        return Ultrapath(self.prefix + other.prefix, other.component, g)

    def disjoint(self, other: "Ultrapath") -> bool:
        """The four-case disjointness test for ultrapaths."""
        a, b = self.prefix, other.prefix
        if paths_disjoint(a, b):
            return True
        if a == b:
            return self.component.is_disjoint(other.component)
        if a.is_prefix_of(b):
            return b[len(a)] not in self.graph.emitted_by(self.component)
        return a[len(b)] not in self.graph.emitted_by(other.component)


def _primitive(edges: tuple) -> tuple:
    n = len(edges)
    for d in range(1, n + 1):
        if n % d == 0 and all(edges[i] == edges[i % d] for i in range(n)):
            return edges[:d]
    return edges


class BoundaryPoint:
    """Fin(prefix, A) or the eventually periodic path EvPer(head, cycle)."""

    __slots__ = ("graph", "kind", "prefix", "component", "cycle")

    def __init__(self, graph, kind, prefix, component, cycle):
        self.graph = graph
        self.kind = kind
        self.prefix = prefix
        self.component = component
        self.cycle = cycle

    @staticmethod
    def fin(g: Ultragraph, prefix: Path, component: EPSet) -> "BoundaryPoint":
        if not any(m.vertices == component for m in g.minimal_infinite_emitters()):
            raise PathError("component of a finite point must be a minimal "
                            "infinite emitter")
        if len(prefix) >= 1 and not component.is_subset(prefix.range()):
            raise PathError("emitter does not sit inside the final edge range")
        return BoundaryPoint(g, "fin", prefix, component, None)

    @staticmethod
    def evper(g: Ultragraph, head: Path, cycle: Path) -> "BoundaryPoint":
        if len(cycle) == 0:
            raise PathError("the periodic part must be nonempty")
        if cycle.source() not in cycle.range():
            raise PathError("the periodic part is not a loop")
        if len(head) >= 1 and cycle.source() not in head.range():
            raise PathError("head and cycle do not compose")
        cyc = _primitive(cycle.edges)
        hd = head.edges
        while hd and hd[-1] == cyc[-1]:
            hd = hd[:-1]
            cyc = cyc[-1:] + cyc[:-1]
        return BoundaryPoint(g, "evper", Path(hd, g), None, Path(cyc, g))

    # -- queries ---------------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.kind == "fin"

    def length(self) -> Optional[int]:
        """Number of edges; None for infinite points."""
        return len(self.prefix) if self.is_finite else None

    def edge_at(self, i: int) -> EdgeRef:
        if i < len(self.prefix):
            return self.prefix[i]
        if self.is_finite:
            raise IndexError(i)
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def prefix_path(self, n: int) -> Path:
        """The first n edges as a Path."""
        return Path([self.edge_at(i) for i in range(n)], self.graph)

    def head(self, n: int) -> tuple:
        """The first n edges as a plain tuple (n within length for fins)."""
        k = len(self.prefix)
        if n <= k:
            return self.prefix.edges[:n]
        cyc = self.cycle.edges
        reps = -(-(n - k) // len(cyc))
        return (self.prefix.edges + cyc * reps)[:n]

    def starts_with(self, path: Path) -> bool:
        if self.is_finite and len(path) > len(self.prefix):
            return False
        return self.head(len(path)) == path.edges

    def __eq__(self, other):
        return (isinstance(other, BoundaryPoint)
                and self.kind == other.kind
                and self.prefix == other.prefix
                and self.component == other.component
                and self.cycle == other.cycle)

    def __hash__(self):
        return hash((self.kind, self.prefix, self.component, self.cycle))

    def __repr__(self):
        return f"BoundaryPoint({self.pretty()!r})"

    def pretty(self) -> str:
        if self.is_finite:
            ids = [m.name for m in self.graph.minimal_infinite_emitters()
                   if m.vertices == self.component]
            return f"fin({self.prefix.pretty()}; {ids[0]})"
        return f"evp({self.prefix.pretty()}; {self.cycle.pretty()})"

    # -- the shift and re-prefixing ----------------------------------------------

    def shift(self) -> "BoundaryPoint":
        if self.is_finite:
            if len(self.prefix) == 0:
                raise UndefinedOnLengthZero("cannot shift a length-zero point")
            return BoundaryPoint.fin(
                self.graph, self.prefix.slice(1, len(self.prefix)),
                self.component)
        if len(self.prefix) >= 1:
            return BoundaryPoint.evper(
                self.graph, self.prefix.slice(1, len(self.prefix)), self.cycle)
        rot = Path(self.cycle.edges[1:] + self.cycle.edges[:1], self.graph)
        return BoundaryPoint.evper(self.graph, Path((), self.graph), rot)

    def shift_by(self, m: int) -> "BoundaryPoint":
        p = self
        for _ in range(m):
            p = p.shift()
        return p

    def prepend(self, path: Path) -> "BoundaryPoint":
        """The point path followed by this one."""
        if len(path) == 0:
            return self
        if self.is_finite:
            if len(self.prefix) == 0:
                if not self.component.is_subset(path.range()):
                    raise UndefinedConcatenation("emitter not inside the "
                                                 "attachment range")
            return BoundaryPoint.fin(self.graph, path + self.prefix,
                                     self.component)
        return BoundaryPoint.evper(self.graph, path + self.prefix, self.cycle)


def concat(x: Ultrapath, y: Ultrapath) -> Ultrapath:
    return x.concat(y)


def ultrapath_disjoint(x: Ultrapath, y: Ultrapath) -> bool:
    return x.disjoint(y)
