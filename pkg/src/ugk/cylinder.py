"""The clopen set algebra of the boundary space.

A cylinder D(prefix, B, F) holds the finite points (prefix, A) with A an
infinite emitter inside B, and every point extending prefix through an edge
sourced in B that is not in the finite excluded set F.  All operations are
exact: intersections and same-prefix unions are single cylinders,
differences are finite disjoint cylinder lists.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .epset import EPSet
from .ultragraph import EdgeRef, Ultragraph
from .ultrapath import BoundaryPoint, Path, UndefinedOnLengthZero, paths_disjoint

NORMALIZE_CAP = 100_000


def joint_excluded(g, comp_a, excl_a, comp_b, excl_b) -> set:
    """Edges dead in the union of two component/exclusion pairs: each side
    must either exclude the edge or not emit it at all."""
    kept = set()
    for e in excl_a | excl_b:
        src = g.edge_source(e)
        if ((src not in comp_a or e in excl_a)
                and (src not in comp_b or e in excl_b)):
            kept.add(e)
    return kept


class CylinderError(ValueError):
    pass


class PrefixMismatch(CylinderError):
    pass


class NormalizationOverflow(CylinderError):
    pass


class Cylinder:
    __slots__ = ("graph", "prefix", "component", "excluded", "_gv")

    def __init__(self, graph: Ultragraph, prefix: Path, component: EPSet,
                 excluded: frozenset[EdgeRef], _gv=None):
        self.graph = graph
        self.prefix = prefix
        self.component = component
        self.excluded = excluded
        self._gv = _gv

    @staticmethod
    def make(graph: Ultragraph, prefix: Path, component: EPSet,
             excluded: Iterable[EdgeRef] = ()) -> "Cylinder":
        """Validating constructor.  Excluded edges not sourced in the
        component restrict nothing and are dropped."""
        gv = graph.generalized(component)
        if len(prefix) >= 1 and not component.is_subset(prefix.range()):
            raise CylinderError("component must sit inside the prefix range")
        emitted = graph.emitted_by(component)
        excl = frozenset(e for e in excluded if e in emitted)
        return Cylinder(graph, prefix, component, excl, gv)

    @property
    def gv(self):
        if self._gv is None:
            self._gv = self.graph.generalized(self.component)
        return self._gv

    def sort_key(self):
        return (len(self.prefix), self.prefix.edges,
                self.component.sort_key(), tuple(sorted(self.excluded)))

    def __eq__(self, other):
        return (isinstance(other, Cylinder)
                and self.prefix == other.prefix
                and self.component == other.component
                and self.excluded == other.excluded)

    def __hash__(self):
        return hash((self.prefix, self.component, self.excluded))

    def __repr__(self):
        return f"Cylinder({self.pretty()!r})"

    def pretty(self) -> str:
        g = self.graph
        excl = ", ".join(sorted(g.edge_name(e) for e in self.excluded))
        return (f"D({self.prefix.pretty()}; {self.component.pretty()}; "
                f"{{{excl}}})")

    # -- membership -------------------------------------------------------------

    def contains(self, p: BoundaryPoint) -> bool:
        k = len(self.prefix)
        if p.is_finite and p.length() == k:
            return p.prefix == self.prefix and p.component.is_subset(self.component)
        if p.is_finite and p.length() < k:
            return False
        if not p.starts_with(self.prefix):
            return False
        e = p.edge_at(k)
        return e not in self.excluded and self.graph.edge_source(e) in self.component

    def __contains__(self, p: BoundaryPoint) -> bool:
        return self.contains(p)

    def is_empty(self) -> bool:
        """True when every outgoing edge of the component is excluded (then
        no minimal infinite emitter can fit inside either)."""
        live = self.graph.emitted_by(self.component).without(self.excluded)
        return live.is_empty()

    # -- algebra ------------------------------------------------------------------

    def intersect(self, other: "Cylinder") -> Optional["Cylinder"]:
        """None stands for the empty intersection."""
        a, b = self.prefix, other.prefix
        if paths_disjoint(a, b):
            return None
        if a == b:
            meet = self.component & other.component
            if meet.is_empty():
                return None
            c = Cylinder.make(self.graph, a, meet, self.excluded | other.excluded)
            return None if c.is_empty() else c
        if a.is_prefix_of(b):
            shallow, deep = self, other
        else:
            shallow, deep = other, self
        e = deep.prefix[len(shallow.prefix)]
        if e in shallow.excluded:
            return None
        if self.graph.edge_source(e) not in shallow.component:
            return None
        return deep

    def union_same_prefix(self, other: "Cylinder") -> "Cylinder":
        if self.prefix != other.prefix:
            raise PrefixMismatch("union of cylinders needs equal prefixes")
        g = self.graph
        join = self.component | other.component
        kept = joint_excluded(g, self.component, self.excluded,
                              other.component, other.excluded)
        return Cylinder.make(g, self.prefix, join, kept)

    def difference(self, other: "Cylinder") -> "ClopenSet":
        return ClopenSet(self.graph, tuple(self._difference(other)))

    def _difference(self, other: "Cylinder") -> list["Cylinder"]:
        g = self.graph
        beta, gamma = self.prefix, other.prefix
        if paths_disjoint(beta, gamma):
            return [self]
        if len(gamma) > len(beta):
            # peel one connecting edge off and recurse on the deeper branch
            e = gamma[len(beta)]
            if e in self.excluded or g.edge_source(e) not in self.component:
                return [self]
            out = []
            rest = Cylinder.make(g, beta, self.component, self.excluded | {e})
            if not rest.is_empty():
                out.append(rest)
            branch = Cylinder.make(g, beta + Path([e], g), g.edge_range(e))
            out.extend(branch._difference(other))
            return out
        if len(gamma) < len(beta):
            e = beta[len(gamma)]
            covered = (g.edge_source(e) in other.component
                       and e not in other.excluded)
            return [] if covered else [self]
        return self._difference_same_prefix(other)

    def _difference_same_prefix(self, other: "Cylinder") -> list["Cylinder"]:
        g = self.graph
        B, C, F, H = self.component, other.component, self.excluded, other.excluded
        mies = [g.mie(i).vertices for i in self.gv.mie_ids]
        kept = [m for m in mies if not m.is_subset(C)]
        out: list[Cylinder] = []
        seen_before = EPSet.empty()
        for m in kept:
            excl = {e for e in F if g.edge_source(e) in m}
            excl.update(e for e in g.emitted_by(m & C).iter_refs()
                        if e not in H)
            excl.update(g.emitted_by(m & seen_before).iter_refs())
            out.append(Cylinder.make(g, self.prefix, m, excl))
            seen_before = seen_before | m
        # continuation edges through vertices outside every kept emitter
        rest = self.component - seen_before  # finite, and free of infinite
        # emitter vertices (their singletons would be kept or dropped above)
        fresh = rest - C
        for e in g.emitted_by(fresh).iter_refs():
            if e not in F:
                out.append(self._one_edge(e))
        shared = rest & C
        for e in sorted(H - F):
            if g.edge_source(e) in shared:
                out.append(self._one_edge(e))
        return out

    def _one_edge(self, e: EdgeRef) -> "Cylinder":
        g = self.graph
        return Cylinder.make(g, self.prefix + Path([e], g), g.edge_range(e))

    def shift_image(self) -> "Cylinder":
        """The image under dropping the whole prefix: a prefixless cylinder
        with the same component and exclusions."""
        if len(self.prefix) == 0:
            raise UndefinedOnLengthZero("prefixless cylinders do not shift")
        return Cylinder(self.graph, Path((), self.graph), self.component,
                        self.excluded, self._gv)


class ClopenSet:
    """A finite disjoint union of cylinders."""

    __slots__ = ("graph", "parts")

    def __init__(self, graph: Ultragraph, parts: tuple[Cylinder, ...]):
        self.graph = graph
        self.parts = tuple(sorted(parts, key=Cylinder.sort_key))

    @staticmethod
    def normalize(graph: Ultragraph, cylinders) -> "ClopenSet":
        """Disjointify an arbitrary finite cylinder list: later cylinders
        are replaced by their difference with everything already placed,
        then parts sharing a prefix are merged back into single cylinders."""
        placed: list[Cylinder] = []
        for c in cylinders:
            if c.is_empty():
                continue
            pieces = [c]
            for p in placed:
                nxt = []
                for piece in pieces:
                    nxt.extend(piece._difference(p))
                    if len(nxt) + len(placed) > NORMALIZE_CAP:
                        raise NormalizationOverflow(
                            f"more than {NORMALIZE_CAP} parts")
                pieces = nxt
            placed.extend(pieces)
        merged: dict[Path, Cylinder] = {}
        for c in placed:
            prev = merged.get(c.prefix)
            merged[c.prefix] = prev.union_same_prefix(c) if prev else c
        return ClopenSet(graph, tuple(c for c in merged.values()
                                      if not c.is_empty()))

    @staticmethod
    def of(graph, *cylinders) -> "ClopenSet":
        return ClopenSet.normalize(graph, cylinders)

    def is_empty(self) -> bool:
        return all(c.is_empty() for c in self.parts)

    def contains(self, p: BoundaryPoint) -> bool:
        return any(c.contains(p) for c in self.parts)

    def __contains__(self, p) -> bool:
        return self.contains(p)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __repr__(self):
        return f"ClopenSet({self.pretty()!r})"

    def pretty(self) -> str:
        if not self.parts:
            return "<empty>"
        return " + ".join(c.pretty() for c in self.parts)

    def union(self, other: "ClopenSet") -> "ClopenSet":
        return ClopenSet.normalize(self.graph, self.parts + other.parts)

    def intersect(self, other: "ClopenSet") -> "ClopenSet":
        pieces = []
        for a in self.parts:
            for b in other.parts:
                c = a.intersect(b)
                if c is not None and not c.is_empty():
                    pieces.append(c)
        return ClopenSet(self.graph, tuple(pieces))

    def difference(self, other: "ClopenSet") -> "ClopenSet":
        pieces = list(self.parts)
        for b in other.parts:
            nxt = []
            for a in pieces:
                nxt.extend(x for x in a._difference(b) if not x.is_empty())
                if len(nxt) > NORMALIZE_CAP:
                    raise NormalizationOverflow(f"more than {NORMALIZE_CAP} parts")
            pieces = nxt
        return ClopenSet(self.graph, tuple(pieces))

    def is_subset(self, other: "ClopenSet") -> bool:
        return self.difference(other).is_empty()

    def equals(self, other: "ClopenSet") -> bool:
        return self.is_subset(other) and other.is_subset(self)

    def shift_image(self) -> "ClopenSet":
        return ClopenSet.normalize(self.graph,
                                   [c.shift_image() for c in self.parts])
