"""Topological full group elements as finite prefix-substitution tables.

An element is a list of rows Z(alpha_i, beta_i, A_i, F_i) with pairwise
disjoint source cylinders, pairwise disjoint range cylinders, and equal
unions; it acts by swapping beta_i for alpha_i on each source cylinder and
as the identity elsewhere.
"""

from __future__ import annotations

import random
from typing import Iterable, Optional

from .cylinder import ClopenSet, Cylinder, joint_excluded
from .groupoid import Bisection
from .ultragraph import Ultragraph, UltragraphError
from .ultrapath import BoundaryPoint, Path


class FullGroupError(ValueError):
    pass


class PreconditionViolated(FullGroupError):
    pass


def _sole_point(cyl: Cylinder, bound: int = 64) -> Optional[BoundaryPoint]:
    """The unique point of a cylinder that pinches to a single periodic
    continuation, or None when the cylinder is not such a singleton."""
    g = cyl.graph
    if g.mies_inside(cyl.component):
        return None
    live = g.emitted_by(cyl.component).without(cyl.excluded)
    refs = live.refs(2)
    if len(refs) != 1:
        return None
    trail = [refs[0]]
    seen = {refs[0]: 0}
    for _ in range(bound):
        rng = g.edge_range(trail[-1])
        if g.mies_inside(rng):
            return None
        nxt = g.emitted_by(rng).refs(2)
        if len(nxt) != 1:
            return None
        e = nxt[0]
        if e in seen:
            i = seen[e]
            return BoundaryPoint.evper(g, cyl.prefix + Path(trail[:i], g),
                                       Path(trail[i:], g))
        seen[e] = len(trail)
        trail.append(e)
    return None


def _row_is_trivial(z: Bisection) -> bool:
    if z.out_prefix == z.in_prefix:
        return True
    if len(z.out_prefix) == len(z.in_prefix):
        return False
    x = _sole_point(z.source())
    return x is not None and z.apply(x) == x


def _merge_rows(a: Bisection, b: Bisection) -> Bisection:
    g = a.graph
    join = a.component | b.component
    kept = joint_excluded(g, a.component, a.excluded, b.component, b.excluded)
    return Bisection.make(g, a.out_prefix, a.in_prefix, join, kept)


class FullGroupElement:
    __slots__ = ("graph", "rows")

    def __init__(self, graph: Ultragraph, rows: tuple[Bisection, ...]):
        self.graph = graph
        self.rows = rows

    @staticmethod
    def make(graph: Ultragraph, rows: Iterable[Bisection]) -> "FullGroupElement":
        """Normalize and validate: trivial rows are dropped, rows sharing
        both prefixes are merged, sources and ranges must tile the same
        clopen set."""
        live = [z for z in rows if not z.is_empty() and not _row_is_trivial(z)]
        by_prefixes: dict[tuple, Bisection] = {}
        for z in live:
            key = (z.out_prefix, z.in_prefix)
            prev = by_prefixes.get(key)
            by_prefixes[key] = _merge_rows(prev, z) if prev else z
        merged = sorted(by_prefixes.values(),
                        key=lambda z: (len(z.in_prefix), z.in_prefix.edges,
                                       z.out_prefix.edges,
                                       z.component.sort_key()))
        el = FullGroupElement(graph, tuple(merged))
        el._validate()
        return el

    def _validate(self):
        srcs = [z.source() for z in self.rows]
        rngs = [z.range() for z in self.rows]
        for i in range(len(self.rows)):
            for j in range(i + 1, len(self.rows)):
                s = srcs[i].intersect(srcs[j])
                if s is not None and not s.is_empty():
                    raise FullGroupError(
                        f"source cylinders overlap: {srcs[i].pretty()} and "
                        f"{srcs[j].pretty()}")
                r = rngs[i].intersect(rngs[j])
                if r is not None and not r.is_empty():
                    raise FullGroupError(
                        f"range cylinders overlap: {rngs[i].pretty()} and "
                        f"{rngs[j].pretty()}")
        src_union = ClopenSet(self.graph, tuple(srcs))
        rng_union = ClopenSet.normalize(self.graph, rngs)
        if not src_union.equals(rng_union):
            raise FullGroupError("sources and ranges tile different sets")

    @staticmethod
    def identity(graph: Ultragraph) -> "FullGroupElement":
        return FullGroupElement(graph, ())

    def is_identity(self) -> bool:
        return not self.rows

    def __repr__(self):
        return f"FullGroupElement({self.pretty()!r})"

    def pretty(self) -> str:
        if not self.rows:
            return "id"
        return " | ".join(f"{z.in_prefix.pretty()} -> {z.out_prefix.pretty()}"
                          f" on {z.component.pretty()}"
                          + (f" minus {{{', '.join(sorted(self.graph.edge_name(e) for e in z.excluded))}}}"
                             if z.excluded else "")
                          for z in self.rows)

    # -- action -------------------------------------------------------------------

    def apply(self, p: BoundaryPoint) -> BoundaryPoint:
        for z in self.rows:
            if z.source().contains(p):
                return z.apply(p)
        return p

    def support(self) -> ClopenSet:
        return ClopenSet(self.graph, tuple(z.source() for z in self.rows))

    # -- group structure ------------------------------------------------------------

    def inverse(self) -> "FullGroupElement":
        return FullGroupElement.make(self.graph,
                                     [z.inverse() for z in self.rows])

    def compose(self, other: "FullGroupElement") -> "FullGroupElement":
        """self after other."""
        g = self.graph
        rows: list[Bisection] = []
        my_src = self.support()
        other_cover = other.support()
        for hr in other.rows:
            for gr in self.rows:
                rows.extend(gr.compose(hr))
            # points other moves outside everything self touches
            for piece in ClopenSet(g, (hr.range(),)).difference(my_src).parts:
                ident = Bisection(g, piece.prefix, piece.prefix,
                                  piece.component, piece.excluded)
                rows.extend(ident.compose(hr))
        for gr in self.rows:
            # points self moves that other leaves alone
            for piece in ClopenSet(g, (gr.source(),)).difference(other_cover).parts:
                ident = Bisection(g, piece.prefix, piece.prefix,
                                  piece.component, piece.excluded)
                rows.extend(gr.compose(ident))
        return FullGroupElement.make(g, rows)

    def __mul__(self, other: "FullGroupElement") -> "FullGroupElement":
        return self.compose(other)

    def equals(self, other: "FullGroupElement") -> bool:
        return self.compose(other.inverse()).is_identity()

    def is_involution(self) -> bool:
        return not self.is_identity() and self.compose(self).is_identity()

    def order(self, max_order: int = 64) -> Optional[int]:
        """Smallest k with g^k = id, or None past max_order."""
        acc = self
        for k in range(1, max_order + 1):
            if acc.is_identity():
                return k
            acc = acc.compose(self)
        return None


def identity(graph: Ultragraph) -> FullGroupElement:
    return FullGroupElement.identity(graph)


def commutator(g: FullGroupElement, h: FullGroupElement) -> FullGroupElement:
    return g.inverse().compose(h.inverse()).compose(g).compose(h)


def _as_rows(v) -> list[Bisection]:
    if isinstance(v, Bisection):
        return [v]
    return list(v)


def _check_tiles(rows: list[Bisection], which: str):
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            a = rows[i].source() if which == "source" else rows[i].range()
            b = rows[j].source() if which == "source" else rows[j].range()
            m = a.intersect(b)
            if m is not None and not m.is_empty():
                raise PreconditionViolated(
                    f"{which} cylinders overlap: {a.pretty()} and {b.pretty()}")


def pi_tilde(v, graph: Ultragraph = None) -> FullGroupElement:
    """Extend a bisection family with equal source and range unions by the
    identity off its support."""
    rows = _as_rows(v)
    if not rows:
        if graph is None:
            raise FullGroupError("pi_tilde of nothing needs an explicit graph")
        return FullGroupElement.identity(graph)
    g = rows[0].graph
    _check_tiles(rows, "source")
    _check_tiles(rows, "range")
    src = ClopenSet.normalize(g, [z.source() for z in rows])
    rng = ClopenSet.normalize(g, [z.range() for z in rows])
    if not src.equals(rng):
        missing = src.difference(rng)
        extra = rng.difference(src)
        part = (missing if not missing.is_empty() else extra).pretty()
        raise PreconditionViolated(
            f"source and range unions differ, e.g. on {part}")
    return FullGroupElement.make(g, rows)


def pi_hat(v, graph: Ultragraph = None) -> FullGroupElement:
    """The involution swapping the source and range of a bisection family
    whose source and range unions are disjoint."""
    rows = _as_rows(v)
    if not rows:
        if graph is None:
            raise FullGroupError("pi_hat of nothing needs an explicit graph")
        return FullGroupElement.identity(graph)
    g = rows[0].graph
    _check_tiles(rows, "source")
    _check_tiles(rows, "range")
    src = ClopenSet.normalize(g, [z.source() for z in rows])
    rng = ClopenSet.normalize(g, [z.range() for z in rows])
    overlap = src.intersect(rng)
    if not overlap.is_empty():
        raise PreconditionViolated(
            f"source and range unions meet on {overlap.pretty()}")
    return FullGroupElement.make(g, rows + [z.inverse() for z in rows])


def random_element(g: Ultragraph, budget: int = 3,
                   seed: int = 0) -> FullGroupElement:
    """A deterministic-for-seed product of small swap involutions."""
    rng = random.Random(f"fullgroup-{seed}")
    first = g.emitted_by(g.active).refs(max(4, budget + 2))
    acc = FullGroupElement.identity(g)
    for _ in range(1 + rng.randrange(max(1, budget))):
        z = _random_swap(g, rng, first, budget)
        if z is None:
            continue
        acc = acc.compose(pi_hat(z))
    return acc


def _random_swap(g, rng, first, budget, tries=10) -> Optional[Bisection]:
    for _ in range(tries):
        if len(first) < 2:
            return None
        e, f = rng.sample(first, 2)
        alpha, beta = Path([e], g), Path([f], g)
        for _ in range(rng.randrange(budget)):
            ext = g.emitted_by(alpha.range()).refs(3)
            if not ext:
                break
            alpha = alpha + Path([rng.choice(ext)], g)
        comp = alpha.range() & beta.range()
        if comp.is_empty():
            continue
        try:
            z = Bisection.make(g, alpha, beta, comp)
        except UltragraphError:
            continue
        if z.is_empty():
            continue
        return z
    return None
