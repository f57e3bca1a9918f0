"""Brute-force cross-checks over a finite truncation of the vertex universe.

The exact layers reason about infinite vertex sets symbolically.  This module
re-derives small instances of the same questions by plain enumeration below a
vertex cutoff and compares the answers.  It is deliberately slow and naive:
everything here is a second opinion, so wherever possible it avoids the
clever representations it is meant to check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .cylinder import ClopenSet, Cylinder, CylinderError
from .epset import EPSet
from .ultragraph import EdgeRef, Ultragraph, UltragraphError
from .ultrapath import BoundaryPoint, Path

CLOSURE_CAP = 100_000


class OracleError(Exception):
    pass


class BudgetExceeded(OracleError):
    """An enumeration outgrew its cap before finishing."""


@dataclass(frozen=True)
class Divergence:
    trial: int
    operation: str
    left: str
    right: str
    point: str
    exact: bool
    oracle: bool

    def pretty(self) -> str:
        return (f"trial {self.trial}, {self.operation}: "
                f"exact={self.exact} oracle={self.oracle}\n"
                f"  left  {self.left}\n"
                f"  right {self.right}\n"
                f"  point {self.point}")


@dataclass
class DiffReport:
    """Outcome of a differential run; at most the first divergence is kept."""

    trials: int
    points: int
    comparisons: int
    divergence: Optional[Divergence] = None

    @property
    def ok(self) -> bool:
        return self.divergence is None

    def pretty(self) -> str:
        head = (f"{self.trials} trials over {self.points} points, "
                f"{self.comparisons} comparisons")
        if self.ok:
            return head + ", no divergence"
        return head + "\nfirst divergence: " + self.divergence.pretty()


class TruncatedUniverse:
    """The ultragraph cut down to the vertices below a cutoff.

    Materializes every active vertex below the cutoff and every edge sourced
    at one of them (a family sitting at a constant source is cut off at an
    index bound so the table stays finite).  Each materialized edge keeps
    the part of its range below the cutoff.  Queries are answered by walking
    these finite tables; answers about vertices under the cutoff agree with
    the exact layers, and raising the cutoff never contradicts a smaller
    run, it only sees more.
    """

    def __init__(self, graph: Ultragraph, cutoff: int = 40,
                 complexity_cap: int = 6):
        if not 1 <= cutoff <= 64:
            raise ValueError("cutoff must be between 1 and 64")
        self.graph = graph
        self.cutoff = cutoff
        self.complexity_cap = complexity_cap
        self.vertices = tuple(v for v in range(cutoff) if v in graph.active)
        self.edges = tuple(self._materialize())
        self.ranges = {e: frozenset(graph.edge_range(e).up_to(cutoff))
                       for e in self.edges}

    def _materialize(self):
        bound = 4 * self.cutoff + 8
        for s in self.graph.schemas:
            for n in s.domain.up_to(bound):
                if s.source(n) < self.cutoff:
                    yield EdgeRef(s.name, n)

    def below(self, vertices: EPSet) -> frozenset[int]:
        return frozenset(vertices.up_to(self.cutoff))

    # -- emitter patterns ---------------------------------------------------

    def out_count(self, pattern) -> int:
        """Materialized edges sourced inside the pattern."""
        want = set(pattern)
        return sum(1 for e in self.edges
                   if self.graph.edge_source(e) in want)

    def looks_infinite(self, pattern) -> bool:
        """Count-based guess at emitting infinitely many edges.

        A heuristic only: a finite table cannot witness infinitude, and a
        sparse family can emit infinitely while placing few edges below any
        given cutoff.  Kept for reporting, never used for verdicts.
        """
        return self.out_count(pattern) > self.cutoff // 2

    def closure(self, cap: int = CLOSURE_CAP) -> set[frozenset[int]]:
        """All vertex sets reachable from singletons and truncated edge
        ranges by finite unions and nonempty intersections.

        Exponential by nature (with only singleton ranges it is the full
        power set), hence the cap.
        """
        done: set[frozenset[int]] = set()
        frontier = [frozenset([v]) for v in self.vertices]
        frontier.extend(r for r in self.ranges.values() if r)
        while frontier:
            fresh = []
            for a in frontier:
                if a in done:
                    continue
                done.add(a)
                if len(done) > cap:
                    raise BudgetExceeded(f"lattice closure exceeds {cap}")
                for b in list(done):
                    for c in (a | b, a & b):
                        if c and c not in done:
                            fresh.append(c)
            frontier = fresh
        return done

    def _meet_closure(self, cap: int) -> dict[EPSet, frozenset[int]]:
        """Pairs (exact set, truncated set) closed under intersection.

        The truncated side is recomputed by plain set arithmetic at every
        step, so any disagreement between the tracks is a genuine bug in
        the exact set arithmetic; fail loudly rather than trust either.
        """
        pairs: dict[EPSet, frozenset[int]] = {}

        def add(exact: EPSet, trunc: frozenset[int]) -> bool:
            if exact in pairs:
                return False
            if self.below(exact) != trunc:
                raise OracleError(
                    f"truncation mismatch for {exact.pretty()}: "
                    f"expected {sorted(trunc)}")
            pairs[exact] = trunc
            if len(pairs) > cap:
                raise BudgetExceeded(f"meet closure exceeds {cap}")
            return True

        for v in self.vertices:
            add(EPSet.finite({v}), frozenset([v]))
        for e in self.edges:
            if self.ranges[e]:
                add(self.graph.edge_range(e), self.ranges[e])
        frontier = list(pairs.items())
        while frontier:
            fresh = []
            snapshot = list(pairs.items())
            for ea, ta in frontier:
                for eb, tb in snapshot:
                    ec = ea & eb
                    if not ec.is_empty() and add(ec, ta & tb):
                        fresh.append((ec, ta & tb))
            frontier = fresh
        return pairs

    def lattice_mies(self, cap: int = CLOSURE_CAP) -> list[frozenset[int]]:
        """Truncations of the minimal infinite emitters, by brute force.

        Closes the materialized atoms (singletons and edge ranges) under
        intersection, keeps the elements that emit infinitely many edges,
        and drops any with a strictly smaller kept element.  Unions never
        produce new minimal emitters, since a union emits infinitely only
        when one side already does.  Infinitude itself is decided by the
        exact layer; see `looks_infinite` for why a count below the cutoff
        cannot.
        """
        pairs = self._meet_closure(cap)
        tagged = [(exact, trunc) for exact, trunc in pairs.items()
                  if self.graph.is_infinite_emitter(exact)]
        out = set()
        for exact, trunc in tagged:
            if any(other.is_subset(exact) and other != exact
                   for other, _ in tagged):
                continue
            out.add(trunc)
        return sorted(out, key=lambda t: (len(t), sorted(t)))

    # -- points ---------------------------------------------------------------

    def _paths(self, budget: int) -> list[Path]:
        """Materialized paths with length plus largest schema index within
        the budget.  The index part keeps families from exploding the walk
        while still exercising several members of each."""
        out: list[Path] = []

        def grow(edges: tuple, max_idx: int):
            out.append(Path(edges, self.graph))
            here = self.ranges[edges[-1]] if edges else None
            for e in self.edges:
                if edges and self.graph.edge_source(e) not in here:
                    continue
                m = max(max_idx, e.index)
                if len(edges) + 1 + m > budget:
                    continue
                grow(edges + (e,), m)

        grow((), 0)
        return out

    def point_enum(self, complexity: Optional[int] = None) -> list[BoundaryPoint]:
        """Presentable points assembled from materialized paths.

        Complexity of a path is its length plus the largest schema index on
        it; a finite point costs its prefix, an eventually periodic point
        its head plus cycle.
        """
        c = self.complexity_cap if complexity is None else complexity
        if c > self.complexity_cap:
            raise BudgetExceeded(
                f"complexity {c} above the cap {self.complexity_cap}")
        g = self.graph
        paths = self._paths(c)
        points: set[BoundaryPoint] = set()
        for p in paths:
            tail = p.range() if len(p) else g.active
            for m in g.mies_inside(tail):
                points.add(BoundaryPoint.fin(g, p, m.vertices))
        for cyc in paths:
            if len(cyc) == 0 or g.edge_source(cyc[0]) not in self.below(cyc.range()):
                continue
            cyc_idx = max(e.index for e in cyc)
            for head in paths:
                idx = max([cyc_idx] + [e.index for e in head])
                if len(head) + len(cyc) + idx > c:
                    continue
                if len(head) and g.edge_source(cyc[0]) not in self.below(head.range()):
                    continue
                points.add(BoundaryPoint.evper(g, head, cyc))
        return sorted(points, key=lambda p: p.pretty())

    # -- membership -----------------------------------------------------------

    def member(self, expr, point: BoundaryPoint) -> bool:
        """Decide membership by structural recursion over a set expression.

        An expression is a Cylinder, a ClopenSet, or a tuple
        ("and" | "or" | "diff", left, right).  Cylinder membership is
        re-derived edge by edge with truncated subset checks, independent
        of the algebraic implementation.
        """
        if isinstance(expr, Cylinder):
            return self._in_cylinder(expr, point)
        if isinstance(expr, ClopenSet):
            return any(self._in_cylinder(c, point) for c in expr)
        op, left, right = expr
        if op == "and":
            return self.member(left, point) and self.member(right, point)
        if op == "or":
            return self.member(left, point) or self.member(right, point)
        if op == "diff":
            return self.member(left, point) and not self.member(right, point)
        raise OracleError(f"unknown set operation {op!r}")

    def _in_cylinder(self, cyl: Cylinder, p: BoundaryPoint) -> bool:
        k = len(cyl.prefix)
        n = p.length()
        if n is not None and n < k:
            return False
        for i in range(k):
            if p.edge_at(i) != cyl.prefix[i]:
                return False
        if n == k:
            return self.below(p.component) <= self.below(cyl.component)
        e = p.edge_at(k)
        if e in cyl.excluded:
            return False
        return self.graph.edge_source(e) in self.below(cyl.component)

    # -- the differential gate --------------------------------------------------

    def diff_test(self, seed: int = 0, trials: int = 100) -> DiffReport:
        """Drive the cylinder algebra against pointwise membership.

        Each trial draws a random cylinder pair, applies intersection,
        same-prefix union, difference and normalization, and compares each
        result's membership verdict with the boolean combination of the
        operands' verdicts on every enumerated point.  Deterministic for a
        given seed; stops at the first divergence.
        """
        rng = random.Random(f"oracle-{seed}")
        points = self.point_enum()
        paths = self._paths(self.complexity_cap)
        feats = self._features(points)
        report = DiffReport(trials=trials, points=len(points), comparisons=0)
        for trial in range(trials):
            a = self._random_cylinder(rng, paths)
            b = self._related_cylinder(rng, paths, a)
            sib = self._random_cylinder(rng, paths, prefix=a.prefix)
            meet = a.intersect(b)
            join = a.union_same_prefix(sib)
            cut = a.difference(b)
            norm = ClopenSet.of(self.graph, a, b)
            # whole verdict vectors at once; the lists compare at C speed
            am = self._vector(a, feats)
            bm = self._vector(b, feats)
            sm = self._vector(sib, feats)
            checks = [
                ("intersect", b,
                 [meet is not None and meet.contains(p) for p in points],
                 [x and y for x, y in zip(am, bm)]),
                ("union_same_prefix", sib,
                 [join.contains(p) for p in points],
                 [x or y for x, y in zip(am, sm)]),
                ("difference", b,
                 [cut.contains(p) for p in points],
                 [x and not y for x, y in zip(am, bm)]),
                ("normalize", b,
                 [norm.contains(p) for p in points],
                 [x or y for x, y in zip(am, bm)]),
            ]
            for name, other, got, want in checks:
                report.comparisons += len(points)
                if got != want:
                    i = next(i for i, (x, y) in enumerate(zip(got, want))
                             if x != y)
                    report.divergence = Divergence(
                        trial, name, a.pretty(), other.pretty(),
                        points[i].pretty(), got[i], want[i])
                    return report
        return report

    def _features(self, points):
        """Per-point data for `_vector`: length, flat head, head sources,
        truncated component.  Heads are one edge longer than any prefix a
        materialized cylinder can carry, enough to test the continuation."""
        cap = self.complexity_cap + 1
        feats = []
        for p in points:
            n = p.length()
            head = p.head(n if n is not None else cap)
            srcs = tuple(self.graph.edge_source(e) for e in head)
            bpc = self.below(p.component) if n is not None else None
            feats.append((n, head, srcs, bpc))
        return feats

    def _vector(self, cyl: Cylinder, feats) -> list[bool]:
        """`_in_cylinder` over all featured points, batched."""
        k = len(cyl.prefix)
        pe = cyl.prefix.edges
        bc = self.below(cyl.component)
        ex = cyl.excluded
        out = []
        for n, head, srcs, bpc in feats:
            if (n is not None and n < k) or head[:k] != pe:
                out.append(False)
            elif n == k:
                out.append(bpc <= bc)
            else:
                out.append(head[k] not in ex and srcs[k] in bc)
        return out

    def _related_cylinder(self, rng: random.Random, paths: list[Path],
                          other: Cylinder) -> Cylinder:
        """A second operand biased toward interacting with the first.

        Unrelated prefixes make every binary operation trivially disjoint,
        so most draws share the other cylinder's prefix or extend it.
        """
        roll = rng.random()
        if roll < 0.4:
            return self._random_cylinder(rng, paths, prefix=other.prefix)
        if roll < 0.75:
            around = [q for q in paths if q.extends(other.prefix)]
            return self._random_cylinder(rng, paths,
                                         prefix=rng.choice(around))
        return self._random_cylinder(rng, paths)

    def _random_cylinder(self, rng: random.Random, paths: list[Path],
                         prefix: Optional[Path] = None) -> Cylinder:
        g = self.graph
        for _ in range(64):
            beta = prefix if prefix is not None else rng.choice(paths)
            base = beta.range() if len(beta) else g.active
            mies = g.mies_inside(base)
            finite = base.up_to(self.cutoff)
            choices = [base]
            choices.extend(m.vertices for m in mies)
            if finite:
                take = rng.sample(finite, min(len(finite), rng.randint(1, 3)))
                choices.append(EPSet.finite(take))
                if mies:
                    choices.append(mies[0].vertices | EPSet.finite(take[:1]))
            comp = rng.choice(choices)
            refs = g.emitted_by(comp).refs(6)
            excl = rng.sample(refs, min(len(refs), rng.randint(0, 2)))
            try:
                c = Cylinder.make(g, beta, comp, excl)
            except (UltragraphError, CylinderError):
                continue
            if not c.is_empty():
                return c
        raise OracleError("could not draw a nonempty cylinder")
