"""Disjoint path families and the witness elements built from them.

Families of pairwise disjoint loops and paths are assembled first; the
witness builders then package them into pairs of bisection families V, W
whose hat involutions have commutators of a prescribed shape: an element
of order three supported inside a clopen set (f3), an involution moving a
chosen point while staying inside a clopen set (f1), and an involution
agreeing with a given one on part of its support (f2).

All searches run breadth first with the schema-then-index edge order, so
a given input always produces the same witness.  Every family and every
witness is re-validated through the cylinder and group algebra before it
is returned; the search code never vouches for its own output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .conditions import (HOLDS, check_K, check_W, check_infty,
                         enumerate_simple_loops)
from .cylinder import Cylinder, ClopenSet
from .epset import EPSet
from .fullgroup import (FullGroupElement, PreconditionViolated, commutator,
                        pi_hat)
from .groupoid import Bisection
from .ultragraph import EdgeRef, Ultragraph
from .ultrapath import (BoundaryPoint, Path, PathError, Ultrapath,
                        paths_disjoint)

SEARCH_CAP = 600        # nodes visited per breadth-first path search
POOL_CAP = 48           # candidates kept for the disjoint-subset picker
PER_SCHEMA = 8          # indices taken from each edge family per step


class ConstructionError(ValueError):
    """A requested family or witness cannot be assembled."""


class InsufficientLoops(ConstructionError):
    """Too few simple loops exist within the search bound."""

    def __init__(self, message: str, bound: int):
        super().__init__(message)
        self.bound = bound


class WitnessNotFound(ConstructionError):
    """The bounded search ran out of budget before finding a witness."""

    def __init__(self, message: str, bound: int):
        super().__init__(message)
        self.bound = bound


# -- disjoint families ------------------------------------------------------------


@dataclass(frozen=True)
class DisjointFamily:
    """A base ultrapath with pairwise disjoint member ultrapaths.

    The meet is the intersection of the base component with every member
    component; constructions that need a common landing set read it off
    here.  Validation happens at assembly time and can be repeated.
    """

    base: Ultrapath
    members: tuple
    meet: EPSet
    notes: tuple = ()

    @staticmethod
    def gather(base: Ultrapath, members, notes=()) -> "DisjointFamily":
        members = tuple(members)
        meet = base.component
        for m in members:
            meet = meet & m.component
        fam = DisjointFamily(base, members, meet, tuple(notes))
        fam.validate()
        return fam

    def validate(self) -> None:
        for i in range(len(self.members)):
            for j in range(i + 1, len(self.members)):
                if not self.members[i].disjoint(self.members[j]):
                    raise ConstructionError(
                        f"members {i} and {j} are not disjoint: "
                        f"{self.members[i]!r} vs {self.members[j]!r}")
        if self.members and self.meet.is_empty():
            raise ConstructionError("family ranges have an empty meet")

    def paths(self) -> list:
        return [m.prefix for m in self.members]


def _probe_loops(g, v, bound: int, want: int):
    """Shortest simple loops at v, widening the search until `want` are in
    hand or the bound is exhausted.  Full enumeration at a large bound
    explodes on loop-rich vertices, and no caller needs more than the
    first couple; stopping early keeps the sorted prefix exact because a
    wider search only ever appends longer loops."""
    probe = min(4, bound)
    while True:
        loops = enumerate_simple_loops(g, v, probe)
        if len(loops) >= want or probe >= bound:
            return loops
        probe = min(probe * 2, bound)


def disjoint_loops(rho: Path, k: int, bound: int = 16) -> DisjointFamily:
    """Build k pairwise disjoint loops based at the source of rho.

    Members take the shape tau2^n tau1 for n = 0..k-1, with tau2 a minimal
    length simple loop at s(rho) and tau1 the next simple loop in the
    enumeration.  Whether or not tau1 extends tau2, two distinct members
    diverge right after the shared tau2 power, so the family stays
    disjoint; gather() re-checks that claim anyway.
    """
    g = rho.graph
    if len(rho) == 0 or rho.source() not in rho.range():
        raise PreconditionViolated("need a loop to anchor the family")
    v = rho.source()
    base = Ultrapath(rho, rho.range(), g)
    if k <= 0:
        return DisjointFamily.gather(base, ())
    loops = _probe_loops(g, v, bound, 2)
    if len(loops) < 2:
        if len(loops) == 1 and k == 1:
            only = Path(loops[0], g)
            return DisjointFamily.gather(
                base, [Ultrapath(only, only.range(), g)])
        raise InsufficientLoops(
            f"{len(loops)} simple loop(s) at vertex {v} within length "
            f"{bound}; growing a family of {k} needs two", bound)
    tau2 = Path(loops[0], g)
    tau1 = Path(loops[1], g)
    members = []
    power = Path((), g)
    for _ in range(k):
        loop = power + tau1
        members.append(Ultrapath(loop, loop.range(), g))
        power = power + tau2
    return DisjointFamily.gather(
        base, members,
        notes=(f"tau2 {tau2.pretty()}", f"tau1 {tau1.pretty()}"))


def _edge_feed(alpha):
    """Uniform (graph, length, edge_at) view over paths and boundary
    points; a length of None means the supply never runs out."""
    if isinstance(alpha, Path):
        return alpha.graph, len(alpha), lambda i: alpha[i]
    if isinstance(alpha, BoundaryPoint):
        if alpha.is_finite:
            prefix = alpha.prefix
            return alpha.graph, len(prefix), lambda i: prefix[i]
        return alpha.graph, None, alpha.edge_at
    raise PreconditionViolated(
        f"expected a path or boundary point, got {type(alpha).__name__}")


def _paths_from(g: Ultragraph, start: EPSet, bound: int,
                excluded_first=(), cap: int = SEARCH_CAP):
    """Yield paths whose first edge leaves `start`, breadth first.

    Within a level, extensions follow the parent order and then the
    schema-then-index order of the connecting edge.
    """
    seen = 0
    level = [Path((), g)]
    while level and seen < cap:
        grown = []
        for p in level:
            src = start if len(p) == 0 else p.range()
            sel = g.emitted_by(src)
            if len(p) == 0 and excluded_first:
                sel = sel.without(excluded_first)
            for e in sel.iter_refs(per_schema=PER_SCHEMA):
                q = Path(p.edges + (e,), g)
                yield q
                seen += 1
                if len(q) < bound:
                    grown.append(q)
                if seen >= cap:
                    return
        level = grown


def disjoint_paths_W(alpha, N: int, bound: int = 16) -> DisjointFamily:
    """Grow N+1 pairwise disjoint ultrapaths alongside a wandering walk.

    The first member is always an initial segment of alpha, and every
    member runs from s(alpha_1) to a common landing vertex on the walk.
    Each step slides the landing index m forward until some branch path
    gamma leaves s(alpha_{n+1}) and reaches a range containing
    s(alpha_{m+1}); the old members are extended along alpha while gamma
    becomes a fresh member, and all components shrink to the single
    landing vertex.  A loop based anywhere on the examined stretch voids
    the construction, so those are rejected as they come into view.
    """
    g, total, edge = _edge_feed(alpha)
    if N < 0:
        raise PreconditionViolated("N must be at least 0")
    if total is not None and total < 1:
        raise PreconditionViolated("the walk must carry at least one edge")

    checked = set()

    def loopfree(i):
        u = g.edge_source(edge(i))
        if u in checked:
            return
        checked.add(u)
        if _probe_loops(g, u, bound, 1):
            raise PreconditionViolated(
                f"loop based at vertex {u} on the walk; the branch "
                f"construction needs a loop-free stretch")

    loopfree(0)
    first = Path((edge(0),), g)
    members = [Ultrapath(first, first.range(), g)]
    n = 1
    notes = []
    while len(members) < N + 1:
        step = _branch_step(g, edge, total, members, n, bound, loopfree)
        if step is None:
            raise WitnessNotFound(
                f"no branch witness found against positions "
                f"{n + 1}..{n + bound} of the walk (bound {bound})", bound)
        members, n, note = step
        notes.append(note)
    return DisjointFamily.gather(members[0], members, notes=tuple(notes))


def _branch_step(g, edge, total, members, n, bound, loopfree):
    """One induction step of the branch construction, or None.

    Returns (new members, new n, note); the first member is kept an
    initial segment of the walk and every component is normalized to the
    landing vertex singleton.
    """
    u = g.edge_source(edge(n))
    hi = n + bound if total is None else min(total - 1, n + bound)
    for m in range(n + 1, hi + 1):
        for i in range(n, m + 1):
            loopfree(i)
        seg_edges = tuple(edge(i) for i in range(n, m))
        seg = Path(seg_edges, g)
        w = g.edge_source(edge(m))
        comp = EPSet.finite([w])
        for gamma in _paths_from(g, EPSet.finite([u]), bound):
            if gamma.edges == seg_edges or w not in gamma.range():
                continue
            try:
                grown = [Ultrapath(mb.prefix + seg, comp, g)
                         for mb in members]
                grown.append(Ultrapath(members[0].prefix + gamma, comp, g))
                DisjointFamily.gather(grown[0], grown)
            except (ConstructionError, PathError):
                continue
            note = (f"m={m}: branch {gamma.pretty()} lands on vertex {w}; "
                    f"components normalized to {{{w}}}")
            return grown, m, note
    return None


def four_disjoint_paths(x: BoundaryPoint, n: int, bound: int = 16):
    """Find m > n and four paths from s(x_{n+1}) to position m of x.

    The first path is the straight segment x_{n+1}..x_m; all four reach a
    range containing s(x_{m+1}), and the ultrapaths (x_1..x_n a_i, {s(x_{m+1})})
    are pairwise disjoint.  Three shapes are tried in order: a loop
    segment of the walk spawns a family of disjoint loops threaded around
    it; otherwise a loop based on the walk is inserted at its basepoint;
    with no loops in reach the branch construction takes over.  Returns
    (m, (a1, a2, a3, a4)).
    """
    if not isinstance(x, BoundaryPoint) or x.is_finite:
        raise PreconditionViolated(
            "the four-path construction walks an eventually periodic point")
    if n < 0:
        raise PreconditionViolated("n must be at least 0")
    g = x.graph
    for rep in (check_K(g, bound), check_W(g, bound)):
        if rep.verdict != HOLDS:
            raise PreconditionViolated(
                f"condition ({rep.condition}) is {rep.verdict} at bound "
                f"{bound}; the four-path construction needs it to hold")

    # a loop segment of the walk itself
    for m in range(n + 1, n + bound + 1):
        for p in range(n + 1, m + 1):
            if (g.edge_source(x.edge_at(p - 1))
                    not in g.edge_range(x.edge_at(m - 1))):
                continue
            quad = _thread_loop_segment(g, x, n, p, m, bound)
            if quad is not None:
                got = _certify_quad(g, x, n, m, quad, "loop segment")
                if got is not None:
                    return got

    # a loop based on the walk, inserted at its basepoint
    for p in range(n, n + bound + 1):
        got = _insert_nearby_loop(g, x, n, p, bound)
        if got is not None:
            return got

    # no loops in reach: the branch construction
    try:
        fam = disjoint_paths_W(x.shift_by(n), 3, bound)
    except (ConstructionError, PreconditionViolated) as err:
        raise WitnessNotFound(
            f"no four-path witness within bound {bound}: {err}", bound)
    quad = tuple(fam.paths())
    m = n + len(quad[0])
    got = _certify_quad(g, x, n, m, quad, "branch construction")
    if got is None:
        raise WitnessNotFound(
            f"branch construction produced an entangled quadruple "
            f"(bound {bound})", bound)
    return got


def _segment(x, lo, hi):
    """The edges of x at zero-based positions lo..hi-1, as a path."""
    return Path(tuple(x.edge_at(i) for i in range(lo, hi)), x.graph)


def _thread_loop_segment(g, x, n, p, m, bound):
    """Thread disjoint loops around the loop segment x_p..x_m, or None.

    The loops come from the tau2^n tau1 family at s(x_p); members that
    extend the segment or are extended by it cannot be used, so the
    family is grown until three survivors remain or the supply ends.
    """
    rho = _segment(x, p - 1, m)
    good = []
    for k in (3, 6, 9):
        try:
            fam = disjoint_loops(rho, k, bound)
        except (InsufficientLoops, PreconditionViolated):
            return None
        good = [mb.prefix for mb in fam.members
                if paths_disjoint(mb.prefix, rho)]
        if len(good) >= 3:
            break
    if len(good) < 3:
        return None
    head = _segment(x, n, p - 1)
    straight = _segment(x, n, m)
    return (straight,
            head + good[0] + rho,
            head + good[1] + rho,
            head + good[2] + rho)


def _insert_nearby_loop(g, x, n, p, bound):
    """Insert three disjoint loops based at s(x_{p+1}) into the walk.

    The landing index moves past the longest loop so the threaded paths
    and the straight segment all end at the same position.
    """
    u = g.edge_source(x.edge_at(p))
    loops = _probe_loops(g, u, bound, 1)
    if not loops:
        return None
    anchor = Path(loops[0], g)
    for k in (3, 6, 9):
        try:
            fam = disjoint_loops(anchor, k, bound)
        except (InsufficientLoops, PreconditionViolated):
            return None
        head = _segment(x, n, p)
        pool = [mb.prefix for mb in fam.members]
        m = p + max(len(q) for q in pool) + 1
        straight = _segment(x, n, m)
        threaded = []
        for q in pool:
            cand = head + q + _segment(x, p, m)
            if not paths_disjoint(cand, straight):
                continue
            if any(not paths_disjoint(cand, t) for t in threaded):
                continue
            threaded.append(cand)
            if len(threaded) == 3:
                break
        if len(threaded) < 3:
            continue
        quad = (straight, threaded[0], threaded[1], threaded[2])
        got = _certify_quad(g, x, n, m, quad, f"loop at vertex {u}")
        if got is not None:
            return got
    return None


def _certify_quad(g, x, n, m, quad, how):
    """Re-validate a quadruple through the ultrapath algebra, or None.

    The four paths are prefixed with x_1..x_n and pinned to the landing
    vertex singleton; any disjointness failure rejects the candidate.
    """
    w = g.edge_source(x.edge_at(m))
    comp = EPSet.finite([w])
    head = x.prefix_path(n)
    try:
        prefixed = [Ultrapath(head + q, comp, g) for q in quad]
        DisjointFamily.gather(prefixed[0], prefixed, notes=(how,))
    except (ConstructionError, PathError):
        return None
    return m, tuple(quad)


# -- witness elements ---------------------------------------------------------------


@dataclass(frozen=True)
class WitnessRecord:
    """A witness element plus how it was built and how it was checked.

    v_rows and w_rows are the bisection families whose hat involutions
    produce the element as a commutator; checks holds (name, outcome)
    pairs from the independent verification pass.
    """

    kind: str
    element: FullGroupElement
    v_rows: tuple
    w_rows: tuple
    notes: tuple
    checks: tuple

    def word(self) -> str:
        v = ", ".join(z.pretty() for z in self.v_rows)
        w = ", ".join(z.pretty() for z in self.w_rows)
        return f"[pi_hat({{{v}}}), pi_hat({{{w}}})]"

    def verified(self) -> bool:
        return all(ok for _, ok in self.checks)


def _require_conditions(g: Ultragraph, bound: int) -> None:
    for rep in (check_K(g, bound), check_W(g, bound), check_infty(g, bound)):
        if rep.verdict != HOLDS:
            raise PreconditionViolated(
                f"condition ({rep.condition}) is {rep.verdict} at bound "
                f"{bound}; witnesses need it to hold")


def _select_disjoint(g: Ultragraph, start: EPSet, k: int, bound: int,
                     excluded_first=(), cover: Optional[EPSet] = None):
    """Pick the first k pairwise disjoint paths out of `start` whose
    ranges share a nonempty meet, in search order.

    With `cover` given only paths whose range swallows it whole qualify,
    which makes every pick a loop based at that generalized vertex.
    Returns (paths, meet) or None.
    """
    pool = []
    for q in _paths_from(g, start, bound, excluded_first):
        if cover is not None and not cover.is_subset(q.range()):
            continue
        pool.append(q)
        if len(pool) >= POOL_CAP:
            break
    chosen = []

    def grow(lo, meet):
        if len(chosen) == k:
            return meet
        for i in range(lo, len(pool)):
            cand = pool[i]
            if any(not paths_disjoint(cand, c) for c in chosen):
                continue
            met = cand.range() if meet is None else meet & cand.range()
            if met.is_empty():
                continue
            chosen.append(cand)
            got = grow(i + 1, met)
            if got is not None:
                return got
            chosen.pop()
        return None

    meet = grow(0, None)
    if meet is None:
        return None
    return list(chosen), meet


def _hat_commutator(v_rows, w_rows) -> FullGroupElement:
    return commutator(pi_hat(list(v_rows)), pi_hat(list(w_rows)))


def _checked(record_checks, name, outcome):
    record_checks.append((name, bool(outcome)))
    if not outcome:
        raise ConstructionError(f"witness failed its contract: {name}")


def f3_record(A: ClopenSet, bound: int = 8) -> WitnessRecord:
    """An order-three element supported inside A, with its build record."""
    g = A.graph
    if A.is_empty():
        raise PreconditionViolated("cannot support an element on nothing")
    _require_conditions(g, bound)
    last = None
    for part in A.parts:
        notes = []
        beta, comp = part.prefix, part.component
        if part.excluded:
            e = next(iter(g.emitted_by(comp).without(part.excluded)
                          .iter_refs(per_schema=1)), None)
            if e is None:
                continue
            beta = Path(beta.edges + (e,), g)
            comp = g.edge_range(e)
            notes.append(f"shrank to the exclusion-free cylinder "
                         f"({beta.pretty()}, {comp.pretty()})")
        got = _select_disjoint(g, comp, 3, bound)
        if got is None:
            last = WitnessNotFound(
                f"no three disjoint paths with a common landing set out "
                f"of {comp.pretty()} (bound {bound})", bound)
            continue
        (a1, a2, a3), C = got
        v_rows = [Bisection.make(g, beta + a1, beta + a2, C)]
        w_rows = [Bisection.make(g, beta + a2, beta + a3, C)]
        try:
            checks = []
            element = _hat_commutator(v_rows, w_rows)
            _checked(checks, "order == 3", element.order(8) == 3)
            _checked(checks, "support inside A",
                     element.support().is_subset(A))
        except (ConstructionError, PreconditionViolated) as err:
            last = err
            continue
        return WitnessRecord("F3", element, tuple(v_rows), tuple(w_rows),
                             tuple(notes), tuple(checks))
    raise last if last is not None else WitnessNotFound(
        f"no usable part of {A.pretty()} (bound {bound})", bound)


def f3_witness(A: ClopenSet, bound: int = 8) -> FullGroupElement:
    """An element of order exactly three whose support sits inside A."""
    return f3_record(A, bound).element


def f1_record(x: BoundaryPoint, A: ClopenSet, bound: int = 8) -> WitnessRecord:
    """An involution moving x and supported inside A, with its record."""
    g = A.graph
    if not A.contains(x):
        raise PreconditionViolated(
            f"{x.pretty()} is not a member of {A.pretty()}")
    _require_conditions(g, bound)
    if x.is_finite:
        v_rows, w_rows, notes = _f1_finite_rows(g, x, A, bound)
    else:
        v_rows, w_rows, notes = _f1_periodic_rows(g, x, A, bound)
    checks = []
    element = _hat_commutator(v_rows, w_rows)
    _checked(checks, "involution", element.is_involution())
    _checked(checks, "moves x", element.support().contains(x))
    _checked(checks, "support inside A", element.support().is_subset(A))
    return WitnessRecord("F1", element, tuple(v_rows), tuple(w_rows),
                         tuple(notes), tuple(checks))


def f1_witness(x: BoundaryPoint, A: ClopenSet, bound: int = 8) -> FullGroupElement:
    """An involution whose support contains x and sits inside A."""
    return f1_record(x, A, bound).element


def _f1_periodic_rows(g, x, A, bound):
    """V and W for an eventually periodic point: four disjoint paths all
    landing on a common set B, with x inside the straight-segment
    cylinder; the commutator swaps it into a threaded one."""
    m = None
    for cand in range(1, bound + 1):
        cyl = Cylinder.make(g, x.prefix_path(cand),
                            g.edge_range(x.edge_at(cand - 1)))
        if ClopenSet.of(g, cyl).is_subset(A):
            m = cand
            break
    if m is None:
        raise WitnessNotFound(
            f"no initial cylinder of {x.pretty()} inside {A.pretty()} "
            f"within bound {bound}", bound)
    m1, quad = four_disjoint_paths(x, m, bound)
    head = x.prefix_path(m)
    threaded = [head + quad[i] for i in (1, 2, 3)]
    straight = head + quad[0]
    B = straight.range()
    for q in threaded:
        B = B & q.range()
    v_rows = [Bisection.make(g, threaded[0], threaded[1], B),
              Bisection.make(g, threaded[2], straight, B)]
    w_rows = [Bisection.make(g, threaded[0], threaded[2], B)]
    notes = (f"initial segment pinned at m={m}, four paths reach m={m1}",
             f"common landing set {B.pretty()}")
    return v_rows, w_rows, notes


def _f1_finite_rows(g, x, A, bound):
    """V and W for a finite point (beta, B): three disjoint loops based at
    B whose first edges join the exclusion list, so the hat involutions
    shuffle x among the loop cylinders."""
    beta, B = x.prefix, x.component
    F = None
    for part in A.parts:
        if part.contains(x):
            F = part.excluded if len(part.prefix) == len(beta) else frozenset()
            break
    if F is None:
        raise PreconditionViolated("x is not a member of A")
    got = _select_disjoint(g, B, 3, bound, excluded_first=F, cover=B)
    if got is None:
        raise WitnessNotFound(
            f"no three disjoint loops based at {B.pretty()} avoiding "
            f"{len(F)} excluded first edge(s) (bound {bound})", bound)
    (a1, a2, a3), _ = got
    H = frozenset(F) | {a1[0], a2[0], a3[0]}
    v_rows = [Bisection.make(g, beta + a1, beta, B, H),
              Bisection.make(g, beta + a2, beta + a3, B, H)]
    w_rows = [Bisection.make(g, beta + a1, beta + a2, B, H)]
    notes = (f"loops based at {B.pretty()} with first edges excluded: "
             + ", ".join(sorted(g.edge_name(e) for e in H)),)
    return v_rows, w_rows, notes


def f2_record(tau: FullGroupElement, A: ClopenSet, bound: int = 8) -> WitnessRecord:
    """An involution agreeing with tau and supported in A u tau(A),
    with its build record."""
    g = tau.graph
    if not tau.is_involution() or tau.is_identity():
        raise PreconditionViolated("tau must be an involution, not the "
                                   "identity")
    if A.is_empty() or not A.is_subset(tau.support()):
        raise PreconditionViolated(
            "A must be a nonempty subset of the support of tau")
    _require_conditions(g, bound)
    last = None
    for row in tau.rows:
        inter = A.intersect(ClopenSet.of(g, row.source()))
        for part in inter.parts:
            try:
                record = _f2_from_part(g, tau, A, row, part, bound)
            except (ConstructionError, PreconditionViolated) as err:
                last = err
                continue
            if record is not None:
                return record
    raise WitnessNotFound(
        f"no source cylinder of tau admits the agreement construction "
        f"(bound {bound}){': ' + str(last) if last else ''}", bound)


def f2_witness(tau: FullGroupElement, A: ClopenSet, bound: int = 8) -> FullGroupElement:
    """An involution that matches tau on its own support, which meets A
    and stays inside A united with the tau image of A."""
    return f2_record(tau, A, bound).element


def _f2_from_part(g, tau, A, row, part, bound):
    """Run the agreement construction inside one part of A cut down to
    one source cylinder of tau, or None when the part has no room."""
    gamma, B, excl = part.prefix, part.component, part.excluded
    notes = []
    while len(gamma) <= len(row.in_prefix) or excl:
        e = next(iter(g.emitted_by(B).without(excl)
                      .iter_refs(per_schema=1)), None)
        if e is None:
            return None
        gamma = Path(gamma.edges + (e,), g)
        B = g.edge_range(e)
        excl = frozenset()
        notes.append(f"extended down to ({gamma.pretty()}, {B.pretty()})")
    got = _select_disjoint(g, B, 2, bound)
    if got is None:
        return None
    (l1, l2), C = got
    rho = gamma.slice(len(row.in_prefix), len(gamma))
    b1, b2 = gamma + l1, gamma + l2
    a1, a2 = row.out_prefix + rho + l1, row.out_prefix + rho + l2
    v_rows = [Bisection.make(g, b1, b2, C), Bisection.make(g, a1, a2, C)]
    w_rows = [Bisection.make(g, a1, b1, C)]
    checks = []
    element = _hat_commutator(v_rows, w_rows)
    _checked(checks, "involution", element.is_involution())
    reach = A.union(_image_clopen(tau, A))
    _checked(checks, "support inside A u tau(A)",
             element.support().is_subset(reach))
    mismatch = tau.inverse().compose(element).support()
    _checked(checks, "agrees with tau on its support",
             mismatch.intersect(element.support()).is_empty())
    return WitnessRecord("F2", element, tuple(v_rows), tuple(w_rows),
                         tuple(notes), tuple(checks))


def _image_cylinder(z: Bisection, c: Cylinder) -> Cylinder:
    """The pointwise image of a cylinder inside the source of z."""
    tail = c.prefix.slice(len(z.in_prefix), len(c.prefix))
    return Cylinder.make(z.graph, z.out_prefix + tail, c.component,
                         c.excluded)


def _image_clopen(tau: FullGroupElement, S: ClopenSet) -> ClopenSet:
    """The pointwise image of a clopen set under a full group element."""
    g = tau.graph
    parts = []
    for c in S.parts:
        for z in tau.rows:
            cut = z.source().intersect(c)
            if cut is not None:
                parts.append(_image_cylinder(z, cut))
        # points outside every row are fixed
        rest = ClopenSet.of(g, c).difference(tau.support())
        parts.extend(rest.parts)
    return ClopenSet.normalize(g, parts)
