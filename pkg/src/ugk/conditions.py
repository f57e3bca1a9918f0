"""Checkers for the loop and reachability conditions, with certificates.

Each checker returns a three-valued report: Holds, Fails, or Unknown.
A Fails verdict always carries a certificate that can be re-validated
independently (a concrete loop, vertex, or emitter).  An Unknown verdict
always records the search bound that was exhausted, so callers can retry
with a larger one.  Holds verdicts are produced only when the search was
exhaustive or a structural argument covers all remaining vertices; the
structural arguments operate on whole edge families at once, which is what
lets finite probing settle conditions over infinite vertex sets.

Vertex probes run below a "structural window": a threshold past which every
set appearing in the presentation (domains, cores, source and range images)
is purely periodic.  Behaviour beyond the window repeats behaviour inside
it up to index shifts, so family-level certificates established once extend
to the whole tail.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional

from .epset import EPSet
from .ultragraph import (
    Affine,
    EdgeRef,
    EdgeSchema,
    EdgeSelection,
    MinimalInfiniteEmitter,
    Ultragraph,
)
from .ultrapath import Path

HOLDS = "Holds"
FAILS = "Fails"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of one condition check."""

    condition: str
    verdict: str
    bound: Optional[int] = None
    certificate: object = None
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict == FAILS

    def pretty(self) -> str:
        head = f"({self.condition}) {self.verdict}"
        if self.verdict == UNKNOWN and self.bound is not None:
            head += f" at bound {self.bound}"
        if self.detail:
            head += f": {self.detail}"
        if self.certificate is not None:
            head += f" [{_cert_pretty(self.certificate)}]"
        return head

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "verdict": self.verdict,
            "bound": self.bound,
            "certificate": _cert_json(self.certificate),
            "detail": self.detail,
        }


def _cert_pretty(cert) -> str:
    if isinstance(cert, Path):
        return cert.pretty()
    if isinstance(cert, EdgeRef):
        return cert.schema if cert.index == 0 else f"{cert.schema}[{cert.index}]"
    if isinstance(cert, MinimalInfiniteEmitter):
        return f"{cert.name}={cert.vertices.pretty()}"
    if isinstance(cert, EPSet):
        return cert.pretty()
    if isinstance(cert, (tuple, list)):
        return ", ".join(_cert_pretty(c) for c in cert)
    return str(cert)


def _cert_json(cert):
    if cert is None:
        return None
    if isinstance(cert, Path):
        return {"path": cert.pretty()}
    if isinstance(cert, EdgeRef):
        return {"edge": _cert_pretty(cert)}
    if isinstance(cert, MinimalInfiniteEmitter):
        return {"emitter": cert.name, "vertices": cert.vertices.pretty()}
    if isinstance(cert, EPSet):
        return {"vertices": cert.pretty()}
    if isinstance(cert, (tuple, list)):
        return [_cert_json(c) for c in cert]
    if isinstance(cert, int):
        return {"vertex": cert}
    return str(cert)


# ---------------------------------------------------------------------------
# shared helpers


def _below(n: int) -> EPSet:
    return EPSet.finite(range(n))


def _structural_window(g: Ultragraph, floor: int = 8) -> int:
    """Threshold past which every presentation set is purely periodic."""
    sets = [g.active]
    for s in g.schemas:
        sets.extend((s.domain, s.range_const, s.source.image(s.domain)))
        for t in s.range_terms:
            sets.append(t.image(s.domain))
    hi = floor
    lcm = 1
    for ep in sets:
        hi = max(hi, ep.threshold)
        lcm = lcm * ep.period // gcd(lcm, ep.period)
    return hi + 2 * lcm


def _edge_slice(sel: EdgeSelection, per_schema: int) -> tuple[list[EdgeRef], bool]:
    """A front slice of a selection, plus whether the slice is the whole thing."""
    refs = list(sel.iter_refs(per_schema=per_schema))
    return refs, sel.count() == len(refs)


def _dedup(terms) -> list[Affine]:
    out: list[Affine] = []
    for t in terms:
        if t not in out:
            out.append(t)
    return out


def _meet_index(t1: Affine, t2: Affine) -> Optional[int]:
    """The unique n with t1(n) == t2(n), if one exists."""
    d = t1.coef - t2.coef
    e = t2.off - t1.off
    if d == 0 or e % d != 0:
        return None
    n = e // d
    return n if n >= 0 else None


def _descent_shift(src: Affine, term: Affine) -> Optional[int]:
    """k >= 1 with term(n) == src(n - k) for all n; the term tracks the
    source from k steps back."""
    if src.coef == 0 or term.coef != src.coef:
        return None
    diff = src.off - term.off
    if diff <= 0 or diff % src.coef != 0:
        return None
    return diff // src.coef


def _selection_sources(sel: EdgeSelection) -> EPSet:
    out = EPSet.empty()
    for name, idx in sel.parts.items():
        out = out | sel.graph.schema(name).source.image(idx)
    return out


def _sources_of_edges_meeting(g: Ultragraph, target: EPSet) -> EPSet:
    """Sources of all edges whose range intersects the target set."""
    out = EPSet.empty()
    for s in g.schemas:
        if not (s.core() & target).is_empty():
            idx = s.domain
        else:
            idx = EPSet.empty()
            for t in s.nonconst_terms:
                idx = idx | t.preimage_in(target, s.domain)
        if not idx.is_empty():
            out = out | s.source.image(idx)
    return out


def _ranges_of_emitted(g: Ultragraph, vertices: EPSet) -> EPSet:
    """Union of the ranges of all edges sourced inside the given set."""
    out = EPSet.empty()
    for s in g.schemas:
        idx = s.source.preimage_in(vertices, s.domain)
        if idx.is_empty():
            continue
        out = out | s.core()
        for t in s.nonconst_terms:
            out = out | t.image(idx)
    return out


def _reach_sets(g: Ultragraph, start: EPSet, rounds: int) -> tuple[EPSet, bool]:
    """Vertices reachable from the start set, with a stability flag.

    When the flag is true the returned set is the exact forward closure:
    one more round added nothing, so no further round ever will.
    """
    seen = start
    for _ in range(rounds):
        nxt = seen | _ranges_of_emitted(g, seen)
        if nxt == seen:
            return seen, True
        seen = nxt
    return seen, False


def _reach_below(g: Ultragraph, v: int, ceiling: int, depth: int) -> EPSet:
    """Vertices reachable from v along steps that stay below the ceiling."""
    cap = _below(ceiling)
    seen = EPSet.finite([v]) & cap
    for _ in range(depth):
        nxt = seen | (_ranges_of_emitted(g, seen) & cap)
        if nxt == seen:
            break
        seen = nxt
    return seen


def _return_layers(g: Ultragraph, v: int, depth: int) -> list[EPSet]:
    """layers[k] = vertices from which some path of length <= k has v in
    its final range.  Used to prune forward loop searches."""
    base = _selection_sources(g.edges_into(v))
    layers = [EPSet.empty(), base]
    for _ in range(max(depth - 1, 0)):
        layers.append(base | _sources_of_edges_meeting(g, layers[-1]))
    return layers


# ---------------------------------------------------------------------------
# simple loops and exits


def _simple_loops_flagged(
    g: Ultragraph,
    v: int,
    bound: int,
    per_schema: int = 6,
    stop_at: Optional[int] = None,
) -> tuple[list[tuple[EdgeRef, ...]], bool]:
    """Simple loops based at v with length <= bound.

    Returns the loops found and an exhaustive flag.  The flag is true only
    when the search provably saw every simple loop at v of any length: no
    edge slice was truncated, no branch was cut by the depth limit, and
    every pruned branch was provably unable to return to v at all.
    """
    loops: list[tuple[EdgeRef, ...]] = []
    if bound < 1:
        return loops, False
    if g.edges_into(v).is_empty():
        return loops, True
    exhaustive = True
    layers = _return_layers(g, v, bound)
    closure_stable = len(layers) >= 2 and layers[-1] == layers[-2]
    vset = EPSet.finite([v])
    frontier: list[tuple[tuple[EdgeRef, ...], int]] = [((), v)]
    while frontier:
        path, at = frontier.pop()
        refs, complete = _edge_slice(g.out_edges(at), per_schema)
        if not complete:
            exhaustive = False
        for e in refs:
            rng = g.edge_range(e)
            ext = path + (e,)
            if v in rng:
                loops.append(ext)
                if stop_at is not None and len(loops) >= stop_at:
                    return loops, False
            targets = rng - vset
            if targets.is_empty():
                continue
            remaining = bound - len(ext)
            if remaining <= 0:
                exhaustive = False
                continue
            viable = targets & layers[remaining]
            hopeless = (targets - layers[-1]) if closure_stable else EPSet.empty()
            if not ((targets - viable) - hopeless).is_empty():
                exhaustive = False
            if viable.is_infinite():
                exhaustive = False
                members = viable.up_to(viable.threshold + viable.period)
            else:
                members = list(viable)
            for u in members:
                frontier.append((ext, u))
    return loops, exhaustive


def enumerate_simple_loops(
    g: Ultragraph, v: int, bound: int, per_schema: int = 6
) -> list[Path]:
    """All simple loops based at v of length at most bound, shortest first.

    A loop is simple when v occurs as a source only at the start.  Edge
    bundles are sampled per_schema members deep, so on graphs with infinite
    parallel bundles the result is a representative sample rather than the
    full infinite set.
    """
    raw, _ = _simple_loops_flagged(g, v, bound, per_schema=per_schema)
    paths = [Path(edges, g) for edges in raw]
    paths.sort(key=lambda p: (len(p.edges), p.pretty()))
    return paths


def exits_of_loop(gamma: Path, limit: int = 12) -> list[EdgeRef]:
    """Edges leaving a loop: sourced in some r(gamma_i) but different from
    the loop's next edge at that position (cyclically)."""
    g = gamma.graph
    n = len(gamma.edges)
    out: list[EdgeRef] = []
    for i, e in enumerate(gamma.edges):
        nxt = gamma.edges[(i + 1) % n]
        for f in g.emitted_by(g.edge_range(e)).iter_refs(per_schema=limit):
            if f != nxt and f not in out:
                out.append(f)
            if len(out) >= limit:
                return out
    return out


# ---------------------------------------------------------------------------
# condition (L): every loop has an exit

# With no sinks, an exit-free loop forces a singleton range and out-degree
# one at every step, so it lives inside the deterministic subgraph: edges
# whose range is one vertex and whose source emits nothing else.  Any cycle
# there is conversely an exit-free loop.  The subgraph is a partial function
# on vertices, so the condition reduces to cycle detection.


def _singleton_range_indices(s: EdgeSchema) -> EPSet:
    """Indices n with exactly one vertex in r(s[n])."""
    core = s.core()
    if core.is_infinite():
        return EPSet.empty()
    terms = _dedup(s.nonconst_terms)
    csize = core.cardinality_if_finite() or 0
    if len(terms) + csize == 1:
        return s.domain
    # distinct range expressions, singleton only where they all collapse
    collapsed = EPSet.empty()
    suspects: set[int] = set()
    for i, t1 in enumerate(terms):
        for t2 in terms[i + 1 :]:
            m = _meet_index(t1, t2)
            if m is not None and m in s.domain:
                suspects.add(m)
        for m in t1.preimage_in(core, s.domain):
            suspects.add(m)
    for m in suspects:
        if s.range_size(m) == 1:
            collapsed = collapsed | EPSet.finite([m])
    return collapsed


def _out_degree_one_indices(g: Ultragraph, s: EdgeSchema) -> EPSet:
    """Indices n of s whose source vertex emits no edge besides s[n]."""
    if s.source.is_constant:
        v = s.source.off
        if s.domain.cardinality_if_finite() == 1 and g.out_degree(v) == 1:
            return s.domain
        return EPSet.empty()
    # a non-constant affine source is injective, so members of the same
    # family never share a source; only other schemas can collide
    idx = s.domain
    for t in g.schemas:
        if t.name == s.name:
            continue
        idx = idx - s.source.preimage_in(t.source.image(t.domain), s.domain)
    return idx


def _self_loop_indices(s: EdgeSchema) -> EPSet:
    """Indices n with source(n) inside r(s[n])."""
    out = s.source.preimage_in(s.core(), s.domain)
    for t in s.nonconst_terms:
        if t == s.source:
            out = out | s.domain
        else:
            m = _meet_index(t, s.source)
            if m is not None and m in s.domain:
                out = out | EPSet.finite([m])
    return out


def check_L(g: Ultragraph, bound: int = 16) -> ConditionReport:
    """Every loop admits an exit.

    Exact whenever the deterministic subgraph's unresolved tails all move
    the same direction; mixed ascending and descending tails fall back to
    Unknown after the finite part is searched.
    """
    window = _structural_window(g)
    arrows: dict[int, tuple[int, EdgeRef]] = {}
    tails: list[tuple[str, EPSet, EdgeSchema, Optional[Affine]]] = []

    for s in g.schemas:
        det = _singleton_range_indices(s) & _out_degree_one_indices(g, s)
        if det.is_empty():
            continue
        if det.is_finite():
            for n in det:
                arrows[s.source(n)] = (s.range_of(n).min_element(), EdgeRef(s.name, n))
            continue
        # infinite deterministic family: sole range expression throughout
        head = det & s.source.preimage_in(_below(window), s.domain)
        tail = det - head
        for n in head:
            arrows[s.source(n)] = (s.range_of(n).min_element(), EdgeRef(s.name, n))
        if tail.is_empty():
            continue
        terms = _dedup(s.nonconst_terms)
        if not terms:
            tails.append(("desc", tail, s, None))  # constant target below window
            continue
        t = terms[0]
        if t == s.source:
            n0 = tail.min_element()
            loop = Path((EdgeRef(s.name, n0),), g)
            return ConditionReport(
                "L", FAILS, bound, loop, "deterministic self-loop with no exit"
            )
        d = t.coef - s.source.coef
        e = s.source.off - t.off
        if d == 0:
            kind = "asc" if t.off > s.source.off else "desc"
            tails.append((kind, tail, s, t))
        else:
            crossing = max(e // d, 0) + 2  # past here the comparison is settled
            peel = tail & EPSet.finite(range(crossing))
            for n in peel:
                arrows[s.source(n)] = (t(n), EdgeRef(s.name, n))
            rest = tail - peel
            if not rest.is_empty():
                n1 = rest.min_element()
                kind = "asc" if t(n1) > s.source(n1) else "desc"
                tails.append((kind, rest, s, t))

    kinds = {k for k, _, _, _ in tails}
    if tails and len(kinds) == 1:
        max_src = max(arrows, default=0)
        max_tgt = max((t for t, _ in arrows.values()), default=0)
        # asc only: a cycle's top vertex sits on a non-ascending arrow, so it
        # is already concrete; desc only: a cycle's vertices never exceed the
        # highest concrete target.  Either way one finite extension settles it.
        cap = max_src + 1 if kinds == {"asc"} else max(max_tgt, window) + 1
        for _, idx, s, t in tails:
            for n in idx & s.source.preimage_in(_below(cap), s.domain):
                arrows[s.source(n)] = (s.range_of(n).min_element(), EdgeRef(s.name, n))

    cycle = _functional_cycle(arrows)
    if cycle is not None:
        return ConditionReport(
            "L", FAILS, bound, Path(cycle, g), "deterministic cycle with no exits"
        )
    if len(kinds) > 1:
        return ConditionReport(
            "L",
            UNKNOWN,
            bound,
            None,
            "deterministic tails move in both directions; no finite cycle found",
        )
    return ConditionReport("L", HOLDS, bound, None, "no exit-free loop exists")


def _functional_cycle(
    arrows: dict[int, tuple[int, EdgeRef]]
) -> Optional[tuple[EdgeRef, ...]]:
    """A cycle in a partial functional graph, as its edge sequence."""
    state: dict[int, int] = {}  # 0 = in progress, 1 = done
    for start in arrows:
        if start in state:
            continue
        chain: list[int] = []
        v = start
        while v in arrows and v not in state:
            state[v] = 0
            chain.append(v)
            v = arrows[v][0]
        if state.get(v) == 0:
            cyc = chain[chain.index(v) :]
            return tuple(arrows[u][1] for u in cyc)
        for u in chain:
            state[u] = 1
    return None


# ---------------------------------------------------------------------------
# condition (K): no vertex bases exactly one simple loop


def _all_ranges_climb(g: Ultragraph) -> bool:
    """True when every edge points strictly above its source, which rules
    out loops entirely."""
    for s in g.schemas:
        dom = s.domain
        if dom.is_empty():
            continue
        for t in s.nonconst_terms:
            d = t.coef - s.source.coef
            e = t.off - s.source.off
            if d < 0:
                if dom.is_infinite():
                    return False
                if any(t(n) <= s.source(n) for n in dom):
                    return False
            elif d == 0:
                if e <= 0:
                    return False
            else:
                for n in dom.up_to(max(-e // d, 0) + 2):
                    if t(n) <= s.source(n):
                        return False
        core = s.core()
        if not core.is_empty():
            cmin = core.min_element()
            src_img = s.source.image(dom)
            if src_img.is_infinite():
                return False
            if any(u >= cmin for u in src_img):
                return False
    return True


def _family_two_loops(
    g: Ultragraph, s: EdgeSchema, tail: EPSet, window: int, bound: int
) -> bool:
    """Certify two simple loops at every source vertex of the given index
    tail: a uniform self-loop, plus a strictly descending chain to a base
    below the window that rejoins v through a covering edge.  Every interior
    vertex of the second loop sits strictly below v, so both loops are
    simple and distinct."""
    if not tail.is_subset(_self_loop_indices(s)):
        return False
    hub_refs = [
        h
        for h in g.range_covering_edges(g.active - _below(window)).refs(8)
        if g.edge_source(h) < window
    ]
    if not hub_refs:
        return False
    for t in _dedup(s.nonconst_terms):
        if t == s.source:
            continue
        k = _descent_shift(s.source, t)
        if k is None:
            continue
        stray = s.domain - s.domain.affine_image(1, k)
        if stray.is_infinite():
            continue
        bases = {t(n) for n in stray}
        if not bases or any(b >= window for b in bases):
            continue
        if all(
            any(g.edge_source(h) in _reach_below(g, b, window, bound) for h in hub_refs)
            for b in bases
        ):
            return True
    return False


def check_K(g: Ultragraph, bound: int = 8) -> ConditionReport:
    """No vertex bases exactly one simple loop.

    Probes every active vertex below the structural window; vertices beyond
    it are covered by family certificates.  A Fails verdict carries the
    vertex and its unique loop, and is only issued when the loop search at
    that vertex was exhaustive.
    """
    if _all_ranges_climb(g):
        return ConditionReport(
            "K", HOLDS, bound, None, "every edge climbs; the graph has no loops"
        )
    window = _structural_window(g)
    pending: list[int] = []
    for v in g.active.up_to(window):
        if g.edges_into(v).is_empty():
            continue  # no loop can pass through a source vertex
        loops, exhaustive = _simple_loops_flagged(g, v, bound, stop_at=2)
        if len(loops) >= 2 or (not loops and exhaustive):
            continue
        if len(loops) == 1 and exhaustive:
            return ConditionReport(
                "K",
                FAILS,
                bound,
                (v, Path(loops[0], g)),
                "vertex with exactly one simple loop",
            )
        pending.append(v)
    if pending:
        return ConditionReport(
            "K",
            UNKNOWN,
            bound,
            None,
            f"loop search not exhaustive at vertices {pending[:6]}",
        )
    ranged = _ranges_of_emitted(g, g.active)
    for s in g.schemas:
        src_img = s.source.image(s.domain)
        if ((src_img & ranged) - _below(window)).is_empty():
            continue  # sources beyond the window receive nothing: no loops there
        tail_idx = s.source.preimage_in(src_img - _below(window), s.domain)
        if not _family_two_loops(g, s, tail_idx, window, bound):
            return ConditionReport(
                "K",
                UNKNOWN,
                bound,
                None,
                f"no family certificate for the tail of {s.name}",
            )
    return ConditionReport(
        "K", HOLDS, bound, None, "two simple loops at every looped vertex"
    )


# ---------------------------------------------------------------------------
# condition (W): every wandering path has an alternative


def _climbing_sources(g: Ultragraph) -> EPSet:
    """Sources of edges with some range vertex strictly above the source."""
    out = EPSet.empty()
    for s in g.schemas:
        for t in s.nonconst_terms:
            d = t.coef - s.source.coef
            e = t.off - s.source.off
            if d > 0:
                start = max(-e // d + 1, 0) if e < 0 else 0
                out = out | s.source.image(s.domain - EPSet.finite(range(start)))
                checks = range(start)
            elif d == 0:
                if e > 0:
                    out = out | s.source.image(s.domain)
                checks = range(0)
            else:
                checks = range(max(-e // d, 0) + 2)
            for n in checks:
                if n in s.domain and t(n) > s.source(n):
                    out = out | EPSet.finite([s.source(n)])
        core = s.core()
        if core.is_infinite():
            out = out | s.source.image(s.domain)
        elif not core.is_empty():
            top = max(core)
            out = out | s.source.image(s.source.preimage_in(_below(top), s.domain))
    return out


def _rigid_ray(g: Ultragraph) -> Optional[tuple[int, EdgeSchema]]:
    """A vertex whose entire forward future is one deterministic strictly
    ascending chain.  Such a vertex wanders and never has an alternative."""
    for s in g.schemas:
        terms = _dedup(s.nonconst_terms)
        if len(terms) != 1 or not s.core().is_empty():
            continue
        k = _descent_shift(terms[0], s.source)  # term(n) == source(n + k)
        if k is None:
            continue
        if not (s.domain.affine_image(1, k) - s.domain).is_empty():
            continue  # the chain must stay inside the family
        det = _singleton_range_indices(s) & _out_degree_one_indices(g, s)
        if det != s.domain:
            continue
        n0 = s.domain.min_element()
        if n0 is not None:
            return s.source(n0), s
    return None


def check_W(g: Ultragraph, bound: int = 16) -> ConditionReport:
    """Every wandering path admits an alternative branch somewhere.

    Holds structurally when only finitely many vertices emit a climbing
    edge: any infinite path then revisits some vertex, so nothing wanders.
    Fails on a rigid ray: a deterministic ascending chain with out-degree
    one everywhere wanders with no alternative at any step.
    """
    ray = _rigid_ray(g)
    if ray is not None:
        v, s = ray
        return ConditionReport(
            "W", FAILS, bound, v, f"rigid ascending ray along {s.name} starting at {v}"
        )
    climbers = _climbing_sources(g)
    if climbers.is_finite():
        note = f" ({climbers.pretty()})" if not climbers.is_empty() else ""
        return ConditionReport(
            "W",
            HOLDS,
            bound,
            None,
            f"only finitely many vertices climb{note}; "
            "every infinite path revisits a vertex, so none wander",
        )
    return ConditionReport(
        "W", UNKNOWN, bound, None, "wandering paths possible; no alternative certificate"
    )


# ---------------------------------------------------------------------------
# condition (T): two distinct paths from every vertex into a common target


def _two_paths_shared_target(
    g: Ultragraph, v: int, bound: int, per_schema: int = 3, cap: int = 160
) -> bool:
    """Breadth-first search for two distinct paths from v whose final
    ranges intersect.  Hitting the same range twice counts: the edge
    sequences differ even when the ranges agree."""
    seen: list[EPSet] = []
    refs, _ = _edge_slice(g.out_edges(v), per_schema)
    frontier = [g.edge_range(e) for e in refs]
    depth, total = 1, 0
    while frontier and depth <= bound:
        nxt: list[EPSet] = []
        for rng in frontier:
            if any(not (old & rng).is_empty() for old in seen):
                return True
            seen.append(rng)
            total += 1
            if total >= cap:
                return False
            if depth < bound:
                refs, _ = _edge_slice(g.emitted_by(rng), per_schema)
                nxt.extend(g.edge_range(e) for e in refs)
        frontier = nxt
        depth += 1
    return False


def check_T(g: Ultragraph, bound: int = 16) -> ConditionReport:
    """From every vertex, two distinct finite paths reach a common vertex.

    A vertex with a self-loop is settled at once (the loop and its square
    share a target), which covers whole families in one step; remaining
    vertices below the window are probed by breadth-first search.
    """
    ray = _rigid_ray(g)
    if ray is not None:
        v, s = ray
        return ConditionReport(
            "T", FAILS, bound, v, f"unique path of each length from {v} along {s.name}"
        )
    window = _structural_window(g)
    unresolved = [
        v for v in g.active.up_to(window) if not _two_paths_shared_target(g, v, bound)
    ]
    if unresolved:
        return ConditionReport(
            "T",
            UNKNOWN,
            bound,
            None,
            f"no converging path pair found from vertices {unresolved[:6]}",
        )
    for s in g.schemas:
        tail_idx = s.source.preimage_in(
            s.source.image(s.domain) - _below(window), s.domain
        )
        if tail_idx.is_empty():
            continue
        if not tail_idx.is_subset(_self_loop_indices(s)):
            return ConditionReport(
                "T",
                UNKNOWN,
                bound,
                None,
                f"no family certificate for the tail of {s.name}",
            )
    return ConditionReport(
        "T", HOLDS, bound, None, "converging path pairs found from every vertex"
    )


# ---------------------------------------------------------------------------
# condition (infinity): infinitely many returning edges at every minimal
# infinite emitter


def check_infty(g: Ultragraph, bound: int = 16) -> ConditionReport:
    """Every minimal infinite emitter has infinitely many emitted edges
    that return to it.

    An emitted edge returns when a path from its range ends in an edge
    whose range covers the whole emitter; call those covering edges hubs.
    Certifying one infinite emitted family whose members all reach a hub
    source settles the emitter.  Conversely, when the forward closure of
    everything the emitter reaches stabilizes away from all hub sources,
    no emitted edge returns at all.
    """
    mies = g.minimal_infinite_emitters()
    if not mies:
        return ConditionReport("INF", HOLDS, bound, None, "no minimal infinite emitters")
    for mie in mies:
        A = mie.vertices
        hubs = g.range_covering_edges(A)
        if hubs.is_empty():
            return ConditionReport(
                "INF",
                FAILS,
                bound,
                mie,
                "no edge range covers the emitter, so no edge returns",
            )
        hub_src = _selection_sources(hubs)
        covered = False
        for s in g.schemas:
            idx = s.source.preimage_in(A, s.domain)
            if not idx.is_infinite():
                continue
            for t in _dedup(s.nonconst_terms):
                if t.image(idx).is_subset(hub_src):
                    covered = True
                    break
                k = _descent_shift(s.source, t)
                if k is not None:
                    stray = s.domain - s.domain.affine_image(1, k)
                    if stray.is_finite() and not stray.is_empty():
                        bases = {t(n) for n in stray}
                        if all(
                            not (
                                _reach_sets(g, EPSet.finite([b]), bound)[0] & hub_src
                            ).is_empty()
                            for b in bases
                        ):
                            covered = True
                            break
            if covered:
                break
            core = s.core()
            if not core.is_empty() and core.is_finite():
                if all(
                    not (
                        _reach_sets(g, EPSet.finite([c]), bound)[0] & hub_src
                    ).is_empty()
                    for c in core
                ):
                    covered = True
                    break
        if covered:
            continue
        start = _ranges_of_emitted(g, A)
        closure, stable = _reach_sets(g, start, max(bound, 12))
        if stable and (closure & hub_src).is_empty():
            return ConditionReport(
                "INF",
                FAILS,
                bound,
                mie,
                "emitted edges never reach a covering edge, so no edge returns",
            )
        return ConditionReport(
            "INF",
            UNKNOWN,
            bound,
            mie,
            f"returns not certified for the edges emitted by {mie.name}",
        )
    return ConditionReport(
        "INF", HOLDS, bound, None, "all emitters see infinitely many returns"
    )


# ---------------------------------------------------------------------------
# degenerate vertices and emitters, and condition (ND)

# In-degree accounting works on channels: independent ways a family can hit
# a vertex.  Each non-constant range term hits its effective image once per
# vertex; a core hits each core vertex once per family member.  Indices
# where two expressions of one family collide are exceptional and finite;
# their hit vertices get classified pointwise.


@dataclass(frozen=True)
class _Chan:
    schema: str
    hits: EPSet
    unit: bool  # each hit vertex is hit by exactly one edge of this channel
    selfs: EPSet  # hit vertices whose hitting edge starts at that vertex
    goods: EPSet  # hit vertices whose hitting edge starts at a source vertex
    const_src: Optional[int]  # hitting edges' source, when it is one vertex
    term: Optional[Affine]
    src: Optional[Affine]
    idx: EPSet


def _channels(g: Ultragraph) -> tuple[list[_Chan], set[int]]:
    sources = g.sources_set()
    chans: list[_Chan] = []
    exceptional: set[int] = set()
    for s in g.schemas:
        core = s.core()
        terms = _dedup(s.nonconst_terms)
        for i, t in enumerate(terms):
            eff = s.domain - t.preimage_in(core, s.domain)
            for n in t.preimage_in(core, s.domain):
                exceptional.add(t(n))
            for t2 in terms[i + 1 :]:
                m = _meet_index(t, t2)
                if m is not None and m in s.domain:
                    exceptional.add(t(m))
                    eff = eff - EPSet.finite([m])
            if eff.is_empty():
                continue
            # the edge hitting t(n) starts at that very vertex only where
            # the term coincides with the source
            if t == s.source:
                self_idx = eff
            else:
                m = _meet_index(t, s.source)
                self_idx = (
                    EPSet.finite([m]) & eff if m is not None else EPSet.empty()
                )
            chans.append(
                _Chan(
                    schema=s.name,
                    hits=t.image(eff),
                    unit=True,
                    selfs=t.image(self_idx),
                    goods=t.image(s.source.preimage_in(sources, eff)),
                    const_src=s.source.off if s.source.is_constant else None,
                    term=t,
                    src=s.source,
                    idx=eff,
                )
            )
        if core.is_empty():
            continue
        m = s.domain.cardinality_if_finite()
        if m == 1:
            n0 = s.domain.min_element()
            src0 = s.source(n0)
            chans.append(
                _Chan(
                    schema=s.name,
                    hits=core,
                    unit=True,
                    selfs=core & EPSet.finite([src0]),
                    goods=core if src0 in sources else EPSet.empty(),
                    const_src=src0,
                    term=None,
                    src=s.source,
                    idx=s.domain,
                )
            )
        else:
            chans.append(
                _Chan(
                    schema=s.name,
                    hits=core,
                    unit=False,
                    selfs=EPSet.empty(),
                    goods=EPSet.empty(),
                    const_src=None,
                    term=None,
                    src=s.source,
                    idx=s.domain,
                )
            )
    return chans, exceptional


def _clip(ep: EPSet, limit: int = 64) -> list[int]:
    """Concrete members of a candidate set; a full slab of residues when it
    is infinite, which is enough because candidate validity is eventually
    periodic."""
    if ep.is_finite():
        return list(ep)
    return ep.up_to(ep.threshold + 2 * ep.period + limit)


def _sole_in(g: Ultragraph, v: int) -> Optional[EdgeRef]:
    sel = g.edges_into(v)
    if sel.count() != 1:
        return None
    return sel.refs(1)[0]


def _is_V1(g: Ultragraph, v: int) -> bool:
    e = _sole_in(g, v)
    return e is not None and g.edge_source(e) == v


def _is_V2(g: Ultragraph, v: int) -> bool:
    sel = g.edges_into(v)
    if sel.count() != 2:
        return False
    e, f = sel.refs(2)
    srcs = {g.edge_source(e), g.edge_source(f)}
    if v not in srcs or len(srcs) != 2:
        return False
    other = (srcs - {v}).pop()
    return other in g.sources_set()


def _is_V3(g: Ultragraph, v: int, w: int) -> bool:
    if v == w:
        return False
    ev, ew = _sole_in(g, v), _sole_in(g, w)
    return (
        ev is not None
        and ew is not None
        and g.edge_source(ev) == w
        and g.edge_source(ew) == v
    )


def _swap_candidates(ci: _Chan, cj: _Chan) -> EPSet:
    """Indices l of channel i for which some index n of channel j solves
    term_i(l) == src_j(n) and src_i(l) == term_j(n): the two-cycle system
    behind mutually-sole incoming edges."""
    if ci.term is None or cj.term is None or ci.src is None or cj.src is None:
        return EPSet.empty()
    if ci.src.is_constant or cj.src.is_constant:
        return EPSet.empty()  # handled separately via the constant source
    a, b = ci.term.coef, ci.term.off
    c, d = cj.src.coef, cj.src.off
    p, q = ci.src.coef, ci.src.off
    r, t = cj.term.coef, cj.term.off
    D = a * r - c * p
    E1, E2 = d - b, t - q
    if D != 0:
        num_l, num_n = r * E1 - c * E2, p * E1 - a * E2
        if num_l % D or num_n % D:
            return EPSet.empty()
        l, n = num_l // D, num_n // D
        if l >= 0 and n >= 0 and l in ci.idx and n in cj.idx:
            return EPSet.finite([l])
        return EPSet.empty()
    # parallel system: consistent only when the two equations agree
    if r * E1 != c * E2:
        return EPSet.empty()

    dom_j = cj.idx

    def good(l: int) -> bool:
        if l not in ci.idx:
            return False
        num = a * l + b - d
        return num % c == 0 and num // c >= 0 and (num // c) in dom_j

    step = c // gcd(a, c)
    span = step * dom_j.period * ci.idx.period
    thr = max(ci.idx.threshold, dom_j.threshold * c + abs(d - b) + c + a + 4)
    return EPSet.from_predicate(thr, span, good)


def _degenerate_vertices(g: Ultragraph) -> dict[str, list]:
    chans, exceptional = _channels(g)
    units = [c for c in chans if c.unit]
    exc = EPSet.finite(exceptional) if exceptional else EPSet.empty()

    def alone(i: int) -> EPSet:
        out = units[i].hits - exc
        for j, other in enumerate(chans):
            if other is not units[i]:
                out = out - other.hits
        return out

    found: dict[str, list] = {"V1": [], "V2": [], "V3": []}
    v1_seen: set[int] = set()
    v2_seen: set[int] = set()
    v3_seen: set[tuple[int, int]] = set()

    for i, ch in enumerate(units):
        for v in _clip(alone(i) & ch.selfs):
            if v not in v1_seen and _is_V1(g, v):
                v1_seen.add(v)
                found["V1"].append(v)

    for i, ci in enumerate(units):
        for j in range(i + 1, len(units)):
            cj = units[j]
            both = (ci.hits & cj.hits) - exc
            for other in chans:
                if other is not ci and other is not cj:
                    both = both - other.hits
            if both.is_empty():
                continue
            cands = both & ((ci.selfs & cj.goods) | (cj.selfs & ci.goods))
            for v in _clip(cands):
                if v not in v2_seen and _is_V2(g, v):
                    v2_seen.add(v)
                    found["V2"].append(v)

    def note_v3(v: int, w: int):
        key = (min(v, w), max(v, w))
        if key not in v3_seen and _is_V3(g, v, w):
            v3_seen.add(key)
            found["V3"].append(key)

    for ci in units:
        if ci.const_src is not None:
            v = ci.const_src
            e = _sole_in(g, v)
            if e is not None:
                note_v3(v, g.edge_source(e))
    for ci in units:
        for cj in units:
            for l in _clip(_swap_candidates(ci, cj) & ci.idx):
                note_v3(ci.term(l), ci.src(l))

    for v in sorted(exceptional):
        if v in g.active:
            if v not in v1_seen and _is_V1(g, v):
                v1_seen.add(v)
                found["V1"].append(v)
            if v not in v2_seen and _is_V2(g, v):
                v2_seen.add(v)
                found["V2"].append(v)
            e = _sole_in(g, v)
            if e is not None:
                note_v3(v, g.edge_source(e))
    return found


def _degenerate_emitters(g: Ultragraph) -> list[tuple[str, MinimalInfiniteEmitter]]:
    out = []
    sources = g.sources_set()
    for mie in g.minimal_infinite_emitters():
        A = mie.vertices
        if A.is_subset(sources):
            out.append(("IE1", mie))
            continue
        ranged = A - sources
        if ranged.cardinality_if_finite() == 1:
            e = _sole_in(g, ranged.min_element())
            if e is not None and g.edge_source(e) in sources:
                out.append(("IE2", mie))
    return out


def degenerate_catalog(g: Ultragraph) -> list[tuple[str, object]]:
    """All degenerate objects: emitters that are all-source or one step
    away from it, and vertices whose incoming edges form a trivial loop
    pattern.

    Payloads are the emitter, the vertex, or the vertex pair.  When a
    flavour occurs along an infinite family the catalog lists the
    representatives inside one full period slab.
    """
    out: list[tuple[str, object]] = list(_degenerate_emitters(g))
    vs = _degenerate_vertices(g)
    out.extend(("V1", v) for v in sorted(vs["V1"]))
    out.extend(("V2", v) for v in sorted(vs["V2"]))
    out.extend(("V3", pair) for pair in sorted(vs["V3"]))
    return out


def check_ND(g: Ultragraph) -> ConditionReport:
    """No degenerate objects exist.  Exact: no search bound is involved."""
    cat = degenerate_catalog(g)
    if cat:
        tag, payload = cat[0]
        return ConditionReport(
            "ND", FAILS, None, payload, f"degenerate object of type {tag}"
        )
    return ConditionReport("ND", HOLDS, None, None, "no degenerate objects")
