"""Ultragraph presentations with eventually periodic vertex sets.

A presentation is a finite list of edge schemas.  Each schema contributes
one edge per index in its (possibly infinite) EP index domain; the source is
an affine function of the index and the range is a finite list of affine
terms plus a constant EP set.  All derived vertex-set data (emitter sets,
minimal infinite emitters, range decompositions) is computed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .epset import EPSet, intersect_all, union_all


class UltragraphError(ValueError):
    pass


class NotGeneralizedVertex(UltragraphError):
    """The given EP set is not a member of the generalized vertex family."""


@dataclass(frozen=True, order=True)
class Affine:
    """The map n -> coef*n + off over the naturals."""

    coef: int
    off: int

    def __post_init__(self):
        if self.coef < 0 or self.off < 0:
            raise UltragraphError("affine terms need natural coefficients")

    def __call__(self, n: int) -> int:
        return self.coef * n + self.off

    @property
    def is_constant(self) -> bool:
        return self.coef == 0

    def image(self, domain: EPSet) -> EPSet:
        return domain.affine_image(self.coef, self.off)

    def preimage_in(self, values: EPSet, domain: EPSet) -> EPSet:
        """Indices n in domain with coef*n + off in values."""
        return values.affine_preimage(self.coef, self.off) & domain

    def solve(self, value: int) -> int | None:
        """The unique n with coef*n + off == value, if any (coef >= 1)."""
        if self.coef == 0:
            return None
        q, r = divmod(value - self.off, self.coef)
        return q if r == 0 and q >= 0 else None

    def pretty(self, var: str = "n") -> str:
        if self.coef == 0:
            return str(self.off)
        if self.coef == 1 and self.off == 0:
            return var
        head = f"{self.coef}*{var}"
        return head if self.off == 0 else f"{head}+{self.off}"


class EdgeRef(NamedTuple):
    """One concrete edge: a schema name plus an index into its domain."""

    schema: str
    index: int


@dataclass(frozen=True)
class EdgeSchema:
    name: str
    domain: EPSet
    source: Affine
    range_terms: tuple[Affine, ...]
    range_const: EPSet
    single: bool = False  # declared as a lone edge rather than a family

    def __post_init__(self):
        if self.domain.is_empty():
            raise UltragraphError(f"schema {self.name!r} has an empty domain")
        # duplicate affine terms denote the same range element; drop them
        object.__setattr__(self, "range_terms",
                           tuple(dict.fromkeys(self.range_terms)))
        if not self.range_terms and self.range_const.is_empty():
            raise UltragraphError(f"schema {self.name!r} has an empty range")

    @property
    def nonconst_terms(self) -> tuple[Affine, ...]:
        return tuple(t for t in self.range_terms if not t.is_constant)

    @property
    def const_values(self) -> frozenset[int]:
        return frozenset(t.off for t in self.range_terms if t.is_constant)

    def core(self) -> EPSet:
        """Range elements shared by every member edge."""
        return self.range_const | EPSet.finite(self.const_values)

    def min_junk(self) -> EPSet:
        """Nonconstant term values common to all member ranges.

        Empty as soon as the domain has more indices than nonconstant terms:
        a nonconstant affine map hits a given value at most once.
        """
        terms = self.nonconst_terms
        if not terms:
            return EPSet.empty()
        size = self.domain.cardinality_if_finite()
        if size is None or size > len(terms):
            return EPSet.empty()
        hits = [EPSet.finite({t(n) for t in terms})
                for n in self.domain.up_to(self.domain.threshold + self.domain.period)]
        return intersect_all(hits)

    def min_atom(self) -> EPSet:
        """The smallest intersection of member ranges of this schema."""
        return self.core() | self.min_junk()

    def range_of(self, n: int) -> EPSet:
        return EPSet.finite({t(n) for t in self.range_terms}) | self.range_const

    def range_size(self, n: int) -> int | None:
        return self.range_of(n).cardinality_if_finite()

    def edge_name(self, n: int) -> str:
        return self.name if self.single else f"{self.name}[{n}]"


@dataclass(frozen=True)
class GeneralizedVertex:
    """A vertex set together with its certificate of membership in the
    generalized-vertex family: a cover by minimal infinite emitters plus a
    finite leftover."""

    vertices: EPSet
    mie_ids: tuple[int, ...]
    finite_part: EPSet

    def __eq__(self, other):
        return isinstance(other, GeneralizedVertex) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)


@dataclass(frozen=True)
class MinimalInfiniteEmitter:
    ident: int
    vertices: EPSet

    @property
    def name(self) -> str:
        return f"mie#{self.ident}"


class EdgeSelection:
    """A set of edges, stored as per-schema index sets."""

    def __init__(self, graph: "Ultragraph", parts: dict[str, EPSet]):
        self.graph = graph
        self.parts = {name: s for name, s in parts.items() if not s.is_empty()}

    def is_empty(self) -> bool:
        return not self.parts

    def is_infinite(self) -> bool:
        return any(s.is_infinite() for s in self.parts.values())

    def count(self) -> int | None:
        total = 0
        for s in self.parts.values():
            c = s.cardinality_if_finite()
            if c is None:
                return None
            total += c
        return total

    def __contains__(self, ref: EdgeRef) -> bool:
        s = self.parts.get(ref.schema)
        return s is not None and ref.index in s

    def without(self, refs) -> "EdgeSelection":
        parts = dict(self.parts)
        for ref in refs:
            if ref.schema in parts:
                parts[ref.schema] = parts[ref.schema] - EPSet.finite([ref.index])
        return EdgeSelection(self.graph, parts)

    def intersect(self, other: "EdgeSelection") -> "EdgeSelection":
        parts = {}
        for name, s in self.parts.items():
            if name in other.parts:
                parts[name] = s & other.parts[name]
        return EdgeSelection(self.graph, parts)

    def iter_refs(self, per_schema: int | None = None) -> Iterator[EdgeRef]:
        """Deterministic enumeration: schema declaration order, ascending index."""
        for schema in self.graph.schemas:
            s = self.parts.get(schema.name)
            if s is None:
                continue
            count = 0
            for n in s:
                yield EdgeRef(schema.name, n)
                count += 1
                if per_schema is not None and count >= per_schema:
                    break

    def refs(self, limit: int) -> list[EdgeRef]:
        out = []
        for ref in self.iter_refs():
            out.append(ref)
            if len(out) >= limit:
                break
        return out


class Ultragraph:
    """A finite schema presentation of an ultragraph without sinks."""

    def __init__(self, schemas: Sequence[EdgeSchema], active: EPSet):
        names = [s.name for s in schemas]
        if len(set(names)) != len(names):
            raise UltragraphError("duplicate schema names")
        self.schemas = list(schemas)
        self.by_name = {s.name: s for s in schemas}
        self.active = active
        if active.is_empty():
            raise UltragraphError("the vertex set is empty")
        self._validate_structure()
        self._mies: list[MinimalInfiniteEmitter] | None = None

    # -- validation --------------------------------------------------------

    def _validate_structure(self):
        for s in self.schemas:
            if not s.source.image(s.domain).is_subset(self.active):
                raise UltragraphError(
                    f"schema {s.name!r} has sources outside the vertex set")
            if not s.range_const.is_subset(self.active):
                raise UltragraphError(
                    f"schema {s.name!r} has constant range outside the vertex set")
            for t in s.range_terms:
                if not t.image(s.domain).is_subset(self.active):
                    raise UltragraphError(
                        f"schema {s.name!r} range term {t.pretty()} leaves the vertex set")
        emitted = union_all(s.source.image(s.domain) for s in self.schemas)
        missing = self.active - emitted
        if not missing.is_empty():
            raise UltragraphError(
                f"sinks are not allowed; vertex {missing.min_element()} emits no edge")

    # -- basic edge queries --------------------------------------------------

    def schema(self, name: str) -> EdgeSchema:
        try:
            return self.by_name[name]
        except KeyError:
            raise UltragraphError(f"unknown edge family {name!r}") from None

    def has_edge(self, ref: EdgeRef) -> bool:
        return ref.schema in self.by_name and ref.index in self.schema(ref.schema).domain

    def edge_source(self, ref: EdgeRef) -> int:
        return self.schema(ref.schema).source(ref.index)

    def edge_range(self, ref: EdgeRef) -> EPSet:
        return self.schema(ref.schema).range_of(ref.index)

    def edge_name(self, ref: EdgeRef) -> str:
        return self.schema(ref.schema).edge_name(ref.index)

    def emitted_by(self, vertices: EPSet) -> EdgeSelection:
        """All edges whose source lies in the given vertex set."""
        return EdgeSelection(self, {
            s.name: s.source.preimage_in(vertices, s.domain) for s in self.schemas})

    def out_edges(self, v: int) -> EdgeSelection:
        return self.emitted_by(EPSet.finite([v]))

    def out_degree(self, v: int) -> int | None:
        return self.out_edges(v).count()

    def edges_into(self, v: int) -> EdgeSelection:
        parts = {}
        for s in self.schemas:
            if v in s.core():
                parts[s.name] = s.domain
                continue
            hits = set()
            for t in s.nonconst_terms:
                n = t.solve(v)
                if n is not None and n in s.domain:
                    hits.add(n)
            parts[s.name] = EPSet.finite(hits)
        return EdgeSelection(self, parts)

    def in_degree(self, v: int) -> int | None:
        return self.edges_into(v).count()

    def edges_between(self, v: int, w: int) -> EdgeSelection:
        return self.out_edges(v).intersect(self.edges_into(w))

    def sources_set(self) -> EPSet:
        """Vertices that appear in no range."""
        ranged = EPSet.empty()
        for s in self.schemas:
            ranged = ranged | s.core()
            for t in s.nonconst_terms:
                ranged = ranged | t.image(s.domain)
        return self.active - ranged

    def range_covering_edges(self, target: EPSet) -> EdgeSelection:
        """Edges e with target a subset of r(e)."""
        parts = {}
        for s in self.schemas:
            core = s.core()
            if target.is_subset(core):
                parts[s.name] = s.domain
                continue
            rest = target - core
            if rest.is_infinite():
                continue
            need = rest.up_to(rest.threshold + 1)
            candidates: set[int] | None = None
            for x in need:
                hits = set()
                for t in s.nonconst_terms:
                    n = t.solve(x)
                    if n is not None and n in s.domain:
                        hits.add(n)
                candidates = hits if candidates is None else candidates & hits
                if not candidates:
                    break
            parts[s.name] = EPSet.finite(candidates or ())
        return EdgeSelection(self, parts)

    # -- infinite emitters ----------------------------------------------------

    def infinite_emitter_vertices(self) -> list[int]:
        """Vertices emitting infinitely many edges; always finitely many."""
        out = set()
        for s in self.schemas:
            if s.source.is_constant and s.domain.is_infinite():
                out.add(s.source.off)
        return sorted(out)

    def is_infinite_emitter(self, vertices: EPSet) -> bool:
        """With no sinks: infinite sets always emit infinitely."""
        if vertices.is_infinite():
            return True
        return any(v in vertices for v in self.infinite_emitter_vertices())

    def minimal_infinite_emitters(self) -> list[MinimalInfiniteEmitter]:
        if self._mies is None:
            self._mies = self._compute_mies()
        return self._mies

    def _compute_mies(self) -> list[MinimalInfiniteEmitter]:
        ievs = self.infinite_emitter_vertices()
        # close the per-schema minimal atoms under intersection, dropping
        # finite results (they cannot be subset-minimal infinite emitters)
        atoms = []
        for s in self.schemas:
            g = s.min_atom()
            if g.is_infinite() and g not in atoms:
                atoms.append(g)
        closure = list(atoms)
        frontier = list(atoms)
        while frontier:
            nxt = []
            for a in frontier:
                for b in atoms:
                    c = a & b
                    if c.is_infinite() and c not in closure:
                        closure.append(c)
                        nxt.append(c)
            frontier = nxt
            if len(closure) > 4096:
                raise UltragraphError("emitter lattice closure too large")
        candidates = [c for c in closure if not any(v in c for v in ievs)]
        minimal = [c for c in candidates
                   if not any(d != c and d.is_subset(c) for d in closure)]
        sets = [EPSet.finite([v]) for v in ievs] + minimal
        sets.sort(key=lambda s: s.sort_key())
        for i, a in enumerate(sets):
            for b in sets[i + 1:]:
                if (a & b).is_infinite():
                    raise UltragraphError("distinct minimal emitters overlap infinitely")
        return [MinimalInfiniteEmitter(i, s) for i, s in enumerate(sets)]

    def mie(self, ident: int) -> MinimalInfiniteEmitter:
        mies = self.minimal_infinite_emitters()
        if not 0 <= ident < len(mies):
            raise UltragraphError(f"no minimal infinite emitter mie#{ident}")
        return mies[ident]

    def mies_inside(self, vertices: EPSet) -> list[MinimalInfiniteEmitter]:
        return [m for m in self.minimal_infinite_emitters()
                if m.vertices.is_subset(vertices)]

    # -- generalized vertices ---------------------------------------------------

    def generalized(self, vertices: EPSet) -> GeneralizedVertex:
        """Certify membership in the generalized vertex family.

        A nonempty subset of the vertex set belongs to the family iff after
        removing every minimal infinite emitter it contains, only finitely
        many vertices remain.
        """
        if vertices.is_empty():
            raise NotGeneralizedVertex("the empty set is not a generalized vertex")
        if not vertices.is_subset(self.active):
            raise NotGeneralizedVertex("set contains non-vertices")
        inside = self.mies_inside(vertices)
        remainder = vertices
        for m in inside:
            remainder = remainder - m.vertices
        if remainder.is_infinite():
            raise NotGeneralizedVertex(
                "set minus its minimal infinite emitters is infinite")
        return GeneralizedVertex(vertices, tuple(m.ident for m in inside), remainder)

    def is_generalized(self, vertices: EPSet) -> bool:
        try:
            self.generalized(vertices)
            return True
        except NotGeneralizedVertex:
            return False

    # -- range decomposition audit ------------------------------------------------

    def rfum_report(self) -> "RfumReport":
        """Check that every edge range decomposes into minimal infinite
        emitters plus finitely many vertices."""
        for s in self.schemas:
            core = s.core()
            specials = self._special_indices(s)
            generic_exists = not (s.domain - EPSet.finite(specials)).is_empty()
            if generic_exists:
                rem = core
                for m in self.mies_inside(core):
                    rem = rem - m.vertices
                if rem.is_infinite():
                    n = (s.domain - EPSet.finite(specials)).min_element()
                    return RfumReport(False, EdgeRef(s.name, n), rem)
            for n in sorted(specials):
                rng = s.range_of(n)
                rem = rng
                for m in self.mies_inside(rng):
                    rem = rem - m.vertices
                if rem.is_infinite():
                    return RfumReport(False, EdgeRef(s.name, n), rem)
        return RfumReport(True, None, None)

    def _special_indices(self, s: EdgeSchema) -> set[int]:
        """Indices whose range can contain an MIE that the core misses."""
        out: set[int] = set()
        core = s.core()
        for m in self.minimal_infinite_emitters():
            rest = m.vertices - core
            if rest.is_empty() or rest.is_infinite():
                continue
            candidates: set[int] | None = None
            for x in rest.up_to(rest.threshold + 1):
                hits = set()
                for t in s.nonconst_terms:
                    n = t.solve(x)
                    if n is not None and n in s.domain:
                        hits.add(n)
                candidates = hits if candidates is None else candidates & hits
                if not candidates:
                    break
            out |= candidates or set()
        return out


@dataclass(frozen=True)
class RfumReport:
    ok: bool
    violating_edge: EdgeRef | None
    leftover: EPSet | None
