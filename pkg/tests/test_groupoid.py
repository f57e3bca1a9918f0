import itertools
import random

import pytest

from ugk.epset import EPSet
from ugk.groupoid import (Arrow, Bisection, GroupoidError, NotInSource,
                          is_isolated, orbit_enumerate)
from ugk.ultragraph import EdgeRef
from ugk.ultrapath import BoundaryPoint, Path

from fixtures import (BUNDLE, COFINITE_HUBS, FED_BUNDLE, FED_LOOP,
                      LOOP_NO_EXIT, LOOP_WITH_EXIT, SOURCE_BUNDLE, TRIANGLE,
                      TWO_SWAP, graph)
from test_cylinder import enumerate_paths, sample_points


def E(name, i=0):
    return EdgeRef(name, i)


def random_bisection(g, rng, paths, tries=12):
    for _ in range(tries):
        alpha, beta = rng.choice(paths), rng.choice(paths)
        base = g.active
        if len(alpha):
            base = base & alpha.range()
        if len(beta):
            base = base & beta.range()
        if base.is_empty():
            continue
        choices = [base]
        for m in g.mies_inside(base):
            choices.append(m.vertices)
        few = base.up_to(12)[:2]
        if few:
            choices.append(EPSet.finite(few))
        comp = rng.choice(choices)
        pool = g.emitted_by(comp).refs(5)
        excl = rng.sample(pool, min(len(pool), rng.randrange(2)))
        z = Bisection.make(g, alpha, beta, comp, excl)
        if not z.is_empty():
            return z
    return None


# -- construction and action ----------------------------------------------------


def test_make_checks_both_prefix_ranges():
    g = graph(COFINITE_HUBS)
    e1, e2 = Path([E("e1")], g), Path([E("e2")], g)
    z = Bisection.make(g, e1, e2, g.mie(0).vertices)
    assert z.degree == 0
    with pytest.raises(GroupoidError):
        Bisection.make(g, e1, e2, g.edge_range(E("e1")))  # 1 escapes r(e2)


def test_apply_swaps_prefixes_on_finite_points():
    g = graph(COFINITE_HUBS)
    alpha, beta = Path([E("e1")], g), Path([E("e2")], g)
    z = Bisection.make(g, alpha, beta, g.mie(0).vertices)
    rho = Path([E("en", 0), E("e1")], g)  # starts at 3, ends cofinitely
    p = BoundaryPoint.fin(g, beta + rho, g.mie(0).vertices)
    q = z.apply(p)
    assert q == BoundaryPoint.fin(g, alpha + rho, g.mie(0).vertices)
    assert z.inverse().apply(q) == p
    arrow = z.arrow_at(p)
    assert arrow == Arrow(q, 0, p)
    assert z.contains_arrow(arrow)
    assert not z.contains_arrow(Arrow(p, 0, p))


def test_apply_outside_source_raises():
    g = graph(COFINITE_HUBS)
    z = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g),
                       g.mie(0).vertices)
    stray = BoundaryPoint.fin(g, Path((), g), g.mie(0).vertices)
    with pytest.raises(NotInSource):
        z.apply(stray)


def test_apply_on_length_zero_and_periodic_points():
    g = graph(COFINITE_HUBS)
    # stretch a length-zero finite point onto a prefix
    z = Bisection.make(g, Path([E("e1")], g), Path((), g), g.mie(0).vertices)
    assert z.degree == 1
    p = BoundaryPoint.fin(g, Path((), g), g.mie(0).vertices)
    assert z.apply(p) == BoundaryPoint.fin(g, Path([E("e1")], g),
                                           g.mie(0).vertices)
    per = BoundaryPoint.evper(g, Path((), g), Path([E("en", 0), E("e1")], g))
    moved = z.apply(per)
    assert moved == per.prepend(Path([E("e1")], g))
    assert moved.starts_with(Path([E("e1")], g))


def test_inverse_swaps_source_and_range():
    g = graph(COFINITE_HUBS)
    z = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g),
                       g.mie(0).vertices, [E("en", 0)])
    assert z.inverse().inverse() == z
    assert z.inverse().source() == z.range()
    assert z.inverse().range() == z.source()
    assert z.inverse().degree == -z.degree


# -- intersection ----------------------------------------------------------------


def test_intersect_self_and_equal_prefixes():
    g = graph(COFINITE_HUBS)
    a = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g), g.mie(0).vertices)
    assert a.intersect(a) == a
    b = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g),
                       g.mie(0).vertices | EPSet.finite([3]), [E("en", 0)])
    meet = a.intersect(b)
    assert meet.component == g.mie(0).vertices
    assert meet.excluded == frozenset({E("en", 0)})


def test_intersect_nested_needs_matching_connector():
    g = graph(COFINITE_HUBS)
    r1 = g.edge_range(E("e1"))
    coarse = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g), r1 & g.edge_range(E("e2")))
    rho = Path([E("en", 2)], g)
    fine = Bisection.make(g, Path([E("e1")], g) + rho,
                          Path([E("e2")], g) + rho, g.edge_range(E("en", 2)))
    assert coarse.intersect(fine) == fine
    assert fine.intersect(coarse) == fine
    # different out-side continuation is a different arrow set
    skew = Bisection.make(g, Path([E("e1"), E("en", 0)], g),
                          Path([E("e2"), E("en", 2)], g),
                          g.edge_range(E("en", 0)) & g.edge_range(E("en", 2)))
    assert coarse.intersect(skew) is None
    blocked = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g),
                             r1 & g.edge_range(E("e2")), [E("en", 2)])
    assert blocked.intersect(fine) is None


def test_intersect_degree_mismatch():
    g = graph(COFINITE_HUBS)
    a = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g), g.mie(0).vertices)
    b = Bisection.make(g, Path([E("e1")], g), Path((), g), g.mie(0).vertices)
    assert a.intersect(b) is None


def test_intersect_agrees_with_arrow_membership():
    g = graph(COFINITE_HUBS)
    rng = random.Random("zmeet")
    paths = enumerate_paths(g)
    pts = sample_points(g)
    for _ in range(40):
        a = random_bisection(g, rng, paths)
        b = random_bisection(g, rng, paths)
        if a is None or b is None:
            continue
        meet = a.intersect(b)
        for p in pts:
            in_both = (a.source().contains(p) and b.source().contains(p)
                       and a.arrow_at(p) == b.arrow_at(p))
            got = meet is not None and meet.source().contains(p)
            assert got == in_both, (a.pretty(), b.pretty(), p.pretty())
            if got:
                assert meet.arrow_at(p) == a.arrow_at(p)


# -- composition ----------------------------------------------------------------


def test_compose_with_inverse_is_identity_over_range():
    g = graph(COFINITE_HUBS)
    z = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g),
                       g.mie(0).vertices)
    prods = z.compose(z.inverse())
    assert len(prods) == 1
    d = prods[0]
    assert d.degree == 0
    pts = [p for p in sample_points(g) if z.range().contains(p)]
    assert pts
    for p in pts:
        assert d.source().contains(p)
        assert d.apply(p) == p


def test_compose_routes_connectors():
    g = graph(COFINITE_HUBS)
    mid = Path([E("e2")], g)
    z1 = Bisection.make(g, Path([E("e1")], g), mid, g.mie(0).vertices)
    z2 = Bisection.make(g, mid + Path([E("en", 2)], g), Path([E("e1"), E("en", 2)], g),
                        g.edge_range(E("en", 2)))
    prods = z1.compose(z2)
    assert len(prods) == 1
    got = prods[0]
    assert got.out_prefix == Path([E("e1"), E("en", 2)], g)
    assert got.in_prefix == Path([E("e1"), E("en", 2)], g)
    for p in sample_points(g):
        if z2.source().contains(p) and z1.source().contains(z2.apply(p)):
            assert got.apply(p) == z1.apply(z2.apply(p))


def test_compose_disjoint_middle_is_empty():
    g = graph(COFINITE_HUBS)
    z1 = Bisection.make(g, Path([E("e1")], g), Path([E("e1")], g),
                        g.mie(0).vertices)
    z2 = Bisection.make(g, Path([E("e2")], g), Path([E("e2")], g),
                        g.mie(0).vertices)
    assert z1.compose(z2) == []


def test_compose_matches_pointwise_action():
    g = graph(COFINITE_HUBS)
    rng = random.Random("zdot")
    paths = enumerate_paths(g)
    pts = sample_points(g)
    for _ in range(40):
        a = random_bisection(g, rng, paths)
        b = random_bisection(g, rng, paths)
        if a is None or b is None:
            continue
        prods = a.compose(b)
        assert len(prods) <= 1
        for p in pts:
            chain = b.source().contains(p) and a.source().contains(b.apply(p))
            got = bool(prods) and prods[0].source().contains(p)
            assert got == chain, (a.pretty(), b.pretty(), p.pretty())
            if chain:
                assert prods[0].apply(p) == a.apply(b.apply(p))


def test_compose_associative_on_sampled_arrows():
    g = graph(TRIANGLE)
    rng = random.Random("zassoc")
    paths = enumerate_paths(g)
    pts = sample_points(g)
    for _ in range(25):
        zs = [random_bisection(g, rng, paths) for _ in range(3)]
        if any(z is None for z in zs):
            continue
        a, b, c = zs
        left = [x for ab in a.compose(b) for x in ab.compose(c)]
        right = [x for bc in b.compose(c) for x in a.compose(bc)]
        for p in pts:
            li = any(z.source().contains(p) for z in left)
            ri = any(z.source().contains(p) for z in right)
            assert li == ri
            if li:
                lz = next(z for z in left if z.source().contains(p))
                rz = next(z for z in right if z.source().contains(p))
                assert lz.apply(p) == rz.apply(p)


# -- orbits ----------------------------------------------------------------------


def test_orbit_of_finite_point_collects_reprefixings():
    g = graph(COFINITE_HUBS)
    p = BoundaryPoint.fin(g, Path([E("e1")], g), g.mie(0).vertices)
    orb = orbit_enumerate(p, budget=3)
    A = g.mie(0).vertices
    assert BoundaryPoint.fin(g, Path((), g), A) in orb
    assert BoundaryPoint.fin(g, Path([E("e2")], g), A) in orb
    assert BoundaryPoint.fin(g, Path([E("e2"), E("e2")], g), A) in orb
    assert p in orb


def test_orbit_sizes_on_rich_fixture():
    g = graph(COFINITE_HUBS)
    p = BoundaryPoint.fin(g, Path((), g), g.mie(0).vertices)
    assert len(orbit_enumerate(p, budget=10)) >= 10
    per = BoundaryPoint.evper(g, Path((), g), Path([E("en", 0), E("e1")], g))
    assert len(orbit_enumerate(per, budget=10)) >= 10


def test_degenerate_orbits_have_size_one_or_two():
    cases = []
    g = graph(SOURCE_BUNDLE)
    cases.append((g, BoundaryPoint.fin(g, Path((), g), g.mie(0).vertices), 1))
    g = graph(FED_BUNDLE)
    cases.append((g, BoundaryPoint.fin(g, Path((), g), g.mie(0).vertices), 2))
    g = graph(LOOP_NO_EXIT)
    cases.append((g, BoundaryPoint.evper(g, Path((), g), Path([E("a")], g)), 1))
    g = graph(FED_LOOP)
    cases.append((g, BoundaryPoint.evper(g, Path((), g), Path([E("e")], g)), 2))
    g = graph(TWO_SWAP)
    cases.append((g, BoundaryPoint.evper(g, Path((), g),
                                         Path([E("e"), E("f")], g)), 2))
    for g, p, size in cases:
        orb = orbit_enumerate(p, budget=6)
        assert len(orb) == size, (p.pretty(), [q.pretty() for q in orb])


# -- isolation -------------------------------------------------------------------


def test_no_exit_loop_point_is_isolated():
    g = graph(LOOP_NO_EXIT)
    p = BoundaryPoint.evper(g, Path((), g), Path([E("a")], g))
    rep = is_isolated(p)
    assert rep.isolated
    assert rep.witness == "a"


def test_exit_makes_the_point_non_isolated():
    g = graph(LOOP_WITH_EXIT)
    p = BoundaryPoint.evper(g, Path((), g), Path([E("a")], g))
    rep = is_isolated(p)
    assert not rep.isolated
    assert rep.witness == "b"


def test_finite_points_are_never_isolated():
    g = graph(COFINITE_HUBS)
    p = BoundaryPoint.fin(g, Path((), g), g.mie(0).vertices)
    rep = is_isolated(p)
    assert not rep.isolated and rep.witness is not None


def test_periodic_point_in_rich_fixture_is_not_isolated():
    g = graph(COFINITE_HUBS)
    p = BoundaryPoint.evper(g, Path((), g), Path([E("en", 0), E("e1")], g))
    assert not is_isolated(p).isolated
