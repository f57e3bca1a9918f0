import itertools

import pytest

from ugk.epset import EPSet, parse_epset
from ugk.ultragraph import EdgeRef, NotGeneralizedVertex
from ugk.ultrapath import (BoundaryPoint, Path, PathError, Ultrapath,
                           UndefinedConcatenation, UndefinedOnLengthZero,
                           paths_disjoint, ultrapath_disjoint)

import fixtures
from fixtures import graph


HUBS = graph(fixtures.COFINITE_HUBS)
TRI = graph(fixtures.TRIANGLE)

E1 = EdgeRef("e1", 0)
E2 = EdgeRef("e2", 0)


def path(g, *refs):
    return Path(refs, g)


def en(k):
    return EdgeRef("en", k)


def fset(*members):
    return EPSet.finite(members)


# -- paths ---------------------------------------------------------------------


def test_path_validation():
    p = path(HUBS, en(0), E1, E1)  # 3 -> 1 -> 1
    assert len(p) == 3
    assert p.source() == 3
    assert p.range() == parse_epset("all \\ {0,2}")
    assert p.pretty() == "en[0].e1.e1"

    with pytest.raises(PathError, match="compose"):
        path(HUBS, E1, E2)  # 2 is missing from r(e1)
    with pytest.raises(PathError, match="no such edge"):
        path(HUBS, EdgeRef("zz", 0))
    with pytest.raises(PathError, match="no such edge"):
        path(HUBS, EdgeRef("e1", 1))


def test_path_prefix_relations():
    a = path(HUBS, en(0))
    b = path(HUBS, en(0), E1)
    c = path(HUBS, en(2), en(0))
    assert a.is_prefix_of(b) and not b.is_prefix_of(a)
    assert b.extends(a)
    assert paths_disjoint(b, c)
    assert not paths_disjoint(a, b)
    assert path(HUBS).is_prefix_of(a)


# -- ultrapaths -----------------------------------------------------------------


def up(g, p, comp):
    return Ultrapath(p, comp, g)


def test_concat_two_length_zero():
    x = up(TRI, path(TRI), fset(0, 1))
    y = up(TRI, path(TRI), fset(1, 2))
    z = x.concat(y)
    assert len(z) == 0 and z.component == fset(1)
    with pytest.raises(UndefinedConcatenation):
        up(TRI, path(TRI), fset(0)).concat(up(TRI, path(TRI), fset(2)))


def test_concat_mixed_lengths():
    a = EdgeRef("a", 0)
    b = EdgeRef("b", 0)
    x = up(TRI, path(TRI, a), fset(1, 2))
    y0 = up(TRI, path(TRI), fset(2))
    assert x.concat(y0) == up(TRI, path(TRI, a), fset(2))

    y1 = up(TRI, path(TRI, b), fset(0))
    assert x.concat(y1) == up(TRI, path(TRI, a, b), fset(0))
    assert up(TRI, path(TRI), fset(1)).concat(y1) == y1

    with pytest.raises(UndefinedConcatenation):
        up(TRI, path(TRI, a), fset(0, 2)).concat(y1)  # s(b)=1 not in {0,2}


def test_concat_associative_on_samples():
    a, b, c = EdgeRef("a", 0), EdgeRef("b", 0), EdgeRef("c", 0)
    pieces = [up(TRI, path(TRI), fset(0, 1)),
              up(TRI, path(TRI), fset(1, 2)),
              up(TRI, path(TRI, a), fset(1)),
              up(TRI, path(TRI, b), fset(0, 2)),
              up(TRI, path(TRI, c, a), fset(1, 2))]
    for x, y, z in itertools.product(pieces, repeat=3):
        try:
            left = x.concat(y).concat(z)
        except UndefinedConcatenation:
            left = None
        try:
            right = x.concat(y.concat(z))
        except UndefinedConcatenation:
            right = None
        assert left == right


def test_ultrapath_validation():
    with pytest.raises(PathError):
        up(HUBS, path(HUBS, en(0)), fset(4))  # 4 not in r(en[0]) = {1,3}
    with pytest.raises(NotGeneralizedVertex):
        up(HUBS, path(HUBS), parse_epset("ap(1,2)"))


def test_disjointness_cases():
    # same path, disjoint components
    assert up(HUBS, path(HUBS, E1), fset(3)).disjoint(
        up(HUBS, path(HUBS, E1), fset(4)))
    assert not up(HUBS, path(HUBS, E1), fset(3, 4)).disjoint(
        up(HUBS, path(HUBS, E1), fset(4)))
    # nested paths: depends on the connecting edge source
    x_big = up(HUBS, path(HUBS, E1), fset(1, 3))
    x_small = up(HUBS, path(HUBS, E1), fset(1))
    y = up(HUBS, path(HUBS, E1, en(0)), fset(1, 3))
    assert not x_big.disjoint(y)  # s(en[0]) = 3 lands in {1,3}
    assert x_small.disjoint(y)
    assert y.disjoint(x_small) and not y.disjoint(x_big)
    # diverging paths
    assert up(HUBS, path(HUBS, en(2)), fset(3)).disjoint(y)
    # irreflexive on nonempty components
    assert not x_big.disjoint(x_big)


# -- boundary points -------------------------------------------------------------


def test_fin_point_validation():
    mie = HUBS.mie(0).vertices
    p = BoundaryPoint.fin(HUBS, path(HUBS, E1), mie)
    assert p.is_finite and p.length() == 1

    with pytest.raises(PathError, match="minimal"):
        BoundaryPoint.fin(HUBS, path(HUBS, E1), fset(3))
    with pytest.raises(PathError, match="emitter"):
        BoundaryPoint.fin(HUBS, path(HUBS, en(0)), mie)  # r(en[0]) too small


def test_evper_canonical_form():
    loop = path(HUBS, en(0), E1)  # 3 -> 1 -> 3
    base = BoundaryPoint.evper(HUBS, path(HUBS), loop)
    assert base.prefix == path(HUBS)
    assert base.cycle == loop

    # pushing whole periods into the head changes nothing
    assert BoundaryPoint.evper(HUBS, loop, loop) == base
    assert BoundaryPoint.evper(HUBS, loop + loop, loop) == base
    # a doubled cycle reduces to the primitive one
    assert BoundaryPoint.evper(HUBS, path(HUBS), loop + loop) == base
    # partial rotation pushed into the head also cancels
    shifted = BoundaryPoint.evper(
        HUBS, path(HUBS, en(0)), path(HUBS, E1, en(0)))
    assert shifted == base


def test_evper_validation():
    with pytest.raises(PathError, match="nonempty"):
        BoundaryPoint.evper(HUBS, path(HUBS), path(HUBS))
    with pytest.raises(PathError, match="loop"):
        # 5 -> 3 -> {1,3} never returns to 5
        BoundaryPoint.evper(HUBS, path(HUBS), path(HUBS, en(2), en(0)))
    with pytest.raises(PathError, match="compose"):
        BoundaryPoint.evper(HUBS, path(HUBS, en(0)),
                            path(HUBS, E2))


def test_shift_fin():
    mie = HUBS.mie(0).vertices
    p = BoundaryPoint.fin(HUBS, path(HUBS, E1), mie)
    q = p.shift()
    assert q == BoundaryPoint.fin(HUBS, path(HUBS), mie)
    with pytest.raises(UndefinedOnLengthZero):
        q.shift()


def test_shift_evper():
    loop = path(HUBS, en(0), E1)
    base = BoundaryPoint.evper(HUBS, path(HUBS), loop)
    rotated = base.shift()
    assert rotated == BoundaryPoint.evper(HUBS, path(HUBS),
                                          path(HUBS, E1, en(0)))
    assert rotated.shift() == base  # period two
    withhead = BoundaryPoint.evper(HUBS, path(HUBS, E2), loop)
    assert withhead.shift() == base
    assert withhead.shift_by(2) == rotated
    assert withhead.shift_by(3) == base


def test_edge_at_and_starts_with():
    loop = path(HUBS, en(0), E1)
    p = BoundaryPoint.evper(HUBS, path(HUBS, E2), loop)
    assert [p.edge_at(i) for i in range(5)] == [E2, en(0), E1, en(0), E1]
    assert p.starts_with(path(HUBS, E2, en(0)))
    assert not p.starts_with(path(HUBS, E1))
    assert p.prefix_path(3) == path(HUBS, E2, en(0), E1)

    mie = HUBS.mie(0).vertices
    q = BoundaryPoint.fin(HUBS, path(HUBS, E2), mie)
    assert q.starts_with(path(HUBS, E2))
    assert not q.starts_with(path(HUBS, E2, en(0)))


def test_prepend():
    mie = HUBS.mie(0).vertices
    zero = BoundaryPoint.fin(HUBS, path(HUBS), mie)
    assert zero.prepend(path(HUBS, E1)) == BoundaryPoint.fin(
        HUBS, path(HUBS, E1), mie)
    with pytest.raises(PathError):
        zero.prepend(path(HUBS, en(0)))  # mie not inside {1,3}

    loop = path(HUBS, en(0), E1)
    base = BoundaryPoint.evper(HUBS, path(HUBS), loop)
    assert base.prepend(path(HUBS, E2)) == BoundaryPoint.evper(
        HUBS, path(HUBS, E2), loop)
    # prepending a full period folds back into the same point
    assert base.prepend(loop) == base
