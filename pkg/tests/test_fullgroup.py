import random

import pytest

from ugk.cylinder import ClopenSet
from ugk.fullgroup import (FullGroupElement, FullGroupError,
                           PreconditionViolated, commutator, identity,
                           pi_hat, pi_tilde, random_element)
from ugk.groupoid import Bisection
from ugk.ultragraph import EdgeRef
from ugk.ultrapath import BoundaryPoint, Path

from fixtures import COFINITE_HUBS, LOOP_NO_EXIT, TRIANGLE, graph
from test_cylinder import sample_points


def E(name, i=0):
    return EdgeRef(name, i)


def hub_swap(g):
    """Swap the e1 and e2 branches over the common emitter."""
    comp = g.mie(0).vertices
    z = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g), comp)
    return pi_hat(z)


def test_identity_fixes_everything():
    g = graph(COFINITE_HUBS)
    e = identity(g)
    assert e.is_identity() and e.order() == 1
    for p in sample_points(g)[:20]:
        assert e.apply(p) == p
    assert e.support().is_empty()


def test_swap_involution_acts_and_squares_to_identity():
    g = graph(COFINITE_HUBS)
    w = hub_swap(g)
    A = g.mie(0).vertices
    p = BoundaryPoint.fin(g, Path([E("e2"), E("en", 0), E("e1")], g), A)
    q = w.apply(p)
    assert q == BoundaryPoint.fin(g, Path([E("e1"), E("en", 0), E("e1")], g), A)
    assert w.apply(q) == p
    assert w.is_involution() and w.order() == 2
    assert w.compose(w).is_identity()
    outside = BoundaryPoint.fin(g, Path((), g), A)
    assert w.apply(outside) == outside


def test_inverse_and_support():
    g = graph(COFINITE_HUBS)
    comp = g.mie(0).vertices
    z = Bisection.make(g, Path([E("e1"), E("e1")], g), Path([E("e2")], g), comp)
    w = pi_hat(z)
    wi = w.inverse()
    pts = sample_points(g)
    for p in pts:
        assert wi.apply(w.apply(p)) == p
    assert w.support().equals(wi.support())
    # the support tiles exactly the two swapped cylinders
    assert w.support().equals(ClopenSet.normalize(g, [z.source(), z.range()]))


def test_apply_respects_rows():
    g = graph(COFINITE_HUBS)
    w = hub_swap(g)
    for p in sample_points(g):
        for z in w.rows:
            if z.source().contains(p):
                assert z.range().contains(w.apply(p))


def test_pi_hat_rejects_overlapping_source_and_range():
    g = graph(COFINITE_HUBS)
    comp = g.edge_range(E("en", 0))  # {1, 3}, and s(en[0]) = 3 lies in it
    z = Bisection.make(g, Path((), g), Path([E("en", 0)], g), comp)
    with pytest.raises(PreconditionViolated):
        pi_hat(z)  # D(en[0],...) sits inside D((),...)


def test_pi_tilde_requires_equal_unions():
    g = graph(COFINITE_HUBS)
    comp = g.mie(0).vertices
    fwd = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g), comp)
    with pytest.raises(PreconditionViolated):
        pi_tilde(fwd)
    both = [fwd, fwd.inverse()]
    w = pi_tilde(both)
    assert w.is_involution()
    assert pi_tilde([], graph=g).is_identity()


def test_commutator_with_identity_is_identity():
    g = graph(COFINITE_HUBS)
    w = hub_swap(g)
    assert commutator(w, identity(g)).is_identity()
    assert commutator(identity(g), w).is_identity()


def test_element_invariants_are_enforced():
    g = graph(COFINITE_HUBS)
    comp = g.mie(0).vertices
    a = Bisection.make(g, Path([E("e1")], g), Path([E("e2")], g), comp)
    b = Bisection.make(g, Path([E("e1"), E("en", 0)], g),
                       Path([E("e2"), E("en", 0)], g), g.edge_range(E("en", 0)))
    # b's source nests inside a's source
    with pytest.raises(FullGroupError):
        FullGroupElement.make(g, [a, b, a.inverse(), b.inverse()])


def test_trivial_rows_are_dropped():
    g = graph(LOOP_NO_EXIT)
    # the lone cylinder is the single periodic point, and stretching its
    # prefix fixes it
    z = Bisection.make(g, Path([E("a")], g), Path((), g), g.active)
    el = FullGroupElement.make(g, [z])
    assert el.is_identity()


def test_compose_chains_prefix_substitutions():
    g = graph(COFINITE_HUBS)
    comp = g.mie(0).vertices
    w = hub_swap(g)
    v = pi_hat(Bisection.make(g, Path([E("e1"), E("e1")], g),
                              Path([E("e1"), E("en", 0), E("e1")], g), comp))
    prod = w.compose(v)
    pts = sample_points(g)
    for p in pts:
        assert prod.apply(p) == w.apply(v.apply(p))
    assert prod.inverse().equals(v.inverse().compose(w.inverse()))


def seeded_elements(g, seeds):
    out = []
    for s in seeds:
        el = random_element(g, budget=3, seed=s)
        out.append(el)
    return out


@pytest.mark.parametrize("src_name,src", [("hubs", COFINITE_HUBS),
                                          ("triangle", TRIANGLE)])
def test_group_laws_on_random_elements(src_name, src):
    g = graph(src)
    pts = sample_points(g)[:60]
    els = seeded_elements(g, range(8))
    rng = random.Random(f"laws-{src_name}")
    for _ in range(12):
        f, h, k = (rng.choice(els) for _ in range(3))
        left = f.compose(h).compose(k)
        right = f.compose(h.compose(k))
        assert left.equals(right)
        for p in pts[:25]:
            assert left.apply(p) == right.apply(p)
        assert f.compose(f.inverse()).is_identity()
        assert f.compose(identity(g)).equals(f)
        assert identity(g).compose(f).equals(f)


def test_random_elements_are_seed_stable_and_valid():
    g = graph(COFINITE_HUBS)
    for seed in range(6):
        a = random_element(g, budget=3, seed=seed)
        b = random_element(g, budget=3, seed=seed)
        assert a.equals(b)
        assert len(a.rows) == len(b.rows)
        a._validate()


def test_pi_hat_squares_to_identity_randomized():
    g = graph(COFINITE_HUBS)
    rng = random.Random("hat2")
    from ugk.fullgroup import _random_swap
    first = g.emitted_by(g.active).refs(6)
    count = 0
    for _ in range(40):
        z = _random_swap(g, rng, first, 3)
        if z is None:
            continue
        try:
            w = pi_hat(z)
        except PreconditionViolated:
            continue
        count += 1
        assert w.compose(w).is_identity()
        assert w.support().is_subset(
            ClopenSet.normalize(g, [z.source(), z.range()]))
    assert count >= 20


def test_support_of_inverse_matches():
    g = graph(COFINITE_HUBS)
    for seed in range(5):
        el = random_element(g, budget=3, seed=seed)
        assert el.support().equals(el.inverse().support())
