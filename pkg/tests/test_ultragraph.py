import pytest

from ugk.dsl import DslError, parse_ultragraph, pretty_ultragraph
from ugk.epset import EPSet
from ugk.ultragraph import (Affine, EdgeRef, EdgeSchema, NotGeneralizedVertex,
                            Ultragraph, UltragraphError)

import fixtures
from fixtures import graph


def ep(text):
    from ugk.epset import parse_epset
    return parse_epset(text)


# -- schema derived data -------------------------------------------------------


def test_affine_basics():
    f = Affine(2, 3)
    assert f(5) == 13
    assert f.solve(13) == 5
    assert f.solve(14) is None
    assert f.solve(1) is None
    assert Affine(0, 7).is_constant
    assert Affine(1, 0).pretty() == "n"
    assert Affine(2, 0).pretty() == "2*n"
    assert Affine(2, 3).pretty() == "2*n+3"
    assert Affine(1, 3).pretty() == "1*n+3"  # bare n+3 is outside the grammar
    assert Affine(0, 4).pretty() == "4"


def test_schema_core_and_junk():
    s = EdgeSchema("j", EPSet.finite([5]), Affine(0, 5),
                   (Affine(1, 0), Affine(2, 0)), EPSet.empty())
    assert s.min_junk() == EPSet.finite([5, 10])
    assert s.min_atom() == EPSet.finite([5, 10])

    s2 = EdgeSchema("k", EPSet.finite([2, 4]), Affine(0, 0),
                    (Affine(1, 0), Affine(2, 0)), EPSet.empty())
    # ranges {2,4} and {4,8} share only 4
    assert s2.min_junk() == EPSet.finite([4])

    s3 = EdgeSchema("m", EPSet.naturals(), Affine(0, 0),
                    (Affine(1, 0),), EPSet.finite([9]))
    assert s3.min_junk().is_empty()
    assert s3.min_atom() == EPSet.finite([9])


def test_schema_range_of_dedupes():
    s = EdgeSchema("d", EPSet.naturals(), Affine(1, 0),
                   (Affine(1, 1), Affine(1, 1), Affine(0, 2)), EPSet.empty())
    assert len(s.range_terms) == 2
    assert s.range_of(1) == EPSet.finite([2])
    assert s.range_of(3) == EPSet.finite([4, 2])


# -- parsing -------------------------------------------------------------------


def test_parse_cofinite_hubs():
    g = graph(fixtures.COFINITE_HUBS)
    assert [s.name for s in g.schemas] == ["e1", "e2", "en"]
    assert g.active == ep("ap(1,1)")
    e1 = g.schema("e1")
    assert e1.single and e1.source == Affine(0, 1)
    assert e1.range_const == ep("all \\ {0,2}")
    en = g.schema("en")
    assert not en.single
    assert en.source == Affine(1, 3)
    assert en.range_terms == (Affine(1, 1), Affine(1, 3))
    assert g.edge_range(EdgeRef("en", 0)) == EPSet.finite([1, 3])


def test_pretty_round_trip():
    for src in fixtures.ALL.values():
        g = graph(src)
        h = parse_ultragraph(pretty_ultragraph(g))
        assert h.active == g.active
        assert h.schemas == g.schemas


def test_parse_errors_carry_line_numbers():
    with pytest.raises(DslError) as err:
        parse_ultragraph("universe all\nfamily f(n) for n in all : src 2n+ -> { 0 }\n")
    assert err.value.line == 2

    with pytest.raises(DslError, match="line 1"):
        parse_ultragraph("edge a : src 0 -> { }")

    with pytest.raises(DslError, match="variable"):
        parse_ultragraph("universe all\n"
                         "family f(n) for n in all : src n -> { 1*m+1 }\n")

    with pytest.raises(DslError, match="declaration"):
        parse_ultragraph("vertex 3\n")

    with pytest.raises(DslError, match="universe"):
        parse_ultragraph("universe all\nuniverse all\n")


def test_validation_rejects_sinks_and_escapes():
    with pytest.raises(DslError, match="sink"):
        parse_ultragraph("universe {0,1}\nedge a : src 0 -> { {1} }\n")
    with pytest.raises(DslError, match="sink"):
        parse_ultragraph("")  # no edges at all: every vertex is a sink
    with pytest.raises(DslError, match="outside|leaves"):
        parse_ultragraph("universe {0,1}\nedge a : src 0 -> { {0,5} }\n"
                         "edge b : src 1 -> { {0} }\n")
    with pytest.raises(DslError, match="outside|leaves"):
        parse_ultragraph("universe {0,1}\nedge a : src 5 -> { {0,1} }\n"
                         "edge b : src 1 -> { {0} }\nedge c : src 0 -> { {1} }\n")
    with pytest.raises(UltragraphError, match="duplicate"):
        Ultragraph([EdgeSchema("a", EPSet.finite([0]), Affine(0, 0),
                               (), EPSet.finite([0]), True)] * 2,
                   EPSet.finite([0]))


# -- edge queries ----------------------------------------------------------------


def test_edges_into_vertex_three():
    g = graph(fixtures.COFINITE_HUBS)
    refs = set(g.edges_into(3).iter_refs())
    assert refs == {EdgeRef("e1", 0), EdgeRef("e2", 0),
                    EdgeRef("en", 0), EdgeRef("en", 2)}
    assert g.in_degree(3) == 4


def test_out_degrees():
    g = graph(fixtures.COFINITE_HUBS)
    assert g.out_degree(1) == 1
    assert g.out_degree(2) == 1
    assert g.out_degree(7) == 1
    b = graph(fixtures.BUNDLE)
    assert b.out_degree(1) is None
    assert b.out_degree(2) == 1


def test_emitted_by_mie_is_whole_family():
    g = graph(fixtures.COFINITE_HUBS)
    sel = g.emitted_by(ep("ap(3,1)"))
    assert sel.is_infinite()
    assert sel.parts == {"en": EPSet.naturals()}


def test_edges_between():
    g = graph(fixtures.COFINITE_HUBS)
    refs = list(g.edges_between(5, 3).iter_refs())
    assert refs == [EdgeRef("en", 2)]
    assert list(g.edges_between(1, 2).iter_refs()) == []


def test_range_covering_edges():
    g = graph(fixtures.COFINITE_HUBS)
    covering = set(g.range_covering_edges(ep("ap(3,1)")).iter_refs())
    assert covering == {EdgeRef("e1", 0), EdgeRef("e2", 0)}
    tiny = set(g.range_covering_edges(EPSet.finite([1, 3])).iter_refs())
    assert tiny == {EdgeRef("e1", 0), EdgeRef("en", 0)}


def test_sources_set():
    assert graph(fixtures.FED_BUNDLE).sources_set() == EPSet.finite([0])
    assert graph(fixtures.COFINITE_HUBS).sources_set().is_empty()
    assert graph(fixtures.TWO_SWAP).sources_set().is_empty()


# -- minimal infinite emitters ---------------------------------------------------


def mie_sets(g):
    return [m.vertices for m in g.minimal_infinite_emitters()]


def test_cofinite_hubs_has_one_mie():
    g = graph(fixtures.COFINITE_HUBS)
    assert g.infinite_emitter_vertices() == []
    assert mie_sets(g) == [ep("ap(3,1)")]
    assert g.mie(0).name == "mie#0"


def test_bundle_mie_is_emitter_vertex():
    g = graph(fixtures.BUNDLE)
    assert g.infinite_emitter_vertices() == [1]
    assert mie_sets(g) == [EPSet.finite([1])]


def test_finite_fixtures_have_no_mies():
    for src in (fixtures.TRIANGLE, fixtures.LOOP_WITH_EXIT, fixtures.TWO_SWAP,
                fixtures.FED_LOOP, fixtures.OVERLAP_LOOPS):
        assert mie_sets(graph(src)) == []


def test_nested_atoms_keep_only_minimal():
    g = graph(fixtures.BAD_DECOMP)
    assert mie_sets(g) == [ep("ap(0,4)")]


def test_mie_engine_on_junk_only_schema():
    # domain of size two, junk {4} is the only infinite... n/a: junk finite,
    # so the only emitters come from the infinite core of edge r
    text = ("universe all\n"
            "family sw(n) for n in all : src n -> { 1 }\n"
            "edge r : src 0 -> { ap(5,3) }\n")
    g = parse_ultragraph(text)
    assert mie_sets(g) == [ep("ap(5,3)")]


def test_is_infinite_emitter():
    g = graph(fixtures.BUNDLE)
    assert g.is_infinite_emitter(EPSet.finite([1]))
    assert not g.is_infinite_emitter(EPSet.finite([2]))
    assert g.is_infinite_emitter(ep("all"))


# -- generalized vertices --------------------------------------------------------


def test_generalized_decomposition():
    g = graph(fixtures.COFINITE_HUBS)
    gv = g.generalized(ep("ap(1,1)"))
    assert gv.mie_ids == (0,)
    assert gv.finite_part == EPSet.finite([1, 2])

    gv2 = g.generalized(ep("ap(3,1)"))
    assert gv2.mie_ids == (0,)
    assert gv2.finite_part.is_empty()

    gv3 = g.generalized(EPSet.finite([1, 5]))
    assert gv3.mie_ids == ()
    assert gv3.finite_part == EPSet.finite([1, 5])


def test_generalized_rejections():
    g = graph(fixtures.COFINITE_HUBS)
    with pytest.raises(NotGeneralizedVertex):
        g.generalized(ep("ap(1,2)"))  # odd vertices: no MIE inside
    with pytest.raises(NotGeneralizedVertex):
        g.generalized(EPSet.empty())
    with pytest.raises(NotGeneralizedVertex):
        g.generalized(EPSet.finite([0]))  # 0 is not a vertex here
    # infinite but missing cofinitely much of the emitter: still rejected
    assert not g.is_generalized(ep("ap(3,2)"))
    assert g.is_generalized(ep("ap(3,1) | {1}"))


# -- range decompositions (the standing assumption checker) ----------------------


def test_rfum_ok_on_shipped_fixtures():
    for src in fixtures.ALL.values():
        report = graph(src).rfum_report()
        assert report.ok, src


def test_rfum_violation_certificate():
    report = graph(fixtures.BAD_DECOMP).rfum_report()
    assert not report.ok
    assert report.violating_edge == EdgeRef("e1", 0)
    assert report.leftover.is_infinite()
    # the certificate re-validates: the range really fails to decompose
    g = graph(fixtures.BAD_DECOMP)
    assert not g.is_generalized(g.edge_range(report.violating_edge))


def test_family_core_is_itself_an_atom():
    # the family's shared range part is a realizable intersection, so it is
    # the minimal emitter and the per-member extras are finite leftovers
    text = ("universe all\n"
            "family sw(n) for n in all : src n -> { 0 }\n"
            "edge a : src 0 -> { ap(0,2) }\n"
            "family b(n) for n in all : src n -> { 2*n, ap(2,2) }\n")
    g = parse_ultragraph(text)
    assert mie_sets(g) == [ep("ap(2,2)")]
    assert g.rfum_report().ok


def test_junk_extended_atom_and_special_indices():
    # a two-member family whose ranges cross at the value 11: the common
    # part is evens plus 11, every family index needs the direct check and
    # both pass with finite leftovers
    text = ("universe all\n"
            "family sw(n) for n in all : src n -> { 0 }\n"
            "edge c : src 0 -> { ap(0,2) | {11} }\n"
            "family b(n) for n in {3,5} : src n -> { 2*n+5, 2*n+1, ap(0,2) }\n")
    g = parse_ultragraph(text)
    assert g.schema("b").min_atom() == ep("ap(0,2) | {11}")
    assert mie_sets(g) == [ep("ap(0,2) | {11}")]
    report = g.rfum_report()
    assert report.ok
    rng = g.edge_range(EdgeRef("b", 3))
    gv = g.generalized(rng)
    assert gv.mie_ids == (0,)
    assert gv.finite_part == EPSet.finite([7])


def test_random_presentations_validate():
    for seed in range(30):
        g = parse_ultragraph(fixtures.random_presentation(seed))
        mies = g.minimal_infinite_emitters()
        # distinct minimal emitters meet finitely (asserted inside) and each
        # one is an infinite emitter
        for m in mies:
            assert g.is_infinite_emitter(m.vertices)
            assert g.emitted_by(m.vertices).is_infinite()
