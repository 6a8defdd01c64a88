import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from khsq.harness import fixture_paths, load_fixture
from khsq.linkio import (
    EdgeType,
    PDParseError,
    edge_type,
    format_pd,
    mirror,
    parse_pd,
    pd_from_braid,
    resolve,
)
from oracles import circles

HOPF = "PD[X(1,3,2,4),X(3,1,4,2)]"


def test_empty_code_with_unknot():
    d = parse_pd("PD[]", unknots=1)
    assert d.N == 0
    assert resolve(d, set()).circle_count == 1


def test_header_sets_unknots():
    d = parse_pd("unknots=2\nPD[]")
    assert resolve(d, 0).circle_count == 2


def test_empty_code_needs_unknot_count():
    with pytest.raises(PDParseError):
        parse_pd("PD[]")


def test_hopf_has_two_crossings():
    assert parse_pd(HOPF).N == 2


@pytest.mark.parametrize(
    "text",
    ["PD[X(1,4,2)]", "PD[X(1,2,3,4)]", "PD[X(1,2,3,4),X(1,2,3,4),X(1,2,3,4)]", "PD[X(1,2,", "PD[Y(1,2,2,1)]"],
)
def test_malformed_codes_raise(text):
    with pytest.raises(PDParseError):
        parse_pd(text)


def test_arity_error_reports_position():
    with pytest.raises(PDParseError, match="3 entries"):
        parse_pd("PD[X(1,4,2)]")


@pytest.mark.parametrize("path", fixture_paths(), ids=lambda p: p.stem)
def test_circle_counts_match_union_find(path):
    d = load_fixture(path.stem)
    for mask in range(1 << d.N):
        assert resolve(d, mask).circle_count == len(circles(d.pd.crossings, mask, d.pd.unknots))


@pytest.mark.parametrize("path", fixture_paths(), ids=lambda p: p.stem)
def test_every_edge_changes_circle_count_by_one(path):
    d = load_fixture(path.stem)
    for mask in range(1 << d.N):
        before = resolve(d, mask).circle_count
        for c in range(d.N):
            if (mask >> c) & 1:
                continue
            after = resolve(d, mask | (1 << c)).circle_count
            assert abs(after - before) == 1
            want = EdgeType.MERGE if after < before else EdgeType.SPLIT
            assert edge_type(d, mask, c) is want


def test_hopf_first_smoothing_changes_count():
    d = parse_pd(HOPF)
    assert resolve(d, set()).circle_count == 2
    assert abs(resolve(d, {0}).circle_count - 2) == 1
    assert edge_type(d, set(), 0) is EdgeType.MERGE


@pytest.mark.parametrize("text", ["PD[X(1,1,2,2)]", "PD[X(2,1,1,2)]"])
def test_kink_edge(text):
    d = parse_pd(text)
    want = len(circles(d.pd.crossings, 1)) - len(circles(d.pd.crossings, 0))
    got = edge_type(d, set(), 0)
    assert got is (EdgeType.SPLIT if want > 0 else EdgeType.MERGE)


def test_kink_handedness_flips_edge_type():
    a, b = parse_pd("PD[X(1,1,2,2)]"), parse_pd("PD[X(2,1,1,2)]")
    assert a.signs == (1,) and b.signs == (-1,)
    assert edge_type(a, 0, 0) is not edge_type(b, 0, 0)


def test_edge_type_rejects_smoothed_crossing():
    with pytest.raises(ValueError):
        edge_type(parse_pd(HOPF), {0}, 0)


def test_resolve_rejects_foreign_crossing():
    with pytest.raises(ValueError):
        resolve(parse_pd(HOPF), {5})


def test_signs_of_fixtures():
    assert load_fixture("trefoil_right").signs == (1, 1, 1)
    assert load_fixture("trefoil_left").signs == (-1, -1, -1)
    assert set(load_fixture("hopf_negative").signs) == {-1}
    fig8 = load_fixture("4_1")
    assert (fig8.n_plus, fig8.n_minus) == (2, 2)


def test_mirror_negates_signs_and_is_involutive():
    d = load_fixture("5_2")
    m = mirror(d)
    assert m.signs == tuple(-s for s in d.signs)
    assert mirror(m).pd == d.pd


def test_braid_closure_trefoil():
    d = pd_from_braid([1, 1, 1])
    assert d.signs == (1, 1, 1)
    assert format_pd(d) == format_pd(load_fixture("trefoil_right"))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=5))
def test_braid_roundtrip_and_locality(word):
    d = pd_from_braid(word)
    again = parse_pd(format_pd(d))
    assert again.pd == d.pd and again.signs == d.signs
    for mask in range(1 << d.N):
        n0 = resolve(d, mask).circle_count
        assert n0 == len(circles(d.pd.crossings, mask, d.pd.unknots))
        for c in range(d.N):
            if not (mask >> c) & 1:
                assert abs(resolve(d, mask | (1 << c)).circle_count - n0) == 1
