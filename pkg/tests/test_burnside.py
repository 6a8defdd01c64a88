import json
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from khsq.burnside import (
    Correspondence,
    FinSet,
    check_coherence,
    compose,
    functor_from_json,
    functor_to_json,
    identity,
    khovanov_functor,
)
from khsq.harness import corrupt_face, load_fixture
from khsq.linkio import resolve


def finset(k: int) -> FinSet:
    return FinSet(tuple(range(k)), (0,) * k)


def span(X, Y, pairs) -> Correspondence:
    return Correspondence(X, Y, tuple((s, t, None) for s, t in pairs))


def test_identity_is_neutral():
    X, Y = finset(3), finset(2)
    f = span(X, Y, [(0, 1), (2, 0), (2, 1)])
    assert compose(identity(X), f).pairs() == f.pairs()
    assert sorted(compose(f, identity(Y)).pairs()) == sorted(f.pairs())


def test_fiber_product_count():
    X, Y, Z = finset(1), finset(1), finset(3)
    f = span(X, Y, [(0, 0), (0, 0)])
    g = span(Y, Z, [(0, 0), (0, 1), (0, 2)])
    h = compose(f, g)
    assert len(h) == 6
    assert all(w is not None for _, _, w in h.elements)


def test_empty_composite():
    X, Y = finset(2), finset(2)
    assert len(compose(span(X, Y, []), span(Y, X, [(0, 1)]))) == 0


def test_compose_checks_midpoints():
    with pytest.raises(ValueError):
        compose(span(finset(1), finset(2), []), span(finset(3), finset(1), []))


def test_span_endpoints_validated():
    with pytest.raises(ValueError):
        span(finset(1), finset(1), [(0, 1)])


def test_finset_rejects_duplicates():
    with pytest.raises(ValueError):
        FinSet((1, 1), (0, 0))


spans = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), max_size=6)


@settings(max_examples=60, deadline=None)
@given(spans, spans, spans)
def test_composition_associative_up_to_bijection(p1, p2, p3):
    X = finset(3)
    f, g, h = span(X, X, p1), span(X, X, p2), span(X, X, p3)
    left = compose(compose(f, g), h)
    right = compose(f, compose(g, h))
    assert Counter(left.pairs()) == Counter(right.pairs())


def test_unknot_functor():
    F = khovanov_functor(load_fixture("unknot"))
    assert F.N == 0
    assert list(F.vertices) == [0]
    assert len(F.vertices[0]) == 2
    assert not F.edges and not F.faces
    assert check_coherence(F) == []


def test_hopf_faces_are_total_bijections():
    F = khovanov_functor(load_fixture("hopf_positive"))
    assert F.N == 2
    assert len(F.faces) == 1
    for (mask, c, e), bij in F.faces.items():
        left = F.composite(mask, c, e)
        right = F.composite(mask, e, c)
        assert len(bij) == len(left) == len(right)
        assert len(set(bij.values())) == len(bij)
        assert Counter(left.pairs()) == Counter(right.pairs())


@pytest.mark.parametrize("name", ["trefoil_right", "4_1", "5_2", "t3_4"])
def test_coherence_holds(name):
    assert check_coherence(khovanov_functor(load_fixture(name))) == []


def test_corrupted_face_is_named():
    F = khovanov_functor(load_fixture("trefoil_right"))
    key = corrupt_face(F)
    issues = check_coherence(F)
    assert issues
    assert any(i.kind == "face" and (i.vertex, *i.crossings) == key for i in issues)


@pytest.mark.parametrize("name", ["hopf_negative", "trefoil_left", "4_1"])
def test_vertex_sizes_and_grading(name):
    d = load_fixture(name)
    F = khovanov_functor(d)
    for mask, V in F.vertices.items():
        assert len(V) == 2 ** resolve(d, mask).circle_count
    for (mask, c), E in F.edges.items():
        for s, t in E.pairs():
            assert E.source.gradings[s] == E.target.gradings[t]


def test_json_roundtrip():
    F = khovanov_functor(load_fixture("trefoil_right"))
    data = functor_to_json(F)
    G = functor_from_json(json.dumps(data))
    assert functor_to_json(G) == data
    assert check_coherence(G) == []


def test_json_schema_checked():
    with pytest.raises(ValueError):
        functor_from_json({"schema": "other"})
