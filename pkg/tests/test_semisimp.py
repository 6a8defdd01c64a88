from collections import Counter
from itertools import combinations

import pytest

from khsq.burnside import compose, khovanov_functor
from khsq.f2algebra import homology_basis
from khsq.harness import load_fixture
from khsq.linkio import resolve
from khsq.semisimp import (
    Cmp,
    SpanOrder,
    a_sub_b,
    boundary_elements,
    compare,
    lambda_of,
    spans_tsv,
)
from oracles import brute_mab


@pytest.mark.parametrize("a,b,want", [(2, 5, 2), (5, 2, 4), (0, 1, 0), (1, 0, 0)])
def test_a_sub_b(a, b, want):
    assert a_sub_b(a, b) == want


def test_a_sub_b_needs_distinct():
    with pytest.raises(ValueError):
        a_sub_b(3, 3)


def test_zero_crossing_object(build):
    _, _, X, _ = build("unknot")
    assert X.N == 0
    assert X.size(-1) == 2


@pytest.mark.parametrize("name", ["hopf_positive", "trefoil_right", "4_1"])
def test_level_sizes(name, build):
    d, _, X, _ = build(name)
    for n in range(-1, X.N):
        want = sum(
            2 ** resolve(d, m).circle_count
            for m in range(1 << d.N)
            if bin(m).count("1") == n + 1
        )
        assert X.size(n) == want


@pytest.mark.parametrize("name", ["trefoil_right", "4_1"])
def test_double_faces_factor_both_ways(name, build):
    _, _, X, _ = build(name)
    for n in range(1, X.N):
        for a, b in combinations(range(n + 1), 2):
            both = Counter(X.face(n, (a, b)).pairs())
            # first a, then b shifted down; or first b, then a unshifted
            via_a = compose(X.face(n, (a,)), X.face(n - 1, (b - 1,)))
            via_b = compose(X.face(n, (b,)), X.face(n - 1, (a,)))
            assert Counter(via_a.pairs()) == both
            assert Counter(via_b.pairs()) == both


def test_double_face_factorizations_share_endpoints(build):
    _, _, X, _ = build("4_1")
    for n in range(1, X.N):
        src, tgt = X.span_src, X.span_tgt
        for z in range(X.size(n)):
            for e in X.double(n, z):
                assert src(n)[e.q] == src(n)[e.q2] == z
                assert tgt(n - 1)[e.p] == tgt(n - 1)[e.p2] == e.target
                assert X.span_face(n)[e.q] == e.a and X.span_face(n)[e.q2] == e.b
                assert X.span_face(n - 1)[e.p] == e.b - 1 and X.span_face(n - 1)[e.p2] == e.a


def test_boundary_elements_filters(build):
    _, _, X, _ = build("trefoil_right")
    n, z = 1, 0
    assert boundary_elements(X, n, z, [], (0,)) == []
    everything = boundary_elements(X, n, z, None, (0,))
    assert len(everything) == sum(1 for s in X.out(n, z) if X.span_face(n)[s] == 0)


@pytest.mark.parametrize("name", ["trefoil_right", "4_1"])
def test_boundary_counts_match_brute_force(name, build):
    _, _, X, C = build(name)
    for n, j in C.bidegrees():
        if n + 2 > X.N - 1:
            continue
        _, reps = homology_basis(C, n, j)
        for alpha in reps:
            for z in range(X.size(n + 2)):
                for a, b in combinations(range(n + 3), 2):
                    got = len(boundary_elements(X, n + 2, z, alpha.support, (a, b)))
                    assert got == brute_mab(X, n + 2, z, alpha.support, a, b)


def _two_in_same_face(X):
    for n in range(1, X.N):
        for z in range(X.size(n)):
            groups = {}
            for e in X.double(n, z):
                groups.setdefault((e.a, e.b), []).append(e)
            for els in groups.values():
                if len(els) >= 2:
                    yield n, z, els


def test_compare_orders(build):
    _, _, X, _ = build("4_1")
    order = SpanOrder(X)
    seen_q = seen_p = False
    for n, z, els in _two_in_same_face(X):
        for e, f in combinations(els, 2):
            s, t = X.span_element(n, e, z), X.span_element(n, f, z)
            assert compare("leftbreak", s, s, order) is Cmp.EQUAL
            ks, kt = order.leftbreak(n, e), order.leftbreak(n, f)
            want = Cmp.LESS if ks < kt else Cmp.GREATER
            assert compare("leftbreak", s, t, order) is want
            assert compare("leftbreak", t, s, order) is Cmp(-want)
            if e.q != f.q:
                seen_q = True
                # the first factor decides regardless of the second
                assert (want is Cmp.LESS) == (order.key(n, e.q) < order.key(n, f.q))
            else:
                seen_p = True
                assert (want is Cmp.LESS) == (order.key(n - 1, e.p) < order.key(n - 1, f.p))
            r = Cmp.LESS if order.rightbreak(n, e) < order.rightbreak(n, f) else Cmp.GREATER
            assert compare("rightbreak", s, t, order) is r
    assert seen_q and seen_p


def test_compare_rejects_other_faces(build):
    _, _, X, _ = build("trefoil_right")
    order = SpanOrder(X)
    els = [(z, e) for z in range(X.size(2)) for e in X.double(2, z)]
    (z1, e1), (z2, e2) = els[0], next(p for p in els if (p[1].a, p[1].b) != (els[0][1].a, els[0][1].b))
    with pytest.raises(ValueError):
        compare("leftbreak", X.span_element(2, e1, z1), X.span_element(2, e2, z2), order)
    with pytest.raises(ValueError):
        compare("sideways", X.span_element(2, e1, z1), X.span_element(2, e1, z1), order)


def test_seeded_orders_permute_each_face(build):
    _, _, X, _ = build("4_1")
    base, s1, s1b, s2 = SpanOrder(X), SpanOrder(X, 1), SpanOrder(X, 1), SpanOrder(X, 2)
    changed = False
    for n in range(0, X.N):
        for o in (base, s1, s2):
            keys = o.keys(n)
            for a in set(X.span_face(n)):
                ranks = sorted(r for f, r in keys if f == a)
                assert ranks == list(range(len(ranks)))
        assert s1.keys(n) == s1b.keys(n)
        changed |= s1.keys(n) != base.keys(n)
    assert changed


def test_lambda_rejects_incoherent_functor():
    from khsq.harness import corrupt_face

    F = khovanov_functor(load_fixture("trefoil_right"))
    corrupt_face(F)
    with pytest.raises(ValueError):
        lambda_of(F)


def test_spans_tsv_has_one_row_per_span(build):
    _, _, X, _ = build("hopf_positive")
    lines = spans_tsv(X).splitlines()
    assert lines[0].split("\t")[:3] == ["level", "face", "span"]
    assert len(lines) - 1 == sum(X.span_count(n) for n in range(0, X.N))
