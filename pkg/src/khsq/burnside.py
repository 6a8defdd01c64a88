"""Finite correspondences and the Khovanov cube functor.

A correspondence between two finite sets is stored as an explicit list of span
elements ``(source, target, witness)``.  The cube functor keeps, for every
vertex ``A`` (a bitmask of 1-smoothed crossings), the generators over ``A``;
for every edge ``A -> A - {c}`` the span of the Khovanov differential; and for
every 2-face the bijection between the two ways of walking down the face.

Generators over a vertex with ``k`` circles are encoded as integers
``0..2**k - 1``: bit ``k-1-i`` holds the label of circle ``i`` (1 for the
label ``1``, 0 for ``x``), so integer order is lexicographic order in the
circle labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Sequence

from .linkio import LinkDiagram, ladybug_right_arcs

__all__ = [
    "FinSet",
    "Correspondence",
    "CubeFunctor",
    "CoherenceIssue",
    "compose",
    "identity",
    "khovanov_functor",
    "check_coherence",
    "functor_to_json",
    "functor_from_json",
    "bits_of",
]


def bits_of(mask: int) -> list[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


@dataclass(frozen=True)
class FinSet:
    elements: tuple
    gradings: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("duplicate generator identifiers")
        if len(self.gradings) != len(self.elements):
            raise ValueError("one grading per element is required")

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Correspondence:
    """Span ``source <- elements -> target``.  Endpoints are indices into
    the two finite sets; ``witness`` is ``None`` for primitive elements and
    the index pair ``(i_f, i_g)`` for elements of a composite."""

    source: FinSet
    target: FinSet
    elements: tuple[tuple[int, int, Any], ...]

    def __post_init__(self) -> None:
        ns, nt = len(self.source), len(self.target)
        for s, t, _ in self.elements:
            if not (0 <= s < ns and 0 <= t < nt):
                raise ValueError(f"span element ({s}, {t}) outside its source/target")

    def __len__(self) -> int:
        return len(self.elements)

    def pairs(self) -> list[tuple[int, int]]:
        return [(s, t) for s, t, _ in self.elements]


def identity(X: FinSet) -> Correspondence:
    return Correspondence(X, X, tuple((i, i, None) for i in range(len(X))))


def compose(f: Correspondence, g: Correspondence) -> Correspondence:
    """First ``f`` then ``g``: the fiber product over ``f.target``.

    Elements are ordered by the index in ``g`` and then the index in ``f``.
    """
    if f.target != g.source:
        raise ValueError("cannot compose: target of the first span is not the source of the second")
    by_mid: dict[int, list[int]] = {}
    for i, (_, t, _) in enumerate(f.elements):
        by_mid.setdefault(t, []).append(i)
    out = []
    for j, (m, t, _) in enumerate(g.elements):
        for i in by_mid.get(m, ()):
            out.append((f.elements[i][0], t, (i, j)))
    return Correspondence(f.source, g.target, tuple(out))


# ---------------------------------------------------------------- cube functor


@dataclass
class CubeFunctor:
    """Explicit cube 2-functor.

    ``edges[(mask, c)]`` is the span ``F(mask) -> F(mask - {c})``.
    ``faces[(mask, c, e)]`` (``c < e``) maps a path that drops ``c`` first,
    given as ``(i, j)`` with ``i`` indexing ``edges[(mask, c)]`` and ``j``
    indexing ``edges[(mask - c, e)]``, to the path that drops ``e`` first.
    """

    N: int
    vertices: dict[int, FinSet]
    edges: dict[tuple[int, int], Correspondence]
    faces: dict[tuple[int, int, int], dict[tuple[int, int], tuple[int, int]]]
    meta: dict = field(default_factory=dict)

    def composite(self, mask: int, first: int, second: int) -> Correspondence:
        return compose(
            self.edges[(mask, first)], self.edges[(mask & ~(1 << first), second)]
        )

    def face_pairs(self, mask: int) -> list[tuple[int, int]]:
        return list(combinations(bits_of(mask), 2))


def _code_labels(code: int, k: int) -> list[int]:
    return [(code >> (k - 1 - i)) & 1 for i in range(k)]


def _labels_code(labels: Sequence[int]) -> int:
    code = 0
    for v in labels:
        code = (code << 1) | v
    return code


def _circle_map(d: LinkDiagram, src: int, dst: int) -> list[int]:
    """For each circle at ``src``, a circle at ``dst`` sharing an arc with it
    (well defined for circles untouched by the change)."""
    a, b = d.resolution(src), d.resolution(dst)
    where = b.arc_circle
    out = []
    extra = len(b.circles) - d.pd.unknots
    j = 0
    for circ in a.circles:
        if circ:
            out.append(where[circ[0]])
        else:
            out.append(extra + j)
            j += 1
    return out


def _edge(d: LinkDiagram, hi: int, c: int, gens: dict[int, FinSet]) -> Correspondence:
    lo = hi & ~(1 << c)
    k_lo = d.resolution(lo).circle_count
    k_hi = d.resolution(hi).circle_count
    pairs: list[tuple[int, int]] = []
    if k_hi == k_lo - 1:
        # merge, read in the Khovanov direction lo -> hi
        fwd = _circle_map(d, lo, hi)
        hit: dict[int, list[int]] = {}
        for i, h in enumerate(fwd):
            hit.setdefault(h, []).append(i)
        (h_m, (i1, i2)), = [(h, v) for h, v in hit.items() if len(v) == 2]
        for x in range(1 << k_lo):
            lab = _code_labels(x, k_lo)
            out = [0] * k_hi
            for i, h in enumerate(fwd):
                out[h] = lab[i]
            l1, l2 = lab[i1], lab[i2]
            if l1 and l2:
                out[h_m] = 1
            elif l1 or l2:
                out[h_m] = 0
            else:
                continue
            pairs.append((_labels_code(out), x))
    elif k_hi == k_lo + 1:
        back = _circle_map(d, hi, lo)
        hit = {}
        for h, i in enumerate(back):
            hit.setdefault(i, []).append(h)
        (i_s, (h1, h2)), = [(i, v) for i, v in hit.items() if len(v) == 2]
        for x in range(1 << k_lo):
            lab = _code_labels(x, k_lo)
            base = [lab[back[h]] for h in range(k_hi)]
            if lab[i_s]:
                for one, ex in ((h1, h2), (h2, h1)):
                    out = list(base)
                    out[one], out[ex] = 1, 0
                    pairs.append((_labels_code(out), x))
            else:
                out = list(base)
                out[h1] = out[h2] = 0
                pairs.append((_labels_code(out), x))
    else:
        raise AssertionError(f"crossing {c} changes the circle count by {k_hi - k_lo}")
    pairs.sort()
    return Correspondence(gens[hi], gens[lo], tuple((s, t, None) for s, t in pairs))


def _face(
    d: LinkDiagram, F: CubeFunctor, mask: int, c: int, e: int
) -> dict[tuple[int, int], tuple[int, int]]:
    """Bijection between paths dropping ``c`` first and paths dropping ``e`` first."""
    mc, me = mask & ~(1 << c), mask & ~(1 << e)
    w = mc & ~(1 << e)
    left = _paths(F, mask, c, e)
    right = _paths(F, mask, e, c)
    out: dict[tuple[int, int], tuple[int, int]] = {}
    match = None
    for key, lp in left.items():
        rp = right.get(key, [])
        if len(lp) != len(rp):
            raise AssertionError(f"face {mask:b}/{c},{e}: path counts differ for {key}")
        if len(lp) == 1:
            out[lp[0]] = rp[0]
            continue
        if len(lp) != 2:
            raise AssertionError(f"face {mask:b}/{c},{e}: {len(lp)} parallel paths")
        if match is None:
            match = _ladybug(d, w, c, e)
        # left paths pass through F(mask - c) = vertex w+e, right ones through w+c
        ke = d.resolution(mc).circle_count
        kc = d.resolution(me).circle_count
        by_circle = {}
        for ij in rp:
            y = F.edges[(mask, e)].elements[ij[0]][1]
            by_circle[_x_circle(y, kc, match[1])] = ij
        for ij in lp:
            y = F.edges[(mask, c)].elements[ij[0]][1]
            circ = _x_circle(y, ke, match[0])
            out[ij] = by_circle[circ]
    return out


def _x_circle(y: int, k: int, circles: tuple[int, int]) -> int:
    """Which of the two ladybug circles carries the ``x`` label in ``y``."""
    labs = _code_labels(y, k)
    xs = [i for i, circ in enumerate(circles) if labs[circ] == 0]
    if len(xs) != 1:
        raise AssertionError("ladybug intermediate generator must label one circle x and one 1")
    return xs[0]


def _ladybug(d: LinkDiagram, w: int, c: int, e: int):
    """Circles of the two intermediate vertices, listed so that position ``i``
    on both sides holds the circle through the ``i``-th right-pair piece."""
    pieces = ladybug_right_arcs(d, w, c, e)
    at_e = d.resolution(w | (1 << e)).arc_circle
    at_c = d.resolution(w | (1 << c)).arc_circle
    we = tuple(at_e[min(p)] for p in pieces)
    wc = tuple(at_c[min(p)] for p in pieces)
    if len(set(we)) != 2 or len(set(wc)) != 2:
        raise AssertionError("right pair pieces do not separate the intermediate circles")
    return we, wc


def _paths(F: CubeFunctor, mask: int, first: int, second: int):
    e1 = F.edges[(mask, first)]
    e2 = F.edges[(mask & ~(1 << first), second)]
    from_mid: dict[int, list[int]] = {}
    for j, (m, _, _) in enumerate(e2.elements):
        from_mid.setdefault(m, []).append(j)
    out: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for i, (z, m, _) in enumerate(e1.elements):
        for j in from_mid.get(m, ()):
            out.setdefault((z, e2.elements[j][1]), []).append((i, j))
    return out


def khovanov_functor(d: LinkDiagram) -> CubeFunctor:
    N = d.N
    shift = d.n_plus - 2 * d.n_minus
    gens: dict[int, FinSet] = {}
    for mask in range(1 << N):
        k = d.resolution(mask).circle_count
        size = bin(mask).count("1")
        gens[mask] = FinSet(
            tuple(range(1 << k)),
            tuple(2 * bin(x).count("1") - k + size + shift for x in range(1 << k)),
        )
    F = CubeFunctor(N, gens, {}, {}, {"n_plus": d.n_plus, "n_minus": d.n_minus})
    for mask in range(1 << N):
        for c in bits_of(mask):
            F.edges[(mask, c)] = _edge(d, mask, c, gens)
    for mask in range(1 << N):
        for c, e in combinations(bits_of(mask), 2):
            F.faces[(mask, c, e)] = _face(d, F, mask, c, e)
    return F


# ---------------------------------------------------------------- coherence


@dataclass(frozen=True)
class CoherenceIssue:
    kind: str  # "face" or "hexagon"
    vertex: int
    crossings: tuple[int, ...]
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} at vertex {sorted(bits_of(self.vertex))} crossings {list(self.crossings)}: {self.detail}"


def _swap(F: CubeFunctor, mask: int, path: tuple, pos: int) -> tuple:
    """Apply the face bijection at positions ``pos, pos+1`` of a removal path.

    ``path`` is ``(order, steps)`` with ``order`` the crossings in removal
    order and ``steps`` the edge-element indices."""
    order, steps = path
    m = mask
    for c in order[:pos]:
        m &= ~(1 << c)
    c, e = order[pos], order[pos + 1]
    pair = (steps[pos], steps[pos + 1])
    if c < e:
        new = F.faces[(m, c, e)][pair]
    else:
        inv = {v: k for k, v in F.faces[(m, e, c)].items()}
        new = inv[pair]
    order = order[:pos] + (e, c) + order[pos + 2 :]
    steps = steps[:pos] + new + steps[pos + 2 :]
    return order, steps


def check_coherence(F: CubeFunctor) -> list[CoherenceIssue]:
    issues: list[CoherenceIssue] = []
    for mask in range(1 << F.N):
        for c, e in combinations(bits_of(mask), 2):
            bij = F.faces.get((mask, c, e))
            left = _paths(F, mask, c, e)
            right = _paths(F, mask, e, c)
            lall = {p: k for k, v in left.items() for p in v}
            rall = {p: k for k, v in right.items() for p in v}
            if bij is None:
                if lall:
                    issues.append(CoherenceIssue("face", mask, (c, e), "missing bijection"))
                continue
            bad = None
            if set(bij) != set(lall):
                bad = "domain is not the set of paths dropping the smaller crossing first"
            elif sorted(bij.values()) != sorted(rall) or len(set(bij.values())) != len(bij):
                bad = "not a bijection onto the paths dropping the larger crossing first"
            elif any(lall[p] != rall[q] for p, q in bij.items()):
                bad = "does not preserve endpoints"
            if bad:
                issues.append(CoherenceIssue("face", mask, (c, e), bad))
    for mask in range(1 << F.N):
        for trip in combinations(bits_of(mask), 3):
            for path in _removal_paths(F, mask, trip):
                p = path
                try:
                    for pos in (0, 1, 0, 1, 0, 1):
                        p = _swap(F, mask, p, pos)
                except (KeyError, ValueError):
                    issues.append(CoherenceIssue("hexagon", mask, trip, "path fell off a face bijection"))
                    break
                if p != path:
                    issues.append(
                        CoherenceIssue("hexagon", mask, trip, f"path {path[1]} returns as {p[1]}")
                    )
                    break
    return issues


def _removal_paths(F: CubeFunctor, mask: int, trip: tuple[int, int, int]):
    c1, c2, c3 = trip
    m1 = mask & ~(1 << c1)
    m2 = m1 & ~(1 << c2)
    e1, e2, e3 = F.edges[(mask, c1)], F.edges[(m1, c2)], F.edges[(m2, c3)]
    nxt2: dict[int, list[int]] = {}
    for j, (s, _, _) in enumerate(e2.elements):
        nxt2.setdefault(s, []).append(j)
    nxt3: dict[int, list[int]] = {}
    for j, (s, _, _) in enumerate(e3.elements):
        nxt3.setdefault(s, []).append(j)
    for i, (_, t, _) in enumerate(e1.elements):
        for j in nxt2.get(t, ()):
            for k in nxt3.get(e2.elements[j][1], ()):
                yield (trip, (i, j, k))


# ---------------------------------------------------------------- json


def functor_to_json(F: CubeFunctor) -> dict:
    """Plain-JSON form.  Schema (version 1):
    ``{"schema": "khsq.functor/1", "N", "meta",
    "vertices": [{"mask", "gradings"}],
    "edges": [{"mask", "crossing", "pairs": [[src, tgt], ...]}],
    "faces": [{"mask", "crossings": [c, e], "map": [[i, j, i2, j2], ...]}]}``.
    """
    return {
        "schema": "khsq.functor/1",
        "N": F.N,
        "meta": F.meta,
        "vertices": [
            {"mask": m, "gradings": list(F.vertices[m].gradings)} for m in sorted(F.vertices)
        ],
        "edges": [
            {"mask": m, "crossing": c, "pairs": [list(p) for p in F.edges[(m, c)].pairs()]}
            for (m, c) in sorted(F.edges)
        ],
        "faces": [
            {
                "mask": m,
                "crossings": [c, e],
                "map": [[*k, *v] for k, v in sorted(F.faces[(m, c, e)].items())],
            }
            for (m, c, e) in sorted(F.faces)
        ],
    }


def functor_from_json(data: dict | str) -> CubeFunctor:
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("schema") != "khsq.functor/1":
        raise ValueError(f"unknown functor schema {data.get('schema')!r}")
    verts = {
        v["mask"]: FinSet(tuple(range(len(v["gradings"]))), tuple(v["gradings"]))
        for v in data["vertices"]
    }
    edges = {}
    for e in data["edges"]:
        m, c = e["mask"], e["crossing"]
        edges[(m, c)] = Correspondence(
            verts[m], verts[m & ~(1 << c)], tuple((s, t, None) for s, t in e["pairs"])
        )
    faces = {}
    for f in data["faces"]:
        c, e = f["crossings"]
        faces[(f["mask"], c, e)] = {(a, b): (x, y) for a, b, x, y in f["map"]}
    return CubeFunctor(data["N"], verts, edges, faces, dict(data.get("meta", {})))
