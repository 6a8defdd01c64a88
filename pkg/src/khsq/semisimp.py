"""The augmented semi-simplicial object built from a cube functor.

Level ``n`` (``-1 <= n <= N-1``) is the disjoint union of the vertex sets over
all cube vertices with ``n+1`` crossings 1-smoothed; blocks are laid out in
colex order of the vertex, which for bitmasks is plain integer order.  Face
``a`` of a block over ``A`` drops the ``a``-th smallest crossing of ``A``.

Span elements of the single faces are numbered per level ("span ids"); a
double face element ``s`` in face pair ``a < b`` is carried as its left
factorization ``(q, p)`` with ``q`` in face ``a`` and ``p`` in face ``b-1``
one level down, together with the right factorization ``(q', p')`` through
face ``b`` and then face ``a``, the two being matched by the cube functor's
face bijection.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .burnside import CubeFunctor, FinSet, Correspondence, bits_of, check_coherence

__all__ = [
    "SemiSimplicialObject",
    "SpanElement",
    "DoubleFace",
    "SpanOrder",
    "Cmp",
    "lambda_of",
    "a_sub_b",
    "compare",
    "boundary_elements",
    "spans_tsv",
]


def a_sub_b(a: int, b: int) -> int:
    """Index of face ``a`` after face ``b`` has been applied first."""
    if a == b:
        raise ValueError("a_sub_b needs distinct indices")
    return a if a < b else a - 1


class Cmp(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class DoubleFace(NamedTuple):
    """One element of a double face span, by its two factorizations."""

    a: int
    b: int
    q: int  # face a, level n
    p: int  # face b-1, level n-1
    q2: int  # face b, level n
    p2: int  # face a, level n-1
    target: int


@dataclass(frozen=True)
class SpanElement:
    home: tuple[int, tuple[int, ...]]
    source: int
    target: int
    span_id: int | None = None
    left: tuple[int, int] | None = None
    right: tuple[int, int] | None = None


class _Level:
    __slots__ = ("n", "masks", "offset", "size", "block_of", "gradings",
                 "span_src", "span_tgt", "span_face", "edge_base", "out")

    def __init__(self, n: int):
        self.n = n
        self.masks: list[int] = []
        self.offset: dict[int, int] = {}
        self.size = 0
        self.block_of: list[int] = []
        self.gradings: list[int] = []
        self.span_src: list[int] = []
        self.span_tgt: list[int] = []
        self.span_face: list[int] = []
        self.edge_base: dict[tuple[int, int], int] = {}
        self.out: list[list[int]] = []


class SemiSimplicialObject:
    """Levels, single faces and double faces of the semi-simplicial object."""

    def __init__(self, F: CubeFunctor):
        self.F = F
        self.N = F.N
        self.n_minus = F.meta.get("n_minus", 0)
        self._levels: dict[int, _Level] = {}
        for n in range(-1, self.N):
            self._levels[n] = _Level(n)
        for mask in range(1 << self.N):
            L = self._levels[bin(mask).count("1") - 1]
            L.masks.append(mask)
            L.offset[mask] = L.size
            V = F.vertices[mask]
            L.size += len(V)
            L.block_of.extend([mask] * len(V))
            L.gradings.extend(V.gradings)
        for n in range(0, self.N):
            L, D = self._levels[n], self._levels[n - 1]
            L.out = [[] for _ in range(L.size)]
            for mask in L.masks:
                for a, c in enumerate(bits_of(mask)):
                    corr = F.edges[(mask, c)]
                    L.edge_base[(mask, c)] = len(L.span_src)
                    so, to = L.offset[mask], D.offset[mask & ~(1 << c)]
                    for s, t, _ in corr.elements:
                        sid = len(L.span_src)
                        L.span_src.append(so + s)
                        L.span_tgt.append(to + t)
                        L.span_face.append(a)
                        L.out[so + s].append(sid)
        self._double: dict[int, list[list[DoubleFace]]] = {}
        self._into: dict[int, dict[int, list[int]]] = {}

    # ---- levels

    @property
    def levels(self) -> dict[int, FinSet]:
        return {n: self.level(n) for n in self._levels}

    def level(self, n: int) -> FinSet:
        L = self._levels[n]
        elems = tuple(
            (m, i) for m in L.masks for i in range(len(self.F.vertices[m]))
        )
        return FinSet(elems, tuple(L.gradings))

    def size(self, n: int) -> int:
        L = self._levels.get(n)
        return L.size if L else 0

    def grading(self, n: int, g: int) -> int:
        return self._levels[n].gradings[g]

    def block(self, n: int, g: int) -> int:
        """Cube vertex (bitmask) of generator ``g`` at level ``n``."""
        return self._levels[n].block_of[g]

    def hom_degree(self, n: int) -> int:
        return n + 1 - self.n_minus

    def j_values(self) -> list[int]:
        return sorted({j for L in self._levels.values() for j in L.gradings})

    # ---- single faces

    def span_count(self, n: int) -> int:
        L = self._levels.get(n)
        return len(L.span_src) if L else 0

    def span(self, n: int, sid: int) -> tuple[int, int, int]:
        """``(face, source, target)`` of span id ``sid`` at level ``n``."""
        L = self._levels[n]
        return L.span_face[sid], L.span_src[sid], L.span_tgt[sid]

    def span_face(self, n: int) -> list[int]:
        return self._levels[n].span_face

    def span_src(self, n: int) -> list[int]:
        return self._levels[n].span_src

    def span_tgt(self, n: int) -> list[int]:
        return self._levels[n].span_tgt

    def out(self, n: int, z: int) -> list[int]:
        """Span ids with source ``z``, grouped by face, in base order."""
        return self._levels[n].out[z]

    def into(self, n: int, y: int | None) -> dict[int, list[int]] | list[int]:
        """Span ids of level ``n`` by target (the whole table for ``y=None``)."""
        table = self._into.get(n)
        if table is None:
            table = {}
            for sid, t in enumerate(self._levels[n].span_tgt):
                table.setdefault(t, []).append(sid)
            self._into[n] = table
        return table if y is None else table.get(y, [])

    def face(self, n: int, U: Sequence[int]) -> Correspondence:
        """The face span for ``|U| = 1`` or ``2`` as an explicit correspondence."""
        U = tuple(U)
        src = self.level(n)
        if len(U) == 1:
            L = self._levels[n]
            (a,) = U
            els = tuple(
                (L.span_src[i], L.span_tgt[i], None)
                for i in range(len(L.span_src))
                if L.span_face[i] == a
            )
            return Correspondence(src, self.level(n - 1), els)
        a, b = U
        els = tuple(
            (z, e.target, (e.q, e.p))
            for z in range(self.size(n))
            for e in self.double(n, z)
            if (e.a, e.b) == (a, b)
        )
        return Correspondence(src, self.level(n - 2), els)

    # ---- double faces

    def double(self, n: int, z: int) -> list[DoubleFace]:
        """All double face elements out of ``z`` at level ``n`` (``n >= 1``)."""
        table = self._double.get(n)
        if table is None:
            table = [None] * self.size(n)  # type: ignore[list-item]
            self._double[n] = table
        got = table[z]
        if got is None:
            got = self._build_double(n, z)
            table[z] = got
        return got

    def _build_double(self, n: int, z: int) -> list[DoubleFace]:
        L, D = self._levels[n], self._levels[n - 1]
        mask = L.block_of[z]
        cross = bits_of(mask)
        F = self.F
        out: list[DoubleFace] = []
        for q in L.out[z]:
            a = L.span_face[q]
            c = cross[a]
            mc = mask & ~(1 << c)
            i = q - L.edge_base[(mask, c)]
            for p in D.out[L.span_tgt[q]]:
                bm = D.span_face[p]
                if bm < a:
                    continue
                b = bm + 1
                e = cross[b]
                j = p - D.edge_base[(mc, e)]
                i2, j2 = F.faces[(mask, c, e)][(i, j)]
                me = mask & ~(1 << e)
                q2 = L.edge_base[(mask, e)] + i2
                p2 = D.edge_base[(me, c)] + j2
                tgt = D.span_tgt[p]
                if D.span_tgt[p2] != tgt or L.span_src[q2] != z:
                    raise AssertionError("face bijection does not preserve endpoints")
                out.append(DoubleFace(a, b, q, p, q2, p2, tgt))
        return out

    def span_element(self, n: int, e: DoubleFace, z: int) -> SpanElement:
        return SpanElement((n, (e.a, e.b)), z, e.target, None, (e.q, e.p), (e.q2, e.p2))


def lambda_of(F: CubeFunctor, check: bool = True) -> SemiSimplicialObject:
    if check:
        issues = check_coherence(F)
        if issues:
            raise ValueError(f"incoherent cube functor: {issues[0]}")
    return SemiSimplicialObject(F)


# ---------------------------------------------------------------- orders


class SpanOrder:
    """Total orders on the single faces, and the orders they induce.

    ``seed=None`` keeps the base order of each single face by (source,
    target); an integer seed replaces it with a seeded shuffle.
    """

    def __init__(self, X: SemiSimplicialObject, seed: int | None = None):
        self.X = X
        self.seed = seed
        rng = random.Random(seed) if seed is not None else None
        self._rank: dict[int, list[int]] = {}
        for n in range(0, X.N):
            face = X.span_face(n)
            rank = [0] * len(face)
            groups: dict[int, list[int]] = {}
            for sid, a in enumerate(face):
                groups.setdefault(a, []).append(sid)
            for a, ids in groups.items():
                if rng is not None:
                    ids = list(ids)
                    rng.shuffle(ids)
                for r, sid in enumerate(ids):
                    rank[sid] = r
            self._rank[n] = rank

    def rank(self, n: int, sid: int) -> int:
        return self._rank[n][sid]

    def key(self, n: int, sid: int) -> tuple[int, int]:
        """Position of a single-face element in the order on all faces."""
        return self.X.span_face(n)[sid], self._rank[n][sid]

    def keys(self, n: int) -> list[tuple[int, int]]:
        face = self.X.span_face(n)
        rank = self._rank[n]
        return list(zip(face, rank))

    def leftbreak(self, n: int, e: DoubleFace) -> tuple:
        return self.key(n, e.q), self.key(n - 1, e.p)

    def rightbreak(self, n: int, e: DoubleFace) -> tuple:
        return self.key(n, e.q2), self.key(n - 1, e.p2)


def compare(order: str, s: SpanElement, t: SpanElement, ranks: SpanOrder) -> Cmp:
    if s.home != t.home or len(s.home[1]) != 2:
        raise ValueError("compare needs two elements of the same double face")
    n = s.home[0]
    if order == "leftbreak":
        ks = (ranks.key(n, s.left[0]), ranks.key(n - 1, s.left[1]))
        kt = (ranks.key(n, t.left[0]), ranks.key(n - 1, t.left[1]))
    elif order == "rightbreak":
        ks = (ranks.key(n, s.right[0]), ranks.key(n - 1, s.right[1]))
        kt = (ranks.key(n, t.right[0]), ranks.key(n - 1, t.right[1]))
    else:
        raise ValueError(f"unknown order {order!r}")
    return Cmp((ks > kt) - (ks < kt))


def boundary_elements(
    X: SemiSimplicialObject,
    n: int,
    z: int,
    T: Iterable[int] | None,
    U: Sequence[int],
    order: SpanOrder | None = None,
) -> list[SpanElement]:
    """The part of face ``U`` out of ``z`` landing in ``T`` (all targets when
    ``T`` is ``None``), in base order for one face and left-break order for two."""
    order = order or SpanOrder(X)
    keep = None if T is None else set(T)
    U = tuple(U)
    if len(U) == 1:
        (a,) = U
        ids = [
            sid for sid in X.out(n, z)
            if X.span_face(n)[sid] == a and (keep is None or X.span_tgt(n)[sid] in keep)
        ]
        ids.sort(key=lambda sid: order.key(n, sid))
        return [SpanElement((n, U), z, X.span_tgt(n)[sid], sid) for sid in ids]
    if len(U) != 2 or U[0] >= U[1]:
        raise ValueError("U must be one index or an increasing pair")
    els = [
        e for e in X.double(n, z)
        if (e.a, e.b) == U and (keep is None or e.target in keep)
    ]
    els.sort(key=lambda e: order.leftbreak(n, e))
    return [X.span_element(n, e, z) for e in els]


def spans_tsv(X: SemiSimplicialObject, order: SpanOrder | None = None) -> str:
    """Single-face span tables, one row per span element."""
    order = order or SpanOrder(X)
    rows = ["level\tface\tspan\tsource\ttarget\trank\tvertex"]
    for n in range(0, X.N):
        for sid in range(X.span_count(n)):
            a, s, t = X.span(n, sid)
            rows.append(
                f"{n}\t{a}\t{sid}\t{s}\t{t}\t{order.rank(n, sid)}\t{X.block(n, s):b}"
            )
    return "\n".join(rows) + "\n"
