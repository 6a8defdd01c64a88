"""Morán's second square, evaluated through its three-term expansion.

Everything is computed locally at a generator ``z`` two levels above the
cocycle: the counts ``m_ab`` of double face elements from ``z`` into the
cocycle, the single faces out of ``z``, and for each of their targets ``y``
the face elements from ``y`` into the cocycle.  Counting is done over the
integers and reduced mod 2 at the very end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .f2algebra import Cochain, F2Complex, bockstein
from .semisimp import DoubleFace, SemiSimplicialObject, SpanOrder

__all__ = [
    "SqEvalContext",
    "ZLocal",
    "term_I",
    "term_II",
    "term_III",
    "sq2_moran",
    "sq1",
    "sq0",
    "term_I_from_counts",
]


@dataclass
class ZLocal:
    """Local data at one generator ``z`` of level ``n+2``.

    ``faces[c]`` lists the span ids of face ``c`` out of ``z`` in base order;
    ``chords`` are the double face elements landing in the cocycle, sorted by
    face pair and left-break order; ``m[(a, b)]`` counts them per face pair.
    """

    z: int
    k: int  # number of faces of z, i.e. n + 3
    faces: list[list[int]]
    chords: list[DoubleFace]
    m: dict[tuple[int, int], int]

    def mab(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        return self.m.get((a, b), 0)


@dataclass
class SqEvalContext:
    X: SemiSimplicialObject
    order: SpanOrder
    alpha: Cochain
    III_order: str = "rightbreak"  # "leftbreak" only for fault injection
    _ycache: dict = field(default_factory=dict, repr=False)
    _zcache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.n = self.alpha.n
        self.parity = self.n % 2
        self.support = self.alpha.support
        if self.n + 2 > self.X.N - 1:
            self.top = 0
        else:
            self.top = self.X.size(self.n + 2)

    # ---- level n+1

    def y_data(self, y: int) -> tuple[list[int], list[int]]:
        """Face elements from ``y`` into the cocycle in the order on all
        faces, and their counts per face."""
        got = self._ycache.get(y)
        if got is None:
            n1 = self.n + 1
            tgt = self.X.span_tgt(n1)
            face = self.X.span_face(n1)
            ids = [p for p in self.X.out(n1, y) if tgt[p] in self.support]
            ids.sort(key=lambda p: self.order.key(n1, p))
            counts = [0] * (n1 + 1)
            for p in ids:
                counts[face[p]] += 1
            got = (ids, counts)
            self._ycache[y] = got
        return got

    def m_y(self, y: int) -> list[int]:
        return self.y_data(y)[1]

    def m_lift(self, sid: int) -> list[int]:
        """``m_{a_c}(s_out)`` for ``s`` in face ``c`` of ``z``, indexed by
        ``a`` in ``0..n+2``; the entry at ``a = c`` is 0."""
        n2 = self.n + 2
        c = self.X.span_face(n2)[sid]
        m = self.m_y(self.X.span_tgt(n2)[sid])
        return m[:c] + [0] + m[c:]

    def lifted(self, z: int) -> list[list[list[int]]]:
        """Per face ``c`` of ``z``, the ``m_lift`` vectors of its single face
        elements in order."""
        key = ("lift", z)
        got = self._zcache.get(key)
        if got is None:
            got = [[self.m_lift(s) for s in lst] for lst in self.local(z).faces]
            self._zcache[key] = got
        return got

    # ---- level n+2

    def candidates(self) -> list[int]:
        """Generators of level ``n+2`` with some double face into the cocycle
        (every evaluated quantity vanishes elsewhere)."""
        if not self.top:
            return []
        got = self._zcache.get("candidates")
        if got is not None:
            return got
        X, n = self.X, self.n
        into1 = X.into(n + 1, None)
        into2 = X.into(n + 2, None)
        src1, src2 = X.span_src(n + 1), X.span_src(n + 2)
        ys = {src1[p] for x in self.support for p in into1.get(x, ())}
        zs = {src2[q] for y in ys for q in into2.get(y, ())}
        got = self._zcache["candidates"] = sorted(zs)
        return got

    def local(self, z: int) -> ZLocal:
        got = self._zcache.get(z)
        if got is None:
            n2 = self.n + 2
            X = self.X
            k = n2 + 1
            faces: list[list[int]] = [[] for _ in range(k)]
            fc = X.span_face(n2)
            for q in X.out(n2, z):
                faces[fc[q]].append(q)
            for lst in faces:
                lst.sort(key=lambda q: self.order.rank(n2, q))
            chords = [e for e in X.double(n2, z) if e.target in self.support]
            chords.sort(key=lambda e: ((e.a, e.b), self.order.leftbreak(n2, e)))
            m: dict[tuple[int, int], int] = {}
            for e in chords:
                m[(e.a, e.b)] = m.get((e.a, e.b), 0) + 1
            got = ZLocal(z, k, faces, chords, m)
            self._zcache[z] = got
        return got

    def evaluate(self, fn) -> Cochain:
        """Cochain of level ``n+2`` whose value at ``z`` is ``fn(self, z)`` mod 2."""
        vals = {}
        for z in self.candidates():
            v = fn(self, z)
            if v & 1:
                vals[z] = 1
        return Cochain(self.n + 2, self.alpha.j, frozenset(vals))


def term_I_from_counts(m: dict[tuple[int, int], int]) -> int:
    """The six parity-class sums of products of double face counts (integer)."""
    pairs = [(p, v) for p, v in m.items() if v]
    total = 0
    for (P, u), (Q, v) in combinations(pairs, 2):
        if len({*P, *Q}) != 4:
            continue
        i1, i2, i3, i4 = sorted((*P, *Q))
        ev = [x % 2 == 0 for x in (i1, i2, i3, i4)]
        S = {P, Q}
        if S == {(i1, i4), (i2, i3)}:
            hit = (ev[0] and ev[1] and not ev[2] and not ev[3]) or (
                ev[2] and ev[3] and not ev[0] and not ev[1]
            )
        elif S == {(i1, i2), (i3, i4)}:
            hit = (ev[0] and ev[3] and not ev[1] and not ev[2]) or (
                ev[1] and ev[2] and not ev[0] and not ev[3]
            )
        else:
            hit = all(ev) or not any(ev)
        if hit:
            total += u * v
    return total


def term_I(ctx: SqEvalContext, z: int) -> int:
    return term_I_from_counts(ctx.local(z).m) & 1


def _pair_products(ms: list[int], mt: list[int]) -> int:
    """sum over a<b both even of ms[a]*mt[b], plus over a>b both odd."""
    total = 0
    run_even = 0
    for b in range(0, len(ms), 2):
        total += run_even * mt[b]
        run_even += ms[b]
    run_odd = 0
    for a in range(1, len(ms), 2):
        total += run_odd * ms[a]
        run_odd += mt[a]
    return total


def term_II_value(ctx: SqEvalContext, z: int) -> int:
    L = ctx.local(z)
    n2 = ctx.n + 2
    tgt = ctx.X.span_tgt(n2)
    total = 0
    for lst in L.faces:
        for i, s in enumerate(lst):
            ms = ctx.m_y(tgt[s])
            for t in lst[i + 1 :]:
                total += _pair_products(ms, ctx.m_y(tgt[t]))
    return total


def term_II(ctx: SqEvalContext, z: int) -> int:
    return term_II_value(ctx, z) & 1


def term_III_value(ctx: SqEvalContext, z: int) -> int:
    L = ctx.local(z)
    n2 = ctx.n + 2
    second = ctx.order.rightbreak if ctx.III_order == "rightbreak" else ctx.order.leftbreak
    total = 0
    groups: dict[tuple[int, int], list[DoubleFace]] = {}
    for e in L.chords:
        groups.setdefault((e.a, e.b), []).append(e)
    for els in groups.values():
        if len(els) < 2:
            continue
        lk = [ctx.order.leftbreak(n2, e) for e in els]
        rk = [second(n2, e) for e in els]
        for i, j in combinations(range(len(els)), 2):
            if (lk[i] < lk[j]) != (rk[i] < rk[j]):
                total += 1
    return total


def term_III(ctx: SqEvalContext, z: int) -> int:
    return term_III_value(ctx, z) & 1


def _sq2_value(ctx: SqEvalContext, z: int) -> int:
    return term_I_from_counts(ctx.local(z).m) + term_II_value(ctx, z) + term_III_value(ctx, z)


def sq2_moran(ctx: SqEvalContext, C: F2Complex | None = None) -> Cochain:
    out = ctx.evaluate(_sq2_value)
    if C is not None and C.delta(out):
        raise AssertionError(
            f"Moran square of a degree {ctx.n} cocycle is not a cocycle"
            + (" (odd degree: the even-degree expansion was used)" if ctx.parity else "")
        )
    return out


def sq1(ctx: SqEvalContext, C: F2Complex) -> Cochain:
    return bockstein(C, ctx.alpha)


def sq0(ctx: SqEvalContext) -> Cochain:
    return ctx.alpha
