"""The Lipshitz-Sarkar second square via matchings, chords and cycles.

For ``z`` two levels above a cocycle, every double face element from ``z``
into the cocycle is drawn as a chord between its two face indices on the real
line.  The end at index ``a`` is the factorization through face ``a`` first,
i.e. a pair ``(q, p)`` with ``q`` a single face element out of ``z`` and ``p``
a face element from ``q``'s target into the cocycle; ends at one index are
ordered by ``(q, p)``.  A boundary matching pairs the face elements into the
cocycle from each ``y``; gluing chord ends ``(q, p)`` and ``(q, p')`` for
matched ``p, p'`` splits the chords into closed cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .f2algebra import Cochain, F2Complex
from .moransq import SqEvalContext
from .semisimp import DoubleFace

__all__ = [
    "Matching",
    "InvalidMatching",
    "Chord",
    "ChordPresentation",
    "Cycle",
    "MATCHINGS",
    "boundary_matching",
    "chord_presentation",
    "gamma_cycles",
    "crossing_pairs",
    "cycle_value",
    "sq2_ls",
    "chords_tsv",
    "chords_svg",
]

MATCHINGS = ("disjoint", "nested", "overlapping")


class InvalidMatching(ValueError):
    pass


@dataclass
class Matching:
    """Pairs of level ``n+1`` span ids, per ``y``, in the order on all faces.

    ``partner`` and ``first`` are only filled for pairings that cover every
    element exactly once; the overlapping path reading leaves ``valid`` false.
    """

    variant: str
    pairs: dict[int, list[tuple[int, int]]]
    valid: bool = True
    partner: dict[int, int] = field(default_factory=dict)
    first: set[int] = field(default_factory=set)

    def mate(self, p: int) -> int:
        if not self.valid:
            raise InvalidMatching(f"{self.variant} reading is not a pairing")
        return self.partner[p]


def _pairs_for(ids: list[int], variant: str) -> list[tuple[int, int]]:
    r = len(ids)
    if variant == "disjoint":
        return [(ids[i], ids[i + 1]) for i in range(0, r, 2)]
    if variant == "nested":
        return [(ids[i], ids[r - 1 - i]) for i in range(r // 2)]
    if variant == "overlapping":
        return [(ids[i], ids[i + 1]) for i in range(r - 1)]
    raise ValueError(f"unknown matching {variant!r}")


def boundary_matching(ctx: SqEvalContext, variant: str = "disjoint") -> Matching:
    X, n = ctx.X, ctx.n
    n1 = n + 1
    pairs: dict[int, list[tuple[int, int]]] = {}
    if n1 <= X.N - 1:
        src = X.span_src(n1)
        ys = sorted({src[p] for x in ctx.support for p in X.into(n1, x)})
        face = X.span_face(n1)
        for y in ys:
            ids = ctx.y_data(y)[0]
            if len(ids) % 2:
                raise ValueError(f"odd boundary count {len(ids)} at y={y}: not a cocycle")
            pl = _pairs_for(ids, variant)
            for s, t in pl:
                if face[s] > face[t]:
                    raise AssertionError("matched pair violates the face order constraint")
            pairs[y] = pl
    m = Matching(variant, pairs, valid=variant != "overlapping")
    if m.valid:
        for pl in pairs.values():
            for s, t in pl:
                m.partner[s] = t
                m.partner[t] = s
                m.first.add(s)
    return m


# ---------------------------------------------------------------- chords


@dataclass(frozen=True)
class Chord:
    element: DoubleFace
    a: int
    b: int
    left: tuple  # sort key of the end at a
    right: tuple  # sort key of the end at b
    left_pos: int = -1
    right_pos: int = -1


@dataclass
class ChordPresentation:
    z: int
    chords: list[Chord]
    ends: dict[tuple[int, int], tuple[int, int]]  # (q, p) -> (chord index, 0 left / 1 right)
    degenerate: bool = False

    def degree(self, a: int) -> int:
        return sum((c.a == a) + (c.b == a) for c in self.chords)

    def end_positions(self, i: int) -> tuple[int, int]:
        c = self.chords[i]
        return c.left_pos, c.right_pos


def chord_presentation(
    ctx: SqEvalContext, z: int, degenerate: bool = False, check: bool = True
) -> ChordPresentation:
    """Chords for ``z`` in level ``n+2``; with ``degenerate`` every end sits at
    its bare index (debug output only).  ``check`` asserts the even degrees a
    cocycle forces."""
    n2, n1 = ctx.n + 2, ctx.n + 1
    key = ctx.order.key
    raw = []
    for e in ctx.local(z).chords:
        left = (e.a, key(n2, e.q), key(n1, e.p))
        right = (e.b, key(n2, e.q2), key(n1, e.p2))
        raw.append((e, left, right))
    allends = sorted([r[1] for r in raw] + [r[2] for r in raw])
    pos = {k: i for i, k in enumerate(allends)}
    if len(pos) != len(allends):
        raise AssertionError("two chord ends share a position")
    chords = []
    ends: dict[tuple[int, int], tuple[int, int]] = {}
    for i, (e, left, right) in enumerate(raw):
        if degenerate:
            lp, rp = e.a, e.b
        else:
            lp, rp = pos[left], pos[right]
        chords.append(Chord(e, e.a, e.b, left, right, lp, rp))
        ends[(e.q, e.p)] = (i, 0)
        ends[(e.q2, e.p2)] = (i, 1)
    P = ChordPresentation(z, chords, ends, degenerate)
    if not check:
        return P
    deg: dict[int, int] = {}
    group: dict[int, int] = {}
    for (q, _), _ in ends.items():
        group[q] = group.get(q, 0) + 1
    for c in chords:
        deg[c.a] = deg.get(c.a, 0) + 1
        deg[c.b] = deg.get(c.b, 0) + 1
    bad = [a for a, v in deg.items() if v % 2] or [q for q, v in group.items() if v % 2]
    if bad:
        raise AssertionError(f"odd chord degree at z={z}: not a cocycle or a witness bug")
    return P


def _cross(c: Chord, d: Chord) -> bool:
    return (c.left_pos < d.left_pos < c.right_pos < d.right_pos) or (
        d.left_pos < c.left_pos < d.right_pos < c.right_pos
    )


def crossing_pairs(P: ChordPresentation) -> list[tuple[int, int]]:
    ch = P.chords
    return [(i, j) for i, j in combinations(range(len(ch)), 2) if _cross(ch[i], ch[j])]


# ---------------------------------------------------------------- cycles


@dataclass(frozen=True)
class Cycle:
    """Chords in traversal order; chord ``k`` runs from ``facets[k]`` to
    ``facets[k+1]`` and ``rightward[k]`` describes the turn at ``facets[k]``
    (arriving on chord ``k-1``, leaving on chord ``k``)."""

    chords: tuple[int, ...]
    facets: tuple[int, ...]
    rightward: tuple[bool, ...]
    first_in_pair: tuple[bool, ...]


def gamma_cycles(ctx: SqEvalContext, z: int, m: Matching, P: ChordPresentation | None = None) -> list[Cycle]:
    P = P or chord_presentation(ctx, z)
    ch = P.chords
    seen = [False] * len(ch)
    out: list[Cycle] = []

    def end_of(i: int, side: int) -> tuple[int, int]:
        e = ch[i].element
        return (e.q, e.p) if side == 0 else (e.q2, e.p2)

    def pos_of(i: int, side: int) -> int:
        return ch[i].left_pos if side == 0 else ch[i].right_pos

    for start in range(len(ch)):
        if seen[start]:
            continue
        order, facets, turns, firsts = [], [], [], []
        i, side = start, 0  # enter at the left end
        while True:
            if seen[i]:
                if (i, side) != (start, 0):
                    raise InvalidMatching(f"walk from chord {start} does not close at z={z}")
                break
            seen[i] = True
            order.append(i)
            facets.append(ch[i].a if side == 0 else ch[i].b)
            q, p = end_of(i, 1 - side)
            mate = m.mate(p)
            nxt = P.ends.get((q, mate))
            if nxt is None:
                raise InvalidMatching(f"chord end ({q}, {mate}) is not glued at z={z}")
            j, jside = nxt
            turns.append(pos_of(i, 1 - side) < pos_of(j, jside))
            firsts.append(p in m.first)
            i, side = j, jside
        # turns[k] is the turn after chord k; rotate so it sits at the chord's start
        rightward = tuple(turns[-1:] + turns[:-1])
        first = tuple(firsts[-1:] + firsts[:-1])
        out.append(Cycle(tuple(order), tuple(facets), rightward, first))
    return out


def cycle_value(K: Cycle) -> int:
    """``1 + #{a -> right b -> c, a > b} + #{a -> left b -> c, a < b}``."""
    m = len(K.facets)
    total = 1
    for k in range(m):
        a, b = K.facets[k - 1], K.facets[k]
        if K.rightward[k] and a > b:
            total += 1
        elif not K.rightward[k] and a < b:
            total += 1
    return total


def _ls_value(ctx: SqEvalContext, z: int, m: Matching) -> int:
    L = ctx.local(z)
    lin = sum(a * b * v for (a, b), v in L.m.items())
    half = sum((a + b) * v for (a, b), v in L.m.items())
    if half % 2:
        raise AssertionError(f"odd weighted face count at z={z}")
    cyc = sum(cycle_value(K) for K in gamma_cycles(ctx, z, m))
    return lin + half // 2 + cyc


def sq2_ls(ctx: SqEvalContext, m: Matching | None = None, C: F2Complex | None = None) -> Cochain:
    m = m or boundary_matching(ctx)
    out = ctx.evaluate(lambda c, z: _ls_value(c, z, m))
    if C is not None and C.delta(out):
        raise AssertionError(f"LS square of a degree {ctx.n} cocycle is not a cocycle")
    return out


# ---------------------------------------------------------------- dumps


def chords_tsv(P: ChordPresentation) -> str:
    rows = ["chord\ta\tb\tleft_pos\tright_pos\tq\tp\tq2\tp2"]
    for i, c in enumerate(P.chords):
        e = c.element
        rows.append(f"{i}\t{c.a}\t{c.b}\t{c.left_pos}\t{c.right_pos}\t{e.q}\t{e.p}\t{e.q2}\t{e.p2}")
    return "\n".join(rows) + "\n"


def chords_svg(P: ChordPresentation, unit: int = 20) -> str:
    """Half-plane picture: ends on a baseline, chords as semicircles."""
    npos = 2 * len(P.chords)
    width = unit * (npos + 1)
    height = unit * (npos // 2 + 2)
    base = height - unit
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<line x1="0" y1="{base}" x2="{width}" y2="{base}" stroke="black"/>',
    ]
    for c in P.chords:
        x1, x2 = unit * (c.left_pos + 1), unit * (c.right_pos + 1)
        r = (x2 - x1) / 2
        parts.append(
            f'<path d="M {x1} {base} A {r} {r} 0 0 1 {x2} {base}" fill="none" stroke="black"/>'
        )
        parts.append(f'<text x="{x1}" y="{base + unit * 0.8}" font-size="10">{c.a}</text>')
        parts.append(f'<text x="{x2}" y="{base + unit * 0.8}" font-size="10">{c.b}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
