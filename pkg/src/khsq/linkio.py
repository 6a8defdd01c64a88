"""PD codes, oriented link diagrams and their cube of resolutions.

Crossings are numbered ``0..N-1`` in the order they appear in the PD code, and
a cube vertex is a set of crossings that receive the 1-smoothing.  Internally
vertices are carried around as integer bitmasks (bit ``k`` set when crossing
``k`` is 1-smoothed); the public helpers accept any iterable of crossing
indices as well.

Each PD tuple ``X(a, b, c, d)`` lists the incoming under-strand first and then
the remaining arcs counterclockwise.  The 0-smoothing joins ``a-b`` and
``c-d``; the 1-smoothing joins ``a-d`` and ``b-c``.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "PDParseError",
    "PDCode",
    "LinkDiagram",
    "Resolution",
    "EdgeType",
    "parse_pd",
    "format_pd",
    "from_crossings",
    "pd_from_braid",
    "mirror",
    "resolve",
    "edge_type",
    "as_mask",
    "ladybug_right_arcs",
]

# slot partner under each smoothing
_SMOOTH = (
    (1, 0, 3, 2),  # 0-smoothing: a-b, c-d
    (3, 2, 1, 0),  # 1-smoothing: a-d, b-c
)


class PDParseError(ValueError):
    """Malformed or inconsistent PD input.  ``position`` is a character
    offset into the parsed text, or ``None`` for whole-code problems."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" (at offset {position})" if position is not None else ""
        super().__init__(message + where)


@dataclass(frozen=True)
class PDCode:
    crossings: tuple[tuple[int, int, int, int], ...]
    unknots: int = 0

    @property
    def labels(self) -> list[int]:
        return sorted({x for t in self.crossings for x in t})


class EdgeType(enum.Enum):
    MERGE = "merge"
    SPLIT = "split"


@dataclass(frozen=True)
class Resolution:
    """Circles of one cube vertex, each a cyclic tuple of arc labels.

    Circles are sorted by their minimal arc label; split unknot components
    (which carry no arcs) come last as empty tuples.
    """

    vertex: frozenset[int]
    circles: tuple[tuple[int, ...], ...]

    @property
    def circle_count(self) -> int:
        return len(self.circles)

    @cached_property
    def arc_circle(self) -> dict[int, int]:
        return {arc: i for i, c in enumerate(self.circles) for arc in c}


@dataclass(frozen=True)
class LinkDiagram:
    pd: PDCode
    signs: tuple[int, ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def N(self) -> int:
        return len(self.pd.crossings)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @cached_property
    def arc_ends(self) -> dict[int, tuple[tuple[int, int], tuple[int, int]]]:
        ends: dict[int, list[tuple[int, int]]] = {}
        for k, t in enumerate(self.pd.crossings):
            for slot, lab in enumerate(t):
                ends.setdefault(lab, []).append((k, slot))
        return {lab: (e[0], e[1]) for lab, e in ends.items()}

    def resolution(self, mask: int) -> Resolution:
        """Cached :func:`resolve` keyed by bitmask."""
        res = self._cache.get(mask)
        if res is None:
            res = _trace(self, mask)
            self._cache[mask] = res
        return res


def as_mask(A: Iterable[int] | int) -> int:
    if isinstance(A, int):
        return A
    mask = 0
    for k in A:
        mask |= 1 << k
    return mask


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(PD)\s*[\[(]|(X)\s*[\[(]|(-?\d+)|([,\])])|(\S))")


def parse_pd(text: str, unknots: int | None = None) -> LinkDiagram:
    """Parse ``PD[X(a,b,c,d),...]`` text, optionally preceded by a header
    line ``unknots=k`` adding ``k`` split unknot components."""
    header_unknots = 0
    body_offset = 0
    lines = text.splitlines(keepends=True)
    for line in lines:
        stripped = line.strip()
        m = re.fullmatch(r"unknots\s*=\s*(\d+)", stripped)
        if m:
            header_unknots = int(m.group(1))
            body_offset += len(line)
            continue
        if not stripped or stripped.startswith("#"):
            body_offset += len(line)
            continue
        break
    body = text[body_offset:]
    if unknots is None:
        unknots = header_unknots
    crossings = _parse_body(body, body_offset)
    if not crossings and unknots == 0:
        raise PDParseError("a 0-crossing diagram needs an explicit unknots=k header")
    return from_crossings(crossings, unknots)


def _parse_body(body: str, offset: int) -> list[tuple[int, int, int, int]]:
    pos = 0
    tokens: list[tuple[str, str, int]] = []
    while pos < len(body):
        m = _TOKEN.match(body, pos)
        if m is None or m.end() == pos:
            break
        kind = next(i for i in range(1, 6) if m.group(i) is not None)
        val = m.group(kind)
        tokens.append((("PD", "X", "INT", "PUNCT", "BAD")[kind - 1], val, offset + m.start(kind)))
        pos = m.end()
    if body[pos:].strip():
        raise PDParseError("unexpected trailing text", offset + pos)
    if not tokens:
        raise PDParseError("empty input", offset)

    it = iter(tokens)

    def nxt() -> tuple[str, str, int]:
        try:
            return next(it)
        except StopIteration:
            raise PDParseError("unexpected end of input", offset + len(body)) from None

    kind, val, at = nxt()
    if kind != "PD":
        raise PDParseError(f"expected 'PD[' but found {val!r}", at)
    crossings: list[tuple[int, int, int, int]] = []
    kind, val, at = nxt()
    if kind == "PUNCT" and val == "]":
        pass
    else:
        while True:
            if kind != "X":
                raise PDParseError(f"expected 'X(' but found {val!r}", at)
            start = at
            entries: list[int] = []
            while True:
                kind, val, at = nxt()
                if kind != "INT":
                    raise PDParseError(f"expected an arc label but found {val!r}", at)
                lab = int(val)
                if lab <= 0:
                    raise PDParseError(f"arc labels must be positive, got {lab}", at)
                entries.append(lab)
                kind, val, at = nxt()
                if kind == "PUNCT" and val == ",":
                    continue
                if kind == "PUNCT" and val in ")]":
                    break
                raise PDParseError(f"unexpected token {val!r}", at)
            if len(entries) != 4:
                raise PDParseError(
                    f"crossing tuple has {len(entries)} entries, expected 4", start
                )
            crossings.append(tuple(entries))  # type: ignore[arg-type]
            kind, val, at = nxt()
            if kind == "PUNCT" and val == ",":
                kind, val, at = nxt()
                continue
            if kind == "PUNCT" and val == "]":
                break
            raise PDParseError(f"unexpected token {val!r}", at)
    for kind, val, at in it:
        raise PDParseError(f"unexpected token {val!r} after closing bracket", at)
    return crossings


def from_crossings(
    crossings: Sequence[Sequence[int]], unknots: int = 0
) -> LinkDiagram:
    """Validate raw PD tuples and derive crossing signs from orientations."""
    tuples = tuple(tuple(int(x) for x in t) for t in crossings)
    for k, t in enumerate(tuples):
        if len(t) != 4:
            raise PDParseError(f"crossing {k} has {len(t)} entries, expected 4")
    counts: dict[int, int] = {}
    for t in tuples:
        for lab in t:
            counts[lab] = counts.get(lab, 0) + 1
    for lab, c in sorted(counts.items()):
        if c != 2:
            raise PDParseError(f"arc label {lab} appears {c} times, expected 2")
    if sorted(counts) != list(range(1, 2 * len(tuples) + 1)):
        raise PDParseError(f"arc labels must be exactly 1..{2 * len(tuples)}")
    if unknots < 0:
        raise PDParseError("unknots must be non-negative")
    pd = PDCode(tuples, unknots)
    return LinkDiagram(pd, _orient(pd))


def _orient(pd: PDCode) -> tuple[int, ...]:
    """Crossing signs from strand orientations.

    Under-strands are oriented by the PD convention; over-strand directions
    are propagated along arcs (each arc has one head and one tail).  Components
    that only pass over are oriented by consecutive labels.
    """
    n = len(pd.crossings)
    ends: dict[int, list[tuple[int, int]]] = {}
    for k, t in enumerate(pd.crossings):
        for slot, lab in enumerate(t):
            ends.setdefault(lab, []).append((k, slot))
    # over[k] = +1 when the over-strand runs d -> b (positive crossing)
    over: list[int | None] = [None] * n

    def is_head(k: int, slot: int) -> bool | None:
        if slot == 0:
            return True
        if slot == 2:
            return False
        if over[k] is None:
            return None
        return (slot == 3) == (over[k] == 1)

    def settle(k: int, slot: int, head: bool) -> None:
        # make (k, slot) a head (or tail) by choosing over[k]
        want = 1 if (slot == 3) == head else -1
        if over[k] is None:
            over[k] = want
            queue.append(k)
        elif over[k] != want:
            raise PDParseError(f"orientation inconsistency at crossing {k}")

    queue: deque[int] = deque()

    def propagate_arc(lab: int) -> None:
        e0, e1 = ends[lab]
        h0, h1 = is_head(*e0), is_head(*e1)
        if h0 is None and h1 is None:
            return
        if h0 is not None and h1 is not None:
            if h0 == h1:
                raise PDParseError(
                    f"orientation inconsistency: arc {lab} has two "
                    f"{'heads' if h0 else 'tails'} (crossings {e0[0]}, {e1[0]})"
                )
            return
        if h0 is None:
            settle(e0[0], e0[1], not h1)
        else:
            settle(e1[0], e1[1], not h0)

    for lab in ends:
        propagate_arc(lab)

    def drain() -> None:
        while queue:
            k = queue.popleft()
            for lab in set(pd.crossings[k]):
                propagate_arc(lab)

    drain()
    for k in range(n):
        if over[k] is None:
            b, d = pd.crossings[k][1], pd.crossings[k][3]
            over[k] = 1 if (b - d == 1 or d - b > 1) else -1
            queue.append(k)
            drain()
    for lab in ends:
        propagate_arc(lab)
    return tuple(int(o) for o in over)  # type: ignore[arg-type]


def format_pd(d: LinkDiagram) -> str:
    head = f"unknots={d.pd.unknots}\n" if d.pd.unknots else ""
    body = ",".join("X(%d,%d,%d,%d)" % t for t in d.pd.crossings)
    return f"{head}PD[{body}]"


def mirror(d: LinkDiagram) -> LinkDiagram:
    """Swap over and under at every crossing."""
    out = []
    for (a, b, c, e), s in zip(d.pd.crossings, d.signs):
        # the old over-strand becomes the under-strand; start at its incoming end
        out.append((e, a, b, c) if s > 0 else (b, c, e, a))
    m = from_crossings(out, d.pd.unknots)
    assert all(x == -y for x, y in zip(m.signs, d.signs))
    return m


def pd_from_braid(word: Sequence[int], strands: int | None = None) -> LinkDiagram:
    """PD code of a braid closure.  ``word`` uses ``i`` for the generator
    crossing strands ``i`` and ``i+1`` positively and ``-i`` negatively."""
    if not word:
        raise ValueError("empty braid word")
    if strands is None:
        strands = max(abs(g) for g in word) + 1
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    fresh = iter(range(1, 10**9))
    bottom = [next(fresh) for _ in range(strands)]
    for lab in bottom:
        parent[lab] = lab
    cur = list(bottom)
    raw: list[tuple[int, int, int, int]] = []
    for g in word:
        i = abs(g) - 1
        if not 0 <= i < strands - 1:
            raise ValueError(f"generator {g} out of range for {strands} strands")
        left_in, right_in = cur[i], cur[i + 1]
        left_out, right_out = next(fresh), next(fresh)
        parent[left_out] = left_out
        parent[right_out] = right_out
        if g > 0:
            # over: left -> right, under: right -> left
            raw.append((right_in, right_out, left_out, left_in))
        else:
            raw.append((left_in, right_in, right_out, left_out))
        cur[i], cur[i + 1] = left_out, right_out
    for top, bot in zip(cur, bottom):
        parent[find(top)] = find(bot)
    canon = {lab: find(lab) for lab in parent}
    used = sorted({canon[x] for t in raw for x in t})
    if len(used) != 2 * len(raw):
        raise ValueError("braid closure has a strand without crossings")
    relabel = {lab: i + 1 for i, lab in enumerate(used)}
    return from_crossings([tuple(relabel[canon[x]] for x in t) for t in raw])


# ------------------------------------------------------------- resolutions


def _trace(d: LinkDiagram, mask: int) -> Resolution:
    pd = d.pd.crossings
    ends = d.arc_ends
    seen: set[int] = set()
    circles: list[tuple[int, ...]] = []
    for start in sorted(ends):
        if start in seen:
            continue
        cyc: list[int] = []
        lab = start
        k, slot = ends[start][1]
        while True:
            cyc.append(lab)
            seen.add(lab)
            slot2 = _SMOOTH[(mask >> k) & 1][slot]
            lab = pd[k][slot2]
            e0, e1 = ends[lab]
            k, slot = e1 if e0 == (k, slot2) else e0
            if lab == start:
                break
        circles.append(tuple(cyc))
    circles.sort(key=min)
    circles.extend(() for _ in range(d.pd.unknots))
    verts = frozenset(k for k in range(d.N) if (mask >> k) & 1)
    return Resolution(verts, tuple(circles))


def resolve(d: LinkDiagram, A: Iterable[int] | int) -> Resolution:
    mask = as_mask(A)
    if mask >> d.N:
        raise ValueError(f"vertex {sorted(_bits(mask))} is not a subset of the crossings")
    return d.resolution(mask)


def _bits(mask: int) -> list[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def edge_type(d: LinkDiagram, A: Iterable[int] | int, c: int) -> EdgeType:
    mask = as_mask(A)
    if (mask >> c) & 1:
        raise ValueError(f"crossing {c} already 1-smoothed")
    before = d.resolution(mask).circle_count
    after = d.resolution(mask | (1 << c)).circle_count
    if after == before - 1:
        return EdgeType.MERGE
    if after == before + 1:
        return EdgeType.SPLIT
    raise AssertionError(f"circle count jumped from {before} to {after} across crossing {c}")


def ladybug_right_arcs(
    d: LinkDiagram, mask: int, c: int, e: int
) -> tuple[frozenset[int], frozenset[int]]:
    """The right pair of a ladybug configuration at vertex ``mask``.

    Both crossings ``c`` and ``e`` are 0-smoothed at ``mask`` and their surgery
    arcs have interleaved feet on one circle.  Walking along a surgery arc
    towards the circle, the piece of circle on the right leaves the foot
    through slot 0 (foot on the a-b strand) or slot 2 (foot on the c-d strand).
    Returns the arc labels of the two right-hand pieces.
    """
    pd = d.pd.crossings
    ends = d.arc_ends
    feet = {c, e}

    def walk(k: int, slot: int) -> tuple[frozenset[int], tuple[int, int]]:
        labs = []
        while True:
            lab = pd[k][slot]
            labs.append(lab)
            e0, e1 = ends[lab]
            k, s = e1 if e0 == (k, slot) else e0
            if k in feet:
                return frozenset(labs), (k, s)
            slot = _SMOOTH[(mask >> k) & 1][s]

    pieces = []
    for k in (c, e):
        for slot in (0, 2):
            labs, (k2, s2) = walk(k, slot)
            if k2 == k or s2 not in (0, 2):
                raise AssertionError(
                    f"crossings {c},{e} at vertex {mask:b} are not a ladybug configuration"
                )
            pieces.append(labs)
    first, second = {pieces[0], pieces[1]}, {pieces[2], pieces[3]}
    if first != second or len(first) != 2:
        raise AssertionError("right pair is not consistent from both surgery arcs")
    return pieces[0], pieces[1]
