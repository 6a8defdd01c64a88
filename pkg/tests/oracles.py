"""Independent reference computations used by the tests.

Nothing here imports the cube functor or the semi-simplicial machinery: the
Khovanov complex is rebuilt from the PD code with the usual Frobenius algebra
maps and the sign ``(-1)^{#1-smoothed crossings before c}``.
"""

from __future__ import annotations

from itertools import combinations


def circles(pd, mask: int, unknots: int = 0) -> list[frozenset]:
    """Circles of a resolution as sets of arc labels (union-find)."""
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        parent[find(x)] = find(y)

    for k, (a, b, c, d) in enumerate(pd):
        if (mask >> k) & 1:
            union(a, d)
            union(b, c)
        else:
            union(a, b)
            union(c, d)
    groups: dict = {}
    for x in list(parent):
        groups.setdefault(find(x), set()).add(x)
    out = sorted((frozenset(g) for g in groups.values()), key=min)
    out += [frozenset({("unknot", i)}) for i in range(unknots)]
    return out


class TQFTComplex:
    """Integral Khovanov cochain complex, bigraded by ``(i, j)``.

    A generator is ``(mask, labels)`` where ``labels[i]`` is +1 or -1 for the
    i-th circle; ``+1`` carries quantum degree +1.
    """

    def __init__(self, pd, signs, unknots: int = 0):
        self.pd = [tuple(t) for t in pd]
        self.N = N = len(self.pd)
        self.n_plus = sum(1 for s in signs if s > 0)
        self.n_minus = N - self.n_plus
        self.circ = {m: circles(self.pd, m, unknots) for m in range(1 << N)}
        self.gens: dict[tuple[int, int], list] = {}
        for m, cs in self.circ.items():
            h = bin(m).count("1")
            for labels in _labelings(len(cs)):
                key = self.degree(m, labels)
                self.gens.setdefault(key, []).append((m, labels))
        self.index = {g: k for lst in self.gens.values() for k, g in enumerate(lst)}

    def degree(self, m: int, labels) -> tuple[int, int]:
        h = bin(m).count("1")
        return h - self.n_minus, sum(labels) + h + self.n_plus - 2 * self.n_minus

    def image(self, m: int, labels, c: int) -> list[tuple[tuple, int]]:
        """Edge map across crossing ``c`` (0 -> 1) without the sign."""
        src, dst = self.circ[m], self.circ[m | (1 << c)]
        kept = {s: labels[i] for i, s in enumerate(src) if s in dst}
        gone = [i for i, s in enumerate(src) if s not in dst]
        new = [i for i, s in enumerate(dst) if s not in src]
        base = [kept.get(s) for s in dst]
        outs = []
        if len(gone) == 2 and len(new) == 1:  # merge
            x, y = labels[gone[0]], labels[gone[1]]
            if x == y == -1:
                return []
            base[new[0]] = min(x, y)
            outs.append((tuple(base), 1))
        elif len(gone) == 1 and len(new) == 2:  # split
            x = labels[gone[0]]
            i, j = new
            pairs = [(-1, -1)] if x == -1 else [(1, -1), (-1, 1)]
            for u, v in pairs:
                b = list(base)
                b[i], b[j] = u, v
                outs.append((tuple(b), 1))
        else:
            raise AssertionError("edge is neither a merge nor a split")
        return outs

    def matrix(self, i: int, j: int) -> list[dict[int, int]]:
        """Columns of ``d: C^{i,j} -> C^{i+1,j}`` as ``{row: coefficient}``."""
        cols = []
        for m, labels in self.gens.get((i, j), []):
            col: dict[int, int] = {}
            for c in range(self.N):
                if (m >> c) & 1:
                    continue
                sign = -1 if bin(m & ((1 << c) - 1)).count("1") % 2 else 1
                for lab, coef in self.image(m, labels, c):
                    r = self.index[(m | (1 << c), lab)]
                    col[r] = col.get(r, 0) + sign * coef
            cols.append({r: v for r, v in col.items() if v})
        return cols

    def f2_dims(self) -> dict[tuple[int, int], int]:
        rank = {k: f2_rank(self.matrix(*k)) for k in self.gens}
        out = {}
        for (i, j), g in self.gens.items():
            d = len(g) - rank[(i, j)] - rank.get((i - 1, j), 0)
            if d:
                out[(i, j)] = d
        return out

    def bockstein_ranks(self) -> dict[tuple[int, int], int]:
        """Rank of ``Sq^1: Kh^{i,j} -> Kh^{i+1,j}`` as the number of
        ``Z/2`` summands of ``H^{i+1,j}(Z)``, read from ``d^i`` over ``Z/4``."""
        out = {}
        for (i, j) in self.gens:
            r = exact_two_divisors(self.matrix(i, j))
            if r:
                out[(i, j)] = r
        return out


def _labelings(k: int):
    for bits in range(1 << k):
        yield tuple(1 if (bits >> (k - 1 - t)) & 1 else -1 for t in range(k))


def f2_rank(cols: list[dict[int, int]]) -> int:
    piv: dict[int, int] = {}
    for col in cols:
        v = 0
        for r, c in col.items():
            if c & 1:
                v |= 1 << r
        while v:
            top = v.bit_length() - 1
            if top not in piv:
                piv[top] = v
                break
            v ^= piv[top]
    return len(piv)


def exact_two_divisors(cols: list[dict[int, int]]) -> int:
    """Number of elementary divisors with 2-adic valuation exactly one."""
    rows = sorted({r for col in cols for r in col})
    where = {r: k for k, r in enumerate(rows)}
    M = [[0] * len(cols) for _ in rows]
    for c, col in enumerate(cols):
        for r, v in col.items():
            M[where[r]][c] = v % 4
    live_r, live_c = set(range(len(rows))), set(range(len(cols)))
    while True:
        pivot = next(((r, c) for r in live_r for c in live_c if M[r][c] & 1), None)
        if pivot is None:
            break
        r0, c0 = pivot
        inv = M[r0][c0]  # odd residues are their own inverses mod 4
        for r in live_r - {r0}:
            f = (M[r][c0] * inv) % 4
            if f:
                for c in live_c:
                    M[r][c] = (M[r][c] - f * M[r0][c]) % 4
        live_r.discard(r0)
        live_c.discard(c0)
    half = [{r: M[r][c] // 2 for r in live_r if M[r][c]} for c in sorted(live_c)]
    return f2_rank(half)


def smith_diagonal(cols: list[dict[int, int]], nrows: int) -> list[int]:
    """Nonzero invariant factors of an integer matrix (small sizes only)."""
    M = [[0] * len(cols) for _ in range(nrows)]
    for c, col in enumerate(cols):
        for r, v in col.items():
            M[r][c] = v
    diag = []
    t = 0
    rows, ncols = nrows, len(cols)
    while t < min(rows, ncols):
        nz = [(abs(M[r][c]), r, c) for r in range(t, rows) for c in range(t, ncols) if M[r][c]]
        if not nz:
            break
        _, r, c = min(nz)
        M[t], M[r] = M[r], M[t]
        for row in M:
            row[t], row[c] = row[c], row[t]
        while True:
            done = True
            for r in range(t + 1, rows):
                q = M[r][t] // M[t][t]
                if q:
                    M[r] = [x - q * y for x, y in zip(M[r], M[t])]
                if M[r][t]:
                    done = False
            for c in range(t + 1, ncols):
                q = M[t][c] // M[t][t]
                if q:
                    for row in M:
                        row[c] -= q * row[t]
                if M[t][c]:
                    done = False
            if done:
                bad = [(r, c) for r in range(t + 1, rows) for c in range(t + 1, ncols) if M[r][c] % M[t][t]]
                if not bad:
                    break
                r, _ = bad[0]
                M[t] = [x + y for x, y in zip(M[t], M[r])]
                continue
            nz = [(abs(M[r][t]), r, t) for r in range(t, rows) if M[r][t]]
            nz += [(abs(M[t][c]), t, c) for c in range(t, ncols) if M[t][c]]
            _, r, c = min(nz)
            M[t], M[r] = M[r], M[t]
            for row in M:
                row[t], row[c] = row[c], row[t]
        diag.append(abs(M[t][t]))
        t += 1
    return diag


def brute_mab(X, n2: int, z: int, support, a: int, b: int) -> int:
    """Count pairs (single face a out of z, single face b-1 out of its target)
    landing in ``support``; a nested loop over the span tables."""
    face2, tgt2 = X.span_face(n2), X.span_tgt(n2)
    face1, tgt1, src1 = X.span_face(n2 - 1), X.span_tgt(n2 - 1), X.span_src(n2 - 1)
    total = 0
    for q in range(len(face2)):
        if X.span_src(n2)[q] != z or face2[q] != a:
            continue
        for p in range(len(face1)):
            if src1[p] == tgt2[q] and face1[p] == b - 1 and tgt1[p] in support:
                total += 1
    return total


# Knot determinants |Delta(-1)| from the standard knot table.
DETERMINANTS = {
    "trefoil_right": 3,
    "trefoil_left": 3,
    "4_1": 5,
    "5_1": 5,
    "5_2": 7,
    "6_1": 9,
    "6_2": 11,
    "6_3": 13,
    "7_1": 7,
}

__all__ = [
    "circles",
    "TQFTComplex",
    "f2_rank",
    "exact_two_divisors",
    "smith_diagonal",
    "brute_mab",
    "DETERMINANTS",
    "combinations",
]
