"""Cochain complexes over F2 split by quantum grading.

Cochains of one block ``(n, j)`` are Python integers used as bitsets over the
block's generators (local index ``k`` is bit ``k``).  The coboundary of a
generator ``y`` of level ``n`` is stored as the bitset of the generators ``z``
of level ``n+1`` having an odd number of face elements ``z -> y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .semisimp import SemiSimplicialObject

__all__ = [
    "F2Complex",
    "Cochain",
    "NotACoboundary",
    "Echelon",
    "cochain_complex",
    "homology_basis",
    "is_coboundary",
    "bockstein",
    "homology_rows",
    "homology_masks",
    "express_in_basis",
]


@dataclass(frozen=True)
class Cochain:
    n: int
    j: int
    support: frozenset[int]

    def __bool__(self) -> bool:
        return bool(self.support)

    def __add__(self, other: "Cochain") -> "Cochain":
        if (self.n, self.j) != (other.n, other.j):
            raise ValueError("adding cochains of different bidegrees")
        return Cochain(self.n, self.j, self.support ^ other.support)


@dataclass(frozen=True)
class NotACoboundary:
    """``certificate`` is a chain (bitset) killing every coboundary but
    pairing to 1 with the tested cochain."""

    certificate: int


class Echelon:
    """Incremental F2 row echelon form keyed by leading bit, remembering how
    each stored vector was combined from the inputs."""

    def __init__(self) -> None:
        self.rows: dict[int, tuple[int, int]] = {}
        self._count = 0

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v: int, combo: int = 0) -> tuple[int, int]:
        rows = self.rows
        while v:
            top = v.bit_length() - 1
            hit = rows.get(top)
            if hit is None:
                break
            v ^= hit[0]
            combo ^= hit[1]
        return v, combo

    def add(self, v: int, combo: int | None = None) -> tuple[int, int]:
        """Insert ``v``; returns the reduced vector and its combination
        (zero vector means ``v`` was dependent)."""
        if combo is None:
            combo = 1 << self._count
        self._count += 1
        r, c = self.reduce(v, combo)
        if r:
            self.rows[r.bit_length() - 1] = (r, c)
        return r, c


@dataclass
class _Block:
    gens: list[int]  # global generator indices, local order
    local: dict[int, int]


@dataclass
class F2Complex:
    X: SemiSimplicialObject
    blocks: dict[tuple[int, int], _Block]
    # cobound[(n, j)][k] = bitset over block (n+1, j) of the coboundary of local generator k
    cobound: dict[tuple[int, int], list[int]]
    # integral lift: zsign[(n, j)][k] = {local z index: coefficient}
    zcobound: dict[tuple[int, int], list[dict[int, int]]]
    _image: dict = field(default_factory=dict, repr=False)
    _kernel: dict = field(default_factory=dict, repr=False)
    _annih: dict = field(default_factory=dict, repr=False)
    _homology: dict = field(default_factory=dict, repr=False)

    # ---- bookkeeping

    def bidegrees(self) -> list[tuple[int, int]]:
        return sorted(self.blocks)

    def dim(self, n: int, j: int) -> int:
        b = self.blocks.get((n, j))
        return len(b.gens) if b else 0

    def to_mask(self, f: Cochain) -> int:
        b = self.blocks.get((f.n, f.j))
        if b is None:
            if f.support:
                raise ValueError(f"no generators in bidegree ({f.n}, {f.j})")
            return 0
        m = 0
        for g in f.support:
            m |= 1 << b.local[g]
        return m

    def from_mask(self, n: int, j: int, mask: int) -> Cochain:
        b = self.blocks.get((n, j))
        if b is None:
            return Cochain(n, j, frozenset())
        return Cochain(n, j, frozenset(b.gens[k] for k in _bits(mask)))

    def from_values(self, n: int, j: int, values: Mapping[int, int]) -> Cochain:
        """Cochain whose value at a generator is the parity of ``values``."""
        return Cochain(n, j, frozenset(g for g, v in values.items() if v & 1))

    # ---- differential

    def delta_mask(self, n: int, j: int, mask: int) -> int:
        col = self.cobound.get((n, j))
        out = 0
        if col is None:
            return 0
        for k in _bits(mask):
            out ^= col[k]
        return out

    def delta(self, f: Cochain) -> Cochain:
        return self.from_mask(f.n + 1, f.j, self.delta_mask(f.n, f.j, self.to_mask(f)))

    def delta_z(self, n: int, j: int, values: Mapping[int, int]) -> dict[int, int]:
        """Integral coboundary of an integer-valued cochain (by global index)."""
        b = self.blocks[(n, j)]
        up = self.blocks.get((n + 1, j))
        cols = self.zcobound.get((n, j))
        out: dict[int, int] = {}
        if up is None or cols is None:
            return out
        for g, v in values.items():
            if not v:
                continue
            for z, c in cols[b.local[g]].items():
                out[z] = out.get(z, 0) + c * v
        return {up.gens[z]: v for z, v in out.items() if v}

    # ---- linear algebra caches

    def image(self, n: int, j: int) -> Echelon:
        """Echelon of coboundaries landing in ``(n, j)``; combinations are
        bitsets over block ``(n-1, j)``."""
        e = self._image.get((n, j))
        if e is None:
            e = Echelon()
            for k, v in enumerate(self.cobound.get((n - 1, j), ())):
                e.add(v, 1 << k)
            self._image[(n, j)] = e
        return e

    def kernel(self, n: int, j: int) -> list[int]:
        ker = self._kernel.get((n, j))
        if ker is None:
            ker = []
            e = Echelon()
            for k, v in enumerate(self.cobound.get((n, j), [0] * self.dim(n, j))):
                r, c = e.add(v, 1 << k)
                if not r:
                    ker.append(c)
            self._kernel[(n, j)] = ker
        return ker

    def annihilator(self, n: int, j: int) -> list[int]:
        """Basis of chains pairing to zero with every coboundary in ``(n, j)``."""
        ann = self._annih.get((n, j))
        if ann is None:
            rows = [r for r, _ in self.image(n, j).rows.values()]
            ann = _null_space(rows, self.dim(n, j))
            self._annih[(n, j)] = ann
        return ann


def _bits(m: int) -> Iterable[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _null_space(rows: list[int], width: int) -> list[int]:
    """Basis of ``{v : popcount(v & r) even for all r}``."""
    piv: dict[int, int] = {}
    order: list[int] = []
    for r in rows:
        for p in order:
            if (r >> p) & 1:
                r ^= piv[p]
        if not r:
            continue
        p = r.bit_length() - 1
        for q in order:
            if (piv[q] >> p) & 1:
                piv[q] ^= r
        piv[p] = r
        order.append(p)
    basis = []
    for free in range(width):
        if free in piv:
            continue
        v = 1 << free
        for p, r in piv.items():
            if (r >> free) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def cochain_complex(X: SemiSimplicialObject) -> F2Complex:
    blocks: dict[tuple[int, int], _Block] = {}
    for n in range(-1, X.N):
        for g in range(X.size(n)):
            key = (n, X.grading(n, g))
            b = blocks.get(key)
            if b is None:
                b = blocks[key] = _Block([], {})
            b.local[g] = len(b.gens)
            b.gens.append(g)
    cobound: dict[tuple[int, int], list[int]] = {}
    zco: dict[tuple[int, int], list[dict[int, int]]] = {}
    for (n, j), b in blocks.items():
        cobound[(n, j)] = [0] * len(b.gens)
        zco[(n, j)] = [dict() for _ in b.gens]
    for n in range(0, X.N):
        src, tgt, face = X.span_src(n), X.span_tgt(n), X.span_face(n)
        for sid in range(len(src)):
            z, y = src[sid], tgt[sid]
            j = X.grading(n, z)
            if X.grading(n - 1, y) != j:
                raise AssertionError("face span changes quantum grading")
            lo, hi = blocks[(n - 1, j)], blocks[(n, j)]
            ky, kz = lo.local[y], hi.local[z]
            cobound[(n - 1, j)][ky] ^= 1 << kz
            col = zco[(n - 1, j)][ky]
            col[kz] = col.get(kz, 0) + (-1 if face[sid] & 1 else 1)
    for cols in zco.values():
        for col in cols:
            for k in [k for k, v in col.items() if v == 0]:
                del col[k]
    return F2Complex(X, blocks, cobound, zco)


def homology_basis(C: F2Complex, n: int, j: int) -> tuple[int, list[Cochain]]:
    key = (n, j)
    got = C._homology.get(key)
    if got is None:
        im = C.image(n, j)
        e = Echelon()
        for r, c in im.rows.values():
            e.add(r, 0)
        reps = []
        for v in C.kernel(n, j):
            r, _ = e.add(v, 0)
            if r:
                reps.append(v)
        got = C._homology[key] = reps
    return len(got), [C.from_mask(n, j, v) for v in got]


def homology_masks(C: F2Complex, n: int, j: int) -> list[int]:
    homology_basis(C, n, j)
    return C._homology[(n, j)]


def is_coboundary(C: F2Complex, f: Cochain | tuple[int, int, int]) -> Cochain | NotACoboundary:
    """Solve ``delta(w) = f``.  Accepts a cochain or ``(n, j, bitset)``."""
    if isinstance(f, Cochain):
        n, j, v = f.n, f.j, C.to_mask(f)
    else:
        n, j, v = f
    r, combo = C.image(n, j).reduce(v, 0)
    if not r:
        return C.from_mask(n - 1, j, combo)
    for phi in C.annihilator(n, j):
        if bin(phi & v).count("1") & 1:
            return NotACoboundary(phi)
    raise AssertionError("vector outside the image but no separating functional")


def express_in_basis(C: F2Complex, n: int, j: int, v: int) -> list[int] | None:
    """Coordinates of the class of cocycle ``v`` in the homology basis, or
    ``None`` when ``v`` is not a cocycle."""
    if C.delta_mask(n, j, v):
        return None
    reps = homology_masks(C, n, j)
    key = ("coords", n, j)
    e = C._homology.get(key)
    if e is None:
        e = Echelon()
        for r, _ in C.image(n, j).rows.values():
            e.add(r, 0)
        for i, rep in enumerate(reps):
            e.add(rep, 1 << i)
        C._homology[key] = e
    r, combo = e.reduce(v, 0)
    if r:
        raise AssertionError("cocycle outside kernel span")
    return [(combo >> i) & 1 for i in range(len(reps))]


def bockstein(C: F2Complex, alpha: Cochain, lift: Mapping[int, int] | None = None) -> Cochain:
    """Bockstein of a mod 2 cocycle through an integral lift.

    ``lift`` maps generators to integers reducing to ``alpha`` mod 2; by
    default every generator of the support lifts to 1.
    """
    if lift is None:
        lift = {g: 1 for g in alpha.support}
    else:
        odd = frozenset(g for g, v in lift.items() if v & 1)
        if odd != alpha.support:
            raise ValueError("lift does not reduce to the cochain mod 2")
    if (alpha.n, alpha.j) not in C.blocks:
        return Cochain(alpha.n + 1, alpha.j, frozenset())
    dz = C.delta_z(alpha.n, alpha.j, lift)
    for g, v in dz.items():
        if v & 1:
            raise AssertionError("integral coboundary of the lift is not even: not a cocycle or bad signs")
    return Cochain(alpha.n + 1, alpha.j, frozenset(g for g, v in dz.items() if (v // 2) & 1))


def homology_rows(C: F2Complex) -> list[dict]:
    """``{n, i, j, dim}`` rows for every nonzero homology group."""
    rows = []
    for n, j in C.bidegrees():
        dim, _ = homology_basis(C, n, j)
        if dim:
            rows.append({"n": n, "i": C.X.hom_degree(n), "j": j, "dim": dim})
    return rows
