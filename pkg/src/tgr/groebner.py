"""Buchberger's algorithm, ideal dimension, solvability and elimination.

The Buchberger loop uses the Gebauer-Moeller pair criteria and the sugar
selection strategy.  Reduction runs on a binary heap of pending monomials,
which keeps the cost proportional to the number of terms actually touched.
"""

from __future__ import annotations

import heapq
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import ResourceLimitError, current_limits
from .polyring import Polynomial, Ring


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = "grevlex"  # grevlex, lex or block
    split: int = 0  # block: the first `split` variables form the eliminated block

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and self.split < 0:
            raise ValueError("negative block split")

    def key_function(self, ring: Ring):
        """Map a packed monomial to a sort key; larger key means larger monomial."""
        if self.kind == "grevlex":
            xm = ring.xmask
            return lambda m: m ^ xm
        if self.kind == "lex":
            return ring.unpack
        return _block_key(ring, self.split)

    def __str__(self):
        return self.kind if self.kind != "block" else f"block({self.split})"


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def block_order(split: int) -> MonomialOrder:
    return MonomialOrder("block", split)


def _block_key(ring: Ring, split: int):
    memo: dict[int, tuple] = {}
    unpack = ring.unpack

    def key(m: int):
        k = memo.get(m)
        if k is None:
            e = unpack(m)
            first, rest = e[:split], e[split:]
            k = (sum(first), tuple(-x for x in reversed(first)), sum(rest), tuple(-x for x in reversed(rest)))
            memo[m] = k
        return k

    return key


@dataclass(frozen=True)
class DimReport:
    ambient_dim: int
    variety_dim: int  # -1 for the empty variety

    @property
    def is_empty(self) -> bool:
        return self.variety_dim < 0

    @property
    def codim(self) -> int:
        # the empty variety gets codimension ambient_dim + 1 by convention
        return self.ambient_dim - self.variety_dim


# ---------------------------------------------------------------------------
# core reduction machinery on raw term dictionaries
# ---------------------------------------------------------------------------


class _Engine:
    """Buchberger state for one ring, field and monomial order."""

    def __init__(self, ring: Ring, order: MonomialOrder):
        self.ring = ring
        self.order = order
        self.key = order.key_function(ring)
        self.p = ring.field.modulus if ring.field.is_prime else 0
        self.field = ring.field
        self.guard = ring.guard

    def lead(self, terms: dict) -> int:
        return max(terms, key=self.key)

    def monic(self, terms: dict, lm: int) -> dict:
        c = terms[lm]
        if c == 1:
            return terms
        inv = self.field.inv(c)
        if self.p:
            p = self.p
            return {m: v * inv % p for m, v in terms.items()}
        return {m: v * inv for m, v in terms.items()}

    def reduce(self, terms: dict, lms: Sequence[int], tails: Sequence[list]) -> dict:
        """Full normal form of ``terms`` by monic polynomials with leading monomials ``lms``."""
        key, p, g = self.key, self.p, self.guard
        acc = dict(terms)
        if self.order.kind == "grevlex":
            neg = lambda m: -key(m)  # noqa: E731
        else:
            neg = lambda m: _Neg(key(m))  # noqa: E731
        heap = [(neg(m), m) for m in acc]
        heapq.heapify(heap)
        out: dict[int, object] = {}
        push, pop = heapq.heappush, heapq.heappop
        nl = len(lms)
        while heap:
            _, m = pop(heap)
            c = acc.pop(m, None)
            if c is None:
                continue
            for idx in range(nl):
                lm = lms[idx]
                if ((m | g) - lm) & g == g:
                    break
            else:
                out[m] = c
                continue
            q = m - lm
            if p:
                for gm, gc in tails[idx]:
                    mm = gm + q
                    v = acc.get(mm)
                    if v is None:
                        acc[mm] = (-c * gc) % p
                        push(heap, (neg(mm), mm))
                    else:
                        v = (v - c * gc) % p
                        if v:
                            acc[mm] = v
                        else:
                            del acc[mm]
            else:
                for gm, gc in tails[idx]:
                    mm = gm + q
                    v = acc.get(mm)
                    if v is None:
                        acc[mm] = -c * gc
                        push(heap, (neg(mm), mm))
                    else:
                        v = v - c * gc
                        if v:
                            acc[mm] = v
                        else:
                            del acc[mm]
        return out

    def linear_echelon(self, polys: Iterable[dict]) -> list[dict]:
        """Reduced basis of the linear span (sparse Gaussian elimination on terms)."""
        key, p = self.key, self.p
        pivots: dict[int, dict] = {}
        for t in polys:
            t = dict(t)
            while t:
                lm = max(t, key=key)
                piv = pivots.get(lm)
                if piv is None:
                    pivots[lm] = self.monic(t, lm)
                    break
                c = t[lm]
                for m, v in piv.items():
                    w = t.get(m, 0) - c * v
                    if p:
                        w %= p
                    if w:
                        t[m] = w
                    else:
                        t.pop(m, None)
        return list(pivots.values())


class _Neg:
    """Reverses the ordering of a tuple key inside a min-heap."""

    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return self.k > other.k

    def __eq__(self, other):
        return self.k == other.k


def _buchberger(ring: Ring, gens: Sequence[Polynomial], order: MonomialOrder) -> list[dict]:
    eng = _Engine(ring, order)
    key, mdeg = eng.key, ring.mdeg
    budget = current_limits().spair_budget
    raw = [dict(g._terms) for g in gens if g._terms]
    if not raw:
        return []
    if any(set(t) == {0} for t in raw):
        return [{0: ring.field.one}]
    if all(len({mdeg(m) for m in t}) == 1 for t in raw):
        by_deg: dict[int, list[dict]] = {}
        for t in raw:
            by_deg.setdefault(mdeg(next(iter(t))), []).append(t)
        raw = [t for d in sorted(by_deg) for t in eng.linear_echelon(by_deg[d])]

    polys: list[dict] = []
    lms: list[int] = []
    tails: list[list] = []
    sugars: list[int] = []
    active: list[int] = []
    pairs: list = []  # heap of (sugar, lcm-key, i, j, lcm)
    dead: set[tuple[int, int]] = set()
    live: dict[tuple[int, int], int] = {}
    g = ring.guard

    def divides(a, b):
        return ((b | g) - a) & g == g

    def lcm(a, b):
        return ring.mlcm(a, b)

    def coprime(a, b):
        return not (ring.support(a) & ring.support(b))

    def sort_key(m):
        k = key(m)
        return k if isinstance(k, int) else _Wrap(k)

    def add(h: dict, sugar: int):
        lm = eng.lead(h)
        h = eng.monic(h, lm)
        idx = len(polys)
        polys.append(h)
        lms.append(lm)
        tails.append([(m, c) for m, c in h.items() if m != lm])
        sugars.append(sugar)
        # Gebauer-Moeller update
        cand = [(i, lcm(lms[i], lm)) for i in active]
        kept = []
        for n, (i, L) in enumerate(cand):
            if coprime(lms[i], lm):
                kept.append((i, L, True))
                continue
            redundant = False
            for n2, (i2, L2) in enumerate(cand):
                if n2 == n:
                    continue
                if divides(L2, L) and (L2 != L or n2 < n):
                    redundant = True
                    break
            if not redundant:
                kept.append((i, L, False))
        for pair, L in list(live.items()):
            i, j = pair
            if divides(lm, L) and lcm(lms[i], lm) != L and lcm(lms[j], lm) != L:
                dead.add(pair)
                del live[pair]
        for i, L, cop in kept:
            if cop:
                continue
            s = max(sugars[i] + mdeg(L) - mdeg(lms[i]), sugar + mdeg(L) - mdeg(lm))
            live[(i, idx)] = L
            heapq.heappush(pairs, (s, sort_key(L), i, idx, L))
        active[:] = [i for i in active if not divides(lm, lms[i])]
        active.append(idx)

    raw.sort(key=lambda t: (max(mdeg(m) for m in t), sort_key(eng.lead(t))))
    for t in raw:
        h = eng.reduce(t, [lms[i] for i in active], [tails[i] for i in active])
        if not h:
            continue
        if set(h) == {0}:
            return [{0: ring.field.one}]
        add(h, max(mdeg(m) for m in t))

    count = 0
    while pairs:
        s, _, i, j, L = heapq.heappop(pairs)
        if (i, j) in dead or (i, j) not in live:
            continue
        del live[(i, j)]
        count += 1
        if count > budget:
            raise ResourceLimitError(f"S-pair budget of {budget} exhausted")
        qi, qj = L - lms[i], L - lms[j]
        p = eng.p
        spoly: dict[int, object] = {}
        for m, c in tails[i]:
            spoly[m + qi] = c
        for m, c in tails[j]:
            mm = m + qj
            v = spoly.get(mm, 0) - c
            if p:
                v %= p
            if v:
                spoly[mm] = v
            else:
                spoly.pop(mm, None)
        if not spoly:
            continue
        act = active
        h = eng.reduce(spoly, [lms[k] for k in act], [tails[k] for k in act])
        if not h:
            continue
        if set(h) == {0}:
            return [{0: ring.field.one}]
        add(h, s)

    # interreduce to the reduced basis
    final = sorted(active, key=lambda k: sort_key(lms[k]))
    out = []
    for k in final:
        others = [o for o in final if o != k]
        tail = dict(tails[k])
        red = eng.reduce(tail, [lms[o] for o in others], [tails[o] for o in others]) if tail else {}
        red[lms[k]] = ring.field.one
        out.append(red)
        tails[k] = [(m, c) for m, c in red.items() if m != lms[k]]
    out.sort(key=lambda t: sort_key(eng.lead(t)), reverse=True)
    return out


class _Wrap:
    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return self.k < other.k

    def __eq__(self, other):
        return self.k == other.k


# ---------------------------------------------------------------------------
# ideals
# ---------------------------------------------------------------------------


class Ideal:
    """Finite generator list with a per-order cache of reduced Groebner bases."""

    def __init__(self, ring: Ring, generators: Iterable[Polynomial] = ()):
        gens = []
        for gen in generators:
            if gen.ring != ring:
                raise ValueError(f"generator in {gen.ring}, ideal in {ring}")
            if gen:
                gens.append(gen)
        self.ring = ring
        self.generators = tuple(gens)
        self._cache: dict[MonomialOrder, tuple[Polynomial, ...]] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"Ideal({', '.join(map(str, self.generators))})"

    def groebner(self, order: MonomialOrder = GREVLEX) -> tuple[Polynomial, ...]:
        cached = self._cache.get(order)
        if cached is not None:
            return cached
        basis = tuple(Polynomial(self.ring, t) for t in _buchberger(self.ring, self.generators, order))
        with self._lock:
            return self._cache.setdefault(order, basis)

    def normal_form(self, f: Polynomial, order: MonomialOrder = GREVLEX) -> Polynomial:
        basis = self.groebner(order)
        eng = _Engine(self.ring, order)
        lms = [eng.lead(b._terms) for b in basis]
        tails = [[(m, c) for m, c in b._terms.items() if m != lm] for b, lm in zip(basis, lms)]
        return Polynomial(self.ring, eng.reduce(f._terms, lms, tails))

    def contains(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    def is_unit(self) -> bool:
        basis = self.groebner()
        return len(basis) == 1 and basis[0].is_constant()

    def leading_monomials(self, order: MonomialOrder = GREVLEX) -> list[int]:
        key = order.key_function(self.ring)
        return [max(b._terms, key=key) for b in self.groebner(order)]

    def dimension(self) -> DimReport:
        return affine_dimension(self)

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)


def groebner_basis(ideal: Ideal, order: MonomialOrder = GREVLEX) -> list[Polynomial]:
    return list(ideal.groebner(order))


def affine_dimension(ideal: Ideal) -> DimReport:
    """Krull dimension of V(I) from the leading-term ideal of the grevlex basis."""
    n = ideal.ring.nvars
    if not ideal.generators:
        return DimReport(n, n)
    if ideal.is_unit():
        return DimReport(n, -1)
    supports = []
    for lm in ideal.leading_monomials():
        mask = 0
        for i in ideal.ring.support(lm):
            mask |= 1 << i
        supports.append(mask)
    return DimReport(n, n - min_hitting_set(supports))


def min_hitting_set(sets: Iterable[int]) -> int:
    """Size of a smallest variable set meeting every support bitmask."""
    sets = set(sets)
    if 0 in sets:
        raise ValueError("empty support cannot be hit")
    # drop supersets: hitting a subset hits the superset
    minimal = [s for s in sets if not any(t != s and t & s == t for t in sets)]
    return _hit(frozenset(minimal))


@lru_cache(maxsize=4096)
def _hit(sets: frozenset) -> int:
    if not sets:
        return 0
    pivot = min(sets, key=lambda s: (bin(s).count("1"), s))
    best = None
    bits = pivot
    while bits:
        low = bits & -bits
        bits ^= low
        rest = frozenset(s for s in sets if not s & low)
        val = 1 + _hit(rest)
        if best is None or val < best:
            best = val
            if best == 1:
                break
    return best


def is_solvable(ideal: Ideal) -> bool:
    """True iff the ideal has a common zero over the algebraic closure."""
    return not ideal.is_unit()


def has_nonzero_solution(ideal: Ideal) -> bool:
    """For homogeneous generators: V(I) contains a point other than the origin."""
    if not ideal.is_homogeneous():
        raise ValueError("has_nonzero_solution requires homogeneous generators")
    return affine_dimension(ideal).variety_dim >= 1


def eliminate(ideal: Ideal, keep: Sequence[int]) -> Ideal:
    """Intersect with the subring in the variables ``keep`` (block order).

    The result lives in a new ring whose variables are the kept ones, in
    their original relative order and with their original names.
    """
    ring = ideal.ring
    keep = sorted(set(keep))
    if any(not 0 <= k < ring.nvars for k in keep):
        raise ValueError("variable index out of range")
    drop = [i for i in range(ring.nvars) if i not in keep]
    perm = drop + keep
    big = Ring(ring.nvars, ring.field, [ring.names[i] for i in perm])
    pos = {v: n for n, v in enumerate(perm)}
    images = [big.var(pos[i]) for i in range(ring.nvars)]
    moved = Ideal(big, [g.substitute(images) for g in ideal.generators])
    basis = moved.groebner(block_order(len(drop)))
    small = Ring(len(keep), ring.field, [ring.names[i] for i in keep])
    back = [small.zero()] * len(drop) + [small.var(n) for n in range(len(keep))]
    kept = [b.substitute(back) for b in basis if b.variables() <= set(range(len(drop), ring.nvars))]
    return Ideal(small, kept)
