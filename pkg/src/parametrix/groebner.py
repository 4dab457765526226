"""Reduced Groebner bases and syzygies of submodules of ``A^m``.

Internally a module vector is a dict ``{(position, monomial): Fraction}``.
Syzygies are read off a Groebner basis of the generators augmented with unit
trace vectors, under an order in which every original position dominates every
trace position; the basis elements whose original part vanishes form the
reduced Groebner basis of the syzygy module.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .diffop import ModuleVector
from .errors import DimensionError
from .poly import DEGREVLEX, MonomialOrder, Polynomial

__all__ = [
    "GroebnerBasis",
    "SyzygyMatrix",
    "buchberger",
    "extend_basis",
    "normal_form",
    "membership",
    "module_equal",
    "syzygies",
]


class _TermOrder:
    """Cached flat keys for module terms, optionally with an elimination block.

    With ``block`` set, positions ``< block`` dominate all positions ``>= block``.
    """

    def __init__(self, order: MonomialOrder, block: int | None = None):
        self.order = order
        self.block = block
        self._key: dict = {}
        self._neg: dict = {}

    def key(self, term):
        k = self._key.get(term)
        if k is None:
            k = self.order.term_key(term)
            if self.block is not None:
                k = (1 if term[0] < self.block else 0,) + k
            self._key[term] = k
        return k

    def neg(self, term):
        k = self._neg.get(term)
        if k is None:
            k = tuple(-x for x in self.key(term))
            self._neg[term] = k
        return k

    def lead(self, v: dict):
        return max(v, key=self.key)


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _monic(v: dict, lt) -> dict:
    c = v[lt]
    if c == 1:
        return v
    inv = 1 / c
    return {t: a * inv for t, a in v.items()}


class _Builder:
    """Buchberger completion with Gebauer-Moeller pair pruning.

    The product criterion is not used: it is unsound for modules.
    """

    def __init__(self, torder: _TermOrder):
        self.to = torder
        self.polys: list = []  # monic dicts
        self.lts: list = []  # leading terms (pos, monomial)
        self.active: list = []  # still eligible for new pairs
        self.by_pos: dict = {}  # pos -> list of indices, insertion order
        self.pairs: set = set()
        self.heap: list = []

    # -- reduction -------------------------------------------------------
    def _reducer(self, term):
        pos, m = term
        for i in self.by_pos.get(pos, ()):
            lm = self.lts[i][1]
            if _divides(lm, m):
                return i
        return None

    def reduce(self, v: dict, full: bool = True) -> dict:
        to = self.to
        v = dict(v)
        heap = [(to.neg(t), t) for t in v]
        heapq.heapify(heap)
        rem: dict = {}
        while heap:
            _, t = heapq.heappop(heap)
            c = v.pop(t, None)
            if c is None:
                continue
            i = self._reducer(t)
            if i is None:
                rem[t] = c
                if not full:
                    rem.update(v)
                    return rem
                continue
            lt = self.lts[i]
            q = tuple(a - b for a, b in zip(t[1], lt[1]))
            for (p, m), gc in self.polys[i].items():
                if (p, m) == lt:
                    continue
                tt = (p, tuple(a + b for a, b in zip(m, q)))
                old = v.get(tt)
                nv = (old or 0) - c * gc
                if nv:
                    if old is None:
                        heapq.heappush(heap, (to.neg(tt), tt))
                    v[tt] = nv
                elif old is not None:
                    del v[tt]
        return rem

    # -- pair management --------------------------------------------------
    def _push_pair(self, i, j, lcm):
        pos = self.lts[i][0]
        key = (sum(lcm), self.to.key((pos, lcm)), i, j)
        self.pairs.add((i, j))
        heapq.heappush(self.heap, (key, i, j, lcm))

    def insert(self, h: dict, make_pairs: bool = True):
        lt = self.to.lead(h)
        h = _monic(h, lt)
        k = len(self.polys)
        pos, mh = lt
        if make_pairs:
            cand = {}
            for i in self.by_pos.get(pos, ()):
                if self.active[i]:
                    cand[i] = tuple(max(a, b) for a, b in zip(self.lts[i][1], mh))
            kept = {}
            for i, L in cand.items():
                if any(Lj != L and _divides(Lj, L) for Lj in cand.values()):
                    continue
                kept.setdefault(L, i)
            # chain criterion on existing pairs
            for (key, i, j, L) in list(self.heap):
                if (i, j) not in self.pairs or self.lts[i][0] != pos:
                    continue
                if not _divides(mh, L):
                    continue
                Li = tuple(max(a, b) for a, b in zip(self.lts[i][1], mh))
                Lj = tuple(max(a, b) for a, b in zip(self.lts[j][1], mh))
                if Li != L and Lj != L:
                    self.pairs.discard((i, j))
        self.polys.append(h)
        self.lts.append(lt)
        self.active.append(True)
        self.by_pos.setdefault(pos, []).append(k)
        if make_pairs:
            for i in self.by_pos[pos][:-1]:
                if self.active[i] and _divides(mh, self.lts[i][1]):
                    self.active[i] = False
            for L, i in kept.items():
                self._push_pair(i, k, L)

    def spoly(self, i, j, L) -> dict:
        s: dict = {}
        for idx, sign in ((i, 1), (j, -1)):
            q = tuple(a - b for a, b in zip(L, self.lts[idx][1]))
            for (p, m), c in self.polys[idx].items():
                t = (p, tuple(a + b for a, b in zip(m, q)))
                nv = s.get(t, 0) + sign * c
                if nv:
                    s[t] = nv
                else:
                    s.pop(t, None)
        return s

    def complete(self):
        while self.heap:
            _, i, j, L = heapq.heappop(self.heap)
            if (i, j) not in self.pairs:
                continue
            self.pairs.discard((i, j))
            r = self.reduce(self.spoly(i, j, L), full=True)
            if r:
                self.insert(r)

    def add(self, v: dict):
        r = self.reduce(v, full=True)
        if r:
            self.insert(r)

    def reduced(self) -> list:
        """Reduced basis (monic), sorted by leading term, largest first."""
        idx = []
        for i, (pos, m) in enumerate(self.lts):
            redundant = False
            for j, (pj, mj) in enumerate(self.lts):
                if j != i and pj == pos and _divides(mj, m) and (mj != m or j < i):
                    redundant = True
                    break
            if not redundant:
                idx.append(i)
        idx.sort(key=lambda i: self.to.key(self.lts[i]), reverse=True)
        minimal = _Builder(self.to)
        for i in idx:
            minimal.insert(self.polys[i], make_pairs=False)
        out = []
        for i in range(len(minimal.polys)):
            lt = minimal.lts[i]
            tail = {t: c for t, c in minimal.polys[i].items() if t != lt}
            saved = minimal.by_pos[lt[0]]
            minimal.by_pos[lt[0]] = [j for j in saved if j != i]
            rt = minimal.reduce(tail, full=True)
            minimal.by_pos[lt[0]] = saved
            rt[lt] = Fraction(1)
            out.append(rt)
        return out


def _to_dict(v: ModuleVector, offset: int = 0) -> dict:
    out = {}
    for k, p in enumerate(v.components):
        for m, c in p.terms.items():
            out[(k + offset, m)] = c
    return out


def _to_vector(d: dict, rank: int, nvars: int, offset: int = 0) -> ModuleVector:
    comps = [dict() for _ in range(rank)]
    for (pos, m), c in d.items():
        comps[pos - offset][m] = c
    return ModuleVector(tuple(Polynomial(c, nvars) for c in comps))


def _shape(gens: Sequence[ModuleVector], rank, nvars):
    if gens:
        r0 = gens[0].rank
        if rank is not None and rank != r0:
            raise DimensionError(f"generator of rank {r0}, expected {rank}")
        rank = r0
        for g in gens:
            if g.rank != rank:
                raise DimensionError(f"generators of ranks {rank} and {g.rank}")
            for p in g.components:
                if nvars is None:
                    nvars = p.nvars
                elif p.nvars != nvars:
                    raise DimensionError("generators over different polynomial rings")
    if rank is None or nvars is None:
        raise ValueError("rank and nvars are required for an empty generator list")
    return rank, nvars


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced, monic Groebner basis of a submodule of ``A^rank``."""

    generators: tuple
    order: MonomialOrder
    rank: int
    nvars: int
    _dicts: tuple = field(repr=False, compare=False, default=())

    def __len__(self):
        return len(self.generators)

    def leading_terms(self) -> list:
        to = _TermOrder(self.order)
        return [to.lead(d) for d in self._dicts]

    def _builder(self) -> _Builder:
        b = _Builder(_TermOrder(self.order))
        for d in self._dicts:
            b.insert(d, make_pairs=False)
        return b

    def normal_form(self, v: ModuleVector) -> ModuleVector:
        return normal_form(v, self)

    def contains(self, v: ModuleVector) -> bool:
        return membership(v, self)

    def __eq__(self, other):
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return (self.rank, self.nvars, self._dicts) == (other.rank, other.nvars, other._dicts)

    def __hash__(self):
        return hash((self.rank, self.nvars, len(self._dicts)))


def _make_basis(dicts: list, order, rank, nvars) -> GroebnerBasis:
    gens = tuple(_to_vector(d, rank, nvars) for d in dicts)
    return GroebnerBasis(gens, order, rank, nvars, tuple(dicts))


def buchberger(
    gens: Iterable[ModuleVector], order: MonomialOrder = DEGREVLEX, rank=None, nvars=None
) -> GroebnerBasis:
    """Reduced Groebner basis of the submodule generated by ``gens``."""
    gens = list(gens)
    rank, nvars = _shape(gens, rank, nvars)
    b = _Builder(_TermOrder(order))
    for g in gens:
        d = _to_dict(g)
        if d:
            b.add(d)
    b.complete()
    return _make_basis(b.reduced(), order, rank, nvars)


def extend_basis(gb: GroebnerBasis, new: Iterable[ModuleVector]) -> GroebnerBasis:
    """Reduced basis of ``module(gb) + module(new)``, reusing the finished pairs of ``gb``."""
    b = gb._builder()
    for v in new:
        if v.rank != gb.rank:
            raise DimensionError(f"vector of rank {v.rank} for a basis of rank {gb.rank}")
        d = _to_dict(v)
        if d:
            b.add(d)
    b.complete()
    return _make_basis(b.reduced(), gb.order, gb.rank, gb.nvars)


def normal_form(v: ModuleVector, gb: GroebnerBasis) -> ModuleVector:
    """Fully reduced remainder of ``v``; zero iff ``v`` lies in the module."""
    if v.rank != gb.rank:
        raise DimensionError(f"vector of rank {v.rank} for a basis of rank {gb.rank}")
    rem = gb._builder().reduce(_to_dict(v), full=True)
    return _to_vector(rem, gb.rank, gb.nvars)


def membership(v: ModuleVector, gb: GroebnerBasis) -> bool:
    return normal_form(v, gb).is_zero()


def module_equal(
    gens_a: Sequence[ModuleVector],
    gens_b: Sequence[ModuleVector],
    order: MonomialOrder = DEGREVLEX,
    rank=None,
    nvars=None,
) -> bool:
    """Whether two generating sets span the same submodule."""
    gens_a, gens_b = list(gens_a), list(gens_b)
    rank, nvars = _shape(gens_a + gens_b, rank, nvars)
    return buchberger(gens_a, order, rank, nvars) == buchberger(gens_b, order, rank, nvars)


@dataclass(frozen=True)
class SyzygyMatrix:
    """Generators of the relations among ``ngens`` module generators."""

    rows: tuple
    ngens: int

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


def syzygies(
    gens: Sequence[ModuleVector], order: MonomialOrder = DEGREVLEX, rank=None, nvars=None
) -> SyzygyMatrix:
    """Reduced Groebner basis of the syzygy module of ``gens``.

    Each returned row ``s`` satisfies ``sum_i s_i * gens[i] == 0``; the check is
    performed exactly before returning.
    """
    gens = list(gens)
    rank, nvars = _shape(gens, rank, nvars)
    r = len(gens)
    if r == 0:
        return SyzygyMatrix((), 0)
    one = (0,) * nvars
    b = _Builder(_TermOrder(order, block=rank))
    for i, g in enumerate(gens):
        d = _to_dict(g)
        d[(rank + i, one)] = Fraction(1)
        b.add(d)
    b.complete()
    rows = []
    for d in b.reduced():
        if all(pos >= rank for pos, _ in d):
            rows.append(_to_vector(d, r, nvars, offset=rank))
    _check_syzygies(rows, gens, rank, nvars)
    return SyzygyMatrix(tuple(rows), r)


def _check_syzygies(rows, gens, rank, nvars):
    for s in rows:
        acc = [Polynomial.zero(nvars) for _ in range(rank)]
        for si, g in zip(s.components, gens):
            if si:
                for k in range(rank):
                    if g.components[k]:
                        acc[k] = acc[k] + si * g.components[k]
        if any(acc):
            raise ArithmeticError("syzygy check failed: S . G != 0")
