"""Compatibility conditions, the adjoint torsion-free test and parametrizations.

The test runs the chain

    D  ->  ad(D)  ->  ad(D_-1) = CC(ad(D))  ->  D_-1  ->  D' = CC(D_-1)

and compares the row modules of ``D`` and ``D'``.  ``D`` always lies inside
``D'``; any row of ``D'`` outside the row module of ``D`` is a torsion element
of the system module.
"""

from __future__ import annotations

import time
from math import gcd, lcm
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Optional

from .diffop import ModuleVector, OperatorMatrix, adjoint, compose
from .errors import UnsupportedCorankError
from .groebner import (
    GroebnerBasis,
    _TermOrder,
    _to_dict,
    buchberger,
    extend_basis,
    membership,
    module_equal,
    syzygies,
)
from .linalg import IncrementalSpan
from .poly import DEGREVLEX, MonomialOrder, Polynomial

STEP_NAMES = ("input", "adjoint_of_input", "cc_of_adjoint", "candidate_parametrization", "cc_of_candidate")


# -- compatibility conditions -------------------------------------------------


def _is_homogeneous(v: ModuleVector) -> bool:
    degs = {sum(m) for p in v.components for m in p.terms}
    return len(degs) <= 1


def minimal_generators(vectors, order: MonomialOrder = DEGREVLEX, rank=None, nvars=None) -> list:
    """Drop redundant generators.

    Candidates are scanned by increasing degree and kept only when they are not
    in the module of those already kept.  For homogeneous input this yields a
    minimal generating set; otherwise a second pass removes any generator that
    the others still generate.
    """
    vecs = [v for v in vectors if not v.is_zero()]
    if not vecs:
        return []
    rank = vecs[0].rank if rank is None else rank
    nvars = vecs[0].components[0].nvars if nvars is None else nvars
    to = _TermOrder(order)
    vecs.sort(key=lambda v: (v.degree(), to.key(to.lead(_to_dict(v)))))
    kept: list = []
    gb = buchberger([], order, rank, nvars)
    for v in vecs:
        if kept and membership(v, gb):
            continue
        kept.append(v)
        gb = extend_basis(gb, [v])
    if all(_is_homogeneous(v) for v in kept):
        return kept
    i = len(kept) - 1
    while i >= 0 and len(kept) > 1:
        others = kept[:i] + kept[i + 1 :]
        if membership(kept[i], buchberger(others, order, rank, nvars)):
            kept = others
        i -= 1
    return kept


def compatibility_conditions(
    A: OperatorMatrix, order: MonomialOrder = DEGREVLEX, prefix: str = "cc"
) -> OperatorMatrix:
    """Generating left multipliers ``C`` with ``C . A = 0`` (empty when there are none)."""
    syz = syzygies(A.rows(), order, rank=A.ncols, nvars=A.nvars)
    rows = minimal_generators(list(syz.rows), order, rank=A.nrows, nvars=A.nvars)
    to = _TermOrder(order)
    rows.sort(key=lambda v: to.key(to.lead(_to_dict(v))), reverse=True)
    names = tuple(f"{prefix}{i + 1}" for i in range(len(rows)))
    return OperatorMatrix.from_vectors(
        rows, A.nrows, A.nvars, unknown_names=A.equation_names, equation_names=names
    )


# -- torsion ----------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionCertificate:
    """A residue class ``element`` killed by the nonzero operator ``annihilator``.

    ``annihilator`` is ``None`` when the bounded search found nothing.
    """

    element: ModuleVector
    annihilator: Optional[Polynomial]

    @property
    def exhausted(self) -> bool:
        return self.annihilator is None


def _monomials(nvars: int, degree: int):
    for combo in combinations_with_replacement(range(nvars), degree):
        exps = [0] * nvars
        for i in combo:
            exps[i] += 1
        yield tuple(exps)


def annihilator(element: ModuleVector, gb: GroebnerBasis, bound: int) -> Optional[Polynomial]:
    """Lowest-degree nonzero ``p`` with ``p * element`` in the module of ``gb``.

    Monomials up to ``bound`` are tried first; then linear dependencies among
    the normal forms ``NF(mu * element)`` are searched degree by degree.
    """
    n = gb.nvars
    b = gb._builder()
    nfs: dict = {}
    zero_mono = (0,) * n
    base = b.reduce(_to_dict(element))
    if not base:
        return Polynomial.one(n)
    nfs[zero_mono] = base
    by_degree = [[zero_mono]]
    for d in range(1, bound + 1):
        layer = []
        for mono in sorted(_monomials(n, d), key=DEGREVLEX.monomial_key):
            i = next(k for k, e in enumerate(mono) if e)
            prev = list(mono)
            prev[i] -= 1
            shifted = {
                (pos, tuple(a + (1 if k == i else 0) for k, a in enumerate(m))): c
                for (pos, m), c in nfs[tuple(prev)].items()
            }
            nf = b.reduce(shifted)
            if not nf:
                return Polynomial.monomial(mono)
            nfs[mono] = nf
            layer.append(mono)
        by_degree.append(layer)
    span = IncrementalSpan(key=b.to.key)
    for layer in by_degree:
        for mono in layer:
            rel = span.add(nfs[mono], label=mono)
            if rel is not None:
                return Polynomial(rel, n).primitive()
    return None


def is_torsion_element(v: ModuleVector, A: OperatorMatrix) -> bool:
    """Whether the residue of ``v`` is torsion, decided over the fraction field."""
    stacked = OperatorMatrix.from_rows(list(A.entries) + [v.components], A.nvars)
    return generic_rank(stacked) == generic_rank(A)


def _certificates(D: OperatorMatrix, Dp: OperatorMatrix, order, bound) -> tuple:
    gb = buchberger(D.rows(), order, D.ncols, D.nvars)
    acc = gb
    certs = []
    for row in Dp.rows():
        if membership(row, acc):
            continue
        certs.append(TorsionCertificate(row, annihilator(row, gb, bound)))
        acc = extend_basis(acc, [row])
    return tuple(certs)


# -- the five-step test ---------------------------------------------------------


@dataclass(frozen=True)
class TestReport:
    """Every operator of the five-step test together with the verdict."""

    __test__ = False

    input: OperatorMatrix
    adjoint_of_input: OperatorMatrix
    cc_of_adjoint: OperatorMatrix
    candidate_parametrization: OperatorMatrix
    cc_of_candidate: OperatorMatrix
    torsion_free: bool
    torsion: tuple
    orders: dict
    timing: dict = field(default_factory=dict, compare=False)

    def operators(self) -> dict:
        return {name: getattr(self, name) for name in STEP_NAMES}


@dataclass(frozen=True)
class Parametrization:
    operator: OperatorMatrix
    potential_names: tuple
    order: int

    @property
    def count(self) -> int:
        return len(self.potential_names)


def torsion_free_test(A: OperatorMatrix, order: MonomialOrder = DEGREVLEX) -> TestReport:
    timing = {}
    t0 = time.perf_counter()
    ad = adjoint(A)
    timing["adjoint_of_input"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    ad_m1 = compatibility_conditions(ad, order, prefix="phi")
    timing["cc_of_adjoint"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    d_m1 = adjoint(ad_m1)
    timing["candidate_parametrization"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    d_prime = compatibility_conditions(d_m1, order, prefix="cc")
    timing["cc_of_candidate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    same = module_equal(A.rows(), d_prime.rows(), order, rank=A.ncols, nvars=A.nvars)
    certs = ()
    if not same:
        bound = max(A.order, d_prime.order) + 3
        certs = _certificates(A, d_prime, order, bound)
    timing["verdict"] = time.perf_counter() - t0

    ops = (A, ad, ad_m1, d_m1, d_prime)
    return TestReport(
        input=A,
        adjoint_of_input=ad,
        cc_of_adjoint=ad_m1,
        candidate_parametrization=d_m1,
        cc_of_candidate=d_prime,
        torsion_free=same,
        torsion=certs,
        orders={name: op.order for name, op in zip(STEP_NAMES, ops)},
        timing=timing,
    )


def parametrize(A: OperatorMatrix, order: MonomialOrder = DEGREVLEX) -> Parametrization:
    """``D_-1`` from the five-step chain.

    It parametrizes the solutions of ``A`` itself only when the test reports
    torsion-free; otherwise it parametrizes the torsion-free quotient.
    """
    ad_m1 = compatibility_conditions(adjoint(A), order, prefix="phi")
    d_m1 = adjoint(ad_m1)
    return Parametrization(d_m1, d_m1.unknown_names, d_m1.order)


def extract_torsion(A: OperatorMatrix, order: MonomialOrder = DEGREVLEX) -> list:
    return list(torsion_free_test(A, order).torsion)


def presentation_independence_check(A1: OperatorMatrix, A2: OperatorMatrix, order=DEGREVLEX) -> bool:
    """Both presentations agree on whether the module has torsion."""
    return bool(extract_torsion(A1, order)) == bool(extract_torsion(A2, order))


# -- localization -----------------------------------------------------------------


def _bareiss(rows: list) -> tuple:
    """Fraction-free elimination; returns (rank, pivot rows, pivot columns, last pivot)."""
    M = [list(r) for r in rows]
    if not M:
        return 0, [], [], None
    n = M[0][0].nvars if M[0] else 0
    nrows, ncols = len(M), len(M[0])
    order_rows = list(range(nrows))
    prev = Polynomial.one(n) if ncols else None
    rank = 0
    pivot_cols = []
    for col in range(ncols):
        piv = next((i for i in range(rank, nrows) if M[i][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        order_rows[rank], order_rows[piv] = order_rows[piv], order_rows[rank]
        p = M[rank][col]
        for i in range(rank + 1, nrows):
            a = M[i][col]
            for j in range(col + 1, ncols):
                num = p * M[i][j] - a * M[rank][j]
                q = num.exact_div(prev)
                if q is None:
                    raise ArithmeticError("fraction-free elimination lost exactness")
                M[i][j] = q
            M[i][col] = Polynomial.zero(n)
        prev = p
        pivot_cols.append(col)
        rank += 1
        if rank == nrows:
            break
    return rank, order_rows[:rank], pivot_cols, prev


def generic_rank(A: OperatorMatrix) -> int:
    """Rank over the field of rational functions in ``d1..dn``."""
    if A.nrows == 0 or A.ncols == 0:
        return 0
    return _bareiss([list(r) for r in A.entries])[0]


def _det(rows: list) -> Polynomial:
    n = rows[0][0].nvars
    size = len(rows)
    if size == 0:
        raise ValueError("empty determinant")
    # sign from the row swaps performed by the elimination
    M = [list(r) for r in rows]
    sign = 1
    prev = Polynomial.one(n)
    for k in range(size):
        piv = next((i for i in range(k, size) if M[i][k]), None)
        if piv is None:
            return Polynomial.zero(n)
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                M[i][j] = (M[k][k] * M[i][j] - M[i][k] * M[k][j]).exact_div(prev)
        prev = M[k][k]
    return M[size - 1][size - 1] * sign


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Greatest common divisor from the syzygy ``(g/h, -f/h)`` of ``f`` and ``g``."""
    if not f:
        return g
    if not g:
        return f
    syz = syzygies([ModuleVector((f,)), ModuleVector((g,))])
    a = syz.rows[0].components[0]
    h = g.exact_div(a)
    return h.primitive()


def localize_corank1(A: OperatorMatrix) -> Parametrization:
    """Single-potential parametrization obtained over the fraction field.

    The kernel vector comes from signed maximal minors of a full-rank row
    selection; common factors and rational content are then removed.
    """
    rank = generic_rank(A)
    corank = A.ncols - rank
    if corank != 1:
        raise UnsupportedCorankError(corank)
    n = A.nvars
    if rank == 0:
        col = [Polynomial.one(n)]
    else:
        _, rows_idx, _, _ = _bareiss([list(r) for r in A.entries])
        B = [A.entries[i] for i in rows_idx]
        col = []
        for j in range(A.ncols):
            minor = [[r[k] for k in range(A.ncols) if k != j] for r in B]
            d = _det(minor)
            col.append(d if j % 2 == 0 else -d)
    g = Polynomial.zero(n)
    for p in col:
        g = poly_gcd(g, p)
    col = [p.exact_div(g) for p in col]
    lead = next(p for p in col if p)
    den = lcm(*(c.denominator for p in col for c in p.terms.values()))
    num = 0
    for p in col:
        for c in p.terms.values():
            num = gcd(num, int(c * den))
    scale = Fraction(den, num)
    if lead.leading_term()[1] < 0:
        scale = -scale
    col = [p * scale for p in col]
    op = OperatorMatrix(tuple((p,) for p in col), n, ("phi",), A.unknown_names)
    if not compose(A, op).is_zero():
        raise ArithmeticError("localized parametrization does not annihilate the operator")
    return Parametrization(op, ("phi",), op.order)
