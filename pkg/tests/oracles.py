"""Independent reference computations used only by the tests.

Nothing here calls the Groebner engine: kernels and memberships are found by
plain linear algebra over QQ (sympy ``DomainMatrix``) on truncated coefficient
spaces, and polynomial identities are checked with sympy or by evaluation.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations_with_replacement

import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from parametrix.diffop import ModuleVector, OperatorMatrix
from parametrix.poly import Polynomial


def monomials_upto(n: int, degree: int) -> list:
    out = []
    for d in range(degree + 1):
        out.extend(monomials_exact(n, d))
    return out


def monomials_exact(n: int, degree: int) -> list:
    out = []
    for combo in combinations_with_replacement(range(n), degree):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def _is_homogeneous_set(gens) -> bool:
    for g in gens:
        degs = {sum(m) for p in g.components for m in p.terms}
        if len(degs) > 1:
            return False
    return True


def _kernel(columns: list, row_index: dict):
    """Rational nullspace of the matrix whose columns are sparse dicts."""
    if not columns:
        return []
    nrows = max(len(row_index), 1)
    rep = {}
    for j, col in enumerate(columns):
        for key, c in col.items():
            rep.setdefault(row_index[key], {})[j] = QQ(c.numerator, c.denominator)
    ns = DomainMatrix(rep, (nrows, len(columns)), QQ).nullspace().to_dense()
    return [[Fraction(int(x.numerator), int(x.denominator)) for x in row] for row in ns.to_list()]


def _product_column(mono, g: ModuleVector):
    col = {}
    for k, p in enumerate(g.components):
        for m, c in p.terms.items():
            key = (k, tuple(a + b for a, b in zip(m, mono)))
            col[key] = col.get(key, 0) + c
    return {k: v for k, v in col.items() if v}


def bounded_syzygies(gens: list, bound: int, nvars: int) -> list:
    """All syzygies with entries of degree <= ``bound`` (a spanning set over QQ).

    For homogeneous generators the search runs one total degree at a time.
    """
    r = len(gens)
    if r == 0:
        return []
    out = []
    if _is_homogeneous_set(gens):
        degs = [max((g.degree(), 0)) for g in gens]
        top = bound + max(degs)
        for t in range(top + 1):
            cols, labels = [], []
            for i, g in enumerate(gens):
                if g.is_zero():
                    if t <= bound:
                        for mono in monomials_exact(nvars, t):
                            cols.append({})
                            labels.append((i, mono))
                    continue
                s = t - degs[i]
                if 0 <= s <= bound:
                    for mono in monomials_exact(nvars, s):
                        cols.append(_product_column(mono, g))
                        labels.append((i, mono))
            out.extend(_assemble(cols, labels, r, nvars))
        return out
    cols, labels = [], []
    for i, g in enumerate(gens):
        for mono in monomials_upto(nvars, bound):
            cols.append(_product_column(mono, g))
            labels.append((i, mono))
    return _assemble(cols, labels, r, nvars)


def _assemble(cols, labels, r, nvars):
    keys = sorted({k for c in cols for k in c})
    index = {k: i for i, k in enumerate(keys)}
    out = []
    for vec in _kernel(cols, index):
        comps = [dict() for _ in range(r)]
        for (i, mono), c in zip(labels, vec):
            if c:
                comps[i][mono] = c
        out.append(ModuleVector(tuple(Polynomial(c, nvars) for c in comps)))
    return out


def bounded_membership(v: ModuleVector, gens: list, bound: int, nvars: int) -> bool:
    """Whether ``v = sum s_i gens_i`` with every ``deg s_i <= bound`` (exact linear solve)."""
    target = {}
    for k, p in enumerate(v.components):
        for m, c in p.terms.items():
            target[(k, m)] = c
    cols = [_product_column(mono, g) for g in gens for mono in monomials_upto(nvars, bound)]
    keys = sorted({k for c in cols for k in c} | set(target))
    index = {k: i for i, k in enumerate(keys)}
    # v is in the span iff appending it does not raise the rank
    def rank(columns):
        if not columns:
            return 0
        rep = {}
        for j, col in enumerate(columns):
            for key, c in col.items():
                rep.setdefault(index[key], {})[j] = QQ(c.numerator, c.denominator)
        return DomainMatrix(rep, (max(len(keys), 1), len(columns)), QQ).rank()

    return rank(cols + [target]) == rank(cols)


def to_sympy(p: Polynomial, syms):
    expr = sympy.Integer(0)
    for m, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, m):
            term *= s**e
        expr += term
    return expr


def sympy_matrix(A: OperatorMatrix):
    syms = sympy.symbols(f"x1:{A.nvars + 1}")
    return sympy.Matrix([[to_sympy(p, syms) for p in row] for row in A.entries]), syms


def sympy_generic_rank(A: OperatorMatrix) -> int:
    if A.nrows == 0 or A.ncols == 0:
        return 0
    M, _ = sympy_matrix(A)
    return M.rank(simplify=True)


def random_point(n: int, rng: random.Random) -> list:
    return [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]


def random_polynomial(rng: random.Random, nvars: int, max_degree: int, max_terms: int) -> Polynomial:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        deg = rng.randint(0, max_degree)
        e = [0] * nvars
        for _ in range(deg):
            e[rng.randrange(nvars)] += 1
        terms[tuple(e)] = Fraction(rng.randint(-3, 3), rng.choice((1, 1, 2)))
    return Polynomial(terms, nvars)


def random_operator(rng: random.Random, nvars=None, max_order=2, max_terms=3) -> OperatorMatrix:
    n = nvars or rng.randint(1, 3)
    r = rng.randint(1, 3)
    m = rng.randint(1, 3)
    rows = [[random_polynomial(rng, n, max_order, max_terms) for _ in range(m)] for _ in range(r)]
    return OperatorMatrix.from_rows(rows, n)
