from fractions import Fraction

import pytest

import sympy

from oracles import sympy_matrix
from parametrix.analysis import compatibility_conditions, torsion_free_test
from parametrix.diffop import OperatorMatrix, adjoint, compose
from parametrix.errors import GalleryError, UnboundParameterError
from parametrix.gallery import (
    GALLERY_NAMES,
    cosserat_adjoint,
    cosserat_d1,
    einstein,
    gallery_build,
    gallery_listing,
    killing,
    stress,
)
from parametrix.groebner import module_equal

CASES = [
    ("stress", 2, {}),
    ("stress", 3, {}),
    ("killing", 2, {}),
    ("killing", 3, {}),
    ("cosserat-d1", 2, {}),
    ("cosserat-adjoint", 2, {}),
    ("kalman", 1, {"a": 0}),
    ("kalman", 1, {"a": 1}),
    ("kalman", 1, {"a": 2}),
    ("kalman", 1, {"a": "-3/2"}),
    ("maxwell-first", 3, {}),
    ("maxwell-first", 4, {}),
    ("einstein", 3, {}),
    ("einstein", 4, {}),
]


def test_listing_has_every_entry():
    listing = gallery_listing()
    assert [e["name"] for e in listing] == list(GALLERY_NAMES)
    assert len(listing) == 7


@pytest.mark.parametrize("name,n,params", CASES)
def test_expected_records_match_computation(name, n, params):
    entry = gallery_build(name, n, params)
    exp = entry.expected
    A = entry.operator
    r = torsion_free_test(A)
    assert r.torsion_free == exp.torsion_free
    if exp.parametrization_order is not None:
        assert r.orders["candidate_parametrization"] == exp.parametrization_order
    if exp.potentials is not None:
        assert r.candidate_parametrization.ncols == exp.potentials
    if exp.cc_count is not None:
        assert compatibility_conditions(A).nrows == exp.cc_count
    if exp.cc_of_candidate_count is not None:
        assert r.cc_of_candidate.nrows == exp.cc_of_candidate_count


def test_shapes_and_labels():
    S = stress(3)
    assert S.shape == (3, 6)
    assert S.unknown_names == ("s11", "s12", "s13", "s22", "s23", "s33")
    K = killing(2)
    assert K.equation_names == ("Omega11", "Omega12", "Omega22")
    assert K.to_strings() == [["2*d1", "0"], ["d2", "d1"], ["0", "2*d2"]]
    assert cosserat_adjoint().shape == (3, 6)
    assert gallery_build("maxwell-first").operator.shape == (4, 6)
    assert einstein(4).shape == (10, 10)


def test_kalman_needs_a():
    with pytest.raises(UnboundParameterError):
        gallery_build("kalman")
    e = gallery_build("kalman", params={"a": "1/3"})
    assert e.params["a"] == Fraction(1, 3)


@pytest.mark.parametrize(
    "name,n,params",
    [("nope", None, None), ("stress", 7, None), ("cosserat-d1", 3, None), ("einstein", 2, None), ("stress", 2, {"a": 1})],
)
def test_gallery_errors(name, n, params):
    with pytest.raises(GalleryError):
        gallery_build(name, n, params)


@pytest.mark.parametrize("n", [3, 4])
def test_einstein_is_formally_self_adjoint(n):
    E = einstein(n)
    assert adjoint(E).same_entries(E)
    # independent check of symmetry of the matrix symbol via sympy
    M, _ = sympy_matrix(E)
    assert M == M.T


def _einstein_oracle(n):
    """Linearized Einstein tensor from the linearized Riemann tensor, in sympy.

    Derivatives become commuting symbols and ``h`` a symmetric matrix of symbols,
    so ``G[i][j]`` is linear in the ``H_kl`` with polynomial symbol coefficients.
    """
    x = sympy.symbols(f"d1:{n + 1}")
    H = sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"H{min(i, j) + 1}{max(i, j) + 1}"))
    def riem(i, j, k, l):
        return sympy.Rational(1, 2) * (
            x[j] * x[k] * H[i, l] + x[i] * x[l] * H[j, k] - x[i] * x[k] * H[j, l] - x[j] * x[l] * H[i, k]
        )
    ric = sympy.Matrix(n, n, lambda j, l: sum(riem(i, j, i, l) for i in range(n)))
    scal = sum(ric[i, i] for i in range(n))
    G = ric - sympy.Rational(1, 2) * scal * sympy.eye(n)
    return x, H, G.applyfunc(sympy.expand)


@pytest.mark.parametrize("n", [3, 4])
def test_einstein_matches_riemann_oracle(n):
    E = einstein(n)
    x, H, G = _einstein_oracle(n)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    M, gens = sympy_matrix(E)
    M = M.subs(dict(zip(gens, x)))
    hvec = sympy.Matrix([H[i, j] for i, j in pairs])
    applied = (M * hvec).applyfunc(sympy.expand)
    weights = [2 * (1 if i == j else 2) for i, j in pairs]
    ratios = set()
    for r, (i, j) in enumerate(pairs):
        oracle = sympy.expand(weights[r] * G[i, j])
        if oracle == 0:
            assert applied[r] == 0
            continue
        ratios.add(sympy.simplify(applied[r] / oracle))
    # one global sign convention for the curvature
    assert len(ratios) == 1 and ratios.pop() in (1, -1)


@pytest.mark.parametrize("n", [3, 4])
def test_einstein_compatibility_is_divergence(n):
    E = einstein(n)
    C = compatibility_conditions(E)
    assert C.nrows == n
    assert compose(C, E).is_zero()
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    # divergence of G_ij, where row (i,j) of E carries the weight 2*c_ij
    S = OperatorMatrix.from_rows(
        [[Fraction(1, 2 * (1 if p[0] == p[1] else 2)) if p == q else 0 for q in pairs] for p in pairs], n
    )
    assert module_equal(C.rows(), compose(stress(n), S).rows())


def test_cosserat_adjoint_is_reflected_adjoint_of_spencer_operator():
    ad = adjoint(cosserat_d1())
    # reflect d -> -d, then flip the sign convention of the couple rows/columns
    row_sign = [1, 1, -1]
    col_sign = [1, 1, 1, 1, -1, -1]
    fixed = [
        [row_sign[r] * col_sign[c] * p.negate_vars() for c, p in enumerate(row)]
        for r, row in enumerate(ad.entries)
    ]
    assert [list(r) for r in cosserat_adjoint().entries] == fixed
