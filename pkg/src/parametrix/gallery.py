"""Named constant-coefficient systems from elasticity, control and field theory.

Each entry builds an :class:`OperatorMatrix` with conventional labels and
carries an expected-results record.  ``provenance`` says where each expected
value comes from: ``"source"`` for values stated with the classical system,
``"derived"`` for values obtained by computation and checked independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional

from .diffop import OperatorMatrix, OperatorTemplate, adjoint, compose, substitute_params
from .errors import FormulaReviewError, GalleryError, UnboundParameterError
from .poly import Polynomial, as_rational


@dataclass(frozen=True)
class Expected:
    torsion_free: Optional[bool] = None
    parametrization_order: Optional[int] = None
    potentials: Optional[int] = None
    cc_count: Optional[int] = None
    cc_of_candidate_count: Optional[int] = None
    provenance: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    n: int
    operator: OperatorMatrix
    params: Mapping = field(default_factory=dict)
    expected: Optional[Expected] = None


def _sym_pairs(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


def _idx(i, j):
    return f"{i + 1}{j + 1}"


def _rows(n, nrows, ncols):
    z = Polynomial.zero(n)
    return [[z] * ncols for _ in range(nrows)]


def stress(n: int) -> OperatorMatrix:
    """Divergence of a symmetric tensor stored by its upper triangle."""
    pairs = _sym_pairs(n)
    col = {p: k for k, p in enumerate(pairs)}
    rows = _rows(n, n, len(pairs))
    for j in range(n):
        for i in range(n):
            k = col[(min(i, j), max(i, j))]
            rows[j][k] = rows[j][k] + Polynomial.var(i, n)
    return OperatorMatrix.from_rows(
        rows, n, [f"s{_idx(i, j)}" for i, j in pairs], [f"div{j + 1}" for j in range(n)]
    )


def killing(n: int) -> OperatorMatrix:
    """``Omega_ij = d_i xi_j + d_j xi_i`` for the flat euclidean metric."""
    pairs = _sym_pairs(n)
    rows = _rows(n, len(pairs), n)
    for r, (i, j) in enumerate(pairs):
        rows[r][j] = rows[r][j] + Polynomial.var(i, n)
        rows[r][i] = rows[r][i] + Polynomial.var(j, n)
    return OperatorMatrix.from_rows(
        rows, n, [f"xi{k + 1}" for k in range(n)], [f"Omega{_idx(i, j)}" for i, j in pairs]
    )


def cosserat_d1() -> OperatorMatrix:
    d1, d2 = Polynomial.var(0, 2), Polynomial.var(1, 2)
    z, one = Polynomial.zero(2), Polynomial.one(2)
    rows = [
        [d1, z, z],
        [z, d1, -one],
        [d2, z, one],
        [z, d2, z],
        [z, z, d1],
        [z, z, d2],
    ]
    return OperatorMatrix.from_rows(
        rows, 2, ["xi1", "xi2", "xi12"], ["A11", "A12", "A21", "A22", "B1", "B2"]
    )


def cosserat_adjoint() -> OperatorMatrix:
    d1, d2 = Polynomial.var(0, 2), Polynomial.var(1, 2)
    z, one = Polynomial.zero(2), Polynomial.one(2)
    rows = [
        [d1, z, d2, z, z, z],
        [z, d1, z, d2, z, z],
        [z, one, -one, z, d1, d2],
    ]
    names = ["sigma11", "sigma12", "sigma21", "sigma22", "mu1", "mu2"]
    return OperatorMatrix.from_rows(rows, 2, names, ["f1", "f2", "m12"])


def kalman_template() -> OperatorTemplate:
    """Entries live in ``(d, a)``; the trailing variable is the parameter."""
    d, a = Polynomial.var(0, 2), Polynomial.var(1, 2)
    one = Polynomial.one(2)
    rows = ((d, -a, -d), (one, -d, d))
    return OperatorTemplate(rows, 1, ("a",), ("y1", "y2", "y3"), ("Phi1", "Phi2"))


def kalman(a) -> OperatorMatrix:
    return substitute_params(kalman_template(), {"a": a})


def maxwell_first(n: int = 4) -> OperatorMatrix:
    """``d_i F_jk + d_j F_ki + d_k F_ij = 0`` on the skew components ``F_ij``, ``i < j``."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    col = {p: k for k, p in enumerate(pairs)}
    triples = list(combinations(range(n), 3))
    rows = _rows(n, len(triples), len(pairs))
    for r, (i, j, k) in enumerate(triples):
        # F_ki = -F_ik
        for var, (a, b), sign in ((i, (j, k), 1), (j, (i, k), -1), (k, (i, j), 1)):
            c = col[(a, b)]
            rows[r][c] = rows[r][c] + sign * Polynomial.var(var, n)
    return OperatorMatrix.from_rows(
        rows,
        n,
        [f"F{_idx(i, j)}" for i, j in pairs],
        [f"dF{i + 1}{j + 1}{k + 1}" for i, j, k in triples],
    )


def _linearized_einstein(n: int) -> dict:
    """Full-tensor coefficients ``G[(i,j)][(k,l)]`` (polynomials) of the linearized
    Einstein tensor about the flat euclidean metric, symmetrized in ``(k, l)``.

    R_ij = 1/2 (d_k d_i h_kj + d_k d_j h_ik - d_k d_k h_ij - d_i d_j h_kk)
    R    = d_k d_l h_kl - d_k d_k h_ll
    G_ij = R_ij - 1/2 delta_ij R
    """
    x = [Polynomial.var(i, n) for i in range(n)]
    z = Polynomial.zero(n)
    half = Fraction(1, 2)
    lap = sum((xi * xi for xi in x), z)

    def h_coeffs(i, j):
        out: dict = {}

        def put(k, l, p):
            out[(k, l)] = out.get((k, l), z) + p

        for k in range(n):
            put(k, j, half * x[k] * x[i])
            put(i, k, half * x[k] * x[j])
            put(k, k, -half * x[i] * x[j])
        put(i, j, -half * lap)
        if i == j:
            for k in range(n):
                for l in range(n):
                    put(k, l, -half * x[k] * x[l])
                put(k, k, half * lap)
        return out

    G = {}
    for i in range(n):
        for j in range(n):
            raw = h_coeffs(i, j)
            G[(i, j)] = {
                (k, l): half * (raw.get((k, l), z) + raw.get((l, k), z))
                for k in range(n)
                for l in range(n)
            }
    return G


def einstein(n: int) -> OperatorMatrix:
    """Linearized Einstein operator on the ``n(n+1)/2`` components ``h_ij``, ``i <= j``.

    Row ``(i,j)`` carries the weight ``c_ij`` (1 on the diagonal, 2 off it) and
    column ``(k,l)`` collects both ``h_kl`` and ``h_lk``, so the matrix is
    symmetric and the operator is formally self-adjoint.
    """
    if n < 3:
        raise GalleryError(f"einstein requires n >= 3 (the operator vanishes for n = {n})")
    G = _linearized_einstein(n)
    pairs = _sym_pairs(n)
    c = {p: (1 if p[0] == p[1] else 2) for p in pairs}
    rows = [[2 * c[(i, j)] * c[(k, l)] * G[(i, j)][(k, l)] for (k, l) in pairs] for (i, j) in pairs]
    E = OperatorMatrix.from_rows(
        rows, n, [f"h{_idx(i, j)}" for i, j in pairs], [f"G{_idx(i, j)}" for i, j in pairs]
    )
    if not adjoint(E).same_entries(E):
        raise FormulaReviewError("linearized Einstein operator is not self-adjoint")
    # divergence of the tensor G_ij = E_ij / (2 c_ij^2 ... ) must vanish identically
    div = stress(n)
    scale = [[Fraction(1, 2 * c[p]) if q == p else 0 for q in pairs] for p in pairs]
    S = OperatorMatrix.from_rows(scale, n, E.equation_names, div.unknown_names)
    if not compose(compose(div, S), E).is_zero():
        raise FormulaReviewError("divergence of the linearized Einstein operator does not vanish")
    return E


def _potentials_stress(n):
    return n * n * (n * n - 1) // 12


_CATALOG = {
    "stress": dict(n_range=(2, 4), default_n=2, params=(), note="divergence of a symmetric stress"),
    "killing": dict(n_range=(2, 4), default_n=2, params=(), note="Killing operator, flat metric"),
    "cosserat-d1": dict(n_range=(2, 2), default_n=2, params=(), note="first Spencer operator, rigid motions"),
    "cosserat-adjoint": dict(n_range=(2, 2), default_n=2, params=(), note="stress and couple-stress"),
    "kalman": dict(n_range=(1, 1), default_n=1, params=("a",), note="two-equation control system"),
    "maxwell-first": dict(n_range=(3, 4), default_n=4, params=(), note="first Maxwell set dF = 0"),
    "einstein": dict(n_range=(3, 4), default_n=4, params=(), note="linearized vacuum Einstein"),
}

GALLERY_NAMES = tuple(_CATALOG)


def _expected(name: str, n: int, params: Mapping) -> Expected:
    if name == "stress":
        return Expected(
            True, 2, _potentials_stress(n), 0,
            provenance={"torsion_free": "source", "parametrization_order": "source", "potentials": "source"},
        )
    if name == "killing":
        return Expected(
            False, None, None, _potentials_stress(n),
            provenance={"torsion_free": "derived", "cc_count": "source"},
        )
    if name == "cosserat-d1":
        return Expected(False, None, None, 3, provenance={"torsion_free": "derived", "cc_count": "source"})
    if name == "cosserat-adjoint":
        return Expected(
            True, 1, 3, None,
            provenance={"torsion_free": "source", "parametrization_order": "source", "potentials": "source"},
        )
    if name == "kalman":
        a = as_rational(params["a"])
        if a in (0, 1):
            return Expected(False, provenance={"torsion_free": "source"})
        return Expected(True, 2, 1, 0, provenance={"torsion_free": "source", "parametrization_order": "source"})
    if name == "maxwell-first":
        if n == 4:
            return Expected(True, 1, 4, None, provenance={"torsion_free": "source", "potentials": "source"})
        return Expected(True, 1, 3, None, provenance={"torsion_free": "derived", "potentials": "derived"})
    if name == "einstein":
        if n >= 4:
            return Expected(
                False, 1, n, n, _potentials_stress(n),
                provenance={"torsion_free": "source", "cc_of_candidate_count": "source", "cc_count": "source"},
            )
        return Expected(True, 1, n, n, 6, provenance={"torsion_free": "derived"})
    raise GalleryError(f"unknown gallery entry {name!r}")


def gallery_build(name: str, n: Optional[int] = None, params: Optional[Mapping] = None) -> GalleryEntry:
    if name not in _CATALOG:
        raise GalleryError(f"unknown gallery entry {name!r}; choose from {', '.join(GALLERY_NAMES)}")
    info = _CATALOG[name]
    n = info["default_n"] if n is None else int(n)
    lo, hi = info["n_range"]
    if not lo <= n <= hi:
        raise GalleryError(f"{name} supports n in {lo}..{hi}, got {n}")
    params = dict(params or {})
    extra = set(params) - set(info["params"])
    if extra:
        raise GalleryError(f"{name} takes no parameter(s) {', '.join(sorted(extra))}")
    if name == "stress":
        op = stress(n)
    elif name == "killing":
        op = killing(n)
    elif name == "cosserat-d1":
        op = cosserat_d1()
    elif name == "cosserat-adjoint":
        op = cosserat_adjoint()
    elif name == "kalman":
        if params.get("a") is None:
            raise UnboundParameterError("kalman requires the parameter a (use --param a=VALUE)")
        params["a"] = as_rational(params["a"])
        op = kalman(params["a"])
    elif name == "maxwell-first":
        op = maxwell_first(n)
    else:
        op = einstein(n)
    return GalleryEntry(name, n, op, params, _expected(name, n, params))


def gallery_listing() -> list:
    """One record per entry: supported ``n``, parameters and expected verdicts."""
    out = []
    for name, info in _CATALOG.items():
        lo, hi = info["n_range"]
        if name == "kalman":
            verdicts = [
                {"when": "a in {0, 1}", "torsion_free": False, "provenance": "source"},
                {"when": "a not in {0, 1}", "torsion_free": True, "provenance": "source"},
            ]
        else:
            verdicts = []
            for n in range(lo, hi + 1):
                e = _expected(name, n, {})
                verdicts.append(
                    {
                        "when": f"n = {n}",
                        "torsion_free": e.torsion_free,
                        "provenance": e.provenance.get("torsion_free", "derived"),
                    }
                )
        out.append(
            {
                "name": name,
                "n_min": lo,
                "n_max": hi,
                "default_n": info["default_n"],
                "params": list(info["params"]),
                "description": info["note"],
                "expected": verdicts,
            }
        )
    return out
