"""Involutive completion with class-based multiplicative variables, and Spencer forms.

Equations are handled as finite linear combinations of jets ``y^k_mu``; a jet
is the pair ``(k, mu)`` with ``k`` the 0-based unknown and ``mu`` a multi-index.
Jets are ranked by order first and then so that the jet of highest class leads
(``mu_1 = ... = mu_{i-1} = 0`` with ``mu_i != 0`` has class ``i``).  For a
system of order ``q`` an order-``q`` equation of class ``i`` has ``d_1..d_i``
as multiplicative derivations; every derivation is nonmultiplicative for the
equations of lower order.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence

from .diffop import ModuleVector, OperatorMatrix, render_combination
from .errors import CompletionCapError, DimensionError, NotInvolutiveError
from .linalg import IncrementalSpan, echelon
from .poly import Polynomial

DEFAULT_DEGREE_CAP = 10


def default_degree_cap() -> int:
    value = os.environ.get("PARAMETRIX_DEGREE_CAP")
    return int(value) if value else DEFAULT_DEGREE_CAP


# -- jets -----------------------------------------------------------------------


def jet_key(jet) -> tuple:
    k, mu = jet
    return (sum(mu),) + tuple(-e for e in mu) + (-k,)


def multi_index_class(mu: Sequence[int]) -> int:
    """1-based class of ``mu``; the zero multi-index has class ``n``."""
    for i, e in enumerate(mu):
        if e:
            return i + 1
    return len(mu)


def _order(row: dict) -> int:
    return max(sum(mu) for _, mu in row)


def _lead(row: dict):
    return max(row, key=jet_key)


def _shift(row: dict, i: int) -> dict:
    out = {}
    for (k, mu), c in row.items():
        nu = list(mu)
        nu[i] += 1
        out[(k, tuple(nu))] = c
    return out


def _monic(row: dict) -> dict:
    c = row[_lead(row)]
    return {t: a / c for t, a in row.items()}


def row_to_jets(v: ModuleVector) -> dict:
    out = {}
    for k, p in enumerate(v.components):
        for mu, c in p.terms.items():
            out[(k, mu)] = c
    return out


def jets_to_row(row: dict, m: int, n: int) -> ModuleVector:
    comps = [dict() for _ in range(m)]
    for (k, mu), c in row.items():
        comps[k][mu] = c
    return ModuleVector(tuple(Polynomial(c, n) for c in comps))


def jet_name(jet, names: Sequence[str]) -> str:
    k, mu = jet
    if not any(mu):
        return names[k]
    return names[k] + "_" + "".join(str(i + 1) * e for i, e in enumerate(mu))


# -- classification -------------------------------------------------------------


def janet_multiplicative(leading_monomials: Sequence[Sequence[int]], orders: Optional[Sequence[int]] = None) -> list:
    """Multiplicative derivations (1-based) for each leading multi-index.

    A multi-index of class ``i`` at the top order gets ``{1..i}``; when
    ``orders`` is given, entries below the maximal order get the empty set.
    """
    mons = [tuple(m) for m in leading_monomials]
    if orders is None:
        orders = [sum(m) for m in mons]
    q = max(orders, default=0)
    out = []
    for mu, o in zip(mons, orders):
        if o < q:
            out.append(frozenset())
        else:
            out.append(frozenset(range(1, multi_index_class(mu) + 1)))
    return out


@dataclass(frozen=True)
class ClassifiedEquation:
    row: ModuleVector
    order: int
    klass: int
    multiplicative: frozenset
    leading: tuple

    def render(self, names) -> str:
        return render_combination(self.row.components, names)


@dataclass(frozen=True)
class Witness:
    """A nonmultiplicative prolongation that escapes the multiplicative span."""

    equation: int
    variable: int  # 1-based derivation
    prolongation: ModuleVector
    remainder: ModuleVector


@dataclass(frozen=True)
class InvolutiveSystem:
    equations: tuple
    nvars: int
    unknowns: int
    involutive: bool
    coordinate_change: tuple
    permutation: Optional[tuple] = None
    unknown_names: tuple = ()
    added: tuple = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return max((e.order for e in self.equations), default=0)

    def class_counts(self) -> dict:
        q = self.order
        counts: dict = {}
        for e in self.equations:
            if e.order == q:
                counts[e.klass] = counts.get(e.klass, 0) + 1
        return counts

    def operator(self) -> OperatorMatrix:
        rows = [e.row for e in self.equations]
        names = self.unknown_names or tuple(f"y{k + 1}" for k in range(self.unknowns))
        return OperatorMatrix.from_vectors(rows, self.unknowns, self.nvars, unknown_names=names)


def _classify(rows: list, m: int, n: int) -> tuple:
    """Rows are monic jet dicts with distinct leading jets."""
    leads = [_lead(r) for r in rows]
    orders = [sum(mu) for _, mu in leads]
    mult = janet_multiplicative([mu for _, mu in leads], orders)
    eqs = []
    for r, lt, o, mv in zip(rows, leads, orders, mult):
        eqs.append(ClassifiedEquation(jets_to_row(r, m, n), o, multi_index_class(lt[1]), mv, lt))
    return tuple(eqs)


def _sorted_echelon(rows: list) -> list:
    rows = echelon([r for r in rows if r], key=jet_key)
    return [_monic(r) for r in rows]


def _failures(rows: list, n: int) -> list:
    """Nonmultiplicative prolongations that are not in the span of the system
    and its multiplicative prolongations; returns (eq, var, prolongation, remainder)."""
    leads = [_lead(r) for r in rows]
    orders = [sum(mu) for _, mu in leads]
    mult = janet_multiplicative([mu for _, mu in leads], orders)
    span = IncrementalSpan(key=jet_key)
    for r in rows:
        span.add(r)
    for r, mv in zip(rows, mult):
        for j in sorted(mv):
            span.add(_shift(r, j - 1))
    out = []
    for idx, (r, mv) in enumerate(zip(rows, mult)):
        for j in range(1, n + 1):
            if j in mv:
                continue
            prol = _shift(r, j - 1)
            rem = span.residue(prol)
            if rem:
                out.append((idx, j, prol, _monic(rem)))
    return out


def _lowest(failures: list):
    return min(failures, key=lambda f: (_order(f[3]), jet_key(_lead(f[3]))))


def _as_rows(sys) -> tuple:
    if isinstance(sys, OperatorMatrix):
        return sys.rows(), sys.ncols, sys.nvars, sys.unknown_names
    rows = list(sys)
    if not rows:
        raise DimensionError("an empty list of rows carries no shape; pass an OperatorMatrix")
    return rows, rows[0].rank, rows[0].components[0].nvars, ()


def is_involutive(sys) -> tuple:
    """``(True, None)`` or ``(False, witness)`` for the literal involution test.

    The witness is the failing prolongation whose remainder has the lowest
    order and leading jet.
    """
    rows, m, n, _ = _as_rows(sys)
    jets = _sorted_echelon([row_to_jets(v) for v in rows])
    if not jets:
        return True, None
    fails = _failures(jets, n)
    if not fails:
        return True, None
    idx, j, prol, rem = _lowest(fails)
    return False, Witness(idx, j, jets_to_row(prol, m, n), jets_to_row(rem, m, n))


# -- completion -----------------------------------------------------------------


def _complete_jets(jets: list, n: int, cap: int) -> tuple:
    """Returns the completed rows and those among them outside the input span."""
    jets = _sorted_echelon(jets)
    original = IncrementalSpan(key=jet_key)
    for r in jets:
        original.add(r)
    while jets:
        q = max(_order(r) for r in jets)
        if q > cap:
            raise CompletionCapError(f"completion exceeded the order cap {cap}")
        fails = _failures(jets, n)
        if not fails:
            break
        low = min(_order(f[3]) for f in fails)
        new = [f[3] for f in fails if _order(f[3]) == low]
        if low > cap:
            raise CompletionCapError(f"completion exceeded the order cap {cap}")
        jets = _sorted_echelon(jets + new)
    return jets, [r for r in jets if original.residue(r)]


def _permute_rows(rows: list, perm: Sequence[int]) -> list:
    return [ModuleVector(tuple(p.permute_vars(perm) for p in v.components)) for v in rows]


def _substitute_rows(rows: list, U) -> list:
    n = len(U)
    images = [
        sum((Fraction(U[i][j]) * Polynomial.var(j, n) for j in range(n)), Polynomial.zero(n))
        for i in range(n)
    ]
    return [ModuleVector(tuple(p.linear_substitute(images) for p in v.components)) for v in rows]


def _perm_matrix(perm) -> tuple:
    n = len(perm)
    return tuple(tuple(1 if perm[j] == i else 0 for j in range(n)) for i in range(n))


def _det(M) -> Fraction:
    M = [[Fraction(x) for x in r] for r in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            for k in range(c, n):
                M[r][k] -= f * M[c][k]
    return det


def permutation_trials(n: int) -> list:
    """Identity, then the reversal, then the remaining permutations in lexicographic order."""
    ident = tuple(range(n))
    rev = tuple(reversed(ident))
    out = [ident] + ([rev] if rev != ident else [])
    out += [p for p in permutations(range(n)) if p not in (ident, rev)]
    return out


def _build(jets, added, m, n, change, perm, names) -> InvolutiveSystem:
    eqs = _classify(jets, m, n)
    return InvolutiveSystem(
        equations=eqs,
        nvars=n,
        unknowns=m,
        involutive=True,
        coordinate_change=tuple(tuple(r) for r in change),
        permutation=perm,
        unknown_names=tuple(names),
        added=tuple(jets_to_row(r, m, n) for r in added),
    )


def involutive_completion(
    sys,
    degree_cap: Optional[int] = None,
    permutation: Optional[Sequence[int]] = None,
    seed: int = 0,
    random_trials: int = 20,
) -> InvolutiveSystem:
    """Complete ``sys`` to an involutive system, changing coordinates if needed.

    ``permutation`` maps old variable ``i`` to new index ``permutation[i]``;
    when omitted, permutations are tried in :func:`permutation_trials` order
    and then random unimodular integer changes (entries in ``-2..2``) drawn
    from ``seed``.  The first change that completes within ``degree_cap`` wins.
    """
    cap = default_degree_cap() if degree_cap is None else degree_cap
    rows, m, n, names = _as_rows(sys)
    if not names:
        names = tuple(f"y{k + 1}" for k in range(m))
    if permutation is not None:
        perm = tuple(permutation)
        jets, added = _complete_jets([row_to_jets(v) for v in _permute_rows(rows, perm)], n, cap)
        return _build(jets, added, m, n, _perm_matrix(perm), perm, names)
    last = None
    for perm in permutation_trials(n):
        try:
            jets, added = _complete_jets([row_to_jets(v) for v in _permute_rows(rows, perm)], n, cap)
        except CompletionCapError as exc:
            last = exc
            continue
        return _build(jets, added, m, n, _perm_matrix(perm), perm, names)
    rng = random.Random(seed)
    tried = 0
    while tried < random_trials:
        U = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        if abs(_det(U)) != 1:
            continue
        tried += 1
        try:
            jets, added = _complete_jets([row_to_jets(v) for v in _substitute_rows(rows, U)], n, cap)
        except CompletionCapError as exc:
            last = exc
            continue
        return _build(jets, added, m, n, U, None, names)
    raise CompletionCapError(f"no coordinate change completed within order {cap}: {last}")


def full_torsion_check(sys: InvolutiveSystem) -> bool:
    """Whole module is torsion iff there are ``m`` top-order equations of class ``n``."""
    if not sys.involutive:
        raise NotInvolutiveError("the class count criterion needs an involutive system")
    return sys.class_counts().get(sys.nvars, 0) == sys.unknowns


# -- Spencer form ---------------------------------------------------------------


@dataclass(frozen=True)
class SpencerForm:
    operator: OperatorMatrix
    new_unknowns: tuple
    jets: tuple  # the parametric jet behind each new unknown


def _multi_indices(n: int, order: int):
    if n == 0:
        return
    if n == 1:
        yield (order,)
        return
    for first in range(order, -1, -1):
        for rest in _multi_indices(n - 1, order - first):
            yield (first,) + rest


def spencer_form(sys: InvolutiveSystem) -> SpencerForm:
    """First-order presentation whose unknowns are the parametric jets of order ``< q``."""
    if not sys.involutive:
        raise NotInvolutiveError("Spencer form needs an involutive system")
    n, m = sys.nvars, sys.unknowns
    q = max(sys.order, 1)
    names = sys.unknown_names or tuple(f"y{k + 1}" for k in range(m))
    base = [row_to_jets(e.row) for e in sys.equations]
    # R_q: every prolongation of order <= q
    prol = []
    frontier = [r for r in base if _order(r) <= q]
    prol.extend(frontier)
    while frontier:
        nxt = []
        for r in frontier:
            if _order(r) < q:
                for i in range(n):
                    nxt.append(_shift(r, i))
        prol.extend(nxt)
        frontier = nxt
    R = _sorted_echelon(prol)
    principal = {_lead(r) for r in R}
    reducer = IncrementalSpan(key=jet_key)
    for r in R:
        reducer.add(r)

    params = []
    for o in range(q):
        for mu in _multi_indices(n, o):
            for k in range(m):
                if (k, mu) not in principal:
                    params.append((k, mu))
    params.sort(key=lambda j: (sum(j[1]), j[0], jet_key(j)))
    col = {j: c for c, j in enumerate(params)}
    zero = Polynomial.zero(n)

    def d(i):
        return Polynomial.var(i, n)

    rows = []
    seen = set()
    for (k, mu) in params:
        for i in range(n):
            t = list(mu)
            t[i] += 1
            t = (k, tuple(t))
            entries = [zero] * len(params)
            entries[col[(k, mu)]] = entries[col[(k, mu)]] + d(i)
            if t in col:
                entries[col[t]] = entries[col[t]] - 1
            else:
                nf = reducer.residue({t: Fraction(1)})
                for s, c in nf.items():
                    if s in col:
                        entries[col[s]] = entries[col[s]] - c
                        continue
                    sk, smu = s
                    j = next(
                        j for j in range(n) if smu[j] and (sk, smu[:j] + (smu[j] - 1,) + smu[j + 1 :]) in col
                    )
                    src = (sk, smu[:j] + (smu[j] - 1,) + smu[j + 1 :])
                    entries[col[src]] = entries[col[src]] - c * d(j)
            row = tuple(entries)
            if any(row) and row not in seen:
                seen.add(row)
                rows.append(row)
    new_names = tuple(jet_name(j, names) for j in params)
    op = OperatorMatrix.from_rows(rows, n, new_names, tuple(f"s{i + 1}" for i in range(len(rows))))
    return SpencerForm(op, new_names, tuple(params))
