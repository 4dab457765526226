"""Constant-coefficient linear differential operators as polynomial matrices.

An ``r x m`` :class:`OperatorMatrix` acts on a column of ``m`` unknowns; row ``i``
is the equation ``sum_k entries[i][k](d) y^k = 0``.  Compatibility conditions
are left multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DimensionError, ShapeError, UnboundParameterError
from .poly import DEGREVLEX, MonomialOrder, Polynomial, as_rational


def _labels(prefix: str, count: int) -> tuple:
    return tuple(f"{prefix}{i + 1}" for i in range(count))


@dataclass(frozen=True)
class ModuleVector:
    """Element of the free module ``A^m`` (one operator row)."""

    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @classmethod
    def zero(cls, rank: int, nvars: int) -> "ModuleVector":
        return cls(tuple(Polynomial.zero(nvars) for _ in range(rank)))

    @classmethod
    def unit(cls, k: int, rank: int, nvars: int) -> "ModuleVector":
        return cls(
            tuple(Polynomial.one(nvars) if i == k else Polynomial.zero(nvars) for i in range(rank))
        )

    @property
    def rank(self) -> int:
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def is_zero(self) -> bool:
        return not any(self.components)

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        if self.rank != other.rank:
            raise DimensionError(f"vectors of rank {self.rank} and {other.rank}")
        return ModuleVector(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "ModuleVector":
        return ModuleVector(tuple(scalar * c for c in self.components))

    def degree(self) -> int:
        return max((c.degree() for c in self.components), default=-1)


@dataclass(frozen=True)
class OperatorMatrix:
    """Polynomial matrix with labels for its equations (rows) and unknowns (columns)."""

    entries: tuple
    nvars: int
    unknown_names: tuple = ()
    equation_names: tuple = ()

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        width = len(self.unknown_names) if self.unknown_names else (len(rows[0]) if rows else 0)
        for r in rows:
            if len(r) != width:
                raise ShapeError(f"ragged operator matrix: row of length {len(r)}, expected {width}")
            for p in r:
                if p.nvars != self.nvars:
                    raise DimensionError(f"entry in {p.nvars} variables, operator has {self.nvars}")
        object.__setattr__(self, "entries", rows)
        if not self.unknown_names:
            object.__setattr__(self, "unknown_names", _labels("y", width))
        else:
            object.__setattr__(self, "unknown_names", tuple(self.unknown_names))
        if not self.equation_names:
            object.__setattr__(self, "equation_names", _labels("e", len(rows)))
        else:
            object.__setattr__(self, "equation_names", tuple(self.equation_names))
        if len(self.equation_names) != len(rows):
            raise ShapeError(f"{len(self.equation_names)} equation names for {len(rows)} rows")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], nvars: int, unknown_names=(), equation_names=()):
        """Build from rows of Polynomials or rationals (rationals become constants)."""
        conv = tuple(
            tuple(p if isinstance(p, Polynomial) else Polynomial.constant(p, nvars) for p in row)
            for row in rows
        )
        return cls(conv, nvars, tuple(unknown_names), tuple(equation_names))

    @classmethod
    def from_vectors(
        cls, vectors: Sequence[ModuleVector], rank: int, nvars: int, unknown_names=(), equation_names=()
    ):
        rows = tuple(tuple(v.components) for v in vectors)
        return cls(rows, nvars, tuple(unknown_names) or _labels("y", rank), tuple(equation_names))

    @classmethod
    def identity(cls, m: int, nvars: int, names=()) -> "OperatorMatrix":
        rows = tuple(
            tuple(Polynomial.one(nvars) if i == j else Polynomial.zero(nvars) for j in range(m))
            for i in range(m)
        )
        names = tuple(names) or _labels("y", m)
        return cls(rows, nvars, names, names)

    @classmethod
    def zeros(cls, r: int, m: int, nvars: int, unknown_names=(), equation_names=()):
        rows = tuple(tuple(Polynomial.zero(nvars) for _ in range(m)) for _ in range(r))
        return cls(rows, nvars, tuple(unknown_names) or _labels("y", m), tuple(equation_names))

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.unknown_names)

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    @property
    def order(self) -> int:
        """Maximum total degree among the entries; 0 for a zero matrix."""
        return max((p.degree() for row in self.entries for p in row), default=0) if self.entries else 0

    def rows(self) -> list:
        return [ModuleVector(r) for r in self.entries]

    def columns(self) -> list:
        return [ModuleVector(tuple(r[k] for r in self.entries)) for k in range(self.ncols)]

    def transpose(self) -> "OperatorMatrix":
        cols = tuple(tuple(r[k] for r in self.entries) for k in range(self.ncols))
        return OperatorMatrix(cols, self.nvars, self.equation_names, self.unknown_names)

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def relabel(self, unknown_names=None, equation_names=None) -> "OperatorMatrix":
        return OperatorMatrix(
            self.entries,
            self.nvars,
            tuple(unknown_names) if unknown_names is not None else self.unknown_names,
            tuple(equation_names) if equation_names is not None else self.equation_names,
        )

    def map_entries(self, fn) -> "OperatorMatrix":
        return OperatorMatrix(
            tuple(tuple(fn(p) for p in row) for row in self.entries),
            self.nvars,
            self.unknown_names,
            self.equation_names,
        )

    def same_entries(self, other: "OperatorMatrix") -> bool:
        return self.shape == other.shape and self.entries == other.entries

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return compose(self, other)

    def render_rows(self, order: MonomialOrder = DEGREVLEX) -> list:
        return [render_combination(row, self.unknown_names, order) for row in self.entries]

    def to_strings(self, order: MonomialOrder = DEGREVLEX) -> list:
        return [[p.to_str(order) for p in row] for row in self.entries]


def render_combination(row: Sequence[Polynomial], names: Sequence[str], order=DEGREVLEX) -> str:
    """Render a row as a linear combination such as ``d1*y1 - a*y2``."""
    parts = []
    for p, name in zip(row, names):
        for m, c in p.sorted_terms(order):
            factors = [f"d{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e]
            mag = abs(c)
            body = "*".join(([str(mag)] if mag != 1 else []) + factors + [name])
            sign = "-" if c < 0 else "+"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(f"{sign} {body}")
    return " ".join(parts) if parts else "0"


def adjoint(A: OperatorMatrix) -> OperatorMatrix:
    """Formal adjoint: transpose with ``d_i -> -d_i`` in every entry."""
    cols = tuple(tuple(r[k].negate_vars() for r in A.entries) for k in range(A.ncols))
    return OperatorMatrix(cols, A.nvars, A.equation_names, A.unknown_names)


def compose(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    """Matrix product ``A . B`` (apply ``B`` first, then ``A``)."""
    if A.nvars != B.nvars:
        raise DimensionError(f"operators in {A.nvars} and {B.nvars} variables")
    if A.ncols != B.nrows:
        raise ShapeError(f"cannot compose {A.shape} after {B.shape}")
    zero = Polynomial.zero(A.nvars)
    rows = []
    for arow in A.entries:
        out = []
        for k in range(B.ncols):
            acc = zero
            for a, brow in zip(arow, B.entries):
                if a and brow[k]:
                    acc = acc + a * brow[k]
            out.append(acc)
        rows.append(tuple(out))
    return OperatorMatrix(tuple(rows), A.nvars, B.unknown_names, A.equation_names)


def adjoint_contravariance_check(A: OperatorMatrix, B: OperatorMatrix) -> bool:
    """Self-test of ``ad(A.B) == ad(B).ad(A)``."""
    return adjoint(compose(A, B)).same_entries(compose(adjoint(B), adjoint(A)))


@dataclass(frozen=True)
class OperatorTemplate:
    """Operator whose coefficients may involve named rational parameters.

    Entries are polynomials in ``nvars + len(params)`` variables; the trailing
    variables are the parameters.
    """

    entries: tuple
    nvars: int
    params: tuple
    unknown_names: tuple = ()
    equation_names: tuple = ()
    defaults: Mapping = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(r) for r in self.entries))
        object.__setattr__(self, "defaults", dict(self.defaults or {}))
        for row in self.entries:
            for p in row:
                if p.nvars != self.nvars + len(self.params):
                    raise DimensionError("template entry has the wrong number of variables")


def substitute_params(A, bindings: Mapping[str, object] | None = None) -> OperatorMatrix:
    """Replace every named parameter by a rational; plain operators pass through."""
    if isinstance(A, OperatorMatrix):
        return A
    values = dict(A.defaults)
    values.update(bindings or {})
    missing = [p for p in A.params if values.get(p) is None]
    if missing:
        raise UnboundParameterError(f"unbound parameter(s): {', '.join(missing)}")
    point = [as_rational(values[p]) for p in A.params]
    n = A.nvars

    def inst(p: Polynomial) -> Polynomial:
        out: dict = {}
        for m, c in p.terms.items():
            coeff = c
            for v, e in zip(point, m[n:]):
                if e:
                    coeff *= v ** e
            if coeff:
                key = m[:n]
                out[key] = out.get(key, Fraction(0)) + coeff
        return Polynomial(out, n)

    rows = tuple(tuple(inst(p) for p in row) for row in A.entries)
    return OperatorMatrix(rows, n, A.unknown_names, A.equation_names)
