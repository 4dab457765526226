"""Exact multivariate polynomials over the rationals in the operator symbols.

The symbol ``chi_i`` stands for the derivation ``d_i``; it is printed as ``d1``,
``d2``, ... everywhere.  Coefficients are :class:`fractions.Fraction` values,
which are always stored in lowest terms with a positive denominator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Tuple, Union

from .errors import DimensionError

Monomial = Tuple[int, ...]
Rational = Fraction
Scalar = Union[int, Fraction]

KINDS = ("degrevlex", "deglex", "lex")
EXTENSIONS = ("pot", "top")


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/2"`` to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


def monomial_degree(m: Monomial) -> int:
    return sum(m)


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_quotient(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


@dataclass(frozen=True)
class MonomialOrder:
    """Total, multiplicative well-order on monomials and module terms.

    Variables are ranked ``d1 > d2 > ... > dn``.  Module terms are pairs
    ``(position, monomial)``; with ``pot`` the position is compared first and
    the lower index wins, with ``top`` the monomial is compared first and the
    lower index breaks ties.
    """

    kind: str = "degrevlex"
    module_extension: str = "pot"
    tie_position: str = "lower-index-first"
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.module_extension not in EXTENSIONS:
            raise ValueError(f"unknown module extension {self.module_extension!r}")
        if self.tie_position != "lower-index-first":
            raise ValueError(f"unsupported tie rule {self.tie_position!r}")

    def monomial_key(self, m: Monomial) -> tuple:
        """Flat integer key; a larger tuple means a larger monomial."""
        if self.kind == "degrevlex":
            return (sum(m),) + tuple(-e for e in reversed(m))
        if self.kind == "deglex":
            return (sum(m),) + tuple(m)
        return tuple(m)

    def term_key(self, term) -> tuple:
        """Flat key of a module term ``(position, monomial)``; larger is bigger."""
        key = self._cache.get(term)
        if key is None:
            pos, m = term
            if self.module_extension == "pot":
                key = (-pos,) + self.monomial_key(m)
            else:
                key = self.monomial_key(m) + (-pos,)
            self._cache[term] = key
        return key

    def compare(self, u: Monomial, v: Monomial) -> int:
        ku, kv = self.monomial_key(u), self.monomial_key(v)
        return (ku > kv) - (ku < kv)


DEGREVLEX = MonomialOrder()


def monomial_cmp(u: Monomial, v: Monomial, order: MonomialOrder = DEGREVLEX) -> int:
    """Return -1, 0 or 1 as ``u`` is smaller than, equal to, or larger than ``v``."""
    if len(u) != len(v):
        raise DimensionError(f"monomials of length {len(u)} and {len(v)}")
    return order.compare(tuple(u), tuple(v))


class Polynomial:
    """Immutable polynomial with a canonical sparse term map."""

    __slots__ = ("_terms", "nvars", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | Iterable = (), nvars: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for m, c in items:
            m = tuple(m)
            if nvars is None:
                nvars = len(m)
            elif len(m) != nvars:
                raise DimensionError(f"monomial {m} in a ring with {nvars} variables")
            c = as_rational(c)
            if c:
                s = clean.get(m, 0) + c
                if s:
                    clean[m] = s
                else:
                    clean.pop(m, None)
        if nvars is None:
            raise ValueError("nvars is required for the zero polynomial")
        self._terms = clean
        self.nvars = nvars
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, nvars: int) -> "Polynomial":
        p = object.__new__(cls)
        p._terms = terms
        p.nvars = nvars
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw({}, nvars)

    @classmethod
    def constant(cls, value: Scalar, nvars: int) -> "Polynomial":
        value = as_rational(value)
        return cls._raw({(0,) * nvars: value} if value else {}, nvars)

    @classmethod
    def one(cls, nvars: int) -> "Polynomial":
        return cls.constant(1, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Polynomial":
        """The symbol ``d_{i+1}`` (0-based index)."""
        if not 0 <= i < nvars:
            raise DimensionError(f"variable index {i} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[i] = 1
        return cls._raw({tuple(exps): Fraction(1)}, nvars)

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: Scalar = 1) -> "Polynomial":
        return cls({tuple(exps): coeff}, len(exps))

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and (0,) * self.nvars in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def _check(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise DimensionError(f"polynomials in {self.nvars} and {other.nvars} variables")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = as_rational(other)
            if not c:
                return Polynomial.zero(self.nvars)
            return Polynomial._raw({m: a * c for m, a in self._terms.items()}, self.nvars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Polynomial._raw(out, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def negate_vars(self) -> "Polynomial":
        """Substitute ``d_i -> -d_i``: each term picks up the sign ``(-1)^|mu|``."""
        return Polynomial._raw(
            {m: (-c if sum(m) % 2 else c) for m, c in self._terms.items()}, self.nvars
        )

    def permute_vars(self, perm: Sequence[int]) -> "Polynomial":
        """Rename variable ``i`` to ``perm[i]`` (0-based)."""
        out = {}
        for m, c in self._terms.items():
            new = [0] * self.nvars
            for i, e in enumerate(m):
                new[perm[i]] = e
            out[tuple(new)] = c
        return Polynomial._raw(out, self.nvars)

    def linear_substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Replace variable ``i`` by the polynomial ``images[i]``."""
        result = Polynomial.zero(images[0].nvars if images else self.nvars)
        for m, c in self._terms.items():
            t = Polynomial.constant(c, result.nvars)
            for i, e in enumerate(m):
                if e:
                    t = t * images[i] ** e
            result = result + t
        return result

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.nvars:
            raise DimensionError(f"point of length {len(point)} for {self.nvars} variables")
        total = Fraction(0)
        for m, c in self._terms.items():
            t = c
            for x, e in zip(point, m):
                if e:
                    t *= as_rational(x) ** e
            total += t
        return total

    def sorted_terms(self, order: MonomialOrder = DEGREVLEX):
        """Terms as ``(monomial, coeff)`` pairs, largest first."""
        return sorted(self._terms.items(), key=lambda t: order.monomial_key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = DEGREVLEX):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self._terms, key=order.monomial_key)
        return m, self._terms[m]

    def exact_div(self, other: "Polynomial") -> "Polynomial | None":
        """Quotient ``self / other`` if the division is exact, else ``None``."""
        self._check(other)
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        lm, lc = other.leading_term()
        rest = dict(self._terms)
        quot: dict = {}
        while rest:
            m = max(rest, key=DEGREVLEX.monomial_key)
            if not monomial_divides(lm, m):
                return None
            q = monomial_quotient(m, lm)
            c = rest[m] / lc
            quot[q] = c
            for m2, c2 in other._terms.items():
                t = monomial_mul(q, m2)
                s = rest.get(t, 0) - c * c2
                if s:
                    rest[t] = s
                else:
                    rest.pop(t, None)
        return Polynomial._raw(quot, self.nvars)

    def primitive(self, order: MonomialOrder = DEGREVLEX) -> "Polynomial":
        """Integer coefficients with gcd 1 and a positive leading coefficient."""
        if not self._terms:
            return self
        den = lcm(*(c.denominator for c in self._terms.values()))
        ints = [int(c * den) for c in self._terms.values()]
        g = 0
        for x in ints:
            g = gcd(g, x)
        scale = Fraction(den, g)
        if self.leading_term(order)[1] < 0:
            scale = -scale
        return self * scale

    def to_str(self, order: MonomialOrder = DEGREVLEX, symbol: str = "d") -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms(order):
            factors = [
                f"{symbol}{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e
            ]
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Polynomial({self.to_str()!r}, nvars={self.nvars})"


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    p._check(q)
    return p + q


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    p._check(q)
    return p * q


def poly_negate_vars(p: Polynomial) -> Polynomial:
    return p.negate_vars()


def symbols(nvars: int) -> list[Polynomial]:
    """``[d1, ..., dn]`` as polynomials."""
    return [Polynomial.var(i, nvars) for i in range(nvars)]
