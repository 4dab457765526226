"""Parser for ``.lps`` files describing linear constant-coefficient systems.

Example::

    system kalman
    n = 1
    param a            # unbound; supply with --param a=0
    unknowns y1, y2, y3
    eq d1*y1 - a*y2 - d1*y3 = 0
    eq y1 - d1*y2 + d1*y3 = 0

Each term is a product of an optional rational, derivative symbols ``dI`` or
``dI^K``, parameter names, and exactly one unknown.  The literal ``eq 0 = 0``
denotes an all-zero row.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .diffop import OperatorMatrix
from .errors import ParseError, UnboundParameterError
from .poly import Polynomial, as_rational

# diagnostic codes
SYNTAX = "E500"
UNKNOWN_IDENTIFIER = "E501"
NONLINEAR = "E502"
DERIVATIVE_RANGE = "E503"
DUPLICATE = "E504"
CONSTANT_TERM = "E506"

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_RATIONAL = r"[0-9]+(?:/[0-9]+)?"
_DSYM = re.compile(r"d([0-9]+)$")
_TOKEN = re.compile(
    rf"\s*(?:(?P<num>{_RATIONAL})|(?P<id>{_IDENT})|(?P<op>[-+*^=,]))"
)


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    params: tuple  # exponent per declared parameter
    mu: tuple
    unknown: int


@dataclass(frozen=True)
class SystemSource:
    name: str
    nvars: int
    unknowns: tuple
    params: Mapping  # name -> Fraction or None
    equations: tuple  # tuple of tuples of Term
    lines: tuple = field(default=(), compare=False)


def _tokens(text: str, line: int, col0: int):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", line, col0 + bad + 1, SYNTAX)
        kind = mt.lastgroup
        start = mt.start(kind)
        out.append((kind, mt.group(kind), col0 + start + 1))
        pos = mt.end()
    return out


def _rational(tok: str) -> Fraction:
    num, _, den = tok.partition("/")
    if den and int(den) == 0:
        raise ZeroDivisionError
    return Fraction(int(num), int(den) if den else 1)


def _is_dsym(name: str) -> bool:
    return _DSYM.match(name) is not None


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.name: Optional[str] = None
        self.n: Optional[int] = None
        self.params: dict = {}
        self.unknowns: list = []
        self.equations: list = []
        self.eq_lines: list = []

    def fail(self, msg, line, col, code=SYNTAX):
        raise ParseError(msg, line, col, code)

    def run(self) -> SystemSource:
        for lineno, raw in enumerate(self.text.splitlines(), start=1):
            body = raw.split("#", 1)[0]
            stripped = body.strip()
            if not stripped:
                continue
            col = len(body) - len(body.lstrip()) + 1
            head, _, rest = stripped.partition(" ")
            rest_col = col + len(head) + (len(stripped[len(head):]) - len(stripped[len(head):].lstrip()))
            if head == "system":
                self._system(rest.strip(), lineno, rest_col)
            elif head == "n" or stripped.startswith("n="):
                self._nline(stripped, lineno, col)
            elif head == "param":
                self._param(rest, lineno, rest_col)
            elif head == "unknowns":
                self._unknowns(rest, lineno, rest_col)
            elif head == "eq":
                self._eq(rest, lineno, rest_col)
            else:
                self.fail(f"expected a declaration, found {head!r}", lineno, col)
        if self.name is None:
            self.fail("missing 'system NAME' line", 1, 1)
        if self.n is None:
            self.fail("missing 'n = INT' line", 1, 1)
        if not self.unknowns:
            self.fail("missing 'unknowns' line", 1, 1)
        return SystemSource(
            self.name,
            self.n,
            tuple(self.unknowns),
            dict(self.params),
            tuple(tuple(t) for t in self.equations),
            tuple(self.eq_lines),
        )

    def _system(self, rest, line, col):
        if self.name is not None:
            self.fail("duplicate 'system' line", line, col)
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.\-]*", rest):
            self.fail("system name must be an identifier", line, col)
        self.name = rest

    def _nline(self, stripped, line, col):
        mt = re.fullmatch(r"n\s*=\s*([0-9]+)", stripped)
        if not mt:
            self.fail("expected 'n = INT'", line, col)
        if self.n is not None:
            self.fail("duplicate 'n' line", line, col)
        if self.unknowns or self.equations:
            self.fail("'n' must precede unknowns and equations", line, col)
        self.n = int(mt.group(1))
        if self.n < 1:
            self.fail("n must be at least 1", line, col + mt.start(1))

    def _check_name(self, name, line, col):
        if _is_dsym(name):
            self.fail(f"{name!r} is reserved for derivatives", line, col)
        if name in self.params or name in self.unknowns:
            self.fail(f"duplicate name {name!r}", line, col, DUPLICATE)

    def _param(self, rest, line, col):
        toks = _tokens(rest, line, col - 1)
        if not toks or toks[0][0] != "id":
            self.fail("expected 'param NAME [= RATIONAL]'", line, col)
        name = toks[0][1]
        self._check_name(name, line, toks[0][2])
        value = None
        if len(toks) > 1:
            sign = 1
            t = toks[1:]
            if t[0][1] != "=":
                self.fail("expected '=' after parameter name", line, t[0][2])
            t = t[1:]
            if t and t[0][1] in "+-" and t[0][0] == "op":
                sign = -1 if t[0][1] == "-" else 1
                t = t[1:]
            if len(t) != 1 or t[0][0] != "num":
                self.fail("parameter value must be a rational", line, (t[0][2] if t else col))
            try:
                value = sign * _rational(t[0][1])
            except ZeroDivisionError:
                self.fail("zero denominator", line, t[0][2])
        self.params[name] = value

    def _unknowns(self, rest, line, col):
        if self.n is None:
            self.fail("'n' must be declared before unknowns", line, col)
        if self.unknowns:
            self.fail("duplicate 'unknowns' line", line, col)
        toks = _tokens(rest, line, col - 1)
        expect_id = True
        for kind, val, c in toks:
            if expect_id:
                if kind != "id":
                    self.fail("expected an unknown name", line, c)
                self._check_name(val, line, c)
                self.unknowns.append(val)
            elif val != ",":
                self.fail("expected ','", line, c)
            expect_id = not expect_id
        if expect_id:
            self.fail("expected an unknown name", line, toks[-1][2] if toks else col)

    def _eq(self, rest, line, col):
        if not self.unknowns:
            self.fail("unknowns must be declared before equations", line, col)
        toks = _tokens(rest, line, col - 1)
        eqs = [i for i, t in enumerate(toks) if t[1] == "=" and t[0] == "op"]
        if len(eqs) != 1:
            self.fail("an equation needs exactly one '= 0'", line, col)
        lhs, rhs = toks[: eqs[0]], toks[eqs[0] + 1 :]
        if len(rhs) != 1 or rhs[0][0] != "num" or _rational(rhs[0][1]) != 0:
            self.fail("right-hand side must be 0", line, rhs[0][2] if rhs else toks[eqs[0]][2])
        if not lhs:
            self.fail("empty left-hand side", line, col)
        terms = []
        i = 0
        pnames = list(self.params)
        zero_only = len(lhs) == 1 and lhs[0][0] == "num" and _rational(lhs[0][1]) == 0
        if zero_only:
            self.equations.append([])
            self.eq_lines.append(line)
            return
        while i < len(lhs):
            sign = 1
            if lhs[i][1] in "+-" and lhs[i][0] == "op":
                sign = -1 if lhs[i][1] == "-" else 1
                i += 1
            elif i > 0:
                self.fail("expected '+' or '-' between terms", line, lhs[i][2])
            if i >= len(lhs):
                self.fail("dangling sign", line, lhs[i - 1][2])
            coeff = Fraction(sign)
            pexp = [0] * len(pnames)
            mu = [0] * self.n
            unknown = None
            term_col = lhs[i][2]
            expect_factor = True
            while i < len(lhs) and not (lhs[i][0] == "op" and lhs[i][1] in "+-"):
                kind, val, c = lhs[i]
                if expect_factor:
                    if kind == "num":
                        try:
                            coeff *= _rational(val)
                        except ZeroDivisionError:
                            self.fail("zero denominator", line, c)
                        power = 1
                    elif kind == "id":
                        mt = _DSYM.match(val)
                        power, i = self._power(lhs, i, line)
                        if mt:
                            idx = int(mt.group(1))
                            if not 1 <= idx <= self.n:
                                self.fail(
                                    f"derivative index {idx} out of range 1..{self.n}", line, c, DERIVATIVE_RANGE
                                )
                            mu[idx - 1] += power
                        elif val in self.params:
                            pexp[pnames.index(val)] += power
                        elif val in self.unknowns:
                            if unknown is not None or power != 1:
                                self.fail("nonlinear term: product of unknowns", line, c, NONLINEAR)
                            unknown = self.unknowns.index(val)
                        else:
                            self.fail(f"unknown identifier {val!r}", line, c, UNKNOWN_IDENTIFIER)
                        i -= 1
                    else:
                        self.fail(f"unexpected {val!r}", line, c)
                elif val != "*":
                    self.fail("expected '*' between factors", line, c)
                expect_factor = not expect_factor
                i += 1
            if expect_factor:
                self.fail("dangling '*'", line, lhs[i - 1][2])
            if unknown is None:
                self.fail("constant term: every term must contain one unknown", line, term_col, CONSTANT_TERM)
            terms.append(Term(coeff, tuple(pexp), tuple(mu), unknown))
        self.equations.append(terms)
        self.eq_lines.append(line)

    def _power(self, toks, i, line):
        """Consume an optional ``^K`` after the identifier at ``i``; returns (power, index)."""
        if i + 1 < len(toks) and toks[i + 1][1] == "^":
            if i + 2 >= len(toks) or toks[i + 2][0] != "num" or "/" in toks[i + 2][1]:
                self.fail("expected an integer exponent", line, toks[i + 1][2])
            return int(toks[i + 2][1]), i + 3
        return 1, i + 1


def parse_system(text: str) -> SystemSource:
    return _Parser(text).run()


def lower_to_operator(src: SystemSource, bindings: Optional[Mapping] = None) -> OperatorMatrix:
    """Entry ``(i, k)`` is the polynomial coefficient of unknown ``k`` in equation ``i``."""
    values = dict(src.params)
    for k, v in (bindings or {}).items():
        if k not in values:
            raise UnboundParameterError(f"{src.name} has no parameter {k!r}")
        values[k] = as_rational(v)
    names = list(values)
    n, m = src.nvars, len(src.unknowns)
    rows = []
    for eq in src.equations:
        acc: list = [dict() for _ in range(m)]
        for t in eq:
            c = t.coeff
            for name, e in zip(names, t.params):
                if e:
                    if values[name] is None:
                        raise UnboundParameterError(f"unbound parameter {name!r} (use --param {name}=VALUE)")
                    c *= values[name] ** e
            acc[t.unknown][t.mu] = acc[t.unknown].get(t.mu, 0) + c
        rows.append(tuple(Polynomial(a, n) for a in acc))
    eq_names = tuple(f"eq{i + 1}" for i in range(len(rows)))
    return OperatorMatrix(tuple(rows), n, src.unknowns, eq_names)


def render_dsl(A: OperatorMatrix, name: str = "system") -> str:
    """DSL text that parses back to an entrywise-equal operator."""
    lines = [f"system {name}", f"n = {A.nvars}", "unknowns " + ", ".join(A.unknown_names)]
    for row in A.entries:
        parts = []
        for p, uname in zip(row, A.unknown_names):
            for mu, c in p.sorted_terms():
                factors = [f"d{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(mu) if e]
                mag = abs(c)
                body = "*".join(([str(mag)] if mag != 1 else []) + factors + [uname])
                if not parts:
                    parts.append(("- " if c < 0 else "") + body)
                else:
                    parts.append(("- " if c < 0 else "+ ") + body)
        lines.append("eq " + (" ".join(parts) if parts else "0") + " = 0")
    return "\n".join(lines) + "\n"
