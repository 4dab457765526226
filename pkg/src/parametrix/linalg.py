"""Exact linear algebra over Q on sparse vectors (dicts keyed by sortable labels)."""

from __future__ import annotations

from fractions import Fraction


class IncrementalSpan:
    """Echelon basis grown one vector at a time, tracking how each row was formed.

    ``key`` orders coordinates; the largest coordinate of a row is its pivot.
    :meth:`add` returns ``None`` when the vector is new, otherwise the linear
    relation (label -> coefficient) that it satisfies with earlier vectors.
    """

    def __init__(self, key=None):
        self.key = key
        self.rows: dict = {}  # pivot -> (vector, combination)

    def _pivot(self, v):
        return max(v, key=self.key) if self.key else max(v)

    def reduce(self, v: dict, combo: dict | None = None):
        v = dict(v)
        combo = dict(combo or {})
        while v:
            p = self._pivot(v)
            row = self.rows.get(p)
            if row is None:
                return v, combo, p
            rv, rc = row
            c = v[p]
            for t, a in rv.items():
                nv = v.get(t, 0) - c * a
                if nv:
                    v[t] = nv
                else:
                    v.pop(t, None)
            for t, a in rc.items():
                nv = combo.get(t, 0) - c * a
                if nv:
                    combo[t] = nv
                else:
                    combo.pop(t, None)
        return v, combo, None

    def add(self, v: dict, label=None):
        rv, combo, p = self.reduce(v, {label: Fraction(1)} if label is not None else {})
        if p is None:
            return combo
        inv = 1 / rv[p]
        self.rows[p] = ({t: a * inv for t, a in rv.items()}, {t: a * inv for t, a in combo.items()})
        return None

    def contains(self, v: dict) -> bool:
        return self.reduce(v)[2] is None

    def residue(self, v: dict) -> dict:
        return self.reduce(v)[0]

    def __len__(self):
        return len(self.rows)


def echelon(vectors, key=None) -> list:
    """Fully reduced row-echelon basis of the span; rows monic, largest pivot first."""
    span = IncrementalSpan(key)
    for v in vectors:
        if v:
            span.add(v)
    pivots = sorted(span.rows, key=key, reverse=True) if key else sorted(span.rows, reverse=True)
    basis = {p: dict(span.rows[p][0]) for p in pivots}
    # back-substitute so no row contains another row's pivot
    for p in reversed(pivots):
        for q in pivots:
            if q == p:
                continue
            row = basis[q]
            c = row.get(p)
            if c:
                for t, a in basis[p].items():
                    nv = row.get(t, 0) - c * a
                    if nv:
                        row[t] = nv
                    else:
                        row.pop(t, None)
    return [basis[p] for p in pivots]
