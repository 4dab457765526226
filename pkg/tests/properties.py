"""Invariant checks shared by the property suite and the acceptance run."""

from __future__ import annotations

import random

from oracles import bounded_syzygies, random_operator
from parametrix.analysis import compatibility_conditions, torsion_free_test
from parametrix.diffop import ModuleVector, adjoint, compose
from parametrix.gallery import GALLERY_NAMES, _CATALOG, gallery_build
from parametrix.groebner import buchberger, membership, syzygies

RANDOM_SEEDS = range(50)


def gallery_cases() -> list:
    cases = []
    for name in GALLERY_NAMES:
        lo, hi = _CATALOG[name]["n_range"]
        for n in range(lo, hi + 1):
            if name == "kalman":
                for a in (0, 1, 2):
                    cases.append((f"kalman-a{a}", gallery_build(name, n, {"a": a}).operator))
            else:
                cases.append((f"{name}-n{n}", gallery_build(name, n).operator))
    return cases


def random_cases() -> list:
    return [(f"random-{s}", random_operator(random.Random(1000 + s))) for s in RANDOM_SEEDS]


def check_double_adjoint(A) -> None:
    assert adjoint(adjoint(A)).entries == A.entries


def check_cc_annihilates(A) -> None:
    C = compatibility_conditions(A)
    assert compose(C, A).is_zero()


def check_contained_in_candidate(A) -> None:
    r = torsion_free_test(A)
    gb = buchberger(r.cc_of_candidate.rows(), rank=A.ncols, nvars=A.nvars)
    assert all(membership(row, gb) for row in A.rows())


def check_syzygy_completeness(A) -> None:
    gens = A.rows()
    S = syzygies(gens)
    for s in S.rows:
        total = ModuleVector.zero(A.ncols, A.nvars)
        for c, g in zip(s.components, gens):
            total = total + ModuleVector(tuple(c * p for p in g.components))
        assert total.is_zero()
    oracle = bounded_syzygies(gens, A.order + 3, A.nvars)
    if not oracle:
        return
    assert S.rows, "oracle found syzygies the engine missed"
    gb = buchberger(S.rows, rank=len(gens), nvars=A.nvars)
    assert all(membership(s, gb) for s in oracle)


def check_determinism(A, seed: int = 0) -> None:
    rows = A.rows()
    base = buchberger(rows, rank=A.ncols, nvars=A.nvars).generators
    rng = random.Random(seed)
    for _ in range(3):
        shuffled = rows[:]
        rng.shuffle(shuffled)
        assert buchberger(shuffled, rank=A.ncols, nvars=A.nvars).generators == base


CHECKS = (
    check_double_adjoint,
    check_cc_annihilates,
    check_contained_in_candidate,
    check_syzygy_completeness,
    check_determinism,
)
