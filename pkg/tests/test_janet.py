import random
import time

import pytest

from oracles import random_operator
from parametrix.analysis import torsion_free_test
from parametrix.diffop import ModuleVector, OperatorMatrix
from parametrix.dsl import lower_to_operator, parse_system
from parametrix.errors import CompletionCapError, NotInvolutiveError
from parametrix.gallery import cosserat_d1, killing, stress
from parametrix.groebner import module_equal
from parametrix.janet import (
    InvolutiveSystem,
    full_torsion_check,
    involutive_completion,
    is_involutive,
    janet_multiplicative,
    jet_key,
    multi_index_class,
    permutation_trials,
    spencer_form,
)
from parametrix.poly import symbols

d1, d2, d3 = symbols(3)

MIXED_TEXT = """system ex
n = 3
unknowns y
eq d1^2*y = 0
eq d1*d3*y - d2*y = 0
"""


def mixed_system() -> OperatorMatrix:
    return lower_to_operator(parse_system(MIXED_TEXT))


def rows_of(*polys, n):
    return [ModuleVector((p,)) for p in polys]


def permuted(A: OperatorMatrix, perm) -> list:
    return [ModuleVector(tuple(p.permute_vars(perm) for p in v.components)) for v in A.rows()]


# -- classes and multiplicative variables ---------------------------------------------


def test_multi_index_class():
    assert multi_index_class((0, 2, 1)) == 2
    assert multi_index_class((1, 0, 0)) == 1
    assert multi_index_class((0, 0, 0)) == 3


def test_janet_multiplicative_examples():
    mult = janet_multiplicative([(0, 0, 2), (0, 1, 1), (0, 2, 0), (1, 0, 1)])
    assert mult == [frozenset({1, 2, 3}), frozenset({1, 2}), frozenset({1, 2}), frozenset({1})]


def test_lower_order_equations_get_no_multiplicative_variables():
    mult = janet_multiplicative([(0, 2), (1, 0)], orders=[2, 1])
    assert mult == [frozenset({1, 2}), frozenset()]


def test_jet_key_orders_by_total_order_first():
    low, high = (0, (0, 0, 1)), (0, (1, 1, 0))
    assert jet_key(high) > jet_key(low)


def test_permutation_trial_order():
    trials = permutation_trials(3)
    assert trials[0] == (0, 1, 2) and trials[1] == (2, 1, 0)
    assert len(trials) == 6 == len(set(trials))
    assert permutation_trials(1) == [(0,)]


# -- involution test ---------------------------------------------------------------------


def test_original_system_is_not_involutive():
    ok, witness = is_involutive(mixed_system())
    assert not ok and witness is not None


def test_permuted_system_reports_the_missing_mixed_jet():
    A = mixed_system()
    rows = permuted(A, (2, 1, 0))
    ok, w = is_involutive(rows)
    assert not ok
    assert w.variable == 3
    # remainder is a constant multiple of y_{23}
    target = ModuleVector((d2 * d3,))
    assert module_equal([w.remainder], [target], rank=1, nvars=3)


def test_single_equation_is_involutive():
    (x,) = symbols(1)
    ok, w = is_involutive(OperatorMatrix.from_rows([[x**2]], 1))
    assert ok and w is None


def test_killing_prolongation_is_involutive():
    sys = involutive_completion(killing(2))
    assert is_involutive(sys.operator()) == (True, None)


# -- completion ---------------------------------------------------------------------------


def test_completion_of_mixed_jet_system():
    t0 = time.perf_counter()
    sys = involutive_completion(mixed_system())
    assert time.perf_counter() - t0 < 5.0
    assert sys.involutive and sys.permutation == (2, 1, 0)
    assert sorted(e.klass for e in sys.equations) == [1, 2, 2, 3]
    assert sys.class_counts() == {3: 1, 2: 2, 1: 1}
    expected = rows_of(d3**2, d2 * d3, d2**2, d1 * d3 - d2, n=3)
    assert module_equal([e.row for e in sys.equations], expected, rank=1, nvars=3)
    assert full_torsion_check(sys)
    assert is_involutive(sys.operator())[0]


def test_completion_preserves_row_module():
    for A in (mixed_system(), killing(2), stress(2), killing(3)):
        sys = involutive_completion(A)
        before = permuted(A, sys.permutation)
        after = [e.row for e in sys.equations]
        assert module_equal(before, after, rank=A.ncols, nvars=A.nvars)


def test_completion_with_explicit_permutation():
    sys = involutive_completion(mixed_system(), permutation=(2, 1, 0))
    assert sys.permutation == (2, 1, 0)
    with pytest.raises(CompletionCapError):
        involutive_completion(mixed_system(), permutation=(0, 1, 2), degree_cap=4)


def test_cap_exhaustion_raises():
    with pytest.raises(CompletionCapError):
        involutive_completion(mixed_system(), degree_cap=1)


def test_degree_cap_from_environment(monkeypatch):
    monkeypatch.setenv("PARAMETRIX_DEGREE_CAP", "1")
    with pytest.raises(CompletionCapError):
        involutive_completion(mixed_system())


def test_killing_completion_adds_second_order_jets():
    sys = involutive_completion(killing(2))
    assert sys.order == 2
    assert sys.class_counts() == {2: 2, 1: 4}
    assert len(sys.equations) == 9
    assert len(sys.added) == 6
    assert all(e.order == 2 for e in sys.equations if e.row in sys.added)
    assert full_torsion_check(sys)


def test_stress_is_not_all_torsion():
    sys = involutive_completion(stress(2))
    assert sys.permutation == (0, 1)
    assert not full_torsion_check(sys)


def test_full_torsion_check_rejects_non_involutive():
    bogus = InvolutiveSystem((), 2, 1, False, ((1, 0), (0, 1)))
    with pytest.raises(NotInvolutiveError):
        full_torsion_check(bogus)
    with pytest.raises(NotInvolutiveError):
        spencer_form(bogus)


def test_full_torsion_agrees_with_five_step_test():
    for A in (killing(2), stress(2), mixed_system(), cosserat_d1()):
        sys = involutive_completion(A)
        r = torsion_free_test(A)
        everything_torsion = r.candidate_parametrization.ncols == 0 or r.candidate_parametrization.is_zero()
        assert full_torsion_check(sys) == everything_torsion


@pytest.mark.parametrize("seed", range(10))
def test_random_completion_is_involutive(seed):
    A = random_operator(random.Random(seed), max_order=2)
    if A.is_zero():
        return
    sys = involutive_completion(A)
    assert is_involutive(sys.operator())[0]
    if sys.permutation is not None:
        assert module_equal(permuted(A, sys.permutation), [e.row for e in sys.equations], rank=A.ncols, nvars=A.nvars)


# -- Spencer form ------------------------------------------------------------------------------


def test_spencer_form_of_double_integrator():
    (x,) = symbols(1)
    sys = involutive_completion(OperatorMatrix.from_rows([[x**2]], 1))
    S = spencer_form(sys)
    assert S.operator.to_strings() == [["d1", "-1"], ["0", "d1"]]
    assert S.operator.order == 1
    assert full_torsion_check(involutive_completion(S.operator))


def test_spencer_form_of_first_order_system_is_itself():
    sys = involutive_completion(cosserat_d1())
    S = spencer_form(sys)
    assert module_equal(S.operator.rows(), [e.row for e in sys.equations])


def test_spencer_form_of_killing_is_cosserat_operator():
    S = spencer_form(involutive_completion(killing(2)))
    assert S.operator.order == 1
    assert S.operator.ncols == 3
    assert module_equal(S.operator.rows(), cosserat_d1().rows(), rank=3, nvars=2)
    assert S.new_unknowns[0].startswith("xi1") and S.new_unknowns[2] == "xi2_1"
