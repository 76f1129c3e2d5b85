"""Algebraic invariants as hypothesis properties over random words in the generators."""

from fractions import Fraction
from math import lcm

import pytest
from hypothesis import given, strategies as st

from rlcm_kms.core import Disjoint, monoid_closure
from rlcm_kms.families import BaumslagSolitar, DilationMatrix, FiniteFieldShift, NSemidirectP, SelfSimilar, adding_machine
from rlcm_kms.kms import geometric_tail_bound, kms_value, zeta, zeta_partial_sum
from tests import oracles

FAMILIES = {
    "bs23": BaumslagSolitar(2, 3),
    "bs33": BaumslagSolitar(3, 3),
    "bs32": BaumslagSolitar(3, 2),
    "nxp": NSemidirectP((2, 3)),
    "odometer": SelfSimilar(adding_machine()),
    "dilation": DilationMatrix(((1, 1), (1, -1))),
    "ffs": FiniteFieldShift(3, 1, (2,)),
}


def words(S, max_len=4):
    gens = list(S.generators())
    return st.lists(st.sampled_from(gens), max_size=max_len).map(lambda ws: S.mul(S.identity, *ws))


def family_and(n):
    return st.sampled_from(sorted(FAMILIES)).flatmap(
        lambda k: st.tuples(st.just(FAMILIES[k]), *[words(FAMILIES[k]) for _ in range(n)])
    )


@given(family_and(3))
def test_associative(case):
    S, x, y, z = case
    assert S.multiply(S.multiply(x, y), z) == S.multiply(x, S.multiply(y, z))


@given(family_and(2))
def test_scale_is_multiplicative(case):
    S, x, y = case
    assert S.scale(S.multiply(x, y)) == S.scale(x) * S.scale(y)


@given(family_and(2))
def test_left_division_inverts_multiplication(case):
    S, x, y = case
    assert S.left_divide(x, S.multiply(x, y)) == y


@given(family_and(1))
def test_factorization_is_canonical(case):
    S, x = case
    f = S.factor(x)
    assert S.multiply(f.transversal, f.core) == x
    assert S.is_core(f.core)
    assert f.transversal in S.transversal(S.scale(x))
    assert S.factor(f.transversal).transversal == f.transversal


@given(family_and(2))
def test_lcm_is_a_least_common_multiple(case):
    S, x, y = case
    out = S.right_lcm(x, y)
    back = S.right_lcm(y, x)
    if isinstance(out, Disjoint):
        assert isinstance(back, Disjoint)
        return
    assert S.multiply(x, out.left) == out.lcm == S.multiply(y, out.right)
    assert S.scale(out.lcm) == lcm(S.scale(x), S.scale(y))
    # the two orders generate the same right ideal
    assert S.left_divide(out.lcm, back.lcm) is not None
    assert S.left_divide(back.lcm, out.lcm) is not None


@given(family_and(3))
def test_lcm_dominates_common_multiples(case):
    S, x, y, z = case
    out = S.right_lcm(x, y)
    if isinstance(out, Disjoint):
        return
    common = S.multiply(out.lcm, z)
    assert S.left_divide(x, common) is not None
    assert S.left_divide(y, common) is not None


@given(st.sampled_from(sorted(FAMILIES)), st.data())
def test_transversal_elements_are_pairwise_disjoint(key, data):
    S = FAMILIES[key]
    n = data.draw(st.sampled_from(S.scale_values(max(S.irreducible_scales) ** 2)))
    level = S.transversal(n)
    assert len(level) == n
    f, g = data.draw(st.sampled_from(level)), data.draw(st.sampled_from(level))
    if f != g:
        assert isinstance(S.right_lcm(f, g), Disjoint)


@given(st.lists(st.sampled_from([2, 3, 5]), min_size=1, unique=True), st.integers(2, 4), st.integers(1, 200))
def test_zeta_partial_sums_stay_under_the_geometric_tail(index, beta, cutoff):
    value = zeta(index, beta).value.value
    partial = zeta_partial_sum(index, beta, cutoff)
    assert partial == oracles.zeta_partial_bruteforce(index, beta, cutoff)
    assert value == oracles.zeta_product(index, beta)
    assert 0 <= value - partial <= geometric_tail_bound(index, beta, cutoff)


@given(st.lists(st.integers(2, 12), min_size=1, max_size=3), st.integers(1, 500))
def test_scale_monoid_closure(gens, bound):
    assert monoid_closure(gens, bound) == oracles.scale_monoid_bruteforce(gens, bound)


@pytest.mark.parametrize("beta", [1, 2, 3])
@given(data=st.data())
def test_kms_values_are_weighted_deltas_on_bs23(beta, data):
    S = FAMILIES["bs23"]
    s = data.draw(words(S, 5))
    t = data.draw(words(S, 5))
    v = kms_value(S, beta, s, t)
    assert v.value == (Fraction(1, S.scale(s) ** beta) if s == t else 0)
