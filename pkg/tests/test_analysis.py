from fractions import Fraction

import pytest

from rlcm_kms.analysis import (
    Fail,
    Holds,
    Pass,
    UndecidedAtDepth,
    Violated,
    alpha,
    alpha_inverse,
    alpha_kernel_witnesses,
    check_admissible,
    check_almost_free,
    check_faithful,
    check_propagation,
    fixed_point_growth,
    fixed_sets,
    kappa_table,
    product_rule,
    propagation_sets,
)
from rlcm_kms.families import BaumslagSolitar, DilationMatrix, EasyArtin, FiniteFieldShift, SelfSimilar, adding_machine


def test_bs31_fails_a1_with_witness():
    r = check_admissible(BaumslagSolitar(3, 1))
    assert isinstance(r.a1, Fail)
    assert r.failed and not r.passed


def test_bs23_admissible(bs23):
    r = check_admissible(bs23)
    assert all(isinstance(c, Pass) for c in r.checks.values())
    assert r.depth == 27


def test_alpha_on_bs23(bs23):
    S = bs23
    # b · b^2 a = b^3 a = a b^2
    assert alpha(S, S.b, S.word("bba")) == S.a
    assert alpha_inverse(S, S.b, S.a) == S.word("bba")
    images = sorted(S.render(alpha(S, S.b, t)) for t in S.transversal(3))
    assert images == ["a", "b^2a", "ba"]


def test_fixed_sets_for_lattice_pair():
    S = DilationMatrix(((2,),))
    fs = fixed_sets(S, S.pair(2, 0), S.pair(0, 0), 4)
    assert fs.exact == ()


def test_kappa_enclosure_width_is_class_mass(bs33):
    S = bs33
    tbl = kappa_table(S, S.b_power(3), S.identity, 9)
    assert tbl.enclosure == (Fraction(0), Fraction(1))
    for row in tbl.rows:
        assert tbl.enclosure[1] - tbl.enclosure[0] <= 1
        assert 0 <= row.exact <= row.class_level <= row.size
    assert tbl.width == Fraction(tbl.deepest.g_minus_t, tbl.deepest.size)


def test_kappa_pins_canonical_trace_for_bs23(bs23):
    S = bs23
    tbl = kappa_table(S, S.b, S.b_power(2), 27)
    assert tbl.enclosure == (0, 0)


@pytest.mark.parametrize("m,n", [(3, 3), (3, 9), (9, 3)])
def test_product_rule(bs33, m, n):
    S = bs33
    direct, composed = product_rule(S, S.b_power(3), S.identity, m, n)
    assert direct == composed


def test_kernel_witnesses():
    S = BaumslagSolitar(4, 2)
    pairs = {(S.render(a), S.render(b)) for a, b in alpha_kernel_witnesses(S, 4)}
    assert ("b^2", "1") in pairs or ("1", "b^2") in pairs
    assert alpha_kernel_witnesses(BaumslagSolitar(2, 3), 4) == []
    A = EasyArtin(2, 1)
    assert alpha_kernel_witnesses(A, 2)


def test_certified_verdicts(bs23, bs33):
    assert isinstance(check_faithful(bs23).verdict, Holds)
    assert isinstance(check_almost_free(bs23).verdict, Holds)
    assert isinstance(check_faithful(bs33).verdict, Violated)
    assert check_faithful(bs33).verdict.witness == (bs33.b_power(3), bs33.identity)
    assert check_propagation(BaumslagSolitar(3, 2)).holds is False


def test_almost_free_witness_has_growing_fixed_points(bs33):
    growth = fixed_point_growth(bs33, bs33.b_power(3), bs33.identity, 27)
    assert all(k > 0 for n, k in growth if n > 1)


def test_propagation_set_for_bs23(bs23):
    data = propagation_sets(bs23, bs23.b, 27)
    assert {bs23.render(x) for x in data.carries} == {"1", "b", "b^2"}
    assert data.stabilized


def test_wreath_example_separates_the_criteria():
    S = FiniteFieldShift(3, 1, (2,))
    assert check_faithful(S).holds is True
    assert check_almost_free(S).holds is False
    assert check_propagation(S).holds is True


def test_odometer_without_certificate_is_undecided():
    S = SelfSimilar(adding_machine())
    r = check_almost_free(S, 4)
    assert isinstance(r.verdict, UndecidedAtDepth)
    assert r.holds is None
