from fractions import Fraction

import pytest

from rlcm_kms.kms import (
    Canonical,
    NoKmsStateError,
    Rho,
    Table,
    boundary_factoring,
    classify,
    critical_beta,
    estimate_critical_beta,
    foundation_mass,
    foundation_sum,
    geometric_tail_bound,
    ground_state_value,
    kms_value,
    zeta,
    zeta_partial_sum,
)
from rlcm_kms.core import UsageError
from rlcm_kms.families import BaumslagSolitar, FiniteFieldShift, NSemidirectP


def test_zeta_exact_values():
    assert zeta([2], 2).value.value == 2
    assert zeta([2, 3], 3).value.value == Fraction(3, 2)
    assert zeta([3], 2).value.value == Fraction(3, 2)
    assert zeta([], 5).value.value == 1


def test_zeta_diverges_at_one():
    z = zeta([2], 1)
    assert not z.converges and z.value is None


def test_zeta_non_integer_beta_is_a_tight_enclosure():
    v = zeta([2], Fraction(5, 2)).value
    exact = 1 / (1 - 2**-1.5)
    assert float(v.lo) <= exact <= float(v.hi)
    assert v.width < Fraction(1, 2**30)


def test_partial_sum_tail(bs23):
    assert zeta_partial_sum([3], 2, 81) == Fraction(121, 81)
    assert zeta([3], 2).value.value - zeta_partial_sum([3], 2, 81) <= geometric_tail_bound([3], 2, 81)


def test_critical_beta(bs23):
    assert critical_beta(bs23).value == 1
    assert critical_beta(BaumslagSolitar(3, 1)).value is None


def test_estimate_critical_beta_is_flagged_inexact():
    est = estimate_critical_beta([2, 3], 10**4)
    assert not est.exact
    assert 1 <= est.value < 2


def test_no_states_below_one(bs23):
    with pytest.raises(NoKmsStateError):
        kms_value(bs23, Fraction(1, 2), bs23.b, bs23.b)


def test_spanning_values_vanish_off_the_diagonal_class(bs23):
    S = bs23
    assert kms_value(S, 2, S.a, S.word("ba")).value == 0
    assert kms_value(S, 2, S.a, S.a).value == Fraction(1, 9)
    assert kms_value(S, 1, S.a, S.a).value == Fraction(1, 3)


def test_series_enclosure_contains_closed_form(bs23):
    S = bs23
    v = kms_value(S, 2, S.b, S.identity, cutoff=81)
    assert v.contains(0)
    assert v.width <= v.tail_bound
    assert v.tail_bound == Fraction(1, 162)
    w = kms_value(S, 2, S.b, S.b, cutoff=81)
    assert w.contains(1)


def test_non_integer_beta(bs23):
    v = kms_value(bs23, Fraction(3, 2), bs23.a, bs23.a)
    assert v.mode == "float"
    assert float(v.lo) <= 3**-1.5 <= float(v.hi)
    assert v.width < Fraction(1, 2**30)


def test_table_trace_feeds_the_series(bs23):
    S = bs23
    tau = Table({(S.b, S.identity): Fraction(1, 2), (S.identity, S.b): Fraction(1, 2)})
    v = kms_value(S, 2, S.b, S.identity, tau, cutoff=27)
    assert v.lo <= v.hi


def test_rho_at_one_matches_canonical_for_bs23(bs23):
    S = bs23
    for a in [S.identity, S.b, S.b_power(2)]:
        for b in [S.identity, S.b, S.b_power(2)]:
            assert kms_value(S, 1, a, b, Rho(27)).value == kms_value(S, 1, a, b, Canonical()).value


def test_rho_at_one_for_nonfaithful_family(bs33):
    S = bs33
    v = kms_value(S, 1, S.b_power(3), S.identity)
    assert (v.lo, v.hi) == (0, 1)


def test_ground_states(bs23):
    S = bs23
    assert ground_state_value(S, S.a, S.a).value == 0
    assert ground_state_value(S, S.b, S.b).value == 1
    assert ground_state_value(S, S.b, S.identity).value == 0
    assert ground_state_value(S, S.identity, S.identity).value == 1


@pytest.mark.parametrize("beta", [1, 2, 3])
@pytest.mark.parametrize("n", [3, 9, 27])
def test_foundation_sum(bs23, beta, n):
    assert foundation_sum(bs23, beta, n) == foundation_mass(n, beta) == Fraction(n) ** (1 - beta)


def test_foundation_mass_exceeds_one_below_one():
    assert foundation_mass(3, 0) == 3 > 1


def test_boundary_factoring(bs23):
    assert boundary_factoring(bs23, 1).factors_through_Qp
    v = boundary_factoring(bs23, 2)
    assert not v.factors_through_Qp and v.factors_through_Qc


def test_kms_refuses_trivial_scale():
    with pytest.raises(UsageError):
        kms_value(BaumslagSolitar(3, 1), 2, BaumslagSolitar(3, 1).identity, BaumslagSolitar(3, 1).identity)


def test_classify_routes(bs23, bs33):
    assert classify(bs23, 1).item("uniqueness").payload["route"] == "2a"
    c = classify(bs33, 1)
    assert c.item("uniqueness").verdict == "undecided"
    assert c.item("uniqueness").payload["witness"] == ("Faithful", ("b^3", "1"))
    wreath = classify(FiniteFieldShift(3, 1, (2,)), 1)
    assert wreath.item("uniqueness").payload["route"] == "2b"


def test_classify_above_and_at_infinity():
    S = NSemidirectP((2, 3))
    keys = [i.key for i in classify(S, 2).items]
    assert "parametrization" in keys and "uniqueness" not in keys
    inf = classify(S, "inf")
    assert inf.beta is None
    assert inf.item("no_ground_states_on_Qp").verdict == "holds"
