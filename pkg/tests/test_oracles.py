"""Frozen values for the reference oracles themselves."""

from fractions import Fraction

from tests import oracles


def test_bs_rewriting_moves_a_left():
    assert oracles.bs_normalize("bbba", 2, 3) == "abb"
    assert oracles.bs_normalize("bbbbba", 2, 3) == "bbabb"
    # bbba.bbba -> abb.bbba -> ab(bbba) -> ab.abb
    assert oracles.bs_normalize("bbbabbba", 2, 3) == "abbabb"


def test_bs_rewriting_is_idempotent():
    w = oracles.bs_normalize("bbbbbbaa", 2, 3)
    assert oracles.bs_normalize(w, 2, 3) == w == "ababb"


def test_bs_lcm_oracle_values():
    # b * b^2 a = b^3 a = a b^2
    assert oracles.bs_lcm_oracle("b", "a", 2, 3) == "abb"
    assert oracles.bs_lcm_oracle("a", "ba", 2, 3) is None
    assert oracles.bs_lcm_oracle("b", "bb", 2, 3) == "bb"


def test_nxp_oracle():
    assert oracles.nxp_multiply((1, 2), (1, 3)) == (3, 6)
    assert oracles.nxp_lcm_oracle((1, 2), (0, 3)) == (3, 6)
    assert oracles.nxp_lcm_oracle((0, 2), (1, 2)) is None
    assert oracles.nxp_lcm_oracle((0, 2), (5, 1)) == (6, 2)


def test_odometer_oracle():
    assert oracles.odometer_act(1, (1, 1)) == ((0, 0), 1)
    assert oracles.odometer_act(1, (0, 1)) == ((1, 1), 0)
    assert oracles.odometer_act(-1, (0,)) == ((1,), -1)
    assert oracles.odometer_multiply(((), 1), ((1,), 0)) == ((0,), 1)


def test_lattice_oracle():
    assert oracles.in_lattice_bruteforce((2, 0), ((2, 0), (0, 1)), 1)
    assert not oracles.in_lattice_bruteforce((1, 0), ((2, 0), (0, 1)), 1)
    assert oracles.in_lattice_bruteforce((2, 0), ((1, 1), (1, -1)), 2)


def test_partial_sums_oracle():
    assert oracles.scale_monoid_bruteforce((2, 3), 12) == [1, 2, 3, 4, 6, 8, 9, 12]
    assert oracles.zeta_product((2,), 2) == 2
    assert oracles.zeta_product((2, 3), 3) == Fraction(3, 2)
    assert oracles.zeta_partial_bruteforce((2,), 2, 8) == Fraction(15, 8)
