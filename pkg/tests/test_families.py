import itertools

import pytest

from rlcm_kms.core import ConstructionError, Disjoint, Lcm, verify_lcm
from rlcm_kms.families import (
    BaumslagSolitar,
    BaumslagSolitarSpec,
    DilationMatrix,
    DilationMatrixSpec,
    EasyArtin,
    EasyArtinSpec,
    FiniteFieldShift,
    FiniteFieldShiftSpec,
    FreeAbelianSpec,
    FreeMonoidSpec,
    MealyAutomaton,
    NSemidirectP,
    NSemidirectPSpec,
    SelfSimilarSpec,
    ZappaSzepSpec,
    build,
    spec_from_dict,
)
from tests import oracles
from tests.conftest import all_families


def bs_word(S, x):
    return oracles.bs_from_payload(x.payload, S.c, S.d)


@pytest.mark.parametrize("c,d", [(2, 3), (3, 2), (2, 2), (1, 2), (2, 4)])
def test_bs_multiplication_matches_rewriting(c, d):
    S = BaumslagSolitar(c, d)
    elems = S.elements_upto(d * d, 2)
    for x, y in itertools.product(elems, repeat=2):
        got = bs_word(S, S.multiply(x, y))
        assert got == oracles.bs_multiply(bs_word(S, x), bs_word(S, y), c, d)


@pytest.mark.parametrize("c,d", [(2, 3), (3, 3), (3, 2)])
def test_bs_lcm_matches_ideal_intersection(c, d):
    S = BaumslagSolitar(c, d)
    elems = S.elements_upto(d * d, 1)
    for x, y in itertools.product(elems, repeat=2):
        out = S.right_lcm(x, y)
        want = oracles.bs_lcm_oracle(bs_word(S, x), bs_word(S, y), c, d)
        if want is None:
            assert isinstance(out, Disjoint), (S.render(x), S.render(y))
        else:
            assert bs_word(S, out.lcm) == want
            assert verify_lcm(S, x, y, out)


def test_bs_word_parser_uses_the_relation(bs23):
    S = bs23
    assert S.word("bbba") == S.word("abb")
    assert S.render(S.word("bbba")) == "a·b^2"
    assert S.scale(S.word("aba")) == 9


def test_nxp_matches_crt_oracle():
    S = NSemidirectP((2, 3))
    elems = S.elements_upto(12, 3)
    for x, y in itertools.product(elems, repeat=2):
        assert S.multiply(x, y).payload == oracles.nxp_multiply(x.payload, y.payload)
        out = S.right_lcm(x, y)
        want = oracles.nxp_lcm_oracle(x.payload, y.payload)
        if want is None:
            assert isinstance(out, Disjoint)
        else:
            assert out.lcm.payload == want


def _odometer_pair(S, x, table):
    word, g = x.payload
    return (word, table[g])


def test_odometer_matches_integer_model(odometer):
    S = odometer
    a = S.g("a")
    table = {}
    g = S.identity
    for k in range(0, 12):
        table[g.payload[1]] = k
        g = S.multiply(g, a)
    inv = S.g("a^-1")
    g = inv
    for k in range(-1, -12, -1):
        table[g.payload[1]] = k
        g = S.multiply(g, inv)
    core = [S.identity, a, S.multiply(a, a), inv]
    elems = [S.multiply(t, c) for t in S.transversal_upto(8) for c in core]
    for x, y in itertools.product(elems, repeat=2):
        got = _odometer_pair(S, S.multiply(x, y), table)
        assert got == oracles.odometer_multiply(_odometer_pair(S, x, table), _odometer_pair(S, y, table))
        out = S.right_lcm(x, y)
        want = oracles.odometer_lcm_word(x.payload[0], y.payload[0])
        if want is None:
            assert isinstance(out, Disjoint)
        else:
            assert out.lcm.payload[0] == want


@pytest.mark.parametrize("matrix", [((2, 0), (0, 1)), ((1, 1), (1, -1)), ((3,),)])
def test_dilation_lattice_membership_matches_search(matrix):
    S = DilationMatrix(matrix)
    d = len(matrix)
    for k in range(3):
        for v in itertools.product(range(-3, 4), repeat=d):
            assert S.in_lattice(v, k) == oracles.in_lattice_bruteforce(v, matrix, k, box=12)


def test_dilation_transversal_and_factor():
    S = DilationMatrix(((1, 1), (1, -1)))
    assert [len(S.transversal(n)) for n in (1, 2, 4, 8)] == [1, 2, 4, 8]
    x = S.pair((3, 5), 2)
    f = S.factor(x)
    assert S.multiply(f.transversal, f.core) == x
    assert S.is_core(f.core)


def test_dilation_lcm_example():
    S = DilationMatrix(((2,),))
    # (0,1) and (1,2) lie in different cosets of 2Z
    assert isinstance(S.right_lcm(S.pair(0, 1), S.pair(1, 2)), Disjoint)
    out = S.right_lcm(S.pair(0, 1), S.pair(2, 2))
    assert isinstance(out, Lcm) and out.lcm == S.pair(2, 2)


def test_finite_field_shift_units_and_factor():
    S = FiniteFieldShift(3, 1, (2,))
    assert S.units == (1, 2)
    x = S.poly((1, 2, 1), 2, 2)
    f = S.factor(x)
    assert S.multiply(f.transversal, f.core) == x
    assert S.scale(x) == 9


@pytest.mark.parametrize("S", all_families(), ids=lambda S: S.tag)
def test_lcm_identity_holds_on_samples(S):
    elems = S.elements_upto(max(S.irreducible_scales) ** 2, 1)[:60]
    for x, y in itertools.product(elems, repeat=2):
        out = S.right_lcm(x, y)
        assert verify_lcm(S, x, y, out)


@pytest.mark.parametrize(
    "spec",
    [
        BaumslagSolitarSpec(3, 2),
        NSemidirectPSpec((2, 5)),
        FreeMonoidSpec(3),
        EasyArtinSpec(2, 2),
        DilationMatrixSpec(((1, 1), (1, -1))),
        FiniteFieldShiftSpec(4, 2, (2,)),
        SelfSimilarSpec(),
        ZappaSzepSpec(FreeMonoidSpec(2), FreeAbelianSpec(1), ((1, 0),), (((1,), (0,)),)),
    ],
    ids=lambda s: s.kind,
)
def test_spec_round_trip(spec):
    assert spec_from_dict(spec.to_dict()) == spec or spec_from_dict(spec.to_dict()).to_dict() == spec.to_dict()


def test_build_from_spec():
    assert build(BaumslagSolitarSpec(2, 3)).tag == "BS(2,3)"
    assert build(NSemidirectPSpec((2, 3))).irreducible_scales == (2, 3)


@pytest.mark.parametrize(
    "make",
    [
        lambda: BaumslagSolitar(1, 1),
        lambda: BaumslagSolitar(0, 2),
        lambda: FiniteFieldShift(6),
        lambda: FiniteFieldShift(3, 1, (0,)),
        lambda: DilationMatrix(((1, 0), (0, 1))),
        lambda: EasyArtin(1, 1),
        lambda: MealyAutomaton(("a",), ("0", "1"), {"a": ((0, "a"), (0, "a"))}),
        lambda: build(ZappaSzepSpec(FreeMonoidSpec(2), FreeMonoidSpec(2))),
        lambda: spec_from_dict({"family": "nope"}),
        lambda: spec_from_dict({"family": "bs", "e": 1}),
        lambda: spec_from_dict({}),
    ],
)
def test_construction_errors_name_the_constraint(make):
    with pytest.raises(ConstructionError) as err:
        make()
    assert "violated constraint" in str(err.value)


def test_zs_refuses_free_acting_monoid():
    with pytest.raises(ConstructionError, match="left reversible"):
        build(ZappaSzepSpec(FreeMonoidSpec(2), FreeMonoidSpec(2)))


@pytest.mark.parametrize("c", range(1, 7))
@pytest.mark.parametrize("d", range(1, 7))
def test_bs_certificates_follow_divisibility(c, d):
    if c * d == 1:
        pytest.skip("BS(1,1) is excluded")
    S = BaumslagSolitar(c, d)
    assert S.almost_free_certificate().holds == (c % d != 0)
    assert S.faithful_certificate().holds == (c % d != 0)
    assert S.propagation_certificate().holds == (c <= d)
