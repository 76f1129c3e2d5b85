from fractions import Fraction

import numpy as np
import pytest

from rlcm_kms.core import SizingError, UsageError
from rlcm_kms.kms import Rho
from rlcm_kms.rep import OUT, build_rep, defect_projection, ground_vector_value, verify_reconstruction, verify_relations
from rlcm_kms.families import NSemidirectP


@pytest.fixture(scope="module")
def rep23(bs23):
    return build_rep(bs23, level_cap=9, core_cap=2)


def test_basis_sizes(bs23, rep23):
    assert rep23.size == 13 * 5
    assert build_rep(bs23, level_cap=9, core_cap=2, core_basis="semigroup").size == 39


def test_identity_operator(bs23, rep23):
    V = rep23.operator(bs23.identity).toarray()
    assert np.array_equal(V, np.eye(rep23.size, dtype=np.int64))


def test_column_of_a_at_origin(bs23, rep23):
    key = rep23.trace_vector()
    assert rep23.apply(bs23.a, key) == (bs23.a, key[1])


def test_operators_are_partial_permutations(rep23):
    for M in rep23.operators.values():
        assert np.all(np.diff(M.tocsc().indptr) <= 1)
        assert set(M.data) <= {1}


def test_relations_hold(rep23):
    report = verify_relations(rep23)
    assert report.passed, report.failures()
    names = {c.name for c in report.checks}
    assert "V[a]*V[ba] = 0" in names
    assert "d[1] = 0" in names
    assert "V[b] d[3] = d[3] V[b]" in names


def test_defect_projection_idempotent(rep23):
    d, exact = defect_projection(rep23, 3)
    dd = (d @ d - d).tocsc()[:, exact]
    assert dd.nnz == 0


def test_leaving_the_truncation_is_flagged(bs23, rep23):
    S = bs23
    edge = (S.identity, S.core_group_embed(S.b_power(2)))
    assert rep23.apply(S.b, edge) == OUT
    assert rep23.apply_adjoint(S.b, (S.identity, S.core_group_inverse(edge[1]))) == OUT
    # V_a* of the origin is the zero vector, not a truncation artefact
    assert rep23.apply_adjoint(S.a, rep23.trace_vector()) is None
    assert not rep23.interior_mask().all()


def test_reconstruction(bs23, rep23):
    S = bs23
    rr = verify_reconstruction(rep23, 2, [3], [(S.b, S.b), (S.b, S.identity), (S.a, S.a)])
    assert rr.zeta_I == Fraction(3, 2)
    assert rr.phi_QI == Fraction(2, 3)
    assert rr.passed
    assert rr.max_deviation <= rr.bound


def test_reconstruction_with_empty_index(bs23, rep23):
    rr = verify_reconstruction(rep23, 2, [], [])
    assert rr.zeta_I == 1
    assert rr.phi_QI <= 1 <= rr.phi_QI_upper


def test_ground_vector(bs23, rep23):
    S = bs23
    assert ground_vector_value(rep23, S.a, S.a) == 0
    assert ground_vector_value(rep23, S.b, S.b) == 1
    assert ground_vector_value(rep23, S.b, S.identity) == 0


def test_refusals(bs23):
    with pytest.raises(UsageError):
        build_rep(bs23, Rho())
    with pytest.raises(SizingError) as err:
        build_rep(NSemidirectP((2, 3)), level_cap=500, core_cap=3, max_basis=1000)
    assert "level_cap" in err.value.suggestion
