import pytest
from hypothesis import HealthCheck, settings

from rlcm_kms.families import (
    BaumslagSolitar,
    DilationMatrix,
    EasyArtin,
    FiniteFieldShift,
    FreeMonoid,
    NSemidirectP,
    SelfSimilar,
    adding_machine,
)

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def bs23():
    return BaumslagSolitar(2, 3)


@pytest.fixture(scope="session")
def bs33():
    return BaumslagSolitar(3, 3)


@pytest.fixture(scope="session")
def odometer():
    return SelfSimilar(adding_machine())


def criterion_one_families():
    """The families whose admissibility is a hard acceptance requirement."""
    return [
        *(BaumslagSolitar(c, d) for c, d in [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3), (2, 4)]),
        NSemidirectP((2, 3)),
        EasyArtin(2, 1),
        SelfSimilar(adding_machine()),
        DilationMatrix(((2,),)),
        FiniteFieldShift(2),
    ]


def all_families():
    return criterion_one_families() + [
        FreeMonoid(3),
        FiniteFieldShift(3, 1, (2,)),
        DilationMatrix(((1, 1), (1, -1))),
        DilationMatrix(((2, 0), (0, 1))),
    ]
