"""Free monoids, ``F_m+ x N^n``, and Zappa-Szep products given by tables."""

from __future__ import annotations

from typing import Sequence

from ..core import Certificate, ConstructionError
from .zappa_szep import FreeAbelian, TableAction, ZappaSzepSemigroup, check_zs_axioms


def _trivial(a, x):
    return x, a


class FreeMonoid(ZappaSzepSemigroup):
    """The free monoid on ``m >= 2`` letters; its core is trivial."""

    right_cancellative = True

    def __init__(self, m: int):
        if m < 2:
            raise ConstructionError("alphabet size m >= 2", f"got m={m}")
        super().__init__(f"F{m}+", m, FreeAbelian(0), _trivial)
        self.m = m

    def faithful_certificate(self):
        return Certificate(True, "trivial core")

    def almost_free_certificate(self):
        return Certificate(True, "trivial core")

    def propagation_certificate(self):
        return Certificate(True, "trivial core")


class EasyArtin(ZappaSzepSemigroup):
    """``F_m+ x N^n``: free letters commute with ``n`` free commuting generators."""

    right_cancellative = True

    def __init__(self, m: int, n: int):
        if m < 2:
            raise ConstructionError("m >= 2", f"got m={m}")
        if n < 0:
            raise ConstructionError("n >= 0", f"got n={n}")
        super().__init__(f"F{m}+xN^{n}", m, FreeAbelian(n), _trivial)
        self.m, self.n = m, n

    def faithful_certificate(self):
        if self.n == 0:
            return Certificate(True, "trivial core")
        e1 = self.a_element(tuple(int(i == 0) for i in range(self.n)))
        return Certificate(False, "the N^n factor acts trivially", (e1, self.identity))

    def almost_free_certificate(self):
        return self.faithful_certificate()

    def propagation_certificate(self):
        return Certificate(True, "trivial action: C_a = {a}")


class TableZappaSzep(ZappaSzepSemigroup):
    """``X* ⋈ N^n`` with the action and restriction given on generators by tables."""

    def __init__(
        self,
        letters: int,
        rank: int,
        action: Sequence[Sequence[int]],
        restriction: Sequence[Sequence[Sequence[int]]],
    ):
        if letters < 2:
            raise ConstructionError("U is a free monoid on >= 2 letters", f"got {letters}")
        if len(action) != rank:
            raise ConstructionError("one action row per generator of A", f"{len(action)} rows for rank {rank}")
        table = TableAction(letters, action, restriction)
        super().__init__(f"ZS(F{letters}+,N^{rank})", letters, FreeAbelian(rank), table)
        self.table = table
        bad = check_zs_axioms(self, max_len=3, samples=50)
        if bad:
            raise ConstructionError("Zappa-Szep axioms (ZS1)-(ZS8)", bad[0])
