"""Baumslag-Solitar monoids ``BS(c,d)+ = <a, b | a b^c = b^d a>``.

Normal form: a word over the letters ``w_j = b^j a`` (``0 <= j < d``) followed
by a power of ``b``.  Pushing ``b^m`` across ``w_j`` uses ``m + j = q d + r``:
``b^m w_j = w_r b^(q c)``.
"""

from __future__ import annotations

from ..core import Certificate, ConstructionError, Element
from .zappa_szep import Naturals, ZappaSzepSemigroup


class BaumslagSolitar(ZappaSzepSemigroup):
    right_cancellative = True

    def __init__(self, c: int, d: int):
        if c < 1 or d < 1:
            raise ConstructionError("c >= 1 and d >= 1", f"got c={c}, d={d}")
        if c * d <= 1:
            raise ConstructionError("c*d > 1", f"got c={c}, d={d}")
        self.c, self.d = c, d

        def act(m: int, j: int) -> tuple[int, int]:
            q, r = divmod(m + j, d)
            return r, q * c

        names = ["a" if j == 0 else ("ba" if j == 1 else f"b^{j}a") for j in range(d)]
        super().__init__(f"BS({c},{d})", d, Naturals("b"), act, names)

    @property
    def a(self) -> Element:
        return self.u_element((0,))

    @property
    def b(self) -> Element:
        return self.a_element(1)

    def b_power(self, k: int) -> Element:
        return self.a_element(k)

    def word(self, text: str) -> Element:
        """Product of the generators spelled by ``text`` (letters ``a`` and ``b``)."""
        gens = {"a": self.a, "b": self.b}
        try:
            return self.mul(*(gens[ch] for ch in text if not ch.isspace()))
        except KeyError as exc:
            raise ValueError(f"unexpected letter {exc.args[0]!r} in BS word") from None

    def faithful_certificate(self) -> Certificate:
        if self.c % self.d == 0:
            return Certificate(False, "c is a multiple of d, so b^d acts trivially", (self.b_power(self.d), self.identity))
        return Certificate(True, "c is not a multiple of d")

    def almost_free_certificate(self) -> Certificate:
        if self.c % self.d == 0:
            return Certificate(False, "c is a multiple of d, so b^d fixes every transversal element", (self.b_power(self.d), self.identity))
        return Certificate(True, "c is not a multiple of d: each b^n with n > 0 fixes only finitely many words")

    def propagation_certificate(self) -> Certificate:
        if self.c <= self.d:
            return Certificate(True, "c <= d: carries never exceed max(m, c)")
        return Certificate(False, "c > d: carries grow without bound", (self.b,))

    def describe(self) -> dict:
        out = super().describe()
        out.update({"c": self.c, "d": self.d, "relation": f"a b^{self.c} = b^{self.d} a"})
        if self.d == 1:
            out["warning"] = "d = 1: the scale d^length is trivial"
        return out
