"""Small finite fields ``GF(q)`` and polynomials over them.

Field elements are the integers ``0 .. q-1``, read as base-``p`` digit
vectors of a polynomial modulo a fixed irreducible of degree ``e``.
Multiplication uses a full table, so ``q`` is capped.
"""

from __future__ import annotations

import itertools

from ..core import ConstructionError

MAX_Q = 256

Poly = tuple[int, ...]  # coefficients, lowest degree first, no trailing zeros


def prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return (p, e) if q == 1 else None


def _polymod_p(a: list[int], m: list[int], p: int) -> list[int]:
    """``a mod m`` over ``F_p``; ``m`` monic."""
    a = a[:]
    while len(a) >= len(m):
        lead = a[-1]
        if lead:
            shift = len(a) - len(m)
            for i, c in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * c) % p
        a.pop()
    return a


def _irreducible(p: int, e: int) -> list[int]:
    """Lexicographically first monic irreducible of degree ``e`` over ``F_p``."""
    if e == 1:
        return [0, 1]
    for tail in itertools.product(range(p), repeat=e):
        cand = list(tail) + [1]
        if cand[0] == 0:
            continue
        ok = True
        for deg in range(1, e // 2 + 1):
            for low in itertools.product(range(p), repeat=deg):
                div = list(low) + [1]
                if not any(_polymod_p(cand, div, p)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return cand
    raise AssertionError("no irreducible polynomial found")  # cannot happen


class GF:
    def __init__(self, q: int):
        pe = prime_power(q)
        if pe is None:
            raise ConstructionError("q is a prime power", f"got q={q}")
        if q > MAX_Q:
            raise ConstructionError(f"q <= {MAX_Q}", f"got q={q}")
        self.q = q
        self.p, self.e = pe
        self.modulus = _irreducible(self.p, self.e)
        digits = [self._digits(x) for x in range(q)]
        self._add = [[self._from_digits([(a + b) % self.p for a, b in zip(digits[x], digits[y])]) for y in range(q)] for x in range(q)]
        self._neg = [self._from_digits([(-a) % self.p for a in digits[x]]) for x in range(q)]
        self._mul = [[self._mul_slow(digits[x], digits[y]) for y in range(q)] for x in range(q)]
        self._inv = [0] * q
        for x in range(1, q):
            self._inv[x] = next(y for y in range(1, q) if self._mul[x][y] == 1)

    def _digits(self, x: int) -> list[int]:
        out = []
        for _ in range(self.e):
            x, r = divmod(x, self.p)
            out.append(r)
        return out

    def _from_digits(self, ds) -> int:
        return sum(d * self.p**i for i, d in enumerate(ds))

    def _mul_slow(self, a: list[int], b: list[int]) -> int:
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % self.p
        r = _polymod_p(prod, self.modulus, self.p)
        return self._from_digits(r + [0] * (self.e - len(r)))

    def add(self, x: int, y: int) -> int:
        return self._add[x][y]

    def sub(self, x: int, y: int) -> int:
        return self._add[x][self._neg[y]]

    def mul(self, x: int, y: int) -> int:
        return self._mul[x][y]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse in GF(q)")
        return self._inv[x]

    def subgroup(self, gens) -> tuple[int, ...]:
        """Sorted multiplicative subgroup generated by ``gens``."""
        seen = {1}
        frontier = [1]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return tuple(sorted(seen))

    # -- polynomials --------------------------------------------------------
    @staticmethod
    def trim(a) -> Poly:
        a = list(a)
        while a and a[-1] == 0:
            a.pop()
        return tuple(a)

    def padd(self, a: Poly, b: Poly) -> Poly:
        n = max(len(a), len(b))
        a2 = list(a) + [0] * (n - len(a))
        b2 = list(b) + [0] * (n - len(b))
        return self.trim(self.add(x, y) for x, y in zip(a2, b2))

    def psub(self, a: Poly, b: Poly) -> Poly:
        return self.padd(a, self.pscale(self._neg[1], b))

    def pscale(self, lam: int, a: Poly) -> Poly:
        return self.trim(self.mul(lam, x) for x in a)

    @staticmethod
    def pshift(a: Poly, k: int) -> Poly:
        """``t^k a``."""
        return (0,) * k + a if a else ()

    @staticmethod
    def psplit(a: Poly, k: int) -> tuple[Poly, Poly]:
        """``(a mod t^k, a div t^k)``."""
        return GF.trim(a[:k]), GF.trim(a[k:])
