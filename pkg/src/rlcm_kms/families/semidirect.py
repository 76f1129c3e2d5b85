"""``N ⋊ P`` for ``P`` generated by finitely many pairwise coprime integers.

Elements are pairs ``(m, p)`` with ``(m, p)(n, q) = (m + n p, p q)``.
"""

from __future__ import annotations

import math
from typing import Iterator, Sequence

from ..core import (
    DISJOINT,
    Certificate,
    ConstructionError,
    Element,
    Factorization,
    Lcm,
    LcmOutcome,
    Semigroup,
)


class NSemidirectP(Semigroup):
    right_cancellative = True

    def __init__(self, primes: Sequence[int]):
        ps = [int(p) for p in primes]
        if not ps:
            raise ConstructionError("at least one generator of P")
        if any(p < 2 for p in ps):
            raise ConstructionError("generators of P are integers >= 2", f"got {ps}")
        for i, p in enumerate(ps):
            for q in ps[i + 1:]:
                if math.gcd(p, q) != 1:
                    raise ConstructionError("generators of P pairwise coprime", f"gcd({p},{q}) = {math.gcd(p, q)}")
        self.primes = tuple(sorted(ps))
        self.tag = "Nx<" + ",".join(map(str, self.primes)) + ">"
        self._identity = self.element((0, 1))

    def pair(self, m: int, p: int) -> Element:
        if m < 0 or not self.in_P(p):
            raise ValueError(f"({m},{p}) is not an element of {self.tag}")
        return self.element((m, p))

    def in_P(self, p: int) -> bool:
        if p < 1:
            return False
        for q in self.primes:
            while p % q == 0:
                p //= q
        return p == 1

    @property
    def identity(self) -> Element:
        return self._identity

    def multiply(self, s, t):
        self.check(s, t)
        (m, p), (n, q) = s.payload, t.payload
        return self.element((m + n * p, p * q))

    def right_lcm(self, s, t) -> LcmOutcome:
        self.check(s, t)
        (m, p), (n, q) = s.payload, t.payload
        g = math.gcd(p, q)
        if (m - n) % g:
            return DISJOINT
        l = p * q // g
        # smallest M >= max(m, n) with M = m mod p and M = n mod q
        M = _crt(m, p, n, q)
        lo = max(m, n)
        if M < lo:
            M += -(-(lo - M) // l) * l
        r = self.element((M, l))
        return Lcm(r, self.element(((M - m) // p, l // p)), self.element(((M - n) // q, l // q)))

    def left_divide(self, t, s):
        self.check(t, s)
        (m, p), (n, q) = t.payload, s.payload
        if q % p or n < m or (n - m) % p:
            return None
        return self.element(((n - m) // p, q // p))

    def scale(self, s):
        self.check(s)
        return s.payload[1]

    def is_unit(self, s):
        self.check(s)
        return s.payload == (0, 1)

    def factor(self, s):
        self.check(s)
        m, p = s.payload
        return Factorization(self.element((m % p, p)), self.element((m // p, 1)))

    def transversal(self, n):
        if not self.in_P(n):
            return ()
        return tuple(self.element((m, n)) for m in range(n))

    def enumerate_core(self, max_weight) -> Iterator[Element]:
        for m in range(max_weight + 1):
            yield self.element((m, 1))

    def core_weight(self, a):
        self.check(a)
        return a.payload[0]

    @property
    def irreducible_scales(self):
        return self.primes

    def generators(self):
        return (self.element((1, 1)),) + tuple(self.element((0, p)) for p in self.primes)

    def sort_key(self, s):
        m, p = s.payload
        return (p, m)

    def render(self, s):
        return f"({s.payload[0]},{s.payload[1]})"

    def core_group_embed(self, a):
        self.check(a)
        return a.payload[0]

    def core_group_multiply(self, x, y):
        return x + y

    def core_group_inverse(self, x):
        return -x

    def core_group_ball(self, radius):
        out = [0]
        for k in range(1, radius + 1):
            out += [k, -k]
        return out

    def core_group_weight(self, x):
        return abs(x)

    def faithful_certificate(self):
        return Certificate(True, "(m,1) moves (0,p) whenever p does not divide m")

    def almost_free_certificate(self):
        return Certificate(True, "(m,1) fixes (n,p) only for p dividing m: finitely many")

    def propagation_certificate(self):
        return Certificate(True, "carries of (m,1) are at most m")

    def describe(self):
        out = super().describe()
        out["generators_of_P"] = list(self.primes)
        return out


def _crt(a: int, p: int, b: int, q: int) -> int:
    """Least nonnegative ``x`` with ``x = a mod p`` and ``x = b mod q`` (assumed solvable)."""
    g = math.gcd(p, q)
    l = p // g * q
    # a + p k = b mod q  =>  k = (b - a)/g * inv(p/g) mod q/g
    qg = q // g
    k = ((b - a) // g * pow(p // g, -1, qg)) % qg if qg > 1 else 0
    return (a + p * k) % l
