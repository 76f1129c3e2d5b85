"""Independent reference implementations used to cross-check the package.

Nothing here imports the engine's algorithms: each oracle is a deliberately
naive model (string rewriting, brute-force search, integer arithmetic) of
one family or formula.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd, prod


# -- BS(c,d)+ by string rewriting ----------------------------------------------
# Relation a b^c = b^d a, oriented b^d a -> a b^c.  Normal forms are words in
# which every maximal b-block followed by an 'a' is shorter than d.
def bs_normalize(word: str, c: int, d: int) -> str:
    pattern, replacement = "b" * d + "a", "a" + "b" * c
    while pattern in word:
        word = word.replace(pattern, replacement, 1)
    return word


def bs_from_payload(payload, c: int, d: int) -> str:
    letters, k = payload
    return "".join("b" * j + "a" for j in letters) + "b" * k


def bs_multiply(x: str, y: str, c: int, d: int) -> str:
    return bs_normalize(x + y, c, d)


def bs_window(d: int, max_a: int, max_tail: int) -> list[str]:
    out = []
    for n in range(max_a + 1):
        for js in itertools.product(range(d), repeat=n):
            head = "".join("b" * j + "a" for j in js)
            out.extend(head + "b" * k for k in range(max_tail + 1))
    return out


def bs_lcm_oracle(s: str, t: str, c: int, d: int, max_tail: int = 8) -> str | None:
    """Least common right multiple by intersecting windows of ``sS`` and ``tS``."""
    na = max(s.count("a"), t.count("a"))
    window = bs_window(d, na, max_tail)
    left = {bs_multiply(s, x, c, d) for x in window}
    right = {bs_multiply(t, y, c, d) for y in window}
    common = left & right
    if not common:
        return None
    return min(common, key=lambda w: (w.count("a"), len(w), w))


# -- N x| P: (m, p)(n, q) = (m + p n, p q) --------------------------------------
def nxp_multiply(x, y):
    (m, p), (n, q) = x, y
    return (m + p * n, p * q)


def nxp_lcm_oracle(x, y):
    """Brute force over the first candidates; None when the ideals are disjoint."""
    (m, p), (n, q) = x, y
    L = p * q // gcd(p, q)
    start = max(m, n)
    for r in range(start, start + p * q + 1):
        if (r - m) % p == 0 and (r - n) % q == 0:
            return (r, L)
    return None


# -- binary odometer --------------------------------------------------------------
def odometer_act(k: int, word: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """``a^k`` on a little-endian binary word: (image, restriction exponent)."""
    n = len(word)
    value = sum(b << i for i, b in enumerate(word)) + k
    image = tuple((value % (1 << n)) >> i & 1 for i in range(n)) if n else ()
    return image, value >> n if n else k


def odometer_multiply(x, y):
    """Elements are ``(word, k)`` meaning ``word · a^k``."""
    (w, g), (v, h) = x, y
    image, rest = odometer_act(g, v)
    return (w + image, rest + h)


def odometer_lcm_word(w: tuple, v: tuple) -> tuple | None:
    if w[: len(v)] == v:
        return w
    if v[: len(w)] == w:
        return v
    return None


# -- integer lattices ---------------------------------------------------------------
def in_lattice_bruteforce(m, A, k: int, box: int = 40) -> bool:
    """``m ∈ A^k Z^d`` by searching integer preimages in a box."""
    d = len(m)
    P = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(k):
        P = [[sum(P[i][r] * A[r][j] for r in range(d)) for j in range(d)] for i in range(d)]
    for x in itertools.product(range(-box, box + 1), repeat=d):
        if all(sum(P[i][j] * x[j] for j in range(d)) == m[i] for i in range(d)):
            return True
    return False


# -- Dirichlet partial sums ----------------------------------------------------------
def scale_monoid_bruteforce(index, bound: int) -> list[int]:
    member = [False] * (bound + 1)
    if bound >= 1:
        member[1] = True
    for n in range(2, bound + 1):
        member[n] = any(n % g == 0 and member[n // g] for g in index)
    return [n for n in range(1, bound + 1) if member[n]]


def zeta_partial_bruteforce(index, beta: int, bound: int) -> Fraction:
    return sum((Fraction(n, n**beta) for n in scale_monoid_bruteforce(index, bound)), Fraction(0))


def zeta_product(index, beta: int) -> Fraction:
    return prod((1 / (1 - Fraction(1, n ** (beta - 1))) for n in index), start=Fraction(1))
