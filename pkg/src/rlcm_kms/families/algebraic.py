"""Semidirect products ``G ⋊ P`` from algebraic dynamical systems.

Two concrete systems are shipped:

* :class:`DilationMatrix`: ``Z^d ⋊_A N`` with ``(m, k)(m', k') = (m + A^k m', k + k')``.
* :class:`FiniteFieldShift`: ``F_q[t] ⋊ (N x U)`` where ``(k, λ)`` acts by
  ``h ↦ λ t^(k·deg) h`` and ``U`` is a subgroup of ``F_q^*``.

In both, the core is the unit group ``G ⋊ P^*`` and an element is
core-equivalent to the canonical digit representative of its ``G``-part
modulo the image lattice.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

import sympy

from ..core import (
    DISJOINT,
    Certificate,
    ConstructionError,
    Element,
    Factorization,
    Lcm,
    LcmOutcome,
    Semigroup,
    UsageError,
)
from .finite_field import GF, Poly
from .zappa_szep import FreeAbelian, _log_exact

Vec = tuple[int, ...]
Mat = tuple[tuple[int, ...], ...]


def _matmul(A: Mat, B: Mat) -> Mat:
    return tuple(tuple(sum(A[i][l] * B[l][j] for l in range(len(B))) for j in range(len(B[0]))) for i in range(len(A)))


def _matvec(A: Mat, v: Vec) -> Vec:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def _identity(d: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def column_hnf(M: Mat) -> tuple[Mat, Mat]:
    """Lower-triangular column Hermite form ``H = M U`` with ``U`` unimodular.

    ``H`` has positive diagonal and ``0 <= H[i][j] < H[i][i]`` for ``j < i``;
    it is unique for the lattice spanned by the columns of a nonsingular ``M``.
    """
    d = len(M)
    H = [list(r) for r in M]
    U = [list(r) for r in _identity(d)]

    def colop(j: int, i: int, f: int) -> None:
        for X in (H, U):
            for r in range(d):
                X[r][j] -= f * X[r][i]

    def swap(i: int, j: int) -> None:
        for X in (H, U):
            for r in range(d):
                X[r][i], X[r][j] = X[r][j], X[r][i]

    for i in range(d):
        while True:
            nz = [j for j in range(i, d) if H[i][j]]
            if not nz:
                raise ConstructionError("matrix is nonsingular")
            swap(i, min(nz, key=lambda j: abs(H[i][j])))
            clean = True
            for j in range(i + 1, d):
                if H[i][j]:
                    colop(j, i, H[i][j] // H[i][i])
                    clean = clean and H[i][j] == 0
            if clean:
                break
        if H[i][i] < 0:
            for X in (H, U):
                for r in range(d):
                    X[r][i] = -X[r][i]
        for j in range(i):
            colop(j, i, H[i][j] // H[i][i])
    return tuple(map(tuple, H)), tuple(map(tuple, U))


class DilationMatrix(Semigroup):
    """``Z^d ⋊_A N`` for an integer matrix ``A`` with ``|det A| > 1``."""

    right_cancellative = True

    def __init__(self, A: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in A)
        d = len(rows)
        if d < 1 or any(len(r) != d for r in rows):
            raise ConstructionError("A is a square d x d matrix with d >= 1")
        det = int(sympy.Matrix(rows).det())
        if abs(det) <= 1:
            raise ConstructionError("|det A| > 1", f"det = {det}")
        self.A = rows
        self.d = d
        self.det = abs(det)
        self.tag = "Z^%dx_A N%s" % (d, list(map(list, rows)))
        self._group = FreeAbelian(d)
        self._identity = self.element(((0,) * d, 0))
        self._hnf_cache: dict[int, tuple[Mat, Mat]] = {}
        self._powers: list[Mat] = [_identity(d)]

    # -- lattice arithmetic -------------------------------------------------
    def matrix_power(self, k: int) -> Mat:
        while len(self._powers) <= k:
            self._powers.append(_matmul(self.A, self._powers[-1]))
        return self._powers[k]

    def _hnf(self, k: int) -> tuple[Mat, Mat]:
        hit = self._hnf_cache.get(k)
        if hit is None:
            hit = column_hnf(self.matrix_power(k))
            self._hnf_cache[k] = hit
        return hit

    def reduce(self, m: Vec, k: int) -> tuple[Vec, Vec]:
        """``(r, x)`` with ``m = r + A^k x`` and ``r`` the canonical digit."""
        H, U = self._hnf(k)
        r = list(m)
        coeff = [0] * self.d
        for i in range(self.d):
            f = r[i] // H[i][i]
            coeff[i] = f
            if f:
                for row in range(self.d):
                    r[row] -= f * H[row][i]
        return tuple(r), _matvec(U, tuple(coeff))

    def digits(self, k: int) -> list[Vec]:
        H, _ = self._hnf(k)
        return [tuple(v) for v in itertools.product(*(range(H[i][i]) for i in range(self.d)))]

    def in_lattice(self, v: Vec, k: int) -> bool:
        return not any(self.reduce(v, k)[0])

    # -- elements -------------------------------------------------------------
    def pair(self, m: Sequence[int] | int, k: int) -> Element:
        vec = (int(m),) if isinstance(m, int) else tuple(int(x) for x in m)
        if len(vec) != self.d or k < 0:
            raise UsageError(f"({m},{k}) is not an element of {self.tag}")
        return self.element((vec, k))

    @property
    def identity(self) -> Element:
        return self._identity

    def multiply(self, s, t):
        self.check(s, t)
        (m, k), (n, j) = s.payload, t.payload
        An = _matvec(self.matrix_power(k), n)
        return self.element((tuple(a + b for a, b in zip(m, An)), k + j))

    def right_lcm(self, s, t) -> LcmOutcome:
        self.check(s, t)
        (m, k), (n, j) = s.payload, t.payload
        low, high = ((m, k), (n, j)) if k <= j else ((n, j), (m, k))
        diff = tuple(b - a for a, b in zip(low[0], high[0]))
        if not self.in_lattice(diff, low[1]):
            return DISJOINT
        r, _ = self.reduce(high[0], high[1])
        lcm = self.element((r, high[1]))
        return Lcm(lcm, self.left_divide(s, lcm), self.left_divide(t, lcm))

    def left_divide(self, t, s):
        self.check(t, s)
        (m, k), (n, j) = t.payload, s.payload
        if j < k:
            return None
        r, x = self.reduce(tuple(b - a for a, b in zip(m, n)), k)
        if any(r):
            return None
        return self.element((x, j - k))

    def scale(self, s):
        self.check(s)
        return self.det ** s.payload[1]

    def is_core(self, s):
        self.check(s)
        return s.payload[1] == 0

    def is_unit(self, s):
        return self.is_core(s)

    def factor(self, s):
        self.check(s)
        m, k = s.payload
        r, x = self.reduce(m, k)
        return Factorization(self.element((r, k)), self.element((x, 0)))

    def transversal(self, n):
        k = _log_exact(n, self.det)
        if k is None:
            return ()
        return tuple(self.element((r, k)) for r in self.digits(k))

    def enumerate_core(self, max_weight) -> Iterator[Element]:
        for v in self._group.group_ball(max_weight):
            yield self.element((v, 0))

    def core_weight(self, a):
        self.check(a)
        return sum(abs(x) for x in a.payload[0])

    @property
    def irreducible_scales(self):
        return (self.det,)

    def generators(self):
        gens = [self.element(((0,) * self.d, 1))]
        gens += [self.element((e, 0)) for e in _identity(self.d)]
        return tuple(gens)

    def sort_key(self, s):
        m, k = s.payload
        return (k, m)

    def render(self, s):
        m, k = s.payload
        vec = str(m[0]) if self.d == 1 else "(" + ",".join(map(str, m)) + ")"
        return f"({vec},{k})"

    def core_group_embed(self, a):
        self.check(a)
        return a.payload[0]

    def core_group_multiply(self, x, y):
        return self._group.group_multiply(x, y)

    def core_group_inverse(self, x):
        return self._group.group_inverse(x)

    def core_group_ball(self, radius):
        return self._group.group_ball(radius)

    def core_group_weight(self, x):
        return self._group.group_weight(x)

    # -- certificates ---------------------------------------------------------
    def stable_vector(self) -> Vec | None:
        """A nonzero vector in every ``A^k Z^d``, or None if their intersection is 0.

        The intersection is nonzero iff the characteristic polynomial has an
        irreducible factor ``g`` with ``g(0) = ±1``; then ``ker g(A)`` is a
        sublattice on which ``A`` is invertible over the integers.
        """
        x = sympy.Symbol("x")
        M = sympy.Matrix(self.A)
        _, factors = sympy.factor_list(M.charpoly(x).as_expr(), x)
        for g, _mult in factors:
            poly = sympy.Poly(g, x)
            if abs(poly.eval(0)) == 1:
                gA = sympy.zeros(self.d)
                for c in poly.all_coeffs():
                    gA = gA * M + c * sympy.eye(self.d)
                v = gA.nullspace()[0]
                den = sympy.ilcm(*[sympy.fraction(c)[1] for c in v])
                return tuple(int(c * den) for c in v)
        return None

    def faithful_certificate(self):
        v = self.stable_vector()
        if v is None:
            return Certificate(True, "the images A^k Z^d intersect in 0")
        return Certificate(False, f"{v} lies in every A^k Z^d", (self.element((v, 0)), self.identity))

    def almost_free_certificate(self):
        # P is N, so P* is trivial and almost freeness coincides with faithfulness.
        return self.faithful_certificate()

    def propagation_certificate(self):
        if self.d == 1:
            return Certificate(True, "one-dimensional digits: carries of m are at most |m| + 1")
        return None

    def ads_conditions(self, depth: int = 3) -> dict[str, bool]:
        """Conditions (finite index, non-automorphism, units, equal index) on ``k <= depth``."""
        idx = [self.det**k for k in range(depth + 1)]
        return {
            "finite_type": all(len(self.digits(k)) == idx[k] for k in range(depth + 1)),
            "non_automorphism": self.det > 1,
            "automorphisms_are_units": all(idx[k] > 1 for k in range(1, depth + 1)),
            "equal_index_unit_conjugate": len(set(idx)) == len(idx),
        }

    def describe(self):
        out = super().describe()
        out.update({"matrix": [list(r) for r in self.A], "det": self.det})
        return out


class FiniteFieldShift(Semigroup):
    """``F_q[t] ⋊ (N x U)`` with ``(k, λ)`` acting as multiplication by ``λ t^(k·deg)``.

    Payloads are ``(g, k, λ)`` with ``g`` a coefficient tuple.  With trivial
    ``U`` this is the polynomial-ring system with ``f = t^deg``; a nontrivial
    ``U`` gives the wreath-product variant whose core action is faithful but
    not almost free.
    """

    right_cancellative = True

    def __init__(self, q: int, f_degree: int = 1, unit_scalars: Sequence[int] = ()):
        if f_degree < 1:
            raise ConstructionError("f-degree >= 1", f"got {f_degree}")
        self.F = GF(q)
        for u in unit_scalars:
            if not 0 < u < q:
                raise ConstructionError("unit scalars are nonzero elements of F_q", f"got {u}")
        self.q = q
        self.deg = f_degree
        self.units = self.F.subgroup(tuple(unit_scalars))
        self.unit_scalars = tuple(unit_scalars)
        suffix = "" if len(self.units) == 1 else "xU" + str(list(self.units))
        self.tag = f"F{q}[t]x_t^{f_degree}N{suffix}"
        self._identity = self.element(((), 0, 1))

    def poly(self, coeffs: Sequence[int], k: int = 0, lam: int = 1) -> Element:
        g = GF.trim(int(c) for c in coeffs)
        if any(not 0 <= c < self.q for c in g) or k < 0 or lam not in self.units:
            raise UsageError(f"({coeffs},{k},{lam}) is not an element of {self.tag}")
        return self.element((g, k, lam))

    @property
    def identity(self):
        return self._identity

    def _shift(self, k: int) -> int:
        return k * self.deg

    def multiply(self, s, t):
        self.check(s, t)
        (g, k, lam), (h, j, mu) = s.payload, t.payload
        img = GF.pshift(self.F.pscale(lam, h), self._shift(k))
        return self.element((self.F.padd(g, img), k + j, self.F.mul(lam, mu)))

    def right_lcm(self, s, t):
        self.check(s, t)
        (g, k, _), (h, j, _) = s.payload, t.payload
        lo = min(k, j)
        if GF.psplit(self.F.psub(g, h), self._shift(lo))[0]:
            return DISJOINT
        top, kk = (h, j) if j >= k else (g, k)
        lcm = self.element((GF.psplit(top, self._shift(kk))[0], kk, 1))
        return Lcm(lcm, self.left_divide(s, lcm), self.left_divide(t, lcm))

    def left_divide(self, t, s):
        self.check(t, s)
        (g, k, lam), (h, j, mu) = t.payload, s.payload
        if j < k:
            return None
        low, high = GF.psplit(self.F.psub(h, g), self._shift(k))
        if low:
            return None
        inv = self.F.inv(lam)
        return self.element((self.F.pscale(inv, high), j - k, self.F.mul(inv, mu)))

    def scale(self, s):
        self.check(s)
        return self.q ** self._shift(s.payload[1])

    def is_core(self, s):
        self.check(s)
        return s.payload[1] == 0

    def is_unit(self, s):
        return self.is_core(s)

    def factor(self, s):
        self.check(s)
        g, k, lam = s.payload
        low, high = GF.psplit(g, self._shift(k))
        return Factorization(self.element((low, k, 1)), self.element((high, 0, lam)))

    def transversal(self, n):
        k = _log_exact(n, self.q**self.deg)
        if k is None:
            return ()
        L = self._shift(k)
        out = []
        for coeffs in itertools.product(range(self.q), repeat=L):
            out.append(self.element((GF.trim(reversed(coeffs)), k, 1)))
        return tuple(sorted(out, key=self.sort_key))

    def _core_of_weight(self, w: int) -> list[tuple[Poly, int]]:
        # weight = number of coefficients + [λ != 1]
        out = []
        for lam in self.units:
            L = w - (lam != 1)
            if L < 0:
                continue
            if L == 0:
                out.append(((), lam))
                continue
            for lead in range(1, self.q):
                for rest in itertools.product(range(self.q), repeat=L - 1):
                    out.append((tuple(rest) + (lead,), lam))
        return out

    def enumerate_core(self, max_weight):
        for w in range(max_weight + 1):
            for g, lam in self._core_of_weight(w):
                yield self.element((g, 0, lam))

    def core_weight(self, a):
        self.check(a)
        g, _, lam = a.payload
        return len(g) + (lam != 1)

    @property
    def irreducible_scales(self):
        return (self.q**self.deg,)

    def generators(self):
        gens = [self.element(((), 1, 1)), self.element(((1,), 0, 1))]
        gens += [self.element(((), 0, u)) for u in self.unit_scalars if u != 1]
        return tuple(gens)

    def sort_key(self, s):
        g, k, lam = s.payload
        return (k, len(g), tuple(reversed(g)), lam)

    def render(self, s):
        g, k, lam = s.payload
        terms = [("" if c == 1 and i else str(c)) + ("" if i == 0 else ("t" if i == 1 else f"t^{i}")) for i, c in enumerate(g) if c]
        body = "+".join(reversed(terms)) or "0"
        unit = "" if lam == 1 else f",{lam}"
        return f"({body},{k}{unit})"

    # core group = S_c itself
    def core_group_embed(self, a):
        self.check(a)
        return (a.payload[0], a.payload[2])

    def core_group_multiply(self, x, y):
        (g, lam), (h, mu) = x, y
        return (self.F.padd(g, self.F.pscale(lam, h)), self.F.mul(lam, mu))

    def core_group_inverse(self, x):
        g, lam = x
        inv = self.F.inv(lam)
        return (self.F.pscale(self.F.sub(0, inv), g), inv)

    def core_group_ball(self, radius):
        return [(g, lam) for w in range(radius + 1) for g, lam in self._core_of_weight(w)]

    def core_group_weight(self, x):
        g, lam = x
        return len(g) + (lam != 1)

    def faithful_certificate(self):
        return Certificate(True, "the images t^k F_q[t] intersect in 0 and nontrivial scalars move constants")

    def almost_free_certificate(self):
        if len(self.units) == 1:
            return Certificate(True, "P* is trivial and nonzero h lies in only finitely many t^k F_q[t]")
        lam = next(u for u in self.units if u != 1)
        return Certificate(False, "a nontrivial scalar fixes every class with zero digit", (self.element(((), 0, lam)), self.identity))

    def propagation_certificate(self):
        return Certificate(True, "carries of (h, λ) are the quotients h div t^k: at most deg(h) + 2 of them")

    def describe(self):
        out = super().describe()
        out.update({"q": self.q, "f_degree": self.deg, "unit_group": list(self.units)})
        return out


def ads_ideal_test(S: DilationMatrix | FiniteFieldShift, m, n: int, m2, n2: int) -> LcmOutcome:
    """Intersect ``(m, n)S`` and ``(m2, n2)S`` by lattice membership."""
    if isinstance(S, DilationMatrix):
        return S.right_lcm(S.pair(m, n), S.pair(m2, n2))
    if isinstance(S, FiniteFieldShift):
        return S.right_lcm(S.poly(m, n), S.poly(m2, n2))
    raise UsageError("ads_ideal_test needs a dilation-matrix or finite-field-shift instance")
