"""Bounded verification of admissibility and of the core action on the transversal.

Every check runs to an explicit depth (a bound on the scale) and core
weight.  Results are :class:`Pass`, :class:`Fail` with a replayable
counterexample, or :class:`Exhausted` when the bounded search could not
decide.  Closed-form family certificates upgrade bounded evidence to a
global verdict and are always cross-checked against the search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    Certificate,
    ConsistencyError,
    Disjoint,
    Element,
    Lcm,
    Semigroup,
    UsageError,
    verify_lcm,
)
from .parallel import ordered_map

DEFAULT_CORE_WEIGHT = 6
CORE_SAMPLE_CAP = 48


# -- check results -------------------------------------------------------------
@dataclass(frozen=True)
class Pass:
    witnesses: int

    ok = True


@dataclass(frozen=True)
class Fail:
    counterexample: tuple
    reason: str

    ok = False


@dataclass(frozen=True)
class Exhausted:
    depth: int

    ok = True


CheckResult = Pass | Fail | Exhausted


@dataclass(frozen=True)
class AdmissibilityReport:
    a1: CheckResult
    a2: CheckResult
    a3a: CheckResult
    a3b: CheckResult
    a4: CheckResult
    depth: int
    irreducible_scales: tuple[int, ...]

    @property
    def checks(self) -> dict[str, CheckResult]:
        return {"A1": self.a1, "A2": self.a2, "A3a": self.a3a, "A3b": self.a3b, "A4": self.a4}

    @property
    def passed(self) -> bool:
        return all(isinstance(r, Pass) for r in self.checks.values())

    @property
    def failed(self) -> bool:
        return any(isinstance(r, Fail) for r in self.checks.values())


# -- samples -------------------------------------------------------------------
def core_sample(S: Semigroup, core_weight: int, cap: int = CORE_SAMPLE_CAP) -> list[Element]:
    """The first ``cap`` core elements of weight <= ``core_weight``, identity first."""
    out = []
    for a in S.enumerate_core(core_weight):
        out.append(a)
        if len(out) >= cap:
            break
    return out


def word_sample(S: Semigroup, depth: int, max_length: int) -> list[Element]:
    """Products of generators of length <= ``max_length`` with scale <= ``depth``.

    Built without the factorization maps, so it is an independent source of
    elements for the admissibility checks.
    """
    gens = S.generators()
    seen = {S.identity}
    frontier = [S.identity]
    for _ in range(max_length):
        nxt = []
        for s in frontier:
            for g in gens:
                t = S.multiply(s, g)
                if t not in seen and S.scale(t) <= depth:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(seen, key=S.sort_key)


def element_sample(S: Semigroup, depth: int, core_weight: int, max_length: int = 6) -> list[Element]:
    elems = set(word_sample(S, depth, max_length))
    cores = core_sample(S, core_weight)
    for f in S.transversal_upto(depth):
        for a in cores:
            elems.add(S.multiply(f, a))
    return sorted(elems, key=S.sort_key)


# -- admissibility ---------------------------------------------------------------
class _CoreIrreducibility:
    """Test for core irreducibility by searching for a non-unit right core factor.

    Every ``t`` of scale ``n`` is ``f c`` with ``f`` in ``transversal(n)`` and
    ``c`` core, so ``s = t a`` with ``a`` a non-unit core element iff some
    ``f`` left-divides ``s`` with a non-unit core quotient.
    """

    def __init__(self, S: Semigroup):
        self.S = S
        self._memo: dict[Element, tuple | None] = {}

    def right_core_factor(self, s: Element) -> tuple | None:
        """``(f, x)`` with ``f x == s`` and ``x`` a non-unit core element, if one exists."""
        if s in self._memo:
            return self._memo[s]
        S = self.S
        found = None
        for f in S.transversal(S.scale(s)):
            x = S.left_divide(f, s)
            if isinstance(x, Element) and S.is_core(x) and not S.is_unit(x):
                found = (f, x)
                break
        self._memo[s] = found
        return found

    def is_core_irreducible_or_one(self, s: Element) -> bool:
        if s == self.S.identity:
            return True
        return not self.S.is_core(s) and self.right_core_factor(s) is None


def _factorization_counts(n: int, irr: Sequence[int]) -> int:
    """Number of multisets of ``irr`` with product ``n``."""

    def count(m: int, start: int) -> int:
        if m == 1:
            return 1
        return sum(count(m // irr[i], i) for i in range(start, len(irr)) if m % irr[i] == 0)

    return count(n, 0)


def check_admissible(S: Semigroup, depth: int | None = None, core_weight: int = 3) -> AdmissibilityReport:
    """Check (A1)-(A4) on all elements of scale <= ``depth`` reachable in the samples."""
    if depth is None:
        depth = S.default_depth()
    if depth < 1:
        raise UsageError("depth >= 1")
    ci = _CoreIrreducibility(S)
    sample = element_sample(S, depth, core_weight)
    levels = S.levels(depth)
    return AdmissibilityReport(
        a1=_check_a1(S, sample, ci),
        a2=_check_a2(S, levels, ci),
        a3a=_check_a3a(S, levels),
        a3b=_check_a3b(S, sample, levels),
        a4=_check_a4(S, depth),
        depth=depth,
        irreducible_scales=tuple(S.irreducible_scales),
    )


def _check_a1(S: Semigroup, sample: Iterable[Element], ci: _CoreIrreducibility) -> CheckResult:
    count = 0
    for s in sample:
        fac = S.factor(s)
        if S.multiply(fac.transversal, fac.core) != s:
            return Fail((s,), "i(s) c(s) does not reproduce s")
        if not S.is_core(fac.core) or S.scale(fac.core) != 1:
            return Fail((s, fac.core), "c(s) is not in the core")
        if (S.scale(s) == 1) != S.is_core(s):
            return Fail((s,), "scale 1 does not coincide with membership in the core")
        if not ci.is_core_irreducible_or_one(fac.transversal):
            return Fail((s, fac.transversal, ci.right_core_factor(fac.transversal)), "i(s) has a non-unit right core factor")
        count += 1
    return Pass(count)


def _check_a2(S: Semigroup, levels, ci: _CoreIrreducibility) -> CheckResult:
    elems = [f for _, lvl in levels for f in lvl]
    count = 0
    for f in elems:
        for g in elems:
            out = S.right_lcm(f, g)
            if isinstance(out, Disjoint):
                count += 1
                continue
            if not verify_lcm(S, f, g, out):
                return Fail((f, g), "LCM witness does not verify")
            if not ci.is_core_irreducible_or_one(out.lcm):
                return Fail((f, g, out.lcm), "LCM of core irreducibles is not core irreducible")
            count += 1
    return Pass(count)


def _check_a3a(S: Semigroup, levels) -> CheckResult:
    count = 0
    for n, lvl in levels:
        if len(lvl) != n:
            return Fail((n, len(lvl)), f"transversal({n}) has {len(lvl)} elements")
        for f in lvl:
            if S.scale(f) != n:
                return Fail((f,), f"transversal element of scale {S.scale(f)} at level {n}")
            if not S.is_transversal(f):
                return Fail((f,), "transversal element is not its own transversal part")
        count += len(lvl)
    return Pass(count)


def _check_a3b(S: Semigroup, sample: Sequence[Element], levels) -> CheckResult:
    count = 0
    for n, lvl in levels:
        for i, f in enumerate(lvl):
            for g in lvl[i + 1:]:
                if not isinstance(S.right_lcm(f, g), Disjoint):
                    return Fail((f, g), f"transversal({n}) is not pairwise disjoint")
        for s in sample:
            if not any(not isinstance(S.right_lcm(s, f), Disjoint) for f in lvl):
                return Fail((s, n), f"transversal({n}) misses the ideal of s")
            count += 1
    return Pass(count)


def _check_a4(S: Semigroup, depth: int) -> CheckResult:
    irr = sorted(S.irreducible_scales)
    values = S.scale_values(depth)
    for p in irr:
        if _factorization_counts(p, [q for q in irr if q != p]) > 0:
            return Fail((p,), "listed irreducible scale is a product of others")
    for n in values:
        k = _factorization_counts(n, irr)
        if k != 1:
            return Fail((n, k), f"scale {n} has {k} factorizations into irreducibles")
    return Pass(len(values))


# -- the core action -----------------------------------------------------------
def _require_core(S: Semigroup, *elems: Element) -> None:
    for a in elems:
        if not S.is_core(a):
            raise UsageError(f"{S.render(a)} is not a core element")


def alpha(S: Semigroup, a: Element, t: Element) -> Element:
    """``α_a(t) = i(a t)``."""
    _require_core(S, a)
    if not S.is_transversal(t):
        raise UsageError(f"{S.render(t)} is not in the canonical transversal")
    return S.factor(S.multiply(a, t)).transversal


def alpha_inverse(S: Semigroup, a: Element, t: Element) -> Element:
    """``α_a^{-1}(t)`` from ``aS ∩ tS = a α_a^{-1}(t) S``."""
    _require_core(S, a)
    if not S.is_transversal(t):
        raise UsageError(f"{S.render(t)} is not in the canonical transversal")
    out = S.right_lcm(a, t)
    if not isinstance(out, Lcm):
        raise ConsistencyError(f"core element {S.render(a)} is disjoint from {S.render(t)}")
    return S.factor(out.left).transversal


@dataclass(frozen=True)
class FixedSets:
    exact: tuple[Element, ...]
    class_level: tuple[Element, ...]


def fixed_sets(S: Semigroup, a: Element, b: Element, n: int) -> FixedSets:
    """``{f : a f = b f}`` and ``{f : i(a f) = i(b f)}`` inside ``transversal(n)``."""
    _require_core(S, a, b)
    return _fixed_in(S, a, b, S.transversal(n))


def _fixed_in(S: Semigroup, a: Element, b: Element, level: Sequence[Element]) -> FixedSets:
    exact, cls = [], []
    for f in level:
        af, bf = S.multiply(a, f), S.multiply(b, f)
        if af == bf:
            exact.append(f)
            cls.append(f)
        elif S.factor(af).transversal == S.factor(bf).transversal:
            cls.append(f)
    return FixedSets(tuple(exact), tuple(cls))


@dataclass(frozen=True)
class LevelRow:
    n: int
    size: int
    exact: int
    class_level: int

    @property
    def kappa(self) -> Fraction:
        return Fraction(self.exact, self.size)

    @property
    def g_minus_t(self) -> int:
        return self.class_level - self.exact


@dataclass(frozen=True)
class KappaTable:
    a: Element
    b: Element
    rows: tuple[LevelRow, ...]

    @property
    def kappa(self) -> dict[int, Fraction]:
        return {r.n: r.kappa for r in self.rows}

    @property
    def deepest(self) -> LevelRow:
        return self.rows[-1]

    @property
    def enclosure(self) -> tuple[Fraction, Fraction]:
        r = self.deepest
        return r.kappa, r.kappa + Fraction(r.g_minus_t, r.size)

    @property
    def width(self) -> Fraction:
        lo, hi = self.enclosure
        return hi - lo


def kappa_table(S: Semigroup, a: Element, b: Element, max_level: int) -> KappaTable:
    """Per-level ``κ_{a,b,n} = |{f : af = bf}| / n`` and the enclosure of the limit."""
    _require_core(S, a, b)
    levels = S.levels(max_level)

    def row(level):
        n, lvl = level
        fs = _fixed_in(S, a, b, lvl)
        return LevelRow(n, len(lvl), len(fs.exact), len(fs.class_level))

    return KappaTable(a, b, tuple(ordered_map(row, levels)))


def product_rule(S: Semigroup, a: Element, b: Element, m: int, n: int) -> tuple[set[Element], set[Element]]:
    """Both sides of the product rule for ``G∖T`` at level ``m n``.

    Returns ``(direct, composed)``: the set computed on ``transversal(m n)``
    and the set ``{i(f f')}`` assembled from levels ``m`` and ``n``.
    """
    _require_core(S, a, b)
    direct_sets = _fixed_in(S, a, b, S.transversal(m * n))
    direct = set(direct_sets.class_level) - set(direct_sets.exact)
    first = _fixed_in(S, a, b, S.transversal(m))
    composed = set()
    for f in set(first.class_level) - set(first.exact):
        ca = S.factor(S.multiply(a, f)).core
        cb = S.factor(S.multiply(b, f)).core
        second = _fixed_in(S, ca, cb, S.transversal(n))
        for g in set(second.class_level) - set(second.exact):
            composed.add(S.factor(S.multiply(f, g)).transversal)
    return direct, composed


# -- action reports ------------------------------------------------------------
@dataclass(frozen=True)
class Holds:
    certificate: str


@dataclass(frozen=True)
class Violated:
    witness: tuple
    reason: str


@dataclass(frozen=True)
class UndecidedAtDepth:
    bound: int
    note: str = ""


Verdict = Holds | Violated | UndecidedAtDepth


@dataclass(frozen=True)
class ActionReport:
    property: str  # "Faithful" | "AlmostFree" | "FiniteStateProp"
    verdict: Verdict
    level: int
    core_weight: int
    data: dict = field(default_factory=dict, hash=False, compare=False)

    @property
    def holds(self) -> bool | None:
        if isinstance(self.verdict, Holds):
            return True
        if isinstance(self.verdict, Violated):
            return False
        return None


def _alpha_signature(S: Semigroup, a: Element, level_elems: Sequence[Element]) -> tuple:
    return tuple(S.factor(S.multiply(a, f)).transversal for f in level_elems)


def alpha_kernel_witnesses(S: Semigroup, core_weight: int = DEFAULT_CORE_WEIGHT, level: int | None = None) -> list[tuple[Element, Element]]:
    """Pairs ``a != b`` of core elements whose actions agree on every level <= ``level``."""
    level = S.default_depth() if level is None else level
    elems = S.transversal_upto(level)
    cores = core_sample(S, core_weight)
    sigs = ordered_map(lambda a: _alpha_signature(S, a, elems), cores)
    out = []
    for i, a in enumerate(cores):
        for j in range(i):
            if sigs[i] == sigs[j]:
                out.append((a, cores[j]))
    return out


def _replays_kernel(S: Semigroup, pair: tuple, level: int) -> bool:
    a, b = pair
    elems = S.transversal_upto(level)
    return _alpha_signature(S, a, elems) == _alpha_signature(S, b, elems)


def check_faithful(S: Semigroup, core_weight: int = DEFAULT_CORE_WEIGHT, level: int | None = None) -> ActionReport:
    level = S.default_depth() if level is None else level
    unseparated = alpha_kernel_witnesses(S, core_weight, level)
    cert = S.faithful_certificate()
    data = {"unseparated_pairs": len(unseparated), "certificate": cert}
    if cert is not None and not cert.holds:
        if not _replays_kernel(S, cert.witness, level):
            raise ConsistencyError(f"non-faithfulness witness for {S.tag} does not replay")
        return ActionReport("Faithful", Violated(cert.witness, cert.reason), level, core_weight, data)
    if cert is not None:
        return ActionReport("Faithful", Holds(cert.reason), level, core_weight, data)
    if unseparated:
        return ActionReport(
            "Faithful", UndecidedAtDepth(level, "some core pairs act identically up to the bound"), level, core_weight,
            {**data, "candidates": unseparated[:8]},
        )
    return ActionReport("Faithful", UndecidedAtDepth(level, "all sampled pairs separated; no closed form"), level, core_weight, data)


def fixed_point_growth(S: Semigroup, a: Element, b: Element, level: int) -> list[tuple[int, int]]:
    """``(n, |G_n^{a,b}|)`` per level: the fixed points of ``α_a α_b^{-1}`` at that level."""
    return [(r.n, r.class_level) for r in kappa_table(S, a, b, level).rows]


def check_almost_free(S: Semigroup, core_weight: int = DEFAULT_CORE_WEIGHT, level: int | None = None) -> ActionReport:
    level = S.default_depth() if level is None else level
    cores = core_sample(S, core_weight)
    deepest_nonempty = []
    for i, a in enumerate(cores):
        for b in cores[:i]:
            growth = fixed_point_growth(S, a, b, level)
            if growth[-1][1] > 0:
                deepest_nonempty.append((a, b))
    cert = S.almost_free_certificate()
    data = {"pairs_fixing_at_deepest_level": len(deepest_nonempty), "certificate": cert}
    if cert is not None and not cert.holds:
        growth = fixed_point_growth(S, *cert.witness, level)
        data["witness_growth"] = growth
        if any(count == 0 for n, count in growth if n > 1):
            raise ConsistencyError(f"almost-freeness witness for {S.tag} has a level without fixed points")
        return ActionReport("AlmostFree", Violated(cert.witness, cert.reason), level, core_weight, data)
    if cert is not None:
        return ActionReport("AlmostFree", Holds(cert.reason), level, core_weight, data)
    note = "fixed points persist at the deepest level" if deepest_nonempty else "no fixed points at the deepest level; no closed form"
    return ActionReport("AlmostFree", UndecidedAtDepth(level, note), level, core_weight, data)


@dataclass(frozen=True)
class PropagationData:
    a: Element
    sizes: tuple[tuple[int, int], ...]  # (level index bound n, |C_a| up to n)
    carries: frozenset
    stabilized: bool


def propagation_sets(S: Semigroup, a: Element, level: int) -> PropagationData:
    """``C_a = {c(a f)}`` accumulated level by level over the transversal."""
    _require_core(S, a)
    seen: set[Element] = set()
    sizes = []
    for n, lvl in S.levels(level):
        for f in lvl:
            seen.add(S.factor(S.multiply(a, f)).core)
        sizes.append((n, len(seen)))
    stable = len(sizes) >= 2 and sizes[-1][1] == sizes[-2][1]
    return PropagationData(a, tuple(sizes), frozenset(seen), stable)


def check_propagation(S: Semigroup, core_weight: int = DEFAULT_CORE_WEIGHT, level: int | None = None) -> ActionReport:
    level = S.default_depth() if level is None else level
    per = [propagation_sets(S, a, level) for a in core_sample(S, core_weight)]
    unstable = [p.a for p in per if not p.stabilized]
    cert = S.propagation_certificate()
    data = {"per_element": per, "unstable": unstable, "certificate": cert}
    if cert is not None and not cert.holds:
        (a,) = cert.witness[:1]
        witness = propagation_sets(S, a, level)
        if witness.stabilized:
            raise ConsistencyError(f"propagation witness for {S.tag} stabilized within the bound")
        return ActionReport("FiniteStateProp", Violated(cert.witness, cert.reason), level, core_weight, data)
    if cert is not None:
        return ActionReport("FiniteStateProp", Holds(cert.reason), level, core_weight, data)
    note = "C_a unchanged over the last two levels for every sampled a (heuristic)" if not unstable else "some C_a still growing"
    return ActionReport("FiniteStateProp", UndecidedAtDepth(level, note), level, core_weight, data)


def certificate_summary(cert: Certificate | None) -> dict | None:
    if cert is None:
        return None
    return {"holds": cert.holds, "reason": cert.reason}
