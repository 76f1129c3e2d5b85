"""ζ-functions, KMS and ground-state values on spanning elements ``v_s v_t*``.

Integer inverse temperatures are handled in exact rational arithmetic.  For
non-integer ``β`` the powers ``n^-β`` are irrational, so those values are
computed with mpmath and reported as enclosures whose width accounts for a
relative error budget of ``2^-40``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import mpmath

from .analysis import (
    check_admissible,
    check_almost_free,
    check_faithful,
    check_propagation,
    core_sample,
    kappa_table,
)
from .core import Element, RlcmError, Semigroup, UsageError, monoid_closure

FLOAT_REL_ERROR = Fraction(1, 2**40)
_MP_PREC = 96


class NoKmsStateError(UsageError):
    """Raised for ``β < 1``: there are no KMS states below inverse temperature 1."""


# -- values --------------------------------------------------------------------
@dataclass(frozen=True)
class StateValue:
    """An exact rational (``lo == hi``) or a certified enclosure ``[lo, hi]``."""

    lo: Fraction
    hi: Fraction
    cutoff: int | None = None
    tail_bound: Fraction | None = None
    mode: str = "exact"  # exact | series | float
    note: str = ""

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("enclosure with lo > hi")

    @classmethod
    def exact(cls, v, note: str = "") -> "StateValue":
        v = Fraction(v)
        return cls(v, v, note=note)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi and self.mode == "exact"

    @property
    def value(self) -> Fraction:
        if self.lo != self.hi:
            raise ValueError("value is an enclosure, not a point")
        return self.lo

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def scaled(self, c: Fraction) -> "StateValue":
        lo, hi = sorted((self.lo * c, self.hi * c))
        return StateValue(lo, hi, self.cutoff, self.tail_bound, self.mode, self.note)


def _as_beta(beta) -> Fraction:
    if isinstance(beta, float):
        if math.isinf(beta):
            raise UsageError("β = ∞ is handled by the ground-state functions")
        return Fraction(beta).limit_denominator(10**9)
    return Fraction(beta)


def _refuse_below_one(beta: Fraction) -> None:
    if beta < 1:
        raise NoKmsStateError(f"no KMS_β states exist for β = {beta} < 1")


def _mpf_to_fraction(x) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(int(man)) * (Fraction(2) ** int(exp))


def _float_enclosure(x, extra: Fraction = Fraction(0)) -> tuple[Fraction, Fraction]:
    v = _mpf_to_fraction(x)
    pad = abs(v) * FLOAT_REL_ERROR + extra
    return v - pad, v + pad


# -- zeta ------------------------------------------------------------------------
@dataclass(frozen=True)
class ZetaEval:
    index: tuple[int, ...]
    beta: Fraction
    value: StateValue | None
    converges: bool


def _pow_neg(n: int, s: Fraction):
    """``n^-s``: exact for integer ``s``, an mpf otherwise."""
    if s.denominator == 1:
        return Fraction(1, n ** int(s)) if s >= 0 else Fraction(n ** int(-s))
    with mpmath.workprec(_MP_PREC):
        return mpmath.power(n, -mpmath.mpf(s.numerator) / s.denominator)


def zeta(index: Iterable[int], beta) -> ZetaEval:
    """``ζ_I(β) = Π_{n ∈ I} (1 - n^{-(β-1)})^{-1}``."""
    I = tuple(sorted(set(int(n) for n in index)))
    if any(n < 2 for n in I):
        raise UsageError("irreducible scales are integers >= 2")
    b = _as_beta(beta)
    if not I:
        return ZetaEval(I, b, StateValue.exact(1), True)
    if b <= 1:
        return ZetaEval(I, b, None, False)
    s = b - 1
    if s.denominator == 1:
        out = Fraction(1)
        for n in I:
            out /= 1 - _pow_neg(n, s)
        return ZetaEval(I, b, StateValue.exact(out), True)
    with mpmath.workprec(_MP_PREC):
        out = mpmath.mpf(1)
        for n in I:
            out /= 1 - _pow_neg(n, s)
        lo, hi = _float_enclosure(out)
    return ZetaEval(I, b, StateValue(lo, hi, mode="float"), True)


def zeta_partial_sum(index: Iterable[int], beta, cutoff: int) -> Fraction:
    """``Σ n^{1-β}`` over ``n`` in the monoid generated by ``index`` with ``n <= cutoff`` (integer ``β``)."""
    b = _as_beta(beta)
    if b.denominator != 1:
        raise UsageError("exact partial sums need an integer β")
    return sum((_pow_neg(n, b - 1) for n in monoid_closure(index, cutoff)), Fraction(0))


def geometric_tail_bound(index: Iterable[int], beta, cutoff: int) -> Fraction:
    """A priori bound on ``ζ_I(β) - zeta_partial_sum(I, β, cutoff)``.

    Any ``n > cutoff`` in ``<I>`` has some exponent ``e_p >= m_p`` with
    ``m_p = floor(log cutoff / (|I| log p)) + 1``, and the sum over those ``n``
    is ``p^{-m_p (β-1)} ζ_I(β)``.
    """
    I = tuple(sorted(set(index)))
    z = zeta(I, beta)
    if not z.converges:
        raise UsageError("the series diverges at this β")
    if not I:
        return Fraction(0)
    s = _as_beta(beta) - 1
    total = Fraction(0)
    for p in I:
        m = 0
        while p ** ((m + 1) * len(I)) <= cutoff:
            m += 1
        total += _pow_neg(p ** (m + 1), s)
    return total * z.value.hi


@dataclass(frozen=True)
class CriticalBeta:
    value: Fraction | None
    exact: bool
    reason: str
    tolerance: float = 0.0


def critical_beta(S: Semigroup) -> CriticalBeta:
    irr = S.irreducible_scales
    if not irr:
        return CriticalBeta(None, True, "the scale is trivial, so ζ is identically 1 and has no abscissa")
    return CriticalBeta(Fraction(1), True, "finitely many irreducible scales: ζ is a finite Euler product")


def estimate_critical_beta(irreducibles: Sequence[int], bound: int = 10**6, tol: float = 1e-3) -> CriticalBeta:
    """Estimate ``β_c = 1 + σ`` where ``σ`` is the abscissa of ``Σ_{n ∈ <Irr>} n^{-s}``.

    ``σ`` is located by bisection on ``s``: a value counts as divergent when
    the mass of ``(√X, X]`` is at least that of ``[1, √X]``, a heuristic that
    is exact in the limit.  Meant for an infinite irreducible set truncated
    at ``bound``.
    """
    values = monoid_closure(irreducibles, bound)
    root = math.isqrt(bound)
    low_part = [n for n in values if n <= root]
    high_part = [n for n in values if n > root]

    def diverges(s: float) -> bool:
        return sum(n**-s for n in high_part) >= sum(n**-s for n in low_part)

    lo, hi = 0.0, 4.0
    if not diverges(lo):
        return CriticalBeta(Fraction(1), False, "no divergence detected at s = 0", tol)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if diverges(mid):
            lo = mid
        else:
            hi = mid
    est = Fraction(1 + (lo + hi) / 2).limit_denominator(10**6)
    return CriticalBeta(est, False, f"bisection on partial sums up to {bound}", tol)


# -- traces --------------------------------------------------------------------
@dataclass(frozen=True)
class Canonical:
    """``τ(w_a w_b*) = δ_{a,b}``."""


@dataclass(frozen=True)
class Rho:
    """``ρ(w_a w_b*) = κ_{a,b}``, enclosed from the level-``level`` κ table."""

    level: int | None = None


@dataclass(frozen=True)
class Table:
    """Finite table of trace values; missing pairs default to ``δ_{a,b}``."""

    values: Mapping[tuple[Element, Element], Fraction] = field(default_factory=dict, hash=False)


TraceSpec = Canonical | Rho | Table


def _trace_interval(S: Semigroup, trace: TraceSpec) -> Callable[[Element, Element], tuple[Fraction, Fraction]]:
    if isinstance(trace, Canonical):
        return lambda a, b: (Fraction(int(a == b)),) * 2
    if isinstance(trace, Table):
        def lookup(a, b):
            v = trace.values.get((a, b))
            v = Fraction(int(a == b)) if v is None else Fraction(v)
            return v, v
        return lookup
    if isinstance(trace, Rho):
        level = trace.level or S.default_depth()
        cache: dict = {}

        def rho(a, b):
            if a == b:
                return Fraction(1), Fraction(1)
            key = (a, b)
            if key not in cache:
                cache[key] = kappa_table(S, a, b, level).enclosure
            return cache[key]
        return rho
    raise UsageError(f"unknown trace spec {trace!r}")


# -- KMS values ------------------------------------------------------------------
def default_cutoff(S: Semigroup) -> int:
    irr = S.irreducible_scales
    return max(irr) ** 4 if irr else 1


def kms_value(
    S: Semigroup,
    beta,
    s: Element,
    t: Element,
    trace: TraceSpec = Canonical(),
    cutoff: int | None = None,
) -> StateValue:
    """``ψ(v_s v_t*)`` for the KMS_β state determined by ``trace``.

    Zero unless ``i(s) = i(t)``; otherwise ``N_s^{-β}`` times the core value
    of ``(c(s), c(t))``.  With ``cutoff=None`` closed forms are used where the
    family allows them; an explicit cutoff forces series evaluation.
    """
    b = _as_beta(beta)
    _refuse_below_one(b)
    S.check(s, t)
    if not S.irreducible_scales:
        raise UsageError(f"{S.tag} has a trivial scale; its ζ-function does not single out β = 1")
    fs, ft = S.factor(s), S.factor(t)
    if fs.transversal != ft.transversal:
        return StateValue.exact(0, "i(s) != i(t)")
    core = core_value(S, b, fs.core, ft.core, trace, cutoff)
    weight = _pow_neg(S.scale(s), b)
    if isinstance(weight, Fraction):
        return core.scaled(weight)
    lo_w, hi_w = _float_enclosure(weight)
    cands = [core.lo * lo_w, core.lo * hi_w, core.hi * lo_w, core.hi * hi_w]
    return StateValue(min(cands), max(cands), core.cutoff, core.tail_bound, "float", core.note)


def core_value(
    S: Semigroup, beta: Fraction, a: Element, b: Element, trace: TraceSpec = Canonical(), cutoff: int | None = None
) -> StateValue:
    """``ψ(v_a v_b*)`` for core ``a``, ``b``."""
    beta = _as_beta(beta)
    _refuse_below_one(beta)
    if beta == 1:
        return _core_value_at_one(S, a, b, trace)
    if cutoff is None and isinstance(trace, Canonical) and S.right_cancellative:
        # a f = b f forces a = b, so every level contributes n δ_{a,b}
        return StateValue.exact(int(a == b), "right cancellative: the series sums to δ exactly")
    return _core_series(S, beta, a, b, trace, cutoff or default_cutoff(S))


def _core_value_at_one(S: Semigroup, a: Element, b: Element, trace: TraceSpec) -> StateValue:
    if isinstance(trace, Table):
        lo, hi = _trace_interval(S, trace)(a, b)
        return StateValue(lo, hi, note="table trace taken as the KMS_1 state on the core")
    if isinstance(trace, Canonical):
        cert = S.almost_free_certificate()
        if cert is not None and cert.holds:
            return StateValue.exact(int(a == b), "almost free: the unique KMS_1 state restricts to δ")
    level = (trace.level if isinstance(trace, Rho) else None) or S.default_depth()
    if a == b:
        return StateValue.exact(1)
    lo, hi = kappa_table(S, a, b, level).enclosure
    return StateValue(lo, hi, cutoff=level, mode="exact" if lo == hi else "series", note="κ enclosure of ρ")


def _core_series(S: Semigroup, beta: Fraction, a: Element, b: Element, trace: TraceSpec, cutoff: int) -> StateValue:
    tau = _trace_interval(S, trace)
    nonneg = isinstance(trace, (Canonical, Rho))
    z = zeta(S.irreducible_scales, beta)
    exact = beta.denominator == 1
    lo_sum = hi_sum = Fraction(0) if exact else mpmath.mpf(0)
    mass = Fraction(0) if exact else mpmath.mpf(0)
    with mpmath.workprec(_MP_PREC):
        for n, level in S.levels(cutoff):
            w = _pow_neg(n, beta)
            lo_n = hi_n = Fraction(0)
            for f in level:
                af, bf = S.multiply(a, f), S.multiply(b, f)
                fa, fb = S.factor(af), S.factor(bf)
                if fa.transversal != fb.transversal:
                    continue
                l, h = tau(fa.core, fb.core)
                lo_n += l
                hi_n += h
            if exact:
                lo_sum += w * lo_n
                hi_sum += w * hi_n
                mass += w * n
            else:
                lo_sum += w * mpmath.mpf(lo_n.numerator) / lo_n.denominator
                hi_sum += w * mpmath.mpf(hi_n.numerator) / hi_n.denominator
                mass += w * n
    if exact:
        zv = z.value.value
        tail = zv - mass
        lo = lo_sum / zv - (0 if nonneg else tail / zv)
        hi = hi_sum / zv + tail / zv
        return StateValue(lo, hi, cutoff, tail, "series")
    with mpmath.workprec(_MP_PREC):
        zf = mpmath.mpf(z.value.lo.numerator) / z.value.lo.denominator
        tail_f = zf - mass
        tail = _mpf_to_fraction(tail_f) + z.value.width
        lo_f = lo_sum / zf - (0 if nonneg else tail_f / zf)
        hi_f = hi_sum / zf + tail_f / zf
    lo, _ = _float_enclosure(lo_f, z.value.width)
    _, hi = _float_enclosure(hi_f, z.value.width)
    return StateValue(lo, hi, cutoff, tail, "float")


def ground_state_value(S: Semigroup, s: Element, t: Element, state: TraceSpec = Canonical()) -> StateValue:
    """Ground state attached to a state on the core: zero off ``S_c x S_c``."""
    S.check(s, t)
    if not (S.is_core(s) and S.is_core(t)):
        return StateValue.exact(0, "ground states vanish unless both elements are core")
    if isinstance(state, Rho):
        if s == t:
            return StateValue.exact(1)
        lo, hi = kappa_table(S, s, t, state.level or S.default_depth()).enclosure
        return StateValue(lo, hi, mode="exact" if lo == hi else "series")
    lo, hi = _trace_interval(S, state)(s, t)
    return StateValue(lo, hi)


def foundation_mass(n: int, beta) -> Fraction:
    """``n^{1-β}``: the value any KMS_β state would give ``Σ_{f ∈ T_n} e_{fS}``."""
    b = _as_beta(beta)
    if b.denominator != 1:
        raise UsageError("exact foundation mass needs an integer β")
    return Fraction(n) * _pow_neg(n, b)


def foundation_sum(S: Semigroup, beta, n: int) -> Fraction:
    """``Σ_{f ∈ transversal(n)} ψ_β(e_{fS})`` evaluated through :func:`kms_value`."""
    b = _as_beta(beta)
    _refuse_below_one(b)
    level = S.transversal(n)
    if not level:
        raise UsageError(f"{n} is not a scale value of {S.tag}")
    total = Fraction(0)
    for f in level:
        v = kms_value(S, b, f, f)
        if not v.is_exact:
            raise UsageError("foundation sums are exact only for integer β")
        total += v.value
    return total


@dataclass(frozen=True)
class BoundaryVerdict:
    beta: Fraction
    sums: tuple[tuple[int, Fraction], ...]
    factors_through_Qp: bool
    factors_through_Qc: bool


def boundary_factoring(S: Semigroup, beta, levels: Sequence[int] | None = None) -> BoundaryVerdict:
    """Whether the KMS_β states kill the defect projections ``1 - Σ e_{fS}``."""
    b = _as_beta(beta)
    _refuse_below_one(b)
    ns = list(levels) if levels is not None else [n for n in S.scale_values(default_cutoff(S)) if n > 1]
    sums = tuple((n, foundation_sum(S, b, n)) for n in ns)
    core_ok = all(kms_value(S, b, a, a).value == 1 for a in core_sample(S, 3))
    return BoundaryVerdict(b, sums, all(v == 1 for _, v in sums), core_ok)


# -- classification ------------------------------------------------------------
@dataclass(frozen=True)
class ClassItem:
    key: str
    statement: str
    verdict: str  # holds | violated | undecided | statement | failed
    payload: dict = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class Classification:
    family: str
    beta: Fraction | None  # None encodes β = ∞
    items: tuple[ClassItem, ...]

    def item(self, key: str) -> ClassItem:
        return next(i for i in self.items if i.key == key)


def _sample_pairs(S: Semigroup, count: int = 6) -> list[tuple[Element, Element]]:
    elems = [f for f in S.transversal_upto(max(S.irreducible_scales or (1,)))]
    cores = core_sample(S, 2)
    xs = [S.multiply(f, a) for f in elems for a in cores]
    return [(x, y) for x in xs for y in xs][: count * count : max(1, count // 2)]


def classify(S: Semigroup, beta, depth: int | None = None, core_weight: int = 4) -> Classification:
    """Structured summary of the KMS/ground-state picture at ``beta`` (``None`` or ``inf`` for ∞)."""
    infinite = beta is None or (isinstance(beta, (float, str)) and str(beta).lower() in ("inf", "infinity"))
    b = None if infinite else _as_beta(beta)
    items: list[ClassItem] = []
    adm = check_admissible(S, depth)
    items.append(
        ClassItem(
            "admissibility",
            "S satisfies (A1)-(A4) up to the depth bound",
            "failed" if adm.failed else ("holds" if adm.passed else "undecided"),
            {"depth": adm.depth, "checks": {k: type(v).__name__ for k, v in adm.checks.items()},
             "fail": {k: v.reason for k, v in adm.checks.items() if hasattr(v, "reason")}},
        )
    )
    admissible = not adm.failed
    samples = [2, 3] if S.irreducible_scales else []
    items.append(
        ClassItem(
            "no_states_below_one",
            "there are no KMS_β states for β < 1",
            "statement",
            {"foundation_mass_at_zero": [(n, foundation_mass(n, 0)) for n in samples],
             "exceeds_one": all(foundation_mass(n, 0) > 1 for n in samples)},
        )
    )
    bc = critical_beta(S)
    items.append(
        ClassItem(
            "critical_interval",
            "the critical interval is [1, β_c]",
            "holds" if bc.value is not None else "undecided",
            {"beta_c": bc.value, "exact": bc.exact, "reason": bc.reason},
        )
    )
    if not admissible or bc.value is None:
        items.append(ClassItem("uniqueness", "no KMS classification without admissibility", "undecided", {}))
        return Classification(S.tag, b, tuple(items))

    fa = check_faithful(S, core_weight)
    af = check_almost_free(S, core_weight)
    pr = check_propagation(S, core_weight)
    if b is not None and b <= bc.value:
        items.append(_uniqueness_item(S, b, bc.value, fa, af, pr))
    elif b is not None:
        pairs = _sample_pairs(S)
        items.append(
            ClassItem(
                "parametrization",
                "KMS_β states correspond affinely to normalised traces on C*(S_c)",
                "holds",
                {"canonical_sample": [(S.render(x), S.render(y), kms_value(S, b, x, y)) for x, y in pairs]},
            )
        )
    if b is not None:
        bv = boundary_factoring(S, b)
        items.append(
            ClassItem(
                "boundary_quotients",
                "KMS_β states factor through Q_c(S); through Q_p(S) iff β = 1",
                "holds" if bv.factors_through_Qc and bv.factors_through_Qp == (b == 1) else "violated",
                {"foundation_sums": [(n, v) for n, v in bv.sums], "through_Qp": bv.factors_through_Qp,
                 "through_Qc": bv.factors_through_Qc},
            )
        )
    items.extend(_ground_items(S))
    return Classification(S.tag, b, tuple(items))


def _uniqueness_item(S, b, beta_c, fa, af, pr) -> ClassItem:
    payload = {
        "faithful": fa.holds,
        "almost_free": af.holds,
        "finite_propagation": pr.holds,
        "beta_c": beta_c,
    }
    if af.holds:
        sample = [(S.render(x), S.render(y), kms_value(S, b, x, y)) for x, y in _sample_pairs(S)]
        return ClassItem("uniqueness", "unique KMS_β state ψ(v_s v_t*) = N_s^-β δ_{s,t} (almost free route)", "holds",
                         {**payload, "route": "2a", "sample": sample})
    if fa.holds and pr.holds and beta_c == 1:
        cores = core_sample(S, 2)
        rho = {}
        for x in cores:
            for y in cores:
                if x != y:
                    rho[(S.render(x), S.render(y))] = kappa_table(S, x, y, S.default_depth()).enclosure
        return ClassItem("uniqueness", "unique KMS_1 state determined by the trace ρ (finite propagation route)", "holds",
                         {**payload, "route": "2b", "rho_enclosures": rho})
    witness = None
    for rep in (fa, af, pr):
        if rep.holds is False:
            witness = (rep.property, tuple(S.render(w) for w in rep.verdict.witness))
            break
    return ClassItem("uniqueness", "neither uniqueness criterion is established", "undecided",
                     {**payload, "route": None, "witness": witness})


def _ground_items(S: Semigroup) -> list[ClassItem]:
    items = []
    pairs = _sample_pairs(S)
    vals = [(S.render(x), S.render(y), ground_state_value(S, x, y)) for x, y in pairs]
    support_ok = all(v.value == 0 for (x, y), (_, _, v) in zip(pairs, vals) if not (S.is_core(x) and S.is_core(y)))
    items.append(ClassItem("ground_states", "ground states correspond affinely to states on C*(S_c)",
                           "holds" if support_ok else "violated", {"sample": vals}))
    items.append(ClassItem("kms_infinity", "a ground state is a KMS_∞ state iff its core state is a trace", "statement",
                           {"canonical_is_trace": True}))
    n = min(v for v in S.scale_values(default_cutoff(S)) if v > 1) if S.irreducible_scales else None
    mass = None
    if n is not None:
        mass = sum((ground_state_value(S, f, f).value for f in S.transversal(n)), Fraction(0))
    items.append(ClassItem("no_ground_states_on_Qp", "no ground state kills the defect projections",
                           "holds" if mass == 0 else "undecided", {"level": n, "foundation_mass": mass}))
    return items
