"""Abstract right LCM semigroup contract and its element data model.

Every concrete family implements :class:`Semigroup`.  Elements are immutable
:class:`Element` values carrying the tag of the instance that produced them,
so mixing elements of two instances is caught instead of silently producing
garbage.  All arithmetic is exact (Python ints and :class:`fractions.Fraction`).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Iterator, Sequence


class RlcmError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(RlcmError, ValueError):
    """An operation was called outside its contract."""


class FamilyMismatchError(UsageError):
    """Elements of two different semigroup instances were combined."""


class ConstructionError(RlcmError, ValueError):
    """Family parameters violate a stated constraint."""

    def __init__(self, constraint: str, detail: str = ""):
        self.constraint = constraint
        msg = f"violated constraint: {constraint}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ConsistencyError(RlcmError):
    """An internal cross-check failed; indicates inconsistent input tables."""


class SizingError(RlcmError):
    """A requested computation exceeds its configured size caps."""

    def __init__(self, message: str, suggestion: dict | None = None):
        self.suggestion = suggestion or {}
        super().__init__(message)


class CappedComputationError(RlcmError):
    """A closure computation hit its cap; ``partial`` holds what was found."""

    def __init__(self, message: str, partial: Any = None):
        self.partial = partial
        super().__init__(message)


@dataclass(frozen=True)
class Element:
    """An element of a semigroup instance in canonical normal form.

    Two elements are equal iff their family tags and payloads are equal.
    """

    family: str
    payload: Hashable

    def __repr__(self) -> str:
        return f"Element({self.family}, {self.payload!r})"


@dataclass(frozen=True)
class Disjoint:
    """Outcome of ``right_lcm`` when ``sS`` and ``tS`` do not meet."""

    def __bool__(self) -> bool:
        return False


DISJOINT = Disjoint()


@dataclass(frozen=True)
class Lcm:
    """Right LCM witness: ``s * left == lcm == t * right``."""

    lcm: Element
    left: Element
    right: Element


LcmOutcome = Disjoint | Lcm


@dataclass(frozen=True)
class DepthExhausted:
    """Outcome of a bounded search that ran out of depth without deciding."""

    depth: int

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class Factorization:
    """``element == transversal * core`` with ``transversal`` in the canonical transversal."""

    transversal: Element
    core: Element


@dataclass(frozen=True)
class Certificate:
    """A family-level closed-form verdict for an action property."""

    holds: bool
    reason: str
    witness: tuple = field(default=())


class Semigroup(ABC):
    """Contract shared by every right LCM semigroup family.

    Subclasses supply the normal form, multiplication, LCMs, left division,
    the scale and the canonical transversal.  Everything else has a generic
    implementation in terms of those.
    """

    #: Family tag; elements produced by this instance carry it.
    tag: str = "abstract"
    #: True when the family is known to be right cancellative.
    right_cancellative: bool = False

    # -- element plumbing -------------------------------------------------
    def element(self, payload: Hashable) -> Element:
        return Element(self.tag, payload)

    def check(self, *elements: Element) -> None:
        for e in elements:
            if not isinstance(e, Element) or e.family != self.tag:
                fam = getattr(e, "family", type(e).__name__)
                raise FamilyMismatchError(f"element from {fam!r} used with instance {self.tag!r}")

    @property
    @abstractmethod
    def identity(self) -> Element: ...

    def render(self, s: Element) -> str:
        """Human-readable form of ``s``; families override for nicer output."""
        return repr(s.payload)

    def sort_key(self, s: Element):
        """Total order on payloads used to pick canonical representatives."""
        return s.payload

    # -- the contract -----------------------------------------------------
    @abstractmethod
    def multiply(self, s: Element, t: Element) -> Element: ...

    def mul(self, *elements: Element) -> Element:
        out = self.identity
        for e in elements:
            out = self.multiply(out, e)
        return out

    def power(self, s: Element, k: int) -> Element:
        return self.mul(*([s] * k))

    @abstractmethod
    def right_lcm(self, s: Element, t: Element) -> LcmOutcome: ...

    @abstractmethod
    def left_divide(self, t: Element, s: Element) -> Element | None | DepthExhausted:
        """Return ``x`` with ``t * x == s``, or ``None`` if ``s`` is not in ``tS``."""

    @abstractmethod
    def scale(self, s: Element) -> int: ...

    def is_core(self, s: Element) -> bool:
        return self.scale(s) == 1

    @abstractmethod
    def is_unit(self, s: Element) -> bool: ...

    @abstractmethod
    def factor(self, s: Element) -> Factorization: ...

    def core_equivalent(self, s: Element, t: Element) -> bool:
        return self.factor(s).transversal == self.factor(t).transversal

    @abstractmethod
    def transversal(self, n: int) -> tuple[Element, ...]:
        """Canonical transversal of scale ``n``; empty when ``n`` is not a scale value."""

    @abstractmethod
    def enumerate_core(self, max_weight: int) -> Iterator[Element]:
        """Core elements of weight at most ``max_weight``, identity first."""

    @abstractmethod
    def core_weight(self, a: Element) -> int: ...

    @property
    @abstractmethod
    def irreducible_scales(self) -> tuple[int, ...]:
        """The irreducible elements of the scale monoid ``N(S)``."""

    @abstractmethod
    def generators(self) -> tuple[Element, ...]:
        """A finite generating set (as a monoid, together with core inverses where relevant)."""

    # -- derived structure ------------------------------------------------
    def scale_values(self, bound: int) -> list[int]:
        """Sorted values of ``N(S)`` not exceeding ``bound``."""
        return monoid_closure(self.irreducible_scales, bound)

    def levels(self, bound: int) -> list[tuple[int, tuple[Element, ...]]]:
        """``(n, transversal(n))`` for every scale value ``n <= bound``."""
        return [(n, self.transversal(n)) for n in self.scale_values(bound)]

    def transversal_upto(self, bound: int) -> list[Element]:
        return [f for _, level in self.levels(bound) for f in level]

    def default_depth(self) -> int:
        irr = self.irreducible_scales
        return max(irr) ** 3 if irr else 1

    def elements_upto(self, bound: int, core_weight: int) -> list[Element]:
        """All ``f * a`` with ``f`` in the transversal up to ``bound`` and core weight <= ``core_weight``."""
        cores = list(self.enumerate_core(core_weight))
        return [self.multiply(f, a) for f in self.transversal_upto(bound) for a in cores]

    def is_transversal(self, t: Element) -> bool:
        return self.factor(t).transversal == t

    # -- closed-form certificates (None when the family has none) ---------
    def faithful_certificate(self) -> Certificate | None:
        return None

    def almost_free_certificate(self) -> Certificate | None:
        return None

    def propagation_certificate(self) -> Certificate | None:
        return None

    # -- enveloping group of the core, used by the representation -----------
    # Core elements embed into a group G_c; the GNS space of the canonical
    # trace is spanned by point masses on G_c.
    def core_group_embed(self, a: Element) -> Hashable:
        return a.payload

    def core_group_identity(self) -> Hashable:
        return self.core_group_embed(self.identity)

    @abstractmethod
    def core_group_multiply(self, x: Hashable, y: Hashable) -> Hashable: ...

    @abstractmethod
    def core_group_inverse(self, x: Hashable) -> Hashable: ...

    @abstractmethod
    def core_group_ball(self, radius: int) -> list[Hashable]:
        """Group elements of word length <= ``radius``, identity first."""

    def core_group_weight(self, x: Hashable) -> int:
        raise NotImplementedError

    # -- generic helpers ----------------------------------------------------
    def zs_action(self, a: Element, u: Element) -> Element:
        """Action of a core element on the core-irreducible part: ``i(a u)``."""
        self.check(a, u)
        return self.factor(self.multiply(a, u)).transversal

    def zs_restriction(self, a: Element, u: Element) -> Element:
        """Restriction of a core element along ``u``: ``c(a u)``."""
        self.check(a, u)
        return self.factor(self.multiply(a, u)).core

    def describe(self) -> dict:
        return {"family": self.tag, "irreducible_scales": list(self.irreducible_scales)}


def monoid_closure(generators: Iterable[int], bound: int) -> list[int]:
    """Sorted elements of the multiplicative monoid generated by ``generators`` up to ``bound``."""
    gens = sorted({g for g in generators if g > 1})
    seen = {1}
    frontier = [1]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y <= bound and y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def verify_lcm(S: Semigroup, s: Element, t: Element, outcome: LcmOutcome) -> bool:
    """Check the algebraic identity carried by an LCM witness."""
    if isinstance(outcome, Disjoint):
        return True
    return S.multiply(s, outcome.left) == outcome.lcm == S.multiply(t, outcome.right)


def bounded_left_divide(
    S: Semigroup, t: Element, s: Element, candidates: Sequence[Element]
) -> Element | None | DepthExhausted:
    """Search ``candidates`` for ``x`` with ``t x == s``.

    Used as a fallback and as an oracle; returns :class:`DepthExhausted` when
    no candidate works but the scales leave room for one outside the window.
    """
    S.check(t, s)
    st, ss = S.scale(t), S.scale(s)
    if ss % st:
        return None
    for x in candidates:
        if S.multiply(t, x) == s:
            return x
    return DepthExhausted(len(candidates))
