"""Concrete right LCM semigroup families and their serializable specs.

A ``FamilySpec`` is plain data: it round-trips through ``to_dict`` /
``spec_from_dict`` and :func:`build` turns it into a semigroup instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, ClassVar, Mapping

from ..core import ConstructionError, Semigroup
from .algebraic import DilationMatrix, FiniteFieldShift, ads_ideal_test
from .artin import EasyArtin, FreeMonoid, TableZappaSzep
from .baumslag_solitar import BaumslagSolitar
from .selfsimilar import MealyAutomaton, SelfSimilar, adding_machine
from .semidirect import NSemidirectP
from .zappa_szep import ZappaSzepSemigroup, check_zs_axioms

__all__ = [
    "BaumslagSolitar",
    "DilationMatrix",
    "EasyArtin",
    "FiniteFieldShift",
    "FreeMonoid",
    "MealyAutomaton",
    "NSemidirectP",
    "SelfSimilar",
    "TableZappaSzep",
    "ZappaSzepSemigroup",
    "adding_machine",
    "ads_ideal_test",
    "build",
    "check_zs_axioms",
    "spec_from_dict",
    "FamilySpec",
    "FreeMonoidSpec",
    "EasyArtinSpec",
    "BaumslagSolitarSpec",
    "NSemidirectPSpec",
    "SelfSimilarSpec",
    "DilationMatrixSpec",
    "FiniteFieldShiftSpec",
    "FreeAbelianSpec",
    "ZappaSzepSpec",
]


class FamilySpec:
    kind: ClassVar[str]

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.kind}
        for k, v in self.__dict__.items():
            out[k] = v.to_dict() if isinstance(v, FamilySpec) else _plain(v)
        return out


def _plain(v):
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


@dataclass(frozen=True)
class FreeMonoidSpec(FamilySpec):
    kind: ClassVar[str] = "free"
    m: int = 2


@dataclass(frozen=True)
class EasyArtinSpec(FamilySpec):
    kind: ClassVar[str] = "artin"
    m: int = 2
    n: int = 1


@dataclass(frozen=True)
class BaumslagSolitarSpec(FamilySpec):
    kind: ClassVar[str] = "bs"
    c: int = 2
    d: int = 3


@dataclass(frozen=True)
class NSemidirectPSpec(FamilySpec):
    kind: ClassVar[str] = "nxp"
    primes: tuple[int, ...] = (2, 3)


@dataclass(frozen=True)
class SelfSimilarSpec(FamilySpec):
    kind: ClassVar[str] = "selfsimilar"
    automaton: Mapping = field(default_factory=lambda: adding_machine().to_dict(), hash=False)
    state_cap: int = 4096
    depth: int = 12


@dataclass(frozen=True)
class DilationMatrixSpec(FamilySpec):
    kind: ClassVar[str] = "dilation"
    matrix: tuple[tuple[int, ...], ...] = ((2,),)


@dataclass(frozen=True)
class FiniteFieldShiftSpec(FamilySpec):
    kind: ClassVar[str] = "ffs"
    q: int = 2
    f_degree: int = 1
    unit_scalars: tuple[int, ...] = ()


@dataclass(frozen=True)
class FreeAbelianSpec(FamilySpec):
    """``N^rank``; only meaningful as the acting factor of a Zappa-Szep spec."""

    kind: ClassVar[str] = "free-abelian"
    rank: int = 1


@dataclass(frozen=True)
class ZappaSzepSpec(FamilySpec):
    kind: ClassVar[str] = "zs"
    U: FamilySpec = field(default_factory=FreeMonoidSpec)
    A: FamilySpec = field(default_factory=FreeAbelianSpec)
    action: tuple[tuple[int, ...], ...] = ()
    restriction: tuple[tuple[tuple[int, ...], ...], ...] = ()


_KINDS: dict[str, type[FamilySpec]] = {
    cls.kind: cls
    for cls in (
        FreeMonoidSpec,
        EasyArtinSpec,
        BaumslagSolitarSpec,
        NSemidirectPSpec,
        SelfSimilarSpec,
        DilationMatrixSpec,
        FiniteFieldShiftSpec,
        FreeAbelianSpec,
        ZappaSzepSpec,
    )
}


def _tuplify(v):
    if isinstance(v, list):
        return tuple(_tuplify(x) for x in v)
    return v


def spec_from_dict(data: Mapping[str, Any]) -> FamilySpec:
    """Inverse of ``FamilySpec.to_dict``; raises ``ConstructionError`` on bad input."""
    if not isinstance(data, Mapping) or "family" not in data:
        raise ConstructionError("family spec has a 'family' key", repr(data)[:80])
    kind = data["family"]
    cls = _KINDS.get(kind)
    if cls is None:
        raise ConstructionError("family is one of " + ", ".join(sorted(_KINDS)), f"got {kind!r}")
    kwargs = {}
    allowed = set(cls.__dataclass_fields__)
    for k, v in data.items():
        if k == "family":
            continue
        if k not in allowed:
            raise ConstructionError(f"known field of {kind!r}", f"unexpected {k!r}")
        if k in ("U", "A"):
            kwargs[k] = spec_from_dict(v)
        elif k == "automaton":
            kwargs[k] = dict(v)
        else:
            kwargs[k] = _tuplify(v)
    return cls(**kwargs)


def build(spec: FamilySpec) -> Semigroup:
    """Construct the semigroup described by ``spec``, validating its parameters."""
    if isinstance(spec, FreeMonoidSpec):
        return FreeMonoid(spec.m)
    if isinstance(spec, EasyArtinSpec):
        return EasyArtin(spec.m, spec.n)
    if isinstance(spec, BaumslagSolitarSpec):
        return BaumslagSolitar(spec.c, spec.d)
    if isinstance(spec, NSemidirectPSpec):
        return NSemidirectP(spec.primes)
    if isinstance(spec, SelfSimilarSpec):
        return SelfSimilar(MealyAutomaton.from_dict(spec.automaton), state_cap=spec.state_cap, depth=spec.depth)
    if isinstance(spec, DilationMatrixSpec):
        return DilationMatrix(spec.matrix)
    if isinstance(spec, FiniteFieldShiftSpec):
        return FiniteFieldShift(spec.q, spec.f_degree, spec.unit_scalars)
    if isinstance(spec, ZappaSzepSpec):
        return _build_zs(spec)
    if isinstance(spec, FreeAbelianSpec):
        raise ConstructionError("N^n has trivial scale; use it as the A factor of a Zappa-Szep spec")
    raise ConstructionError("spec is a FamilySpec", type(spec).__name__)


def _build_zs(spec: ZappaSzepSpec) -> Semigroup:
    if not isinstance(spec.U, FreeMonoidSpec):
        raise ConstructionError("U is a free monoid", f"got {spec.U.kind}")
    if isinstance(spec.A, FreeMonoidSpec):
        # distinct letters x, y have xA ∩ yA empty
        raise ConstructionError("A is left reversible (aA ∩ bA nonempty)", "a free monoid on >= 2 letters is not")
    if not isinstance(spec.A, FreeAbelianSpec):
        raise ConstructionError("A is N^n", f"got {spec.A.kind}")
    return TableZappaSzep(spec.U.m, spec.A.rank, spec.action, spec.restriction)
