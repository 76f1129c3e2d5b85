"""Finite truncations of the induced representation of ``C*(S)``.

Basis vectors are pairs ``(t, g)``: ``t`` in the canonical transversal with
scale <= ``level_cap`` and ``g`` in a ball of the enveloping group of the core
(``core_basis="group"``, the GNS space of the canonical trace) or a core
element of bounded weight (``core_basis="semigroup"``, which is the left
regular representation on ``S`` and carries no trace vector).

    V_s (t, g) = (i(s t), c(s t) g)

Each ``V_s`` is a partial permutation.  Truncation can push an image or a
preimage out of the basis; every check is asserted only on columns whose
whole computation stays inside, so edge effects never count as failures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np
from scipy import sparse

from .core import DepthExhausted, Disjoint, Element, Semigroup, SizingError, UsageError
from .kms import Canonical, TraceSpec, _refuse_below_one, kms_value, zeta
from .parallel import ordered_map

MAX_BASIS = 200_000

OUT = "out"  # sentinel: the true image exists but lies outside the truncation

Key = tuple  # (transversal element, core coordinate)


@dataclass
class TruncatedRep:
    S: Semigroup
    level_cap: int
    core_cap: int
    core_basis: str
    basis: list[Key]
    index: dict[Key, int]
    operators: dict[Element, sparse.csc_matrix] = field(default_factory=dict)
    _gen_interior: np.ndarray | None = None

    @property
    def size(self) -> int:
        return len(self.basis)

    # -- key-level partial maps; the matrices are built from these ------------
    def _times(self, a: Element, g: Hashable) -> Hashable:
        if self.core_basis == "group":
            return self.S.core_group_multiply(self.S.core_group_embed(a), g)
        return self.S.multiply(a, g)

    def apply(self, s: Element, key: Key) -> Key | str:
        t, g = key
        f = self.S.factor(self.S.multiply(s, t))
        out = (f.transversal, self._times(f.core, g))
        return out if out in self.index else OUT

    def apply_adjoint(self, s: Element, key: Key) -> Key | None | str:
        """``V_s* e_key``: a key, ``None`` for the zero vector, or ``OUT``."""
        S = self.S
        t1, g1 = key
        if self.core_basis == "semigroup":
            y = S.left_divide(s, S.multiply(t1, g1))
            if isinstance(y, DepthExhausted):
                return OUT
            if y is None:
                return None
            f = S.factor(y)
            out = (f.transversal, f.core)
            return out if out in self.index else OUT
        ns, nt = S.scale(s), S.scale(t1)
        if nt % ns:
            return None
        for t in S.transversal(nt // ns) if (nt // ns) in _scale_set(S, nt) else ():
            f = S.factor(S.multiply(s, t))
            if f.transversal == t1:
                g = S.core_group_multiply(S.core_group_inverse(S.core_group_embed(f.core)), g1)
                out = (t, g)
                return out if out in self.index else OUT
        return None

    def operator(self, s: Element) -> sparse.csc_matrix:
        if s not in self.operators:
            self.operators[s] = _assemble(self, s)
        return self.operators[s]

    def vector(self, key: Key) -> sparse.csc_matrix:
        v = sparse.lil_matrix((self.size, 1), dtype=np.int64)
        v[self.index[key], 0] = 1
        return v.tocsc()

    def trace_vector(self) -> Key:
        if self.core_basis != "group":
            raise UsageError("the semigroup core basis carries no trace vector")
        return (self.S.identity, self.S.core_group_identity())

    def interior_mask(self) -> np.ndarray:
        """Columns whose images and preimages under every generator stay in the basis."""
        if self._gen_interior is None:
            gens = relation_elements(self.S)
            mask = np.ones(self.size, dtype=bool)
            for j, key in enumerate(self.basis):
                for s in gens:
                    if self.apply(s, key) == OUT or self.apply_adjoint(s, key) == OUT:
                        mask[j] = False
                        break
            self._gen_interior = mask
        return self._gen_interior


_SCALE_SETS: dict[tuple[int, int], frozenset[int]] = {}


def _scale_set(S: Semigroup, bound: int) -> frozenset[int]:
    key = (id(S), bound)
    if key not in _SCALE_SETS:
        _SCALE_SETS[key] = frozenset(S.scale_values(bound))
    return _SCALE_SETS[key]


def _assemble(rep: TruncatedRep, s: Element) -> sparse.csc_matrix:
    rows, cols = [], []
    for j, key in enumerate(rep.basis):
        img = rep.apply(s, key)
        if img != OUT:
            rows.append(rep.index[img])
            cols.append(j)
    data = np.ones(len(rows), dtype=np.int64)
    return sparse.csc_matrix((data, (rows, cols)), shape=(rep.size, rep.size))


def relation_elements(S: Semigroup) -> list[Element]:
    """Generators plus the transversals at the irreducible scales, deduplicated."""
    out: list[Element] = []
    for s in list(S.generators()) + [f for p in S.irreducible_scales for f in S.transversal(p)]:
        if s not in out and s != S.identity:
            out.append(s)
    return out


def build_rep(
    S: Semigroup,
    trace: TraceSpec = Canonical(),
    level_cap: int = 9,
    core_cap: int = 2,
    core_basis: str = "group",
    max_basis: int = MAX_BASIS,
) -> TruncatedRep:
    if not isinstance(trace, Canonical):
        raise UsageError("only the canonical trace has a matrix model; evaluate other traces with kms_value")
    if level_cap < 1 or core_cap < 0:
        raise UsageError("level cap must be >= 1 and core cap >= 0")
    if core_basis not in ("group", "semigroup"):
        raise UsageError("core_basis is 'group' or 'semigroup'")
    if core_basis == "group":
        cores = S.core_group_ball(core_cap)
    else:
        cores = sorted(S.enumerate_core(core_cap), key=S.sort_key)
    # |transversal(n)| = n, so the size is known before enumerating anything
    scales = S.scale_values(level_cap)
    size = sum(scales) * len(cores)
    if size > max_basis:
        fits, total = 1, 0
        for n in scales:
            total += n
            if total * len(cores) > max_basis:
                break
            fits = n
        raise SizingError(f"basis of {size} vectors exceeds the cap {max_basis}", {"level_cap": fits, "core_cap": core_cap})
    ts = S.transversal_upto(level_cap)
    basis = [(t, g) for t in ts for g in cores]
    rep = TruncatedRep(S, level_cap, core_cap, core_basis, basis, {k: i for i, k in enumerate(basis)})
    gens = relation_elements(S)
    for s, m in zip(gens, ordered_map(lambda s: _assemble(rep, s), gens)):
        rep.operators[s] = m
    return rep


# -- relation checks -------------------------------------------------------------
@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    interior: int
    witnesses: tuple = ()


@dataclass(frozen=True)
class RelationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]


def _columns_equal(A, B, cols: Sequence[int]) -> list[int]:
    if not cols:
        return []
    diff = (A - B).tocsc()[:, list(cols)]
    bad = np.unique(diff.nonzero()[1])
    return [cols[j] for j in bad]


def _chain_ok(rep: TruncatedRep, key: Key, steps: Sequence[tuple[str, Element]]) -> bool:
    """True when applying ``steps`` (right to left) to ``key`` never leaves the basis."""
    cur: Key | None = key
    for kind, s in reversed(steps):
        if cur is None:
            return True
        cur = rep.apply(s, cur) if kind == "V" else rep.apply_adjoint(s, cur)
        if cur == OUT:
            return False
    return True


def _partial_permutation(rep: TruncatedRep, s: Element) -> CheckResult:
    M = rep.operator(s).tocsc()
    counts = np.diff(M.indptr)
    rows = M.tocsr()
    bad = [int(j) for j in np.nonzero(counts > 1)[0]]
    ok = not bad and bool(np.all(M.data == 1)) and int(np.max(np.diff(rows.indptr), initial=0)) <= 1
    return CheckResult(f"partial permutation V[{rep.S.render(s)}]", ok, rep.size, tuple(bad[:5]))


def _isometry(rep: TruncatedRep, s: Element) -> CheckResult:
    V = rep.operator(s)
    cols = [j for j, k in enumerate(rep.basis) if _chain_ok(rep, k, [("V", s)])]
    eye = sparse.identity(rep.size, dtype=np.int64, format="csc")
    bad = _columns_equal(V.T @ V, eye, cols)
    return CheckResult(f"isometry V[{rep.S.render(s)}]", not bad, len(cols), tuple(rep.basis[j] for j in bad[:5]))


def _lcm_relation(rep: TruncatedRep, s: Element, t: Element) -> CheckResult:
    S = rep.S
    Vs, Vt = rep.operator(s), rep.operator(t)
    lhs = Vs.T @ Vt
    out = S.right_lcm(s, t)
    if isinstance(out, Disjoint):
        rhs = sparse.csc_matrix((rep.size, rep.size), dtype=np.int64)
        steps = [("A", s), ("V", t)]
        label = "0"
    else:
        sp, tp = out.left, out.right
        rhs = rep.operator(sp) @ rep.operator(tp).T
        steps = [("A", s), ("V", t)]
        label = f"V[{S.render(sp)}]V[{S.render(tp)}]*"
    cols = []
    for j, k in enumerate(rep.basis):
        if not _chain_ok(rep, k, steps):
            continue
        if not isinstance(out, Disjoint) and not _chain_ok(rep, k, [("V", out.left), ("A", out.right)]):
            continue
        cols.append(j)
    bad = _columns_equal(lhs, rhs, cols)
    name = f"V[{S.render(s)}]*V[{S.render(t)}] = {label}"
    return CheckResult(name, not bad, len(cols), tuple(rep.basis[j] for j in bad[:5]))


def defect_projection(rep: TruncatedRep, n: int) -> tuple[sparse.csc_matrix, list[int]]:
    """``d_n = 1 - Σ_{f ∈ T_n} V_f V_f*`` and the columns where it is exact."""
    S = rep.S
    level = S.transversal(n)
    total = sparse.csc_matrix((rep.size, rep.size), dtype=np.int64)
    for f in level:
        V = rep.operator(f)
        total = total + V @ V.T
    d = sparse.identity(rep.size, dtype=np.int64, format="csc") - total
    exact = [j for j, k in enumerate(rep.basis) if all(rep.apply_adjoint(f, k) != OUT for f in level)]
    return d.tocsc(), exact


def verify_relations(rep: TruncatedRep, levels: Sequence[int] | None = None) -> RelationReport:
    """Defining relations, isometry, defect projections and their commutation with the core."""
    S = rep.S
    gens = relation_elements(S)
    checks: list[CheckResult] = []
    checks.append(CheckResult("V[1] is the identity", _is_identity(rep.operator(S.identity)), rep.size))
    checks += ordered_map(lambda s: _partial_permutation(rep, s), gens)
    checks += ordered_map(lambda s: _isometry(rep, s), gens)
    pairs = [(s, t) for s in gens for t in gens]
    checks += ordered_map(lambda p: _lcm_relation(rep, *p), pairs)

    ns = list(levels) if levels is not None else [n for n in S.scale_values(rep.level_cap)]
    core_gens = [a for a in gens if S.is_core(a)]
    for n in ns:
        d, exact = defect_projection(rep, n)
        sq = _columns_equal(d @ d, d, exact)
        checks.append(CheckResult(f"d[{n}] idempotent", not sq, len(exact), tuple(rep.basis[j] for j in sq[:5])))
        if n == 1:
            zero = _columns_equal(d, sparse.csc_matrix(d.shape, dtype=np.int64), exact)
            checks.append(CheckResult("d[1] = 0", not zero, len(exact)))
        exact_set = set(exact)
        for a in core_gens:
            V = rep.operator(a)
            cols = []
            for j in exact:
                img = rep.apply(a, rep.basis[j])
                if img != OUT and rep.index[img] in exact_set:
                    cols.append(j)
            bad = _columns_equal(V @ d, d @ V, cols)
            checks.append(
                CheckResult(f"V[{S.render(a)}] d[{n}] = d[{n}] V[{S.render(a)}]", not bad, len(cols),
                            tuple(rep.basis[j] for j in bad[:5]))
            )
    return RelationReport(tuple(checks))


def _is_identity(M) -> bool:
    return (M - sparse.identity(M.shape[0], dtype=np.int64)).count_nonzero() == 0


# -- weighted checks ------------------------------------------------------------
def _vector_pair_value(rep: TruncatedRep, s: Element, t: Element, key: Key) -> int | None:
    """``<V_s V_t* e_key, e_key>`` or None when the computation leaves the basis."""
    x = rep.apply_adjoint(t, key)
    y = rep.apply_adjoint(s, key)
    if x == OUT or y == OUT:
        return None
    return int(x is not None and x == y)


def ground_vector_value(rep: TruncatedRep, s: Element, t: Element) -> int:
    """The vector state at ``(1, e)`` on ``V_s V_t*``."""
    v = _vector_pair_value(rep, s, t, rep.trace_vector())
    if v is None:
        raise SizingError("core cap too small for this pair", {"core_cap": rep.core_cap + 1})
    return v


@dataclass(frozen=True)
class ReconstructionReport:
    beta: Fraction
    index: tuple[int, ...]
    phi_QI: Fraction
    zeta_I: Fraction
    excluded_mass: Fraction
    phi_QI_upper: Fraction
    samples: tuple[tuple[str, str, Fraction, Fraction, Fraction, Fraction], ...]
    bound: Fraction
    max_deviation: Fraction

    @property
    def passed(self) -> bool:
        within = self.phi_QI <= 1 / self.zeta_I <= self.phi_QI_upper
        return within and self.max_deviation <= self.bound


def verify_reconstruction(
    rep: TruncatedRep,
    beta,
    I: Sequence[int],
    samples: Sequence[tuple[Element, Element]] = (),
    tolerance: Fraction | None = None,
) -> ReconstructionReport:
    """Weight the trace vectors ``(t, e)`` by ``ζ_S(β)^{-1} N_t^{-β}`` and test the defect identities.

    ``φ̃(Q_I)`` is compared with ``ζ_I(β)^{-1}``, and for each sample pair both
    the direct vector-state value and the reconstruction
    ``Σ_{r ∈ T_I} N_r^{-β} φ̃(Q_I V_r* y V_r Q_I)`` are compared with
    :func:`kms_value`.  Exact rational arithmetic; ``β`` must be an integer.
    """
    S = rep.S
    b = Fraction(beta)
    _refuse_below_one(b)
    if b == 1 or b.denominator != 1:
        raise UsageError("reconstruction needs an integer β > 1")
    I = tuple(sorted(set(I)))
    if not set(I) <= set(S.irreducible_scales):
        raise UsageError(f"I must be a subset of the irreducible scales {S.irreducible_scales}")
    zS = zeta(S.irreducible_scales, b).value.value
    zI = zeta(I, b).value.value
    cap = rep.level_cap
    g0 = S.core_group_identity()
    weighted = [(t, Fraction(1, S.scale(t) ** int(b)) / zS) for t in S.transversal_upto(cap)]
    kept = sum(w * 1 for _, w in weighted)  # sum over t of weights = ζ^{-1} Σ_{n<=cap} n^{1-β}
    excluded = 1 - kept
    if tolerance is not None and excluded > tolerance:
        raise SizingError(f"excluded mass {excluded} exceeds tolerance {tolerance}", {"level_cap": cap * max(S.irreducible_scales)})

    levels_I = [(n, S.transversal(n)) for n in S.scale_values(cap) if _in_monoid(n, I)]

    def in_QI(key: Key) -> bool | None:
        for n in I:
            for f in S.transversal(n):
                x = rep.apply_adjoint(f, key)
                if x == OUT:
                    return None
                if x is not None:
                    return False
        return True

    q_mask = {}
    for t, _ in weighted:
        q_mask[t] = in_QI((t, g0))
    phi_QI = sum((w for t, w in weighted if q_mask[t]), Fraction(0))
    undecided_QI = sum((w for t, w in weighted if q_mask[t] is None), Fraction(0))
    phi_QI_upper = phi_QI + undecided_QI + excluded

    r_weight = sum((Fraction(n, n ** int(b)) for n, _ in levels_I), Fraction(0))
    r_tail = (zI - r_weight) / zI  # ζ_I^{-1} Σ_{m ∈ <I>, m > cap} m^{1-β}
    bound = excluded * max(Fraction(1), r_weight) + r_tail

    rows = []
    max_dev = Fraction(0)
    for s, t in samples:
        exact = kms_value(S, b, s, t).value
        direct, leaked = Fraction(0), Fraction(0)
        for t0, w in weighted:
            v = _vector_pair_value(rep, s, t, (t0, g0))
            if v is None:
                leaked += w
            else:
                direct += w * v
        recon = Fraction(0)
        for n, level in levels_I:
            for r in level:
                for t0, w in weighted:
                    if q_mask[t0] is None:
                        leaked += w / n ** int(b)
                    if not q_mask[t0]:
                        continue
                    key = (t0, g0)
                    # <V_s V_t* V_r e, V_r e> with e in the range of Q_I
                    rk = rep.apply(r, key)
                    if rk == OUT:
                        leaked += w / n ** int(b)
                        continue
                    v = _vector_pair_value(rep, s, t, rk)
                    if v is None:
                        leaked += w / n ** int(b)
                    else:
                        recon += Fraction(v, n ** int(b)) * w
        dev = max(abs(direct - exact), abs(recon - exact))
        max_dev = max(max_dev, dev)
        rows.append((S.render(s), S.render(t), exact, direct, recon, leaked))
    leaked_total = max((row[5] for row in rows), default=Fraction(0))
    return ReconstructionReport(b, I, phi_QI, zI, excluded, phi_QI_upper, tuple(rows), bound + leaked_total, max_dev)


def _in_monoid(n: int, gens: Sequence[int]) -> bool:
    for p in gens:
        while n % p == 0:
            n //= p
    return n == 1
