"""Self-similar actions ``X* ⋈ G`` for groups generated by invertible Mealy automata.

A group element is stored as a minimized, canonically numbered transducer:
a tuple of states ``(perm, next)`` with state 0 initial.  Minimization is
Moore partition refinement, so two finite-state elements are equal exactly
when their canonical transducers are equal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..core import CappedComputationError, Certificate, ConstructionError
from .zappa_szep import ActingMonoid, ZappaSzepSemigroup

State = tuple[tuple[int, ...], tuple[int, ...]]
Transducer = tuple[State, ...]

DEFAULT_DEPTH = 12
DEFAULT_STATE_CAP = 4096


@dataclass(frozen=True)
class MealyAutomaton:
    """An invertible Mealy automaton over the alphabet ``range(len(alphabet))``.

    ``transitions[state]`` lists ``(output_letter, next_state)`` for each input
    letter in order.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    transitions: Mapping[str, tuple[tuple[int, str], ...]] = field(hash=False)

    def __post_init__(self):
        k = len(self.alphabet)
        if k < 2:
            raise ConstructionError("alphabet has at least 2 letters", f"got {k}")
        if len(set(self.states)) != len(self.states) or not self.states:
            raise ConstructionError("state names nonempty and distinct")
        for s in self.states:
            if "^" in s or not s:
                raise ConstructionError("state names are nonempty and avoid '^'", repr(s))
            row = self.transitions.get(s)
            if row is None or len(row) != k:
                raise ConstructionError("transition defined for every (state, letter)", f"state {s!r}")
            outs = sorted(o for o, _ in row)
            if outs != list(range(k)):
                raise ConstructionError("each state permutes the alphabet", f"state {s!r} outputs {outs}")
            for _, nxt in row:
                if nxt not in self.transitions:
                    raise ConstructionError("next states are declared states", f"{s!r} -> {nxt!r}")

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "alphabet": list(self.alphabet),
            "transitions": {s: [[o, n] for o, n in self.transitions[s]] for s in self.states},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "MealyAutomaton":
        try:
            trans = {s: tuple((int(o), str(n)) for o, n in row) for s, row in data["transitions"].items()}
            return cls(tuple(map(str, data["states"])), tuple(map(str, data["alphabet"])), trans)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConstructionError("automaton has states, alphabet and transitions", str(exc)) from None


def adding_machine() -> MealyAutomaton:
    """The binary odometer: ``a`` adds one with carry, ``e`` is the identity."""
    return MealyAutomaton(
        ("a", "e"),
        ("0", "1"),
        {"a": ((1, "e"), (0, "a")), "e": ((0, "e"), (1, "e"))},
    )


def _canonical(perms: Sequence[tuple[int, ...]], nexts: Sequence[tuple[int, ...]], start: int) -> Transducer:
    """Minimize the transducer reachable from ``start`` and renumber it by BFS."""
    # reachable part
    order = [start]
    index = {start: 0}
    q = deque([start])
    while q:
        s = q.popleft()
        for t in nexts[s]:
            if t not in index:
                index[t] = len(order)
                order.append(t)
                q.append(t)
    P = [perms[s] for s in order]
    N = [tuple(index[t] for t in nexts[s]) for s in order]
    # Moore refinement
    block = {}
    cls = [block.setdefault(p, len(block)) for p in P]
    while True:
        sig = {}
        new = [sig.setdefault((cls[i], tuple(cls[t] for t in N[i])), len(sig)) for i in range(len(P))]
        if len(sig) == len(set(cls)):
            cls = new
            break
        cls = new
    # quotient and BFS renumbering from the start state's class
    rep = {}
    for i, c in enumerate(cls):
        rep.setdefault(c, i)
    num = {cls[0]: 0}
    out_order = [cls[0]]
    q = deque([cls[0]])
    while q:
        c = q.popleft()
        for t in N[rep[c]]:
            ct = cls[t]
            if ct not in num:
                num[ct] = len(out_order)
                out_order.append(ct)
                q.append(ct)
    return tuple((P[rep[c]], tuple(num[cls[t]] for t in N[rep[c]])) for c in out_order)


class TransducerGroup(ActingMonoid):
    """The group generated by the states of a Mealy automaton and their inverses."""

    def __init__(self, automaton: MealyAutomaton, state_cap: int = DEFAULT_STATE_CAP, depth: int = DEFAULT_DEPTH):
        self.automaton = automaton
        self.k = len(automaton.alphabet)
        self.state_cap = state_cap
        self.depth = depth
        names = list(automaton.states)
        pos = {s: i for i, s in enumerate(names)}
        perms = [tuple(o for o, _ in automaton.transitions[s]) for s in names]
        nexts = [tuple(pos[n] for _, n in automaton.transitions[s]) for s in names]
        self.identity = ((tuple(range(self.k)), (0,) * self.k),)
        self.state_elements = {s: _canonical(perms, nexts, pos[s]) for s in names}
        gens = []
        for s in names:
            g = self.state_elements[s]
            if g != self.identity and g not in gens:
                gens.append(g)
        self._gens = tuple(gens)
        self._names: dict[Transducer, str] = {self.identity: "1"}
        for s in names:
            self._names.setdefault(self.state_elements[s], s)
            self._names.setdefault(self.inverse(self.state_elements[s]), f"{s}^-1")
        self._mul_cache: dict = {}
        self._act_cache: dict = {}
        self._weights: dict[Transducer, int] = {}
        self._ball: list[Transducer] = []

    # -- transducer algebra -------------------------------------------------
    def inverse(self, g: Transducer) -> Transducer:
        perms, nexts = [], []
        for perm, nxt in g:
            inv = [0] * self.k
            for x, y in enumerate(perm):
                inv[y] = x
            perms.append(tuple(inv))
            nexts.append(tuple(nxt[inv[y]] for y in range(self.k)))
        return _canonical(perms, nexts, 0)

    def multiply(self, g: Transducer, h: Transducer) -> Transducer:
        """``g h``: apply ``h`` first."""
        key = (g, h)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        index = {(0, 0): 0}
        order = [(0, 0)]
        perms, nexts = [], []
        i = 0
        while i < len(order):
            sg, sh = order[i]
            pg, ng = g[sg]
            ph, nh = h[sh]
            perm, nxt = [], []
            for x in range(self.k):
                y = ph[x]
                perm.append(pg[y])
                pair = (ng[y], nh[x])
                if pair not in index:
                    if len(order) >= self.state_cap:
                        raise CappedComputationError(
                            f"product exceeds the state cap {self.state_cap}", partial=len(order)
                        )
                    index[pair] = len(order)
                    order.append(pair)
                nxt.append(index[pair])
            perms.append(tuple(perm))
            nexts.append(tuple(nxt))
            i += 1
        out = _canonical(perms, nexts, 0)
        self._mul_cache[key] = out
        return out

    def act(self, g: Transducer, x: int) -> tuple[int, Transducer]:
        key = (g, x)
        hit = self._act_cache.get(key)
        if hit is None:
            perm, nxt = g[0]
            perms = [p for p, _ in g]
            nexts = [n for _, n in g]
            hit = (perm[x], _canonical(perms, nexts, nxt[x]))
            self._act_cache[key] = hit
        return hit

    def from_word(self, word: Sequence[str] | str) -> Transducer:
        """Group element spelled by state names; ``s^-1`` denotes an inverse."""
        tokens = word.split() if isinstance(word, str) else list(word)
        out = self.identity
        for tok in tokens:
            inv = tok.endswith("^-1")
            name = tok[:-3] if inv else tok
            if name not in self.state_elements:
                raise ValueError(f"unknown state {name!r}")
            g = self.state_elements[name]
            out = self.multiply(out, self.inverse(g) if inv else g)
        return out

    # -- ActingMonoid ----------------------------------------------------------
    def right_lcm(self, a, b):
        return self.identity, self.inverse(a), self.inverse(b)

    def left_divide(self, a, b):
        return self.multiply(self.inverse(a), b)

    def is_unit(self, a):
        return True

    def _grow_ball(self, radius: int) -> None:
        if not self._ball:
            self._ball = [self.identity]
            self._weights[self.identity] = 0
        steps = [*self._gens, *(self.inverse(g) for g in self._gens)]
        frontier_w = max(self._weights.values())
        while frontier_w < radius:
            frontier = [g for g in self._ball if self._weights[g] == frontier_w]
            for g in frontier:
                for s in steps:
                    h = self.multiply(g, s)
                    if h not in self._weights:
                        self._weights[h] = frontier_w + 1
                        self._ball.append(h)
            frontier_w += 1
            if not any(w == frontier_w for w in self._weights.values()):
                break

    def weight(self, a):
        w = self._weights.get(a)
        r = max(self._weights.values(), default=0)
        while w is None and r < 12:
            r += 1
            self._grow_ball(r)
            w = self._weights.get(a)
        if w is None:
            raise ValueError("group element outside the enumerated ball")
        return w

    def enumerate(self, max_weight):
        self._grow_ball(max_weight)
        return iter([g for g in self._ball if self._weights[g] <= max_weight])

    def generators(self):
        return self._gens

    def group_multiply(self, x, y):
        return self.multiply(x, y)

    def group_inverse(self, x):
        return self.inverse(x)

    def group_ball(self, radius):
        return list(self.enumerate(radius))

    def group_weight(self, x):
        return self.weight(x)

    def render(self, a):
        name = self._names.get(a)
        if name is not None:
            return name
        return f"<{len(a)}-state element>"


class SelfSimilar(ZappaSzepSemigroup):
    """``X* ⋈ G`` for the automaton group ``G``."""

    def __init__(self, automaton: MealyAutomaton, state_cap: int = DEFAULT_STATE_CAP, depth: int = DEFAULT_DEPTH, name: str | None = None):
        group = TransducerGroup(automaton, state_cap=state_cap, depth=depth)
        self.automaton = automaton
        self.group = group
        tag = name or ("SS[" + ",".join(automaton.states) + "/" + "".join(automaton.alphabet) + "]")
        super().__init__(tag, group.k, group, group.act, list(automaton.alphabet))

    def g(self, word: Sequence[str] | str):
        """Core element for a group word such as ``"a a e^-1"``."""
        return self.a_element(self.group.from_word(word))

    def x(self, letters: str):
        """Transversal element for a word over the alphabet."""
        idx = {c: i for i, c in enumerate(self.automaton.alphabet)}
        return self.u_element(tuple(idx[c] for c in letters))

    def selfsimilar_image(self, g, w: str) -> str:
        word = tuple(self.automaton.alphabet.index(c) for c in w)
        out, _ = self.act_word(g, word)
        return "".join(self.automaton.alphabet[i] for i in out)

    def selfsimilar_section(self, g, w: str):
        word = tuple(self.automaton.alphabet.index(c) for c in w)
        return self.act_word(g, word)[1]

    def faithful_certificate(self):
        return Certificate(True, "automaton group elements are determined by their action on words")

    def propagation_certificate(self):
        return Certificate(True, "finite-state elements have finitely many sections")

    def describe(self):
        out = super().describe()
        out["automaton"] = self.automaton.to_dict()
        return out
