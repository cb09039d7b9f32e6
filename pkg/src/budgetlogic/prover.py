"""Bottom-up proof search: provability, cheapest decorations, spectra.

Termination is controlled by a per-occurrence cap on derelictions of
permanent resources (each copy of a permanent resource may be unpacked at
most ``max_derelictions`` times along one branch) plus an overall node
budget; provability search additionally bounds the proof height.  Under
the cap every rule strictly decreases a well-founded potential, so the
search spaces are finite.  A failed search that never hit a cap is a
refutation; otherwise the result is only "no proof within limits", and
results carry an ``exhaustive`` flag saying which of the two happened.

The deterministic rule order is: closing rule first, then the invertible
unary rules (tensor-left, implication-right, applied eagerly), then unary
choices (with-left, plus-right), then branching rules, then derelictions,
leftmost principal first; splits enumerate all assignments of the linear
context.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Optional

from .core import (
    PLAIN, PRICED, RuleName, Sequent, LabelledSequent, Proof, LabelledProof,
    Tensor, With, Plus, Lolli, Modal,
    check_extended, classify_initial, expand_rule, is_permanent,
    is_single_use, proof_height,
)
from .labelled import decorate, rule_label
from .semiring import CostSemiring, builtin

sys.setrecursionlimit(max(sys.getrecursionlimit(), 40000))


class LimitExceeded(RuntimeError):
    """The overall node budget ran out before the search finished."""


@dataclass(frozen=True)
class SearchLimits:
    max_height: int = 64
    max_derelictions: int = 4
    max_nodes: int = 2_000_000

    def __post_init__(self):
        if min(self.max_height, self.max_derelictions, self.max_nodes) < 1:
            raise ValueError("search limits must be positive")


DEFAULT_LIMITS = SearchLimits()


# search states: antecedent occurrences paired with remaining derelictions
# (meaningful for top-level permanents only)


def make_state(s: Sequent, limits: SearchLimits):
    occs = tuple((f, limits.max_derelictions if is_permanent(f) else 0)
                 for f in s.antecedent)
    return (occs, s.consequent)


def state_sequent(state) -> Sequent:
    occs, goal = state
    return Sequent(tuple(f for f, _ in occs), goal)


_FORMULA_IDS: dict = {}


def _fid(f) -> int:
    """Intern a formula; memo keys sort these instead of repr strings."""
    fid = _FORMULA_IDS.get(f)
    if fid is None:
        fid = len(_FORMULA_IDS)
        _FORMULA_IDS[f] = fid
    return fid


def state_key(state):
    occs, goal = state
    return (tuple(sorted((_fid(f), rem) for f, rem in occs)), _fid(goal))


def child_states(state, rule, principal, split, calculus, cap):
    """Premises of a rule instance with dereliction counters threaded:
    carried occurrences keep their counter (one use burned on the
    dereliction's own principal), fresh occurrences start at the cap."""
    occs, goal = state
    out = []
    for items, prem_goal in expand_rule(state_sequent(state), rule, principal,
                                        split, calculus):
        child = []
        for f, src in items:
            if src is None:
                child.append((f, cap if is_permanent(f) else 0))
            else:
                rem = occs[src][1]
                if rule == RuleName.BangPermL and src == principal:
                    rem -= 1
                child.append((f, rem))
        out.append((tuple(child), prem_goal))
    return out


@dataclass(frozen=True)
class _Move:
    rule: RuleName
    principal: Optional[int] = None
    split: Optional[int] = None
    price: object = None


class _Search:
    def __init__(self, calculus, limits: SearchLimits, k: CostSemiring = None,
                 bound=None):
        self.calculus = calculus
        self.limits = limits
        self.k = k
        self.bound = bound
        self.truncated = False
        self.nodes = 0
        self._proofs = {}
        self._fails = {}
        self._best = {}
        self._sets = {}

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.limits.max_nodes:
            raise LimitExceeded(f"node budget {self.limits.max_nodes} exhausted")

    def _moves(self, state):
        occs, goal = state
        ante = [f for f, _ in occs]
        moves = []
        init = classify_initial(state_sequent(state))
        if init is not None:
            moves.append(_Move(init))
        for i, f in enumerate(ante):  # invertible, applied eagerly
            if isinstance(f, Tensor):
                moves.append(_Move(RuleName.TensorL, i))
                return moves
        if isinstance(goal, Lolli):
            moves.append(_Move(RuleName.LolliR))
            return moves
        for i, f in enumerate(ante):
            if isinstance(f, With):
                moves.append(_Move(RuleName.WithL1, i))
                moves.append(_Move(RuleName.WithL2, i))
        if isinstance(goal, Plus):
            moves.append(_Move(RuleName.PlusR1))
            moves.append(_Move(RuleName.PlusR2))
        if isinstance(goal, With):
            moves.append(_Move(RuleName.WithR))
        for i, f in enumerate(ante):
            if isinstance(f, Plus):
                moves.append(_Move(RuleName.PlusL, i))
        linear_count = sum(
            1 for f in ante
            if self.calculus == PLAIN or not is_permanent(f))
        if isinstance(goal, Tensor):
            for mask in range(1 << linear_count):
                moves.append(_Move(RuleName.TensorR, split=mask))
        for i, f in enumerate(ante):
            if isinstance(f, Lolli):
                n = linear_count - (1 if self.calculus == PLAIN or not is_permanent(f) else 0)
                for mask in range(1 << n):
                    moves.append(_Move(RuleName.LolliL, i, mask))
        if self.calculus == PRICED:
            for i, f in enumerate(ante):
                if is_permanent(f):
                    if occs[i][1] > 0:
                        moves.append(_Move(RuleName.BangPermL, i, price=f.price))
                    else:
                        self.truncated = True
                elif is_single_use(f):
                    moves.append(_Move(RuleName.BangSingleL, i, price=f.price))
        return moves

    def _children(self, state, mv: _Move):
        return child_states(state, mv.rule, mv.principal, mv.split,
                            self.calculus, self.limits.max_derelictions)

    def _proof_node(self, state, mv: _Move, subproofs):
        return Proof(state_sequent(state), mv.rule, mv.principal, mv.split,
                     tuple(subproofs))

    # provability (height-bounded depth-first search)

    def first_proof(self, state, h):
        key = state_key(state)
        hit = self._proofs.get(key)
        if hit is not None:
            pf, height = hit
            if height <= h:
                return pf
        if self._fails.get(key, 0) >= h:
            return None
        self._tick()
        for mv in self._moves(state):
            children = None
            if mv.rule in (RuleName.Ax, RuleName.OneR, RuleName.ZeroL):
                children = ()
            elif h <= 1:
                self.truncated = True
                continue
            else:
                subs = []
                for child in self._children(state, mv):
                    sub = self.first_proof(child, h - 1)
                    if sub is None:
                        break
                    subs.append(sub)
                else:
                    children = tuple(subs)
            if children is not None:
                pf = self._proof_node(state, mv, children)
                self._proofs[key] = (pf, proof_height(pf))
                return pf
        self._fails[key] = max(self._fails.get(key, 0), h)
        return None

    # cheapest decoration (memoized, optionally pruned by a budget bound)

    def _within(self, c):
        return self.bound is None or self.k.leq(self.bound, c)

    def best(self, state):
        key = state_key(state)
        if key in self._best:
            return self._best[key]
        self._tick()
        k = self.k
        result = None
        for mv in self._moves(state):
            if mv.price is not None and not self._within(mv.price):
                continue  # the bound cannot cover this dereliction
            if mv.rule in (RuleName.Ax, RuleName.OneR, RuleName.ZeroL):
                cand = (k.top, self._proof_node(state, mv, ()))
            else:
                children = self._children(state, mv)
                parts = []
                for child in children:
                    sub = self.best(child)
                    if sub is None:
                        break
                    parts.append(sub)
                if len(parts) != len(children):
                    continue
                cost = rule_label(mv.rule, [c for c, _ in parts], k, mv.price)
                if not self._within(cost):
                    continue
                cand = (cost, self._proof_node(state, mv, [p for _, p in parts]))
            if result is None or (result[0] != cand[0] and k.leq(result[0], cand[0])):
                result = cand
            if result[0] == k.top:
                break
        self._best[key] = result
        return result

    # every attainable decoration cost within the bound

    def cost_set(self, state):
        key = state_key(state)
        if key in self._sets:
            return self._sets[key]
        self._tick()
        k = self.k
        out = set()
        for mv in self._moves(state):
            if mv.price is not None and not self._within(mv.price):
                continue
            if mv.rule in (RuleName.Ax, RuleName.OneR, RuleName.ZeroL):
                out.add(k.top)
                continue
            sets = [self.cost_set(child) for child in self._children(state, mv)]
            if any(not s for s in sets):
                continue
            if len(sets) == 1:
                combos = ((c,) for c in sets[0])
            else:
                combos = ((c1, c2) for c1 in sets[0] for c2 in sets[1])
            for combo in combos:
                c = rule_label(mv.rule, combo, k, mv.price)
                if self._within(c):
                    out.add(c)
        out = frozenset(out)
        self._sets[key] = out
        return out


# ---------------------------------------------------------------------------
# public results


@dataclass
class ProveResult:
    proof: Optional[Proof]
    exhaustive: bool

    @property
    def provable(self) -> bool:
        return self.proof is not None

    @property
    def refuted(self) -> bool:
        return self.proof is None and self.exhaustive


@dataclass
class LabelledProveResult:
    proof: Optional[LabelledProof]
    exhaustive: bool

    @property
    def provable(self) -> bool:
        return self.proof is not None


@dataclass
class CostResult:
    cost: object  # None when no proof was found
    proof: Optional[LabelledProof]
    exhaustive: bool

    @property
    def provable(self) -> bool:
        return self.cost is not None

    @property
    def minimal(self) -> bool:
        """False means: best found within limits, not proven minimal."""
        return self.exhaustive


@dataclass(frozen=True)
class Spectrum:
    values: tuple
    bound: object
    exhausted: bool

    def __contains__(self, v):
        return v in self.values

    @property
    def least(self):
        return self.values[0] if self.values else None


def _require_extended(s: Sequent):
    if not check_extended(s):
        raise ValueError("sequent violates the negative-polarity restriction")


def prove(s: Sequent, calculus=PRICED, limits: SearchLimits = DEFAULT_LIMITS) -> ProveResult:
    """Search for a proof; distinguishes refuted from out-of-limits."""
    if calculus == PRICED:
        _require_extended(s)
    eng = _Search(calculus, limits)
    try:
        pf = eng.first_proof(make_state(s, limits), limits.max_height)
    except LimitExceeded:
        return ProveResult(None, exhaustive=False)
    return ProveResult(pf, exhaustive=not eng.truncated)


def min_cost(s: Sequent, k: CostSemiring, limits: SearchLimits = DEFAULT_LIMITS) -> CostResult:
    """The best decoration cost over all proofs within limits.

    On non-totally-ordered algebras the DP would only return an aggregate;
    all built-ins are total orders, which the precondition enforces.
    """
    _require_extended(s)
    if not k.totally_ordered:
        raise ValueError("min_cost needs a totally ordered cost algebra")
    eng = _Search(PRICED, limits, k)
    try:
        got = eng.best(make_state(s, limits))
    except LimitExceeded:
        return CostResult(None, None, exhaustive=False)
    if got is None:
        return CostResult(None, None, exhaustive=not eng.truncated)
    cost, pf = got
    return CostResult(cost, decorate(pf, k), exhaustive=not eng.truncated)


def prove_labelled(ls: LabelledSequent, k: CostSemiring,
                   limits: SearchLimits = DEFAULT_LIMITS) -> LabelledProveResult:
    """Find a labelled proof whose conclusion carries exactly the given
    budget label (weakening the canonical decoration when it is better)."""
    _require_extended(ls.sequent)
    k.check(ls.label)
    eng = _Search(PRICED, limits, k, bound=ls.label)
    try:
        got = eng.best(make_state(ls.sequent, limits))
    except LimitExceeded:
        return LabelledProveResult(None, exhaustive=False)
    if got is None:
        return LabelledProveResult(None, exhaustive=not eng.truncated)
    cost, pf = got
    lpf = decorate(pf, k)
    if cost != ls.label:
        lpf = LabelledProof(LabelledSequent(ls.sequent, ls.label),
                            RuleName.WeakLabel, premises=(lpf,))
    return LabelledProveResult(lpf, exhaustive=not eng.truncated)


def spectrum(s: Sequent, bound, k: CostSemiring,
             limits: SearchLimits = DEFAULT_LIMITS) -> Spectrum:
    """All decoration costs within the bound realized by proofs within
    limits, best first."""
    _require_extended(s)
    k.check(bound)
    eng = _Search(PRICED, limits, k, bound=bound)
    try:
        values = eng.cost_set(make_state(s, limits))
    except LimitExceeded:
        return Spectrum((), bound, exhausted=False)
    ordered = tuple(sorted(values, key=k.sort_key))
    return Spectrum(ordered, bound, exhausted=not eng.truncated)


def omega(prices, bound, k: CostSemiring = None, max_size=1_000_000):
    """All finite products of the given prices that stay within the bound
    (with the cost algebra: all natural-number linear combinations)."""
    k = k or builtin("cost")
    seen = {k.top}
    frontier = [k.top]
    while frontier:
        v = frontier.pop()
        for p in prices:
            w = k.times(v, p)
            if w not in seen and k.leq(bound, w):
                if len(seen) >= max_size:
                    raise LimitExceeded("combination set exceeds max_size")
                seen.add(w)
                frontier.append(w)
    return tuple(sorted(seen, key=k.sort_key))
