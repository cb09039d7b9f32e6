"""The budget game over multisets of sequents.

A game state is a multiset of subgames (sequents) plus an optional shared
budget.  Player I picks a subgame and a rule instance: unary rules rewrite
the subgame; derelictions additionally pay their price out of the budget
(legal only when the budget covers it); context-splitting rules fork the
subgame into two parallel subgames; additive rules hand the choice of
premise to player II.  Player I wins when every subgame is an initial
sequent.

``game_search`` decides winning-strategy existence by exhaustive AND/OR
search (the oracle the prover is cross-checked against);
``strategy_from_proof`` turns a labelled proof into a winning strategy;
``best_adversary`` is the spend-maximizing player II.  Strategies are
finite decision tables keyed by canonical state tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

from .core import (
    ADDITIVE_BRANCHING, AXIOM_RULES, DERELICTIONS, PRICED,
    LabelledProof, RuleName, Sequent,
    Tensor, With, Plus, Lolli,
    canonicalize, classify_initial, is_permanent, is_single_use,
    rule_premises, RuleError,
)
from .labelled import validate_labelled_proof
from .parser import render
from .prover import (
    DEFAULT_LIMITS, LimitExceeded, SearchLimits, child_states, make_state,
    min_cost, state_key, state_sequent,
)
from .semiring import CostSemiring, builtin


class IllegalMove(ValueError):
    pass


class UndefinedStrategy(RuntimeError):
    """A strategy was asked to move in a state outside its domain."""


@dataclass(frozen=True)
class GameState:
    subgames: tuple
    budget: object = None  # None: the budget-free game


@dataclass(frozen=True)
class Move:
    subgame: int
    rule: RuleName
    principal: Optional[int] = None
    split: Optional[int] = None


@dataclass(frozen=True)
class Next:
    state: GameState


@dataclass(frozen=True)
class Choice:
    left: GameState
    right: GameState


MoveOutcome = Union[Next, Choice]


def state_token(st: GameState, k: CostSemiring) -> str:
    """Exact textual form of a state; strategy tables key on this."""
    body = " || ".join(render(s, k) for s in st.subgames)
    b = "-" if st.budget is None else k.render_value(st.budget)
    return f"{body} @ {b}"


def winning_state(st: GameState) -> bool:
    return all(classify_initial(s) is not None for s in st.subgames)


def _instances(s: Sequent, k: CostSemiring, budget):
    """All rule instances applicable to one subgame (axioms are not moves;
    derelictions only when the budget covers the price)."""
    ante, goal = s.antecedent, s.consequent
    out = []
    linear = sum(1 for f in ante if not is_permanent(f))
    for i, f in enumerate(ante):
        if isinstance(f, Tensor):
            out.append((RuleName.TensorL, i, None))
        elif isinstance(f, With):
            out.append((RuleName.WithL1, i, None))
            out.append((RuleName.WithL2, i, None))
        elif isinstance(f, Plus):
            out.append((RuleName.PlusL, i, None))
        elif isinstance(f, Lolli):
            for mask in range(1 << (linear - 1)):
                out.append((RuleName.LolliL, i, mask))
        elif is_permanent(f) or is_single_use(f):
            if budget is None or k.leq(budget, f.price):
                rule = RuleName.BangPermL if is_permanent(f) else RuleName.BangSingleL
                out.append((rule, i, None))
    if isinstance(goal, Lolli):
        out.append((RuleName.LolliR, None, None))
    elif isinstance(goal, With):
        out.append((RuleName.WithR, None, None))
    elif isinstance(goal, Plus):
        out.append((RuleName.PlusR1, None, None))
        out.append((RuleName.PlusR2, None, None))
    elif isinstance(goal, Tensor):
        for mask in range(1 << linear):
            out.append((RuleName.TensorR, None, mask))
    return out


def legal_moves(st: GameState, k: CostSemiring = None):
    k = k or builtin("cost")
    moves = []
    for i, s in enumerate(st.subgames):
        for rule, principal, split in _instances(s, k, st.budget):
            moves.append(Move(i, rule, principal, split))
    return moves


def _move_price(st: GameState, m: Move):
    if m.rule in DERELICTIONS:
        return st.subgames[m.subgame].antecedent[m.principal].price
    return None


def apply_move(st: GameState, m: Move, k: CostSemiring = None) -> MoveOutcome:
    k = k or builtin("cost")
    if not 0 <= m.subgame < len(st.subgames):
        raise IllegalMove(f"no subgame {m.subgame}")
    s = st.subgames[m.subgame]
    if m.rule in AXIOM_RULES or m.rule == RuleName.WeakLabel:
        raise IllegalMove(f"{m.rule.value} is not a game move")
    try:
        premises = rule_premises(s, m.rule, m.principal, m.split, PRICED)
    except RuleError as exc:
        raise IllegalMove(str(exc)) from None
    budget = st.budget
    if m.rule in DERELICTIONS and budget is not None:
        price = _move_price(st, m)
        if not k.leq(budget, price):
            raise IllegalMove(
                f"budget {k.render_value(budget)} does not cover price {k.render_value(price)}")
        budget = k.div(budget, price)
    before, after = st.subgames[:m.subgame], st.subgames[m.subgame + 1:]
    if m.rule in ADDITIVE_BRANCHING:
        return Choice(GameState(before + (premises[0],) + after, st.budget),
                      GameState(before + (premises[1],) + after, st.budget))
    return Next(GameState(before + premises + after, budget))


# ---------------------------------------------------------------------------
# exhaustive search (OR over player-I moves, AND over player-II choices)


class _GameSearch:
    def __init__(self, k: CostSemiring, limits: SearchLimits):
        self.k = k
        self.limits = limits
        self.memo = {}
        self.nodes = 0
        self.truncated = False

    def _key(self, subgames, budget):
        b = "-" if budget is None else repr(budget)
        return (tuple(sorted(state_key(g) for g in subgames)), b)

    def win(self, subgames, budget):
        # subgames carry dereliction counters (prover search states)
        key = self._key(subgames, budget)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.nodes += 1
        if self.nodes > self.limits.max_nodes:
            raise LimitExceeded(f"node budget {self.limits.max_nodes} exhausted")
        self.memo[key] = False  # a revisit along the same path cannot help
        result = False
        if all(classify_initial(state_sequent(g)) is not None for g in subgames):
            result = True
        else:
            for i, g in enumerate(subgames):
                occs, _ = g
                seq = state_sequent(g)
                for rule, principal, split in _instances(seq, self.k, budget):
                    if rule == RuleName.BangPermL and occs[principal][1] <= 0:
                        self.truncated = True
                        continue
                    b2 = budget
                    if rule in DERELICTIONS and budget is not None:
                        b2 = self.k.div(budget, seq.antecedent[principal].price)
                    children = child_states(g, rule, principal, split, PRICED,
                                            self.limits.max_derelictions)
                    rest = subgames[:i] + subgames[i + 1:]
                    if rule in ADDITIVE_BRANCHING:
                        ok = (self.win(rest + (children[0],), b2)
                              and self.win(rest + (children[1],), b2))
                    else:
                        ok = self.win(rest + tuple(children), b2)
                    if ok:
                        result = True
                        break
                if result:
                    break
        self.memo[key] = result
        return result


def game_search(st: GameState, k: CostSemiring = None,
                limits: SearchLimits = DEFAULT_LIMITS) -> bool:
    """True iff player I has a winning strategy from st, within limits."""
    k = k or builtin("cost")
    eng = _GameSearch(k, limits)
    subgames = tuple(make_state(s, limits) for s in st.subgames)
    return eng.win(subgames, st.budget)


# ---------------------------------------------------------------------------
# strategies


class Strategy:
    """Player-I decision table: canonical state token -> move."""

    def __init__(self, initial: GameState, moves: dict, k: CostSemiring):
        self.initial = initial
        self.moves = moves
        self.k = k

    def __call__(self, st: GameState) -> Optional[Move]:
        return self.moves.get(state_token(st, self.k))

    def __len__(self):
        return len(self.moves)


class AdversaryStrategy:
    """Player-II decision table: choice token -> 'L' | 'R'."""

    def __init__(self, choices: dict, k: CostSemiring):
        self.choices = choices
        self.k = k

    def __call__(self, left: GameState, right: GameState) -> str:
        key = (state_token(left, self.k), state_token(right, self.k))
        try:
            return self.choices[key]
        except KeyError:
            raise UndefinedStrategy("adversary has no recorded choice here") from None


def _strip_weak(node: LabelledProof) -> LabelledProof:
    while node.rule == RuleName.WeakLabel:
        node = node.premises[0]
    return node


def strategy_from_proof(lpf: LabelledProof, k: CostSemiring) -> Strategy:
    """Winning strategy for ({conclusion}, conclusion label) following the
    proof: subgames evolve exactly as the proof tree prescribes, and both
    answers of every player-II choice are covered."""
    validate_labelled_proof(lpf, k)
    lpf = canonicalize(lpf, PRICED)
    initial = GameState((lpf.conclusion.sequent,), lpf.conclusion.label)
    moves: dict = {}

    def expand(state: GameState, nodes):
        token = state_token(state, k)
        if token in moves or winning_state(state):
            return
        idx = next(i for i, n in enumerate(nodes) if n.rule not in AXIOM_RULES)
        node = nodes[idx]
        mv = Move(idx, node.rule, node.principal, node.split)
        moves[token] = mv
        children = tuple(_strip_weak(p) for p in node.premises)
        before, after = nodes[:idx], nodes[idx + 1:]
        out = apply_move(state, mv, k)
        if isinstance(out, Choice):
            expand(out.left, before + (children[0],) + after)
            expand(out.right, before + (children[1],) + after)
        else:
            expand(out.state, before + children + after)

    expand(initial, ( _strip_weak(lpf),))
    return Strategy(initial, moves, k)


def best_adversary(sigma: Strategy, st: GameState, k: CostSemiring):
    """The player-II behavior maximizing the total spend against sigma, by
    minimax over sigma's decision tree; returns (strategy, forced spend)."""
    choices: dict = {}

    def walk(state: GameState):
        if winning_state(state):
            return k.top
        mv = sigma(state)
        if mv is None:
            raise UndefinedStrategy(f"strategy undefined at {state_token(state, k)}")
        price = _move_price(state, mv)
        factor = k.top if price is None else price
        out = apply_move(state, mv, k)
        if isinstance(out, Next):
            return k.times(factor, walk(out.state))
        sl, sr = walk(out.left), walk(out.right)
        key = (state_token(out.left, k), state_token(out.right, k))
        # the worse spend sits lower in the order
        if k.leq(sl, sr):
            choices[key] = "L"
            picked = sl
        else:
            choices[key] = "R"
            picked = sr
        return k.times(factor, picked)

    spend = walk(st)
    return AdversaryStrategy(choices, k), spend


@dataclass
class PlayTrace:
    steps: tuple  # (state, move, 'L'/'R' or None)
    final: GameState
    outcome: str  # 'won' | 'stuck'
    spend: object


def play(st: GameState, sigma_i, sigma_ii, k: CostSemiring = None,
         max_steps: int = 100_000) -> PlayTrace:
    """Run one play to its end; sigma_i maps states to moves, sigma_ii
    answers choices with 'L'/'R' (or the chosen state)."""
    k = k or builtin("cost")
    steps = []
    state = st
    spend = k.top
    while True:
        if winning_state(state):
            return PlayTrace(tuple(steps), state, "won", spend)
        if not legal_moves(state, k):
            return PlayTrace(tuple(steps), state, "stuck", spend)
        mv = sigma_i(state)
        if mv is None:
            raise UndefinedStrategy(f"strategy undefined at {state_token(state, k)}")
        price = _move_price(state, mv)
        if price is not None:
            spend = k.times(spend, price)
        out = apply_move(state, mv, k)
        if isinstance(out, Next):
            steps.append((state, mv, None))
            state = out.state
        else:
            answer = sigma_ii(out.left, out.right)
            if answer == "L" or answer == out.left:
                steps.append((state, mv, "L"))
                state = out.left
            elif answer == "R" or answer == out.right:
                steps.append((state, mv, "R"))
                state = out.right
            else:
                raise IllegalMove("player II must answer L or R")
        if len(steps) > max_steps:
            raise RuntimeError("play did not terminate")


def partition_budget(states, budget, k: CostSemiring,
                     limits: SearchLimits = DEFAULT_LIMITS):
    """Split a shared budget across subgames: each part is the subgame's
    cheapest decoration, accepted when their product stays within the
    budget; None when some subgame is unwinnable or the parts do not fit."""
    parts = []
    for s in states:
        res = min_cost(s, k, limits)
        if res.cost is None:
            return None
        parts.append(res.cost)
    if not k.leq(budget, k.fold_times(parts)):
        return None
    return parts


def adaptive_choice(left: GameState, right: GameState, k: CostSemiring,
                    limits: SearchLimits = DEFAULT_LIMITS) -> str:
    """Greedy adversary for live play: refute if possible, else steer
    toward the branch that must spend more."""
    try:
        if not game_search(left, k, limits):
            return "L"
        if not game_search(right, k, limits):
            return "R"
    except LimitExceeded:
        pass

    def needed(st):
        parts = []
        for s in st.subgames:
            res = min_cost(s, k, limits)
            if res.cost is None:
                return k.bot
            parts.append(res.cost)
        return k.fold_times(parts)

    # the worse requirement sits lower in the order; send player I there
    return "L" if k.leq(needed(left), needed(right)) else "R"
