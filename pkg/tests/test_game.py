import itertools
import random
from fractions import Fraction

import pytest

from budgetlogic.core import (
    Atom, LabelledSequent, RuleName, Sequent, check_extended,
)
from budgetlogic.game import (
    Choice, GameState, IllegalMove, Move, Next, UndefinedStrategy,
    apply_move, best_adversary, game_search, legal_moves, partition_budget,
    play, state_token, strategy_from_proof, winning_state,
)
from budgetlogic.labelled import decorate
from budgetlogic.parser import parse_sequent
from budgetlogic.prover import SearchLimits, min_cost, prove_labelled
from conftest import random_extended_sequent, riddle_proof, riddle_sequent

p, q = Atom("p"), Atom("q")
_LIM = SearchLimits(max_height=24, max_derelictions=3, max_nodes=300_000)


def seq(text, k):
    return parse_sequent(text, k)


def test_legal_moves_include_splits_and_derelictions(kc):
    st = GameState((seq("!p[1]p, !s[3]q |- p * q", kc),), Fraction(5))
    moves = legal_moves(st, kc)
    rules = {m.rule for m in moves}
    assert RuleName.TensorR in rules
    assert RuleName.BangPermL in rules and RuleName.BangSingleL in rules
    assert sum(m.rule == RuleName.TensorR for m in moves) == 2  # one linear occ


def test_stuck_state_has_no_moves(kc):
    assert legal_moves(GameState((seq("p |- q", kc),), Fraction(5)), kc) == []


def test_dereliction_needs_budget_coverage(kc):
    st = GameState((seq("!p[7]p |- p", kc),), Fraction(5))
    assert legal_moves(st, kc) == []
    st = GameState((seq("!p[7]p |- p", kc),), Fraction(7))
    assert len(legal_moves(st, kc)) == 1
    # without a budget the game is free
    st = GameState((seq("!p[7]p |- p", kc),), None)
    assert len(legal_moves(st, kc)) == 1


def test_apply_move_budget_decrease(kc):
    st = GameState((seq("!p[1]p |- p", kc), seq("!p[1]p, !s[3]q |- q", kc)),
                   Fraction(5))
    out = apply_move(st, Move(0, RuleName.BangPermL, 0), kc)
    assert isinstance(out, Next) and out.state.budget == Fraction(4)
    out2 = apply_move(out.state, Move(1, RuleName.BangSingleL, 1), kc)
    assert out2.state.budget == Fraction(1)
    assert winning_state(out2.state)


def test_apply_move_additive_gives_choice(kc):
    st = GameState((seq("p, q |- p & q", kc),), Fraction(0))
    out = apply_move(st, Move(0, RuleName.WithR), kc)
    assert isinstance(out, Choice)
    assert out.left.subgames[0].consequent == p
    assert out.right.subgames[0].consequent == q


def test_apply_move_rejects_nonsense(kc):
    st = GameState((seq("p |- p", kc),), Fraction(0))
    with pytest.raises(IllegalMove):
        apply_move(st, Move(0, RuleName.TensorR, None, 0), kc)
    with pytest.raises(IllegalMove):
        apply_move(st, Move(0, RuleName.Ax), kc)
    with pytest.raises(IllegalMove):
        apply_move(GameState((seq("!p[7]p |- p", kc),), Fraction(1)),
                   Move(0, RuleName.BangPermL, 0), kc)


def test_winning_state(kc):
    assert winning_state(GameState((seq("q, p |- p", kc), seq("|- 1", kc)),
                                   Fraction(0)))
    assert not winning_state(GameState((seq("p |- q", kc),), Fraction(5)))
    assert winning_state(GameState((), Fraction(0)))


def test_game_search_budget_free(kc):
    assert game_search(GameState((seq("p & q |- p & q", kc),), None), kc)
    assert not game_search(GameState((seq("p |- q", kc),), None), kc)


def test_game_search_riddle_budgets(kc):
    s = riddle_sequent(kc)
    assert game_search(GameState((s,), Fraction(3)), kc, _LIM)
    assert not game_search(GameState((s,), Fraction(2)), kc, _LIM)


def test_strategy_from_axiom_proof(kc):
    lpf = decorate(riddle_proof(kc), kc)  # exercise a real proof too
    sig = strategy_from_proof(lpf, kc)
    assert sig(sig.initial) is not None
    ax = prove_labelled(seq("p |-[0] p", kc), kc).proof
    sig0 = strategy_from_proof(ax, kc)
    assert winning_state(sig0.initial)


def test_riddle_strategy_beats_every_adversary(kc):
    lpf = decorate(riddle_proof(kc), kc)
    sig = strategy_from_proof(lpf, kc)

    class ScriptedII:
        def __init__(self, script):
            self.script = list(script)

        def __call__(self, left, right):
            return "L" if not self.script else ("L" if self.script.pop(0) == 0 else "R")

    for combo in itertools.product((0, 1), repeat=3):
        tr = play(sig.initial, sig, ScriptedII(combo), kc)
        assert tr.outcome == "won", combo
        assert kc.leq(tr.final.budget, Fraction(0))  # never negative: in carrier


def test_best_adversary_forces_full_spend_on_riddle(kc):
    lpf = decorate(riddle_proof(kc), kc)
    sig = strategy_from_proof(lpf, kc)
    tau, spend = best_adversary(sig, sig.initial, kc)
    assert spend == Fraction(3)
    tr = play(sig.initial, sig, tau, kc)
    assert tr.outcome == "won"
    assert tr.final.budget == Fraction(0)
    assert tr.spend == Fraction(3)


def test_adversary_picks_the_expensive_branch(kc):
    ls = seq("!s[1]p, !s[2]q |-[2] p & q", kc)
    res = prove_labelled(ls, kc)
    sig = strategy_from_proof(res.proof, kc)
    tau, spend = best_adversary(sig, sig.initial, kc)
    assert spend == Fraction(2)


def test_costless_adversary_on_additive_identity(kc):
    res = prove_labelled(seq("p & q |-[0] p & q", kc), kc)
    sig = strategy_from_proof(res.proof, kc)
    tau, spend = best_adversary(sig, sig.initial, kc)
    assert spend == Fraction(0)


def test_play_reproduces_the_two_dereliction_trace(kc):
    ls = seq("!p[1]p, !s[3]q |-[5] p * q", kc)
    res = prove_labelled(ls, kc)
    sig = strategy_from_proof(res.proof, kc)
    tau, _ = best_adversary(sig, sig.initial, kc)
    tr = play(sig.initial, sig, tau, kc)
    budgets = [st.budget for st, _, _ in tr.steps] + [tr.final.budget]
    assert budgets == [Fraction(5), Fraction(5), Fraction(4), Fraction(1)]
    seen = []
    for b in budgets:
        if not seen or seen[-1] != b:
            seen.append(b)
    assert seen == [Fraction(5), Fraction(4), Fraction(1)]
    assert tr.outcome == "won"


def test_play_from_stuck_state(kc):
    st = GameState((seq("p |- q", kc),), Fraction(5))
    tr = play(st, lambda s: None, lambda l, r: "L", kc)
    assert tr.outcome == "stuck" and tr.steps == ()


def test_play_undefined_strategy_raises(kc):
    st = GameState((seq("p & q |- p", kc),), Fraction(0))
    with pytest.raises(UndefinedStrategy):
        play(st, lambda s: None, lambda l, r: "L", kc)


def test_partition_budget_examples(kc):
    got = partition_budget(
        (seq("!p[1]p |- p", kc), seq("!s[3]q |- q", kc)), Fraction(5), kc, _LIM)
    assert got == [Fraction(1), Fraction(3)]
    got = partition_budget((seq("p |- p", kc), seq("q |- q", kc)),
                           Fraction(0), kc, _LIM)
    assert got == [Fraction(0), Fraction(0)]
    assert partition_budget((seq("p |- q", kc), seq("p |- p", kc)),
                            Fraction(5), kc, _LIM) is None
    assert partition_budget((seq("!p[1]p |- p", kc), seq("!s[3]q |- q", kc)),
                            Fraction(3), kc, _LIM) is None


def test_budget_changes_only_on_derelictions(kc):
    lpf = decorate(riddle_proof(kc), kc)
    sig = strategy_from_proof(lpf, kc)
    tau, _ = best_adversary(sig, sig.initial, kc)
    tr = play(sig.initial, sig, tau, kc)
    for (st, mv, _), nxt in zip(tr.steps, [s for s, _, _ in tr.steps[1:]] + [tr.final]):
        if mv.rule in (RuleName.BangPermL, RuleName.BangSingleL):
            price = st.subgames[mv.subgame].antecedent[mv.principal].price
            assert nxt.budget == kc.div(st.budget, price)
        else:
            assert nxt.budget == st.budget


def test_independence_of_budget_free_subgames(kc):
    rng = random.Random(41)
    done = 0
    while done < 25:
        s1 = random_extended_sequent(rng, kc, max_ante=2, depth=1)
        s2 = random_extended_sequent(rng, kc, max_ante=2, depth=1)
        joint = game_search(GameState((s1, s2), None), kc, _LIM)
        split = (game_search(GameState((s1,), None), kc, _LIM)
                 and game_search(GameState((s2,), None), kc, _LIM))
        assert joint == split, (s1, s2)
        done += 1


def test_state_token_is_stable(kc):
    st = GameState((seq("p |- p", kc),), Fraction(1))
    assert state_token(st, kc) == state_token(GameState(st.subgames, Fraction(1)), kc)
    assert state_token(st, kc) != state_token(GameState(st.subgames, Fraction(2)), kc)
