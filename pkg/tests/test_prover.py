import random
from fractions import Fraction

import pytest

from budgetlogic.core import (
    PLAIN, PRICED, Atom, LabelledSequent, RuleName, Sequent, With,
    check_proof, contains_modal,
)
from budgetlogic.game import GameState, game_search
from budgetlogic.labelled import check_labelled_proof, cost_of, skeleton
from budgetlogic.parser import parse_sequent
from budgetlogic.prover import (
    DEFAULT_LIMITS, SearchLimits, min_cost, omega, prove, prove_labelled,
    spectrum,
)
from budgetlogic.semiring import INF
from conftest import random_extended_sequent, riddle_sequent

p, q = Atom("p"), Atom("q")


def test_with_left_proof(kc):
    s = parse_sequent("p & q |- p", kc)
    res = prove(s)
    assert res.proof.rule == RuleName.WithL1
    assert res.proof.premises[0].rule == RuleName.Ax
    assert check_proof(res.proof, PRICED)


def test_riddle_needs_three_draws_on_some_play(kc):
    res = min_cost(riddle_sequent(kc), kc)
    pf = skeleton(res.proof)
    assert check_proof(pf, PRICED)

    def worst_path(t):
        here = t.rule == RuleName.BangPermL
        return here + max((worst_path(c) for c in t.premises), default=0)

    # every branch of a cheapest proof unpacks the drawer at most three
    # times, and the unlucky branch needs all three
    assert worst_path(pf) == 3


def test_refutation_is_exhaustive(kc):
    res = prove(parse_sequent("p |- q", kc))
    assert res.proof is None and res.refuted


def test_limits_reported_as_inconclusive(kc):
    res = prove(parse_sequent("p & q |- q", kc), limits=SearchLimits(max_nodes=1))
    assert res.proof is None and not res.refuted
    res = prove(parse_sequent("p & q |- q", kc),
                limits=SearchLimits(max_height=1, max_nodes=10))
    assert res.proof is None and not res.refuted


def test_invalid_limits_rejected():
    with pytest.raises(ValueError):
        SearchLimits(max_height=0)


def test_prove_labelled_riddle_at_three(kc):
    ls = parse_sequent("!p[1](w + b) |-[3] (w*w)+(b*b)", kc)
    res = prove_labelled(ls, kc)
    assert res.proof is not None
    assert check_labelled_proof(res.proof, kc)
    assert res.proof.conclusion.label == Fraction(3)


def test_prove_labelled_riddle_below_three_fails(kc):
    ls = parse_sequent("!p[1](w + b) |-[2] (w*w)+(b*b)", kc)
    assert prove_labelled(ls, kc).proof is None


def test_prove_labelled_max_pair(km):
    for a, c in ((1, 2), (3, 3), (0, 5)):
        want = max(a, c)
        ok = parse_sequent(f"!s[{a}]t1, !s[{c}]t2 |-[{want}] t1 * t2", km)
        assert prove_labelled(ok, km).provable


def test_prove_labelled_probabilistic_choice(kp):
    goal = ("(!s[1/2]t1) & (!s[1/2]t2), t1 -o t3, t2 -o t4 |-[{b}] t3")
    assert prove_labelled(parse_sequent(goal.format(b="1/2"), kp), kp).provable
    assert prove_labelled(parse_sequent(goal.format(b="1/4"), kp), kp).provable
    assert not prove_labelled(parse_sequent(goal.format(b="3/4"), kp), kp).provable


def test_min_cost_examples(kc):
    assert min_cost(riddle_sequent(kc), kc).cost == Fraction(3)
    s = parse_sequent("!p[1]p, !s[0.8]p, !s[0.8]p |- p * p", kc)
    assert min_cost(s, kc).cost == Fraction(8, 5)
    assert min_cost(parse_sequent("!p[7/3]p |- p", kc), kc).cost == Fraction(7, 3)


def test_min_cost_unprovable(kc):
    res = min_cost(parse_sequent("p |- q", kc), kc)
    assert res.cost is None and res.exhaustive


def test_spectrum_of_two_singles_and_a_permanent(kc):
    s = parse_sequent("!p[1]p, !s[0.8]p, !s[0.8]p |- p * p", kc)
    sp = spectrum(s, Fraction(3), kc)
    want = [Fraction(8, 5), Fraction(9, 5), Fraction(2), Fraction(13, 5),
            Fraction(14, 5), Fraction(3)]
    assert list(sp.values) == want
    assert sp.least == Fraction(8, 5)
    allowed = omega([Fraction(1), Fraction(4, 5)], Fraction(3), kc)
    assert set(sp.values) <= set(allowed)


def test_spectrum_axiom_only(kc):
    sp = spectrum(parse_sequent("p |- p", kc), Fraction(10), kc)
    assert list(sp.values) == [Fraction(0)]


def test_spectrum_unprovable_empty(kc):
    sp = spectrum(parse_sequent("p |- q", kc), Fraction(10), kc)
    assert sp.values == ()


def test_omega(kc):
    got = omega([Fraction(1), Fraction(4, 5)], Fraction(2), kc)
    assert list(got) == [Fraction(0), Fraction(4, 5), Fraction(1),
                         Fraction(8, 5), Fraction(9, 5), Fraction(2)]
    assert omega([], Fraction(5), kc) == (Fraction(0),)


def test_bounded_spectra_are_finite_with_free_derelictions(kc):
    # zero-priced permanents admit arbitrarily wasteful proofs; the
    # dereliction cap keeps the enumeration finite and the values exact
    s = parse_sequent("!p[0]p |- p", kc)
    sp = spectrum(s, Fraction(1), kc)
    assert Fraction(0) in sp.values


_PROPERTY_LIMITS = SearchLimits(max_height=24, max_derelictions=2,
                                max_nodes=300_000)


def test_returned_proofs_always_validate(kc):
    rng = random.Random(23)
    done = 0
    while done < 60:
        s = random_extended_sequent(rng, kc, max_ante=2, depth=2)
        res = prove(s, limits=_PROPERTY_LIMITS)
        if res.proof is not None:
            assert check_proof(res.proof, PRICED)
            best = min_cost(s, kc, _PROPERTY_LIMITS)
            assert check_labelled_proof(best.proof, kc)
            assert cost_of(skeleton(best.proof), kc) == best.cost
            done += 1


def test_budget_free_adequacy_spot_checks(kc):
    rng = random.Random(29)
    done = 0
    while done < 60:
        s = random_extended_sequent(rng, kc, max_ante=2, depth=2)
        if contains_modal(s.consequent) or any(map(contains_modal, s.antecedent)):
            continue
        left = prove(s, PLAIN, _PROPERTY_LIMITS).provable
        right = game_search(GameState((s,), None), kc, _PROPERTY_LIMITS)
        assert left == right, s
        done += 1


def test_weakening_never_hurts_cost(kc):
    rng = random.Random(31)
    done = 0
    while done < 40:
        s = random_extended_sequent(rng, kc, max_ante=2, depth=2)
        base = min_cost(s, kc, _PROPERTY_LIMITS)
        if base.cost is None:
            continue
        extra = random_extended_sequent(rng, kc, max_ante=1, depth=1)
        if not extra.antecedent:
            continue
        widened = Sequent(s.antecedent + extra.antecedent[:1], s.consequent)
        wider = min_cost(widened, kc, _PROPERTY_LIMITS)
        assert wider.cost is not None
        assert kc.leq(base.cost, wider.cost), (s, widened)
        done += 1


def test_generalized_axioms_cost_nothing(kc):
    rng = random.Random(37)
    from conftest import random_formula
    done = 0
    while done < 40:
        a = random_formula(rng, 2, kc, allow_modal=False)
        ctx = random_extended_sequent(rng, kc, max_ante=2, depth=1).antecedent
        res = min_cost(Sequent(ctx + (a,), a), kc, _PROPERTY_LIMITS)
        assert res.cost == kc.top, (ctx, a)
        done += 1


def test_extended_precondition_enforced(kc):
    from budgetlogic.core import Modal, PERMANENT
    bad = Sequent((p,), Modal(PERMANENT, Fraction(1), p))
    with pytest.raises(ValueError):
        prove(bad, PRICED)
    with pytest.raises(ValueError):
        min_cost(bad, kc)
