import random

import pytest

from budgetlogic import builtin
from budgetlogic.core import (
    PERMANENT, SINGLE_USE, Atom, Lolli, Modal, ONE, Plus, Sequent, Tensor,
    With, ZERO, check_extended,
)
from fractions import Fraction


@pytest.fixture
def kc():
    return builtin("cost")


@pytest.fixture
def km():
    return builtin("max")


@pytest.fixture
def ks():
    return builtin("security")


@pytest.fixture
def kp():
    return builtin("prob")


_LEAVES = (Atom("p"), Atom("q"), ZERO, ONE)
_BINARY = (Tensor, With, Plus, Lolli)


def random_formula(rng: random.Random, depth: int, k, allow_modal=True):
    """Random formula over two atoms; modalities only where they can sit
    negatively once placed in an antecedent."""
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice(_LEAVES)
    if allow_modal and rng.random() < 0.25:
        kind = rng.choice((PERMANENT, SINGLE_USE))
        price = k.sample(rng)
        return Modal(kind, price, random_formula(rng, depth - 1, k, allow_modal))
    ctor = rng.choice(_BINARY)
    if ctor is Lolli:
        # the left side flips polarity; keep it modality-free so random
        # antecedent formulas stay inside the extended fragment
        return Lolli(random_formula(rng, depth - 1, k, allow_modal=False),
                     random_formula(rng, depth - 1, k, allow_modal))
    return ctor(random_formula(rng, depth - 1, k, allow_modal),
                random_formula(rng, depth - 1, k, allow_modal))


def random_extended_sequent(rng: random.Random, k, max_ante=3, depth=2):
    while True:
        ante = tuple(random_formula(rng, depth, k)
                     for _ in range(rng.randrange(0, max_ante + 1)))
        goal = random_formula(rng, depth, k, allow_modal=False)
        s = Sequent(ante, goal)
        if check_extended(s):
            return s


def small_price(rng: random.Random):
    return Fraction(rng.randrange(0, 5), rng.choice((1, 1, 2, 4)))


def riddle_sequent(k):
    from budgetlogic.parser import parse_sequent
    return parse_sequent("!p[1](w + b) |- (w*w)+(b*b)", k)


def riddle_proof(k):
    """The three-draws tree: unpack the drawer thrice, then a free subtree."""
    from budgetlogic.core import Proof, RuleName
    from budgetlogic.labelled import cost_of, skeleton
    from budgetlogic.prover import min_cost
    s = riddle_sequent(k)
    drawer = s.antecedent[0]
    draw = drawer.body
    opened = Sequent((drawer, draw, draw, draw), s.consequent)
    sub = skeleton(min_cost(opened, k).proof)
    assert cost_of(sub, k) == k.top
    pf = sub
    for n in (2, 1, 0):
        pf = Proof(Sequent((drawer,) + (draw,) * n, s.consequent),
                   RuleName.BangPermL, 0, None, (pf,))
    return pf
