"""Between plain and labelled proofs: the canonical decoration of a proof
with budget labels, its inverse label-erasing skeleton, and validation of
labelled proofs against the label arithmetic.

Label arithmetic, for a cost algebra k:

  axioms                 k.top
  unary structural rules copy the premise label
  derelictions           premise label times the price paid
  context-splitting      product of the premise labels
  additive branching     greatest lower bound of the premise labels
  label weakening        any label below the premise label (never produced
                         by decoration; accepted in supplied proofs)
"""

from __future__ import annotations

from .core import (
    PRICED, LabelledProof, LabelledSequent, Proof, ProofError, RuleName,
    rule_premises, RuleError, validate_proof,
)
from .semiring import CostSemiring


_COPY_RULES = (RuleName.TensorL, RuleName.LolliR, RuleName.WithL1,
               RuleName.WithL2, RuleName.PlusR1, RuleName.PlusR2)
_TIMES_RULES = (RuleName.TensorR, RuleName.LolliL)
_GLB_RULES = (RuleName.WithR, RuleName.PlusL)


def rule_label(rule: RuleName, labels, k: CostSemiring, price=None):
    """Conclusion label of one rule application given the premise labels."""
    if rule in (RuleName.Ax, RuleName.OneR, RuleName.ZeroL):
        return k.top
    if rule in _COPY_RULES:
        return labels[0]
    if rule in (RuleName.BangPermL, RuleName.BangSingleL):
        return k.times(labels[0], price)
    if rule in _TIMES_RULES:
        return k.times(labels[0], labels[1])
    if rule in _GLB_RULES:
        return k.glb(labels[0], labels[1])
    raise ValueError(f"no label arithmetic for {rule}")


def _combine(pf, labels, k: CostSemiring):
    price = None
    if pf.rule in (RuleName.BangPermL, RuleName.BangSingleL):
        seq = pf.conclusion.sequent if isinstance(pf, LabelledProof) else pf.conclusion
        price = seq.antecedent[pf.principal].price
    return rule_label(pf.rule, labels, k, price)


def decorate(pf: Proof, k: CostSemiring) -> LabelledProof:
    """The canonical labelling of a valid priced-calculus proof: axioms get
    the top label and labels propagate downward; no weakening appears."""
    children = tuple(decorate(p, k) for p in pf.premises)
    label = _combine(pf, [c.conclusion.label for c in children], k)
    return LabelledProof(LabelledSequent(pf.conclusion, label), pf.rule,
                         pf.principal, pf.split, children)


def cost_of(pf: Proof, k: CostSemiring):
    """Conclusion label of the decoration, as a single bottom-up fold."""
    return _combine(pf, [cost_of(p, k) for p in pf.premises], k)


def skeleton(lpf: LabelledProof) -> Proof:
    """Erase labels and contract label-weakening nodes."""
    while lpf.rule == RuleName.WeakLabel:
        lpf = lpf.premises[0]
    return Proof(lpf.conclusion.sequent, lpf.rule, lpf.principal, lpf.split,
                 tuple(skeleton(p) for p in lpf.premises))


def validate_labelled_proof(lpf: LabelledProof, k: CostSemiring,
                            calculus=PRICED, _path=()) -> None:
    """Raise ProofError unless every node is rule-correct and its label
    satisfies the arithmetic exactly (weakening nodes may lower it)."""
    seq = lpf.conclusion.sequent
    if not k.contains(lpf.conclusion.label):
        raise ProofError(_path, f"label {k.render_value_safe(lpf.conclusion.label)} not in carrier")
    try:
        premises = rule_premises(seq, lpf.rule, lpf.principal, lpf.split, calculus)
    except RuleError as exc:
        raise ProofError(_path, str(exc)) from None
    if lpf.rule == RuleName.WeakLabel and calculus != PRICED:
        raise ProofError(_path, "label weakening needs the priced calculus")
    if len(premises) != len(lpf.premises):
        raise ProofError(_path, f"{lpf.rule.value} takes {len(premises)} premises, got {len(lpf.premises)}")
    for i, (want, child) in enumerate(zip(premises, lpf.premises)):
        if not want.same_as(child.conclusion.sequent):
            raise ProofError(_path, f"premise {i} of {lpf.rule.value} does not match the rule instance")
    labels = [c.conclusion.label for c in lpf.premises]
    if lpf.rule == RuleName.WeakLabel:
        if not k.leq(lpf.conclusion.label, labels[0]):
            raise ProofError(_path, "weakened label must lie below the premise label")
    else:
        want = _combine(lpf, labels, k)
        if want != lpf.conclusion.label:
            raise ProofError(
                _path,
                f"label {k.render_value_safe(lpf.conclusion.label)} differs from "
                f"computed {k.render_value_safe(want)}")
    for i, child in enumerate(lpf.premises):
        validate_labelled_proof(child, k, calculus, _path + (i,))


def check_labelled_proof(lpf: LabelledProof, k: CostSemiring, calculus=PRICED) -> bool:
    try:
        validate_labelled_proof(lpf, k, calculus)
    except ProofError:
        return False
    return True
