"""Formulas, sequents and proof trees for affine linear logic with priced
resources, plus rule-level proof checking.

Two calculi are supported.  The plain calculus (``PLAIN``) is affine
intuitionistic multiplicative-additive linear logic: context-splitting
rules distribute every antecedent formula to one premise.  The priced
calculus (``PRICED``) works on extended sequents (priced modalities occur
only in negative polarity), copies the top-level permanent formulas to
both premises of the context-splitting rules, and adds the two dereliction
rules that unpack a priced resource.

Antecedents are tuples, i.e. multisets with stable occurrence indices, so
that principal positions and split assignments are unambiguous.
All values are immutable; everything here is pure.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union


PERMANENT = "permanent"
SINGLE_USE = "single-use"

PLAIN = "affine-mall"
PRICED = "priced-mall"


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("atom names are nonempty")


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class With:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Plus:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Lolli:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Modal:
    kind: str  # PERMANENT or SINGLE_USE
    price: object
    body: "Formula"

    def __post_init__(self):
        if self.kind not in (PERMANENT, SINGLE_USE):
            raise ValueError(f"bad modality kind {self.kind!r}")


Formula = Union[Atom, Zero, One, Tensor, With, Plus, Lolli, Modal]

ZERO = Zero()
ONE = One()

_BINARY = (Tensor, With, Plus, Lolli)


def is_permanent(f: Formula) -> bool:
    return isinstance(f, Modal) and f.kind == PERMANENT


def is_single_use(f: Formula) -> bool:
    return isinstance(f, Modal) and f.kind == SINGLE_USE


def formula_size(f: Formula) -> int:
    """Number of connectives and modalities."""
    if isinstance(f, _BINARY):
        return 1 + formula_size(f.left) + formula_size(f.right)
    if isinstance(f, Modal):
        return 1 + formula_size(f.body)
    return 0


def contains_modal(f: Formula) -> bool:
    if isinstance(f, Modal):
        return True
    if isinstance(f, _BINARY):
        return contains_modal(f.left) or contains_modal(f.right)
    return False


@dataclass(frozen=True)
class Sequent:
    antecedent: tuple
    consequent: Formula

    def same_as(self, other: "Sequent") -> bool:
        """Equality up to antecedent multiset (occurrence order ignored)."""
        return (self.consequent == other.consequent
                and Counter(self.antecedent) == Counter(other.antecedent))


@dataclass(frozen=True)
class LabelledSequent:
    sequent: Sequent
    label: object


class RuleName(str, Enum):
    Ax = "Ax"
    OneR = "OneR"
    ZeroL = "ZeroL"
    TensorL = "TensorL"
    TensorR = "TensorR"
    LolliL = "LolliL"
    LolliR = "LolliR"
    WithL1 = "WithL1"
    WithL2 = "WithL2"
    WithR = "WithR"
    PlusL = "PlusL"
    PlusR1 = "PlusR1"
    PlusR2 = "PlusR2"
    BangPermL = "BangPermL"
    BangSingleL = "BangSingleL"
    WeakLabel = "WeakLabel"


AXIOM_RULES = (RuleName.Ax, RuleName.OneR, RuleName.ZeroL)
DERELICTIONS = (RuleName.BangPermL, RuleName.BangSingleL)
SPLIT_RULES = (RuleName.TensorR, RuleName.LolliL)
ADDITIVE_BRANCHING = (RuleName.WithR, RuleName.PlusL)

# rules whose principal formula sits in the antecedent
_LEFT_RULES = (RuleName.TensorL, RuleName.LolliL, RuleName.WithL1,
               RuleName.WithL2, RuleName.PlusL, RuleName.BangPermL,
               RuleName.BangSingleL)


@dataclass(frozen=True)
class Proof:
    conclusion: Sequent
    rule: RuleName
    principal: Optional[int] = None
    split: Optional[int] = None
    premises: tuple = ()


@dataclass(frozen=True)
class LabelledProof:
    conclusion: LabelledSequent
    rule: RuleName
    principal: Optional[int] = None
    split: Optional[int] = None
    premises: tuple = ()


def proof_height(pf) -> int:
    if not pf.premises:
        return 1
    return 1 + max(proof_height(p) for p in pf.premises)


def proof_size(pf) -> int:
    return 1 + sum(proof_size(p) for p in pf.premises)


class RuleError(ValueError):
    """A rule instance does not apply at the given node."""


class ProofError(ValueError):
    def __init__(self, path, reason):
        self.path = tuple(path)
        self.reason = reason
        where = "/".join(map(str, path)) or "root"
        super().__init__(f"at node {where}: {reason}")


# ---------------------------------------------------------------------------
# polarity


def _scan_modals(f: Formula, negative: bool, out):
    if isinstance(f, Modal):
        out.append((f, negative))
        _scan_modals(f.body, negative, out)
    elif isinstance(f, Lolli):
        _scan_modals(f.left, not negative, out)
        _scan_modals(f.right, negative, out)
    elif isinstance(f, _BINARY):
        _scan_modals(f.left, negative, out)
        _scan_modals(f.right, negative, out)


def positive_modal_occurrences(s: Sequent):
    """Modal subformula occurrences violating the negative-polarity rule.

    Polarity counts enclosing implication-antecedent contexts: an
    occurrence in the antecedent is negative when that count is even, in
    the consequent when it is odd.
    """
    found = []
    for f in s.antecedent:
        _scan_modals(f, True, found)
    _scan_modals(s.consequent, False, found)
    return [f for f, negative in found if not negative]


def check_extended(s: Sequent) -> bool:
    """True iff every priced modality in s occurs in negative polarity."""
    return not positive_modal_occurrences(s)


# ---------------------------------------------------------------------------
# initial sequents


def classify_initial(s: Sequent) -> Optional[RuleName]:
    """Which zero-premise rule closes s, if any.

    Atoms close by the identity rule, a false unit anywhere in the
    antecedent closes anything, and the true unit is always provable; the
    surrounding context is absorbed (implicit weakening).
    """
    if isinstance(s.consequent, Atom) and s.consequent in s.antecedent:
        return RuleName.Ax
    if ZERO in s.antecedent:
        return RuleName.ZeroL
    if s.consequent == ONE:
        return RuleName.OneR
    return None


def permanent_split(context):
    """Partition a context into (permanent, everything else), order kept."""
    perms = tuple(f for f in context if is_permanent(f))
    linear = tuple(f for f in context if not is_permanent(f))
    return perms, linear


# ---------------------------------------------------------------------------
# rule semantics
#
# _expand_rule is the single source of truth for what the premises of a
# rule instance look like.  It returns, per premise, a list of
# (formula, source) pairs where source is the antecedent position of the
# conclusion the occurrence was carried over from, or None for occurrences
# the rule introduces.  Callers that track per-occurrence state (search
# engines capping derelictions) rely on the source maps.


def _linear_positions(ante, calculus, exclude=None):
    if calculus == PRICED:
        return [i for i, f in enumerate(ante)
                if not is_permanent(f) and i != exclude]
    return [i for i in range(len(ante)) if i != exclude]


def _need(cond, msg):
    if not cond:
        raise RuleError(msg)


def _expand_rule(s: Sequent, rule: RuleName, principal, split, calculus):
    ante, goal = s.antecedent, s.consequent

    def tagged(*, replace=None, append=(), ante_override=None):
        items = []
        src_ante = ante if ante_override is None else ante_override
        for i, f in enumerate(src_ante):
            if replace and i in replace:
                items.extend((g, None) for g in replace[i])
            else:
                items.append((f, i))
        items.extend((g, None) for g in append)
        return items

    if rule in AXIOM_RULES:
        _need(principal is None and split is None, "axioms take no principal/split")
        if rule == RuleName.Ax:
            _need(isinstance(goal, Atom) and goal in ante, "identity rule does not close this sequent")
        elif rule == RuleName.ZeroL:
            _need(ZERO in ante, "no false unit in the antecedent")
        else:
            _need(goal == ONE, "consequent is not the true unit")
        return []

    if rule == RuleName.WeakLabel:
        _need(principal is None and split is None, "label weakening takes no principal/split")
        return [(tagged(), goal)]

    if rule in _LEFT_RULES:
        _need(principal is not None and 0 <= principal < len(ante),
              f"principal index {principal} out of range")
        pf = ante[principal]
    else:
        _need(principal is None, f"{rule.value} has no antecedent principal")
        pf = None

    if rule == RuleName.TensorL:
        _need(isinstance(pf, Tensor), "principal is not a tensor")
        return [(tagged(replace={principal: (pf.left, pf.right)}), goal)]

    if rule == RuleName.LolliR:
        _need(isinstance(goal, Lolli), "consequent is not an implication")
        return [(tagged(append=(goal.left,)), goal.right)]

    if rule in (RuleName.WithL1, RuleName.WithL2):
        _need(isinstance(pf, With), "principal is not an additive conjunction")
        part = pf.left if rule == RuleName.WithL1 else pf.right
        return [(tagged(replace={principal: (part,)}), goal)]

    if rule == RuleName.WithR:
        _need(isinstance(goal, With), "consequent is not an additive conjunction")
        return [(tagged(), goal.left), (tagged(), goal.right)]

    if rule == RuleName.PlusL:
        _need(isinstance(pf, Plus), "principal is not an additive disjunction")
        return [(tagged(replace={principal: (pf.left,)}), goal),
                (tagged(replace={principal: (pf.right,)}), goal)]

    if rule in (RuleName.PlusR1, RuleName.PlusR2):
        _need(isinstance(goal, Plus), "consequent is not an additive disjunction")
        return [(tagged(), goal.left if rule == RuleName.PlusR1 else goal.right)]

    if rule == RuleName.BangPermL:
        _need(calculus == PRICED, "derelictions need the priced calculus")
        _need(is_permanent(pf), "principal is not a permanent resource")
        return [(tagged(append=(pf.body,)), goal)]

    if rule == RuleName.BangSingleL:
        _need(calculus == PRICED, "derelictions need the priced calculus")
        _need(is_single_use(pf), "principal is not a single-use resource")
        return [(tagged(replace={principal: (pf.body,)}), goal)]

    if rule in SPLIT_RULES:
        if rule == RuleName.TensorR:
            _need(isinstance(goal, Tensor), "consequent is not a tensor")
            left_goal, right_goal = goal.left, goal.right
            exclude = None
            extra_right = None
        else:
            _need(isinstance(pf, Lolli), "principal is not an implication")
            left_goal, right_goal = pf.left, goal
            exclude = principal
            extra_right = pf.right
        linear = _linear_positions(ante, calculus, exclude=exclude)
        _need(split is not None and 0 <= split < (1 << len(linear)),
              f"split mask {split} does not match {len(linear)} linear occurrences")
        to_left = {p for bit, p in enumerate(linear) if split >> bit & 1}
        left_items, right_items = [], []
        for i, f in enumerate(ante):
            if i == exclude:
                continue
            if calculus == PRICED and is_permanent(f):
                left_items.append((f, i))
                right_items.append((f, i))
            elif i in to_left:
                left_items.append((f, i))
            else:
                right_items.append((f, i))
        if extra_right is not None:
            right_items.append((extra_right, None))
        return [(left_items, left_goal), (right_items, right_goal)]

    raise RuleError(f"unknown rule {rule}")


def expand_rule(s: Sequent, rule: RuleName, principal=None, split=None,
                calculus=PRICED):
    """One rule instance as tagged premises: per premise a list of
    (formula, source) antecedent pairs plus the premise goal, where source
    is the conclusion position the occurrence was carried from (None for
    occurrences the rule creates).  Raises RuleError when the instance
    does not apply."""
    return _expand_rule(s, rule, principal, split, calculus)


def rule_premises(s: Sequent, rule: RuleName, principal=None, split=None,
                  calculus=PRICED):
    """The premise sequents mandated by one rule instance.

    Raises RuleError when the instance does not apply.
    """
    out = _expand_rule(s, rule, principal, split, calculus)
    return tuple(Sequent(tuple(f for f, _ in items), goal) for items, goal in out)


def premise_source_maps(s: Sequent, rule: RuleName, principal=None, split=None,
                        calculus=PRICED):
    """Per premise, where each antecedent occurrence came from.

    Entry j of map i is the conclusion antecedent position carried into
    occurrence j of premise i, or None for occurrences the rule creates.
    """
    out = _expand_rule(s, rule, principal, split, calculus)
    return tuple(tuple(src for _, src in items) for items, _ in out)


# ---------------------------------------------------------------------------
# proof checking


def _allowed(rule: RuleName, calculus, labelled: bool) -> bool:
    if rule == RuleName.WeakLabel:
        return labelled
    if rule in DERELICTIONS:
        return calculus == PRICED
    return True


def _validate(pf, calculus, labelled, path, arith=None):
    seq = pf.conclusion.sequent if labelled else pf.conclusion
    if not _allowed(pf.rule, calculus, labelled):
        raise ProofError(path, f"rule {pf.rule.value} not available here")
    try:
        premises = rule_premises(seq, pf.rule, pf.principal, pf.split, calculus)
    except RuleError as exc:
        raise ProofError(path, str(exc)) from None
    if len(premises) != len(pf.premises):
        raise ProofError(path, f"{pf.rule.value} takes {len(premises)} premises, got {len(pf.premises)}")
    for i, (want, child) in enumerate(zip(premises, pf.premises)):
        got = child.conclusion.sequent if labelled else child.conclusion
        if not want.same_as(got):
            raise ProofError(path, f"premise {i} of {pf.rule.value} does not match the rule instance")
    if arith is not None:
        arith(pf, path)
    for i, child in enumerate(pf.premises):
        _validate(child, calculus, labelled, path + (i,), arith)


def validate_proof(pf: Proof, calculus=PRICED) -> None:
    """Raise ProofError (carrying the offending node path) if pf is not a
    correct proof in the selected calculus."""
    _validate(pf, calculus, labelled=False, path=())


def check_proof(pf: Proof, calculus=PRICED) -> bool:
    try:
        validate_proof(pf, calculus)
    except ProofError:
        return False
    return True


# ---------------------------------------------------------------------------
# canonical form and serialization
#
# The wire format stores, per node, only rule / principal / split (and the
# label for labelled proofs); premises are re-derived from the conclusion.
# Serialization therefore first rewrites the tree so that every premise
# conclusion is exactly the tuple rule_premises computes.


def _match_positions(old, new):
    """Map old antecedent positions to positions in the multiset-equal new."""
    used = [False] * len(new)
    sigma = []
    for f in old:
        for j, g in enumerate(new):
            if not used[j] and f == g:
                used[j] = True
                sigma.append(j)
                break
        else:
            raise ProofError((), "antecedents are not multiset-equal")
    return sigma


def _remap_split(old_ante, new_ante, sigma, split, calculus, old_exclude, new_exclude):
    old_linear = _linear_positions(old_ante, calculus, exclude=old_exclude)
    new_linear = _linear_positions(new_ante, calculus, exclude=new_exclude)
    bit_of = {p: b for b, p in enumerate(new_linear)}
    out = 0
    for bit, p in enumerate(old_linear):
        if split >> bit & 1:
            out |= 1 << bit_of[sigma[p]]
    return out


def canonicalize(pf, calculus=PRICED, _conclusion=None):
    """Rewrite a (labelled) proof so every premise is in canonical order."""
    labelled = isinstance(pf, LabelledProof)
    stored = pf.conclusion.sequent if labelled else pf.conclusion
    target = stored if _conclusion is None else _conclusion
    if target == stored:
        sigma = list(range(len(stored.antecedent)))
    else:
        sigma = _match_positions(stored.antecedent, target.antecedent)
    principal = None if pf.principal is None else sigma[pf.principal]
    split = pf.split
    if split is not None:
        old_exclude = pf.principal if pf.rule == RuleName.LolliL else None
        new_exclude = principal if pf.rule == RuleName.LolliL else None
        split = _remap_split(stored.antecedent, target.antecedent, sigma,
                             split, calculus, old_exclude, new_exclude)
    premises = rule_premises(target, pf.rule, principal, split, calculus)
    children = tuple(
        canonicalize(child, calculus, _conclusion=prem)
        for child, prem in zip(pf.premises, premises)
    )
    if labelled:
        concl = LabelledSequent(target, pf.conclusion.label)
        return LabelledProof(concl, pf.rule, principal, split, children)
    return Proof(target, pf.rule, principal, split, children)


def proof_node_to_dict(pf) -> dict:
    """Node records {rule, principal?, split?, label?, premises}."""
    labelled = isinstance(pf, LabelledProof)
    d = {"rule": pf.rule.value}
    if pf.principal is not None:
        d["principal"] = pf.principal
    if pf.split is not None:
        d["split"] = pf.split
    if labelled:
        d["label"] = pf.conclusion.label
    d["premises"] = [proof_node_to_dict(p) for p in pf.premises]
    return d


def proof_node_from_dict(d: dict, conclusion: Sequent, calculus=PRICED,
                         labelled=False, label=None):
    """Rebuild a proof from a node record tree and its conclusion."""
    try:
        rule = RuleName(d["rule"])
    except (KeyError, ValueError):
        raise ProofError((), f"bad rule field in node record: {d.get('rule')!r}") from None
    principal = d.get("principal")
    split = d.get("split")
    try:
        premises = rule_premises(conclusion, rule, principal, split, calculus)
    except RuleError as exc:
        raise ProofError((), str(exc)) from None
    raw = d.get("premises", [])
    if len(raw) != len(premises):
        raise ProofError((), f"{rule.value} takes {len(premises)} premises, got {len(raw)}")
    if labelled:
        children = tuple(
            proof_node_from_dict(sub, prem, calculus, True, sub.get("label"))
            for sub, prem in zip(raw, premises)
        )
        return LabelledProof(LabelledSequent(conclusion, label), rule,
                             principal, split, children)
    children = tuple(
        proof_node_from_dict(sub, prem, calculus, False)
        for sub, prem in zip(raw, premises)
    )
    return Proof(conclusion, rule, principal, split, children)
