"""Constructive cut elimination for labelled proofs.

Given labelled proofs of ``!G, D1 |-[a] A`` and ``!G, D2, A |-[b] C`` with a
modality-free cut formula A, ``cut`` builds a cut-free labelled proof of
``!G, D1, D2 |-[a times b] C``; the shared permanent context !G is the
multiset intersection of the premises' permanent formulas (each premise's
surplus belongs to its own D).  The
reduction is the standard one: principal-vs-principal steps for each
connective, permutation steps otherwise, axiom absorption at the leaves.
Internally the two antecedents are simply concatenated and the duplicated
permanent context is contracted away at the end (permanent contraction is
admissible and label-neutral); labels are re-derived by decoration at the
end rather than threaded through every case, with one label weakening at
the root when the decoration beats the advertised bound.

Every reduction step asserts the lexicographic termination measure
(cut-formula size, combined premise height) strictly decreases.
"""

from __future__ import annotations

from collections import Counter

from .core import (
    PERMANENT, PRICED, LabelledProof, LabelledSequent, Modal, Proof,
    RuleName, Sequent, Atom, Lolli, Plus, Tensor, With, ZERO,
    canonicalize, contains_modal, formula_size, is_permanent,
    permanent_split, premise_source_maps, proof_height, validate_proof,
)
from .labelled import cost_of, decorate, skeleton, validate_labelled_proof
from .prover import DEFAULT_LIMITS, SearchLimits, min_cost
from .semiring import CostSemiring, builtin


class CutError(ValueError):
    pass


_UNARY_LEFT = {RuleName.TensorL, RuleName.WithL1, RuleName.WithL2,
               RuleName.BangPermL, RuleName.BangSingleL}
_RIGHT_FOR = {Tensor: RuleName.TensorR, With: RuleName.WithR,
              Plus: (RuleName.PlusR1, RuleName.PlusR2), Lolli: RuleName.LolliR}


def _linears(ante, exclude=None):
    return [p for p, f in enumerate(ante) if not is_permanent(f) and p != exclude]


def _sides_of(ante, split, exclude=None):
    return {p: ("L" if split >> bit & 1 else "R")
            for bit, p in enumerate(_linears(ante, exclude))}


def _mk_split(ante, sides, exclude=None):
    mask = 0
    for bit, p in enumerate(_linears(ante, exclude)):
        if sides[p] == "L":
            mask |= 1 << bit
    return mask


# --- structural transformations (rule-preserving, label-neutral) ----------


def _weaken(pf: Proof, extras: tuple) -> Proof:
    """Append extra antecedent formulas; permanents follow both premises of
    a split, linear extras go left."""
    if not extras:
        return pf
    seq = pf.conclusion
    new_seq = Sequent(seq.antecedent + extras, seq.consequent)
    split = pf.split
    if pf.rule in (RuleName.TensorR, RuleName.LolliL):
        exclude = pf.principal if pf.rule == RuleName.LolliL else None
        base = len(_linears(seq.antecedent, exclude))
        perm_extras = tuple(f for f in extras if is_permanent(f))
        lin_extras = tuple(f for f in extras if not is_permanent(f))
        for t in range(len(lin_extras)):
            split |= 1 << (base + t)
        children = (_weaken(pf.premises[0], perm_extras + lin_extras),
                    _weaken(pf.premises[1], perm_extras))
    elif pf.rule in (RuleName.WithR, RuleName.PlusL):
        children = tuple(_weaken(c, extras) for c in pf.premises)
    elif pf.premises:
        children = (_weaken(pf.premises[0], extras),)
    else:
        children = ()
    return Proof(new_seq, pf.rule, pf.principal, split, children)


def _child_positions(pf: Proof, pos: int):
    """(premise index, position) pairs an antecedent occurrence flows to."""
    maps = premise_source_maps(pf.conclusion, pf.rule, pf.principal,
                               pf.split, PRICED)
    out = []
    for i, mp in enumerate(maps):
        for j, src in enumerate(mp):
            if src == pos:
                out.append((i, j))
    return out


def _shift(idx, removed):
    return idx - 1 if idx > removed else idx


def _remove_inert(pf: Proof, pos: int) -> Proof:
    """Drop an antecedent occurrence that is never principal anywhere."""
    seq = pf.conclusion
    if pf.principal == pos:
        raise CutError("occurrence is principal; cannot strengthen it away")
    ante = seq.antecedent
    new_seq = Sequent(ante[:pos] + ante[pos + 1:], seq.consequent)
    principal = None if pf.principal is None else _shift(pf.principal, pos)
    split = pf.split
    if split is not None and not is_permanent(ante[pos]):
        exclude = pf.principal if pf.rule == RuleName.LolliL else None
        sides = _sides_of(ante, split, exclude)
        del sides[pos]
        sides = {_shift(p, pos): s for p, s in sides.items()}
        new_exclude = None if exclude is None else _shift(exclude, pos)
        split = _mk_split(new_seq.antecedent, sides, new_exclude)
    flows = dict(_child_positions(pf, pos))
    children = []
    for i, child in enumerate(pf.premises):
        children.append(_remove_inert(child, flows[i]) if i in flows else child)
    return Proof(new_seq, pf.rule, principal, split, tuple(children))


def _merge_permanent(pf: Proof, keep: int, drop: int) -> Proof:
    """Contract two occurrences of the same permanent formula into one:
    derelictions of the dropped copy are redirected to the kept one (the
    premise is unchanged by that), then the dropped copy is removed."""
    seq = pf.conclusion
    ante = seq.antecedent
    if ante[keep] != ante[drop] or not is_permanent(ante[keep]):
        raise CutError("can only merge equal permanent occurrences")
    rule, principal = pf.rule, pf.principal
    if rule == RuleName.BangPermL and principal == drop:
        principal = keep
    flows_keep = dict(_child_positions(pf, keep))
    flows_drop = dict(_child_positions(pf, drop))
    new_seq = Sequent(ante[:drop] + ante[drop + 1:], seq.consequent)
    new_principal = None if principal is None else _shift(principal, drop)
    children = []
    for i, child in enumerate(pf.premises):
        if i in flows_drop:
            children.append(_merge_permanent(child, flows_keep[i], flows_drop[i]))
        else:
            children.append(child)
    # permanents never sit in split masks, so pf.split carries over
    return Proof(new_seq, rule, new_principal, pf.split, tuple(children))


def _merge_first_pair(pf: Proof, g) -> Proof:
    pf = canonicalize(pf, PRICED)  # occurrence tracking needs canonical premises
    ante = pf.conclusion.antecedent
    hits = [p for p, f in enumerate(ante) if f == g]
    if len(hits) < 2:
        raise CutError("no duplicated occurrence to merge")
    return _merge_permanent(pf, hits[0], hits[1])


# --- the reduction ---------------------------------------------------------


def _measure(a, p1, p2):
    return (formula_size(a), proof_height(p1) + proof_height(p2))


def _cut(p1: Proof, p2: Proof, j: int, parent=None) -> Proof:
    """Cut-free proof whose antecedent multiset is ante(p1) + ante(p2)
    minus the cut occurrence j, possibly with extra copies of permanent
    formulas contracted before returning."""
    p1 = canonicalize(p1, PRICED)
    p2 = canonicalize(p2, PRICED)
    a = p1.conclusion.consequent
    ante1 = p1.conclusion.antecedent
    ante2 = p2.conclusion.antecedent
    assert ante2[j] == a, "cut occurrence does not carry the cut formula"
    here = _measure(a, p1, p2)
    assert parent is None or here < parent, "termination measure failed to decrease"
    goal = p2.conclusion.consequent
    target = ante1 + ante2[:j] + ante2[j + 1:]

    # left premise closes
    if p1.rule == RuleName.ZeroL:
        return Proof(Sequent(target, goal), RuleName.ZeroL)
    if p1.rule == RuleName.Ax:
        spare = next(p for p, f in enumerate(ante1) if f == a)
        rest = ante1[:spare] + ante1[spare + 1:]
        return _weaken(p2, rest)
    if p1.rule == RuleName.OneR:
        return _weaken(_remove_inert(p2, j), ante1)

    # right premise closes without the cut occurrence
    if p2.rule == RuleName.OneR:
        return Proof(Sequent(target, goal), RuleName.OneR)
    if p2.rule == RuleName.Ax:
        if any(f == goal for p, f in enumerate(ante2) if p != j):
            return Proof(Sequent(target, goal), RuleName.Ax)
        assert goal == a
        return _weaken(p1, ante2[:j] + ante2[j + 1:])
    if p2.rule == RuleName.ZeroL and any(
            f == ZERO for p, f in enumerate(ante2) if p != j):
        return Proof(Sequent(target, goal), RuleName.ZeroL)

    principal_on_cut = (p2.principal == j) or (p2.rule == RuleName.ZeroL)

    if not principal_on_cut:
        return _permute_right(p1, p2, j, target, goal, here)

    # the cut occurrence is principal on the right; reduce or move left
    if p2.rule == RuleName.TensorL and p1.rule == RuleName.TensorR:
        q1l, q1r = p1.premises
        q2 = p2.premises[0]
        step1 = _cut(q1l, q2, j, here)
        j2 = step1.conclusion.antecedent.index(a.right)
        step2 = _cut(q1r, step1, j2, here)
        return _contract_extras(step2, ante1, target)
    if p2.rule in (RuleName.WithL1, RuleName.WithL2) and p1.rule == RuleName.WithR:
        branch = 0 if p2.rule == RuleName.WithL1 else 1
        return _cut(p1.premises[branch], p2.premises[0], j, here)
    if p2.rule == RuleName.PlusL and p1.rule in (RuleName.PlusR1, RuleName.PlusR2):
        branch = 0 if p1.rule == RuleName.PlusR1 else 1
        return _cut(p1.premises[0], p2.premises[branch], j, here)
    if p2.rule == RuleName.LolliL and p1.rule == RuleName.LolliR:
        q1 = p1.premises[0]
        q2l, q2r = p2.premises
        x = q1.conclusion.antecedent.index(a.left)
        step1 = _cut(q2l, q1, x, here)
        y = q2r.conclusion.antecedent.index(a.right)
        step2 = _cut(step1, q2r, y, here)
        return _contract_extras(step2, ante2[:j] + ante2[j + 1:], target)

    return _permute_left(p1, p2, j, target, goal, here)


def _contract_extras(pf: Proof, duplicated, target) -> Proof:
    """Merge away the permanent copies a multiplicative reduction doubled."""
    for g in duplicated:
        if is_permanent(g):
            pf = _merge_first_pair(pf, g)
    assert Counter(pf.conclusion.antecedent) == Counter(target)
    return pf


def _permute_left(p1, p2, j, target, goal, here):
    """The cut climbs into the left premise (its last rule acts on ante1)."""
    ante1 = p1.conclusion.antecedent
    ante2 = p2.conclusion.antecedent
    rule, i = p1.rule, p1.principal
    if rule in _UNARY_LEFT:
        rec = _cut(p1.premises[0], p2, j, here)
        return Proof(Sequent(target, goal), rule, i, None, (rec,))
    if rule == RuleName.PlusL:
        rec_a = _cut(p1.premises[0], p2, j, here)
        rec_b = _cut(p1.premises[1], p2, j, here)
        return Proof(Sequent(target, goal), rule, i, None, (rec_a, rec_b))
    if rule == RuleName.LolliL:
        rec = _cut(p1.premises[1], p2, j, here)
        rest2 = ante2[:j] + ante2[j + 1:]
        perms2, _ = permanent_split(rest2)
        sides = _sides_of(ante1, p1.split, i)
        for off in range(len(rest2)):
            sides[len(ante1) + off] = "R"
        split = _mk_split(target, sides, i)
        left = _weaken(p1.premises[0], perms2)
        return Proof(Sequent(target, goal), rule, i, split, (left, rec))
    raise CutError(f"left premise ends in unexpected rule {rule.value}")


def _permute_right(p1, p2, j, target, goal, here):
    """The cut climbs into the right premise (cut occurrence not principal)."""
    ante1 = p1.conclusion.antecedent
    ante2 = p2.conclusion.antecedent
    rule, i = p2.rule, p2.principal
    maps = premise_source_maps(p2.conclusion, rule, i, p2.split, PRICED)

    def land(premise_idx):
        mp = maps[premise_idx]
        for jj, src in enumerate(mp):
            if src == j:
                return jj
        return None

    def mpos(p):
        # position of ante2 occurrence p inside target
        return len(ante1) + (p if p < j else p - 1)

    if rule in _UNARY_LEFT or rule in (RuleName.LolliR, RuleName.PlusR1,
                                       RuleName.PlusR2):
        rec = _cut(p1, p2.premises[0], land(0), here)
        principal = None if i is None else mpos(i)
        return Proof(Sequent(target, goal), rule, principal, None, (rec,))
    if rule == RuleName.WithR:
        recs = tuple(_cut(p1, q, land(n), here) for n, q in enumerate(p2.premises))
        return Proof(Sequent(target, goal), rule, None, None, recs)
    if rule == RuleName.PlusL:
        recs = tuple(_cut(p1, q, land(n), here) for n, q in enumerate(p2.premises))
        return Proof(Sequent(target, goal), rule, mpos(i), None, recs)
    if rule in (RuleName.TensorR, RuleName.LolliL):
        exclude = i if rule == RuleName.LolliL else None
        side = 0 if land(0) is not None else 1
        rec = _cut(p1, p2.premises[side], land(side), here)
        perms1, _ = permanent_split(ante1)
        other = _weaken(p2.premises[1 - side], perms1)
        old_sides = _sides_of(ante2, p2.split, exclude)
        sides = {}
        for p, s in old_sides.items():
            if p != j:
                sides[mpos(p)] = s
        cut_side = "L" if side == 0 else "R"
        for p in _linears(ante1):
            sides[p] = cut_side
        new_exclude = None if exclude is None else mpos(exclude)
        split = _mk_split(target, sides, new_exclude)
        children = (rec, other) if side == 0 else (other, rec)
        principal = None if i is None else mpos(i)
        return Proof(Sequent(target, goal), rule, principal, split, children)
    raise CutError(f"right premise ends in unexpected rule {rule.value}")


# --- public entry points ---------------------------------------------------


def cut(lpf1: LabelledProof, lpf2: LabelledProof, k: CostSemiring) -> LabelledProof:
    """Combine proofs of ``!G,D1 |-[a] A`` and ``!G,D2,A |-[b] C`` into a
    cut-free labelled proof of ``!G,D1,D2 |-[a times b] C``."""
    validate_labelled_proof(lpf1, k)
    validate_labelled_proof(lpf2, k)
    s1 = lpf1.conclusion.sequent
    s2 = lpf2.conclusion.sequent
    a = s1.consequent
    if contains_modal(a):
        raise CutError("the cut formula must not contain modalities")
    perms1, lin1 = permanent_split(s1.antecedent)
    perms2, lin2 = permanent_split(s2.antecedent)
    # the shared permanent context is whatever both premises carry; the
    # rest of each antecedent is that premise's own resource context
    shared = Counter(perms1) & Counter(perms2)
    try:
        j = s2.antecedent.index(a)
    except ValueError:
        raise CutError("the right premise does not contain the cut formula") from None
    res = _cut(skeleton(lpf1), skeleton(lpf2), j)
    for g in shared.elements():
        res = _merge_first_pair(res, g)
    want = Counter(s1.antecedent) + Counter(s2.antecedent) - shared
    want[a] -= 1
    assert Counter(res.conclusion.antecedent) == +want, "cut changed the conclusion"
    validate_proof(res, PRICED)
    bound = k.times(lpf1.conclusion.label, lpf2.conclusion.label)
    actual = cost_of(res, k)
    if not k.leq(bound, actual):
        raise CutError("internal error: the additive label bound was violated")
    out = decorate(res, k)
    if actual != bound:
        out = LabelledProof(LabelledSequent(res.conclusion, bound),
                            RuleName.WeakLabel, premises=(out,))
    return out


def minimality_witness(a, b, k: CostSemiring = None,
                       limits: SearchLimits = DEFAULT_LIMITS):
    """The pair of proofs showing the additive bound is tight, plus the
    verified cheapest conclusion label (a times b exactly).

    The left witness pays a once to produce an atom from a permanent
    resource; the right witness pays b once inside a tensor goal, so any
    cut-free proof of the combined sequent must pay both prices.
    """
    k = k or builtin("cost")
    p, q = Atom("p"), Atom("q")
    bang_a = Modal(PERMANENT, a, p)
    bang_b = Modal(PERMANENT, b, q)

    s1 = Sequent((bang_a,), p)
    pf1 = Proof(s1, RuleName.BangPermL, 0, None,
                (Proof(Sequent((bang_a, p), p), RuleName.Ax),))
    s2 = Sequent((p, bang_b), Tensor(p, q))
    pf2 = Proof(
        s2, RuleName.TensorR, None, 1,
        (Proof(Sequent((p, bang_b), p), RuleName.Ax),
         Proof(Sequent((bang_b,), q), RuleName.BangPermL, 0, None,
               (Proof(Sequent((bang_b, q), q), RuleName.Ax),))))
    combined = Sequent((bang_a, bang_b), Tensor(p, q))
    best = min_cost(combined, k, limits)
    expected = k.times(a, b)
    if best.cost != expected:
        raise CutError(
            f"expected cheapest label {k.render_value(expected)}, search found "
            f"{None if best.cost is None else k.render_value(best.cost)}")
    return decorate(pf1, k), decorate(pf2, k), best.cost
