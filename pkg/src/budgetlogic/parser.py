"""Concrete syntax for formulas, sequents, proof files and transition
systems.

Formula grammar (tightest binding first)::

    !p[L]F   permanent resource of price L        modalities bind tightest
    !s[L]F   single-use resource of price L
    F * F    multiplicative conjunction           left associative
    F & F    additive conjunction                 left associative
    F + F    additive disjunction                 left associative
    F -o F   linear implication                   right associative, weakest

Atoms are lowercase identifiers, ``0``/``1`` the units, parentheses group.
Label literals follow the active semiring: decimals, rationals ``n/d`` and
``inf`` for cost/max, ``pub``/``conf`` for security, decimals in [0,1] for
the probabilistic instance.

Sequents are ``A1, ..., An |- C`` or, with a budget label, ``A1, ..., An
|-[L] C``; the antecedent may be empty.  Parsed sequents must satisfy the
negative-polarity restriction on modalities.

Transition-system files are line oriented::

    # comment
    states: t1 t2 t3
    trans: t1 -> t2 : 1.5
    start: t1
    end: t3
"""

from __future__ import annotations

from dataclasses import dataclass
import json

from .core import (
    PERMANENT, SINGLE_USE, PLAIN, PRICED,
    Atom, Formula, Lolli, Modal, One, Plus, Sequent, LabelledSequent,
    Tensor, With, Zero, ZERO, ONE,
    LabelledProof, Proof, ProofError, canonicalize, check_extended,
    positive_modal_occurrences, proof_node_from_dict, proof_node_to_dict,
)
from .semiring import CostSemiring, SemiringError, builtin


class ParseError(ValueError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


_SYMBOLS = ("|-", "-o", "(", ")", ",", "*", "&", "+")


class _Scanner:
    def __init__(self, text: str, k: CostSemiring):
        self.text = text
        self.k = k
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens = []
        self._scan()
        self.idx = 0

    def _advance(self, n):
        for ch in self.text[self.pos:self.pos + n]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n

    def _error(self, msg):
        raise ParseError(msg, self.line, self.col)

    def _label(self):
        # called with pos at '['; scans to the matching ']'
        start_line, start_col = self.line, self.col
        self._advance(1)
        end = self.text.find("]", self.pos)
        if end < 0:
            raise ParseError("unterminated label literal", start_line, start_col)
        raw = self.text[self.pos:end]
        try:
            value = self.k.parse_value(raw)
        except SemiringError as exc:
            raise ParseError(str(exc), start_line, start_col) from None
        self._advance(end - self.pos + 1)
        return value

    def _scan(self):
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                self._advance(1)
                continue
            line, col = self.line, self.col
            if ch == "!":
                if text.startswith("!p[", self.pos) or text.startswith("!s[", self.pos):
                    kind = PERMANENT if text[self.pos + 1] == "p" else SINGLE_USE
                    self._advance(2)
                    value = self._label()
                    self.tokens.append(("modal", (kind, value), line, col))
                    continue
                self._error("expected !p[...] or !s[...] after '!'")
            if text.startswith("|-", self.pos):
                self._advance(2)
                if self.pos < len(text) and text[self.pos] == "[":
                    value = self._label()
                    self.tokens.append(("turnstile", value, line, col))
                else:
                    self.tokens.append(("turnstile", None, line, col))
                continue
            for sym in _SYMBOLS:
                if sym != "|-" and text.startswith(sym, self.pos):
                    self._advance(len(sym))
                    self.tokens.append((sym, sym, line, col))
                    break
            else:
                if ch in "01":
                    self._advance(1)
                    self.tokens.append(("unit", ch, line, col))
                elif ch.islower() and ch.isalpha():
                    j = self.pos
                    while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                        j += 1
                    name = text[self.pos:j]
                    self._advance(j - self.pos)
                    self.tokens.append(("ident", name, line, col))
                else:
                    self._error(f"unexpected character {ch!r}")
        self.tokens.append(("eof", None, self.line, self.col))

    def peek(self):
        return self.tokens[self.idx]

    def next(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, kind_):
        tok = self.next()
        if tok[0] != kind_:
            raise ParseError(f"expected {kind_}, found {tok[1]!r}", tok[2], tok[3])
        return tok


def _parse_lolli(sc):
    left = _parse_plus(sc)
    if sc.peek()[0] == "-o":
        sc.next()
        return Lolli(left, _parse_lolli(sc))
    return left


def _parse_plus(sc):
    f = _parse_with(sc)
    while sc.peek()[0] == "+":
        sc.next()
        f = Plus(f, _parse_with(sc))
    return f


def _parse_with(sc):
    f = _parse_tensor(sc)
    while sc.peek()[0] == "&":
        sc.next()
        f = With(f, _parse_tensor(sc))
    return f


def _parse_tensor(sc):
    f = _parse_unary(sc)
    while sc.peek()[0] == "*":
        sc.next()
        f = Tensor(f, _parse_unary(sc))
    return f


def _parse_unary(sc):
    tok = sc.peek()
    if tok[0] == "modal":
        sc.next()
        kind, value = tok[1]
        return Modal(kind, value, _parse_unary(sc))
    return _parse_atom(sc)


def _parse_atom(sc):
    tok = sc.next()
    if tok[0] == "ident":
        return Atom(tok[1])
    if tok[0] == "unit":
        return ZERO if tok[1] == "0" else ONE
    if tok[0] == "(":
        f = _parse_lolli(sc)
        sc.expect(")")
        return f
    raise ParseError(f"expected a formula, found {tok[1]!r}", tok[2], tok[3])


def parse_formula(text: str, k: CostSemiring = None) -> Formula:
    sc = _Scanner(text, k or builtin("cost"))
    f = _parse_lolli(sc)
    sc.expect("eof")
    return f


def parse_sequent(text: str, k: CostSemiring = None):
    """Parse ``G |- C`` into a Sequent or ``G |-[L] C`` into a
    LabelledSequent; rejects sequents with positively occurring
    modalities."""
    k = k or builtin("cost")
    sc = _Scanner(text, k)
    ante = []
    if sc.peek()[0] != "turnstile":
        ante.append(_parse_lolli(sc))
        while sc.peek()[0] == ",":
            sc.next()
            ante.append(_parse_lolli(sc))
    tok = sc.expect("turnstile")
    label = tok[1]
    consequent = _parse_lolli(sc)
    sc.expect("eof")
    s = Sequent(tuple(ante), consequent)
    bad = positive_modal_occurrences(s)
    if bad:
        raise ParseError(
            "modalities must occur negatively; positive occurrence: "
            + render(bad[0], k))
    if label is None:
        return s
    return LabelledSequent(s, label)


# ---------------------------------------------------------------------------
# rendering

_LOLLI, _PLUS, _WITH, _TENSOR, _UNARY = range(5)


def _render_formula(f, k, level):
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Zero):
        return "0"
    if isinstance(f, One):
        return "1"
    if isinstance(f, Modal):
        tag = "!p" if f.kind == PERMANENT else "!s"
        return f"{tag}[{k.render_value(f.price)}]{_render_formula(f.body, k, _UNARY)}"
    if isinstance(f, Lolli):
        s = f"{_render_formula(f.left, k, _PLUS)} -o {_render_formula(f.right, k, _LOLLI)}"
        mine = _LOLLI
    elif isinstance(f, Plus):
        s = f"{_render_formula(f.left, k, _PLUS)} + {_render_formula(f.right, k, _WITH)}"
        mine = _PLUS
    elif isinstance(f, With):
        s = f"{_render_formula(f.left, k, _WITH)} & {_render_formula(f.right, k, _TENSOR)}"
        mine = _WITH
    else:
        s = f"{_render_formula(f.left, k, _TENSOR)} * {_render_formula(f.right, k, _UNARY)}"
        mine = _TENSOR
    return f"({s})" if mine < level else s


def render(x, k: CostSemiring = None) -> str:
    """Render a formula, sequent or labelled sequent; parse(render(x)) == x."""
    k = k or builtin("cost")
    if isinstance(x, LabelledSequent):
        body = render(x.sequent, k)
        head, _, tail = body.partition("|-")
        return f"{head}|-[{k.render_value(x.label)}]{tail}"
    if isinstance(x, Sequent):
        ante = ", ".join(_render_formula(f, k, _LOLLI) for f in x.antecedent)
        sep = " " if ante else ""
        return f"{ante}{sep}|- {_render_formula(x.consequent, k, _LOLLI)}"
    return _render_formula(x, k, _LOLLI)


# ---------------------------------------------------------------------------
# transition systems


@dataclass(frozen=True)
class TransitionSystem:
    states: tuple
    transitions: tuple  # (from, price, to)
    start: tuple
    end: tuple


def parse_transition_system(text: str, k: CostSemiring = None) -> TransitionSystem:
    k = k or builtin("cost")
    states, transitions, start, end = [], [], [], []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "states":
            for name in rest.split():
                if name not in seen:
                    seen.add(name)
                    states.append(name)
        elif key == "trans":
            head, sep, price_text = rest.rpartition(":")
            if not sep:
                raise ParseError("trans line needs 'from -> to : price'", lineno, 1)
            src, arrow, dst = head.partition("->")
            src, dst = src.strip(), dst.strip()
            if not arrow or not src or not dst:
                raise ParseError("trans line needs 'from -> to : price'", lineno, 1)
            for name in (src, dst):
                if name not in seen:
                    raise ParseError(f"undeclared state {name!r}", lineno, 1)
            try:
                price = k.parse_value(price_text)
            except SemiringError as exc:
                raise ParseError(str(exc), lineno, 1) from None
            transitions.append((src, price, dst))
        elif key in ("start", "end"):
            bucket = start if key == "start" else end
            for name in rest.split():
                if name not in seen:
                    raise ParseError(f"undeclared state {name!r}", lineno, 1)
                bucket.append(name)
        else:
            raise ParseError(f"unknown directive {key!r}", lineno, 1)
    if not start:
        raise ParseError("start set must be nonempty")
    if not end:
        raise ParseError("end set must be nonempty")
    return TransitionSystem(tuple(states), tuple(transitions), tuple(start), tuple(end))


def _disjunction(names):
    # right-nested in declaration order; a singleton is the bare atom
    atoms = [Atom(n) for n in names]
    f = atoms[-1]
    for a in reversed(atoms[:-1]):
        f = Plus(a, f)
    return f


def encode_ts(ts: TransitionSystem) -> Sequent:
    """Encode reachability: one permanent priced step per transition, the
    start states as a disjunctive resource, the end states as the goal.
    The budget slot is left to the query."""
    ante = [Modal(PERMANENT, price, Lolli(Atom(src), Atom(dst)))
            for src, price, dst in ts.transitions]
    ante.append(_disjunction(ts.start))
    return Sequent(tuple(ante), _disjunction(ts.end))


# ---------------------------------------------------------------------------
# proof files (JSON documents over the core node records)

_FORMAT = "budgetlogic-proof"


def _labels_to_text(node, k):
    out = dict(node)
    if "label" in out:
        out["label"] = k.render_value(out["label"])
    out["premises"] = [_labels_to_text(p, k) for p in node.get("premises", [])]
    return out


def _labels_from_text(node, k):
    out = dict(node)
    if "label" in out:
        out["label"] = k.parse_value(out["label"])
    out["premises"] = [_labels_from_text(p, k) for p in node.get("premises", [])]
    return out


def proof_to_json(pf, k: CostSemiring, calculus=PRICED) -> str:
    labelled = isinstance(pf, LabelledProof)
    pf = canonicalize(pf, calculus)
    concl = pf.conclusion if not labelled else LabelledSequent(
        pf.conclusion.sequent, pf.conclusion.label)
    doc = {
        "format": _FORMAT,
        "calculus": calculus,
        "labelled": labelled,
        "semiring": k.name,
        "sequent": render(concl, k),
        "tree": _labels_to_text(proof_node_to_dict(pf), k),
    }
    return json.dumps(doc, indent=2)


def proof_from_json(text: str, k: CostSemiring = None):
    """Load a proof file; returns (proof, semiring, calculus)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not a proof file: {exc}") from None
    if doc.get("format") != _FORMAT:
        raise ParseError("not a proof file (missing format marker)")
    k = k or builtin(doc.get("semiring", "cost"))
    calculus = doc.get("calculus", PRICED)
    if calculus not in (PLAIN, PRICED):
        raise ParseError(f"unknown calculus {calculus!r}")
    seq = parse_sequent(doc["sequent"], k)
    tree = _labels_from_text(doc["tree"], k)
    if doc.get("labelled"):
        if not isinstance(seq, LabelledSequent):
            raise ParseError("labelled proof file lacks a sequent label")
        pf = proof_node_from_dict(tree, seq.sequent, calculus,
                                  labelled=True, label=seq.label)
    else:
        if isinstance(seq, LabelledSequent):
            raise ParseError("plain proof file carries a labelled sequent")
        pf = proof_node_from_dict(tree, seq, calculus)
    return pf, k, calculus
