"""Prover, cost analyzer and budget game for affine intuitionistic linear
logic with priced resources over pluggable cost algebras."""

from .semiring import (
    INF, PUBLIC, CONFIDENTIAL, CostSemiring, SemiringError, UndefinedDivision,
    AxiomReport, builtin, check_axioms,
)
from .core import (
    PERMANENT, SINGLE_USE, PLAIN, PRICED,
    Atom, Zero, One, Tensor, With, Plus, Lolli, Modal, ZERO, ONE,
    Formula, Sequent, LabelledSequent, RuleName, Proof, LabelledProof,
    ProofError, RuleError,
    check_extended, classify_initial, permanent_split,
    check_proof, validate_proof, rule_premises, canonicalize,
)
from .parser import (
    ParseError, TransitionSystem,
    parse_formula, parse_sequent, parse_transition_system,
    render, encode_ts, proof_to_json, proof_from_json,
)
from .labelled import (
    decorate, skeleton, cost_of, rule_label,
    check_labelled_proof, validate_labelled_proof,
)
from .prover import (
    SearchLimits, DEFAULT_LIMITS, LimitExceeded,
    ProveResult, LabelledProveResult, CostResult, Spectrum,
    prove, prove_labelled, min_cost, spectrum, omega,
)
from .game import (
    GameState, Move, Next, Choice, PlayTrace, Strategy, AdversaryStrategy,
    IllegalMove, UndefinedStrategy,
    legal_moves, apply_move, winning_state, game_search,
    strategy_from_proof, best_adversary, play, partition_budget,
    state_token, adaptive_choice,
)
from .cut import CutError, cut, minimality_witness

__version__ = "0.1.0"
