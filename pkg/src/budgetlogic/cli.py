"""Command-line interface.

    budgetlogic [--semiring NAME] [--max-height H] [--max-derelict D]
                [--max-nodes N] [--format text|structured] SUBCOMMAND ...

Subcommands: prove, cost, spectrum, play, check-semiring, cut, encode-ts,
serve.  Exit status: 0 on success, 1 when the query is unprovable (or the
played game is lost), 2 on usage or input errors.  Structured mode prints
one JSON document per invocation.  The BUDGETLOGIC_SEMIRING environment
variable overrides the default semiring.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .core import LabelledSequent, PRICED, Sequent
from .cut import CutError, cut
from .game import (
    Choice, GameState, Next, adaptive_choice, apply_move, best_adversary,
    game_search, legal_moves, play, state_token, strategy_from_proof,
    winning_state,
)
from .labelled import cost_of, skeleton
from .parser import (
    ParseError, encode_ts, parse_sequent, parse_transition_system,
    proof_from_json, proof_to_json, render,
)
from .prover import (
    DEFAULT_LIMITS, LimitExceeded, SearchLimits, min_cost, prove,
    prove_labelled, spectrum,
)
from .semiring import SemiringError, builtin, check_axioms


class _Exit(Exception):
    def __init__(self, status, message=None):
        self.status = status
        self.message = message


def _build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--semiring", default=argparse.SUPPRESS,
                        choices=["cost", "security", "max", "prob", "probabilistic"])
    shared.add_argument("--max-height", type=int, default=argparse.SUPPRESS)
    shared.add_argument("--max-derelict", type=int, default=argparse.SUPPRESS)
    shared.add_argument("--max-nodes", type=int, default=argparse.SUPPRESS)
    shared.add_argument("--format", choices=["text", "structured"],
                        default=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(prog="budgetlogic",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--semiring",
                    default=os.environ.get("BUDGETLOGIC_SEMIRING", "cost"),
                    choices=["cost", "security", "max", "prob", "probabilistic"])
    ap.add_argument("--max-height", type=int, default=DEFAULT_LIMITS.max_height)
    ap.add_argument("--max-derelict", type=int,
                    default=DEFAULT_LIMITS.max_derelictions)
    ap.add_argument("--max-nodes", type=int, default=DEFAULT_LIMITS.max_nodes)
    ap.add_argument("--format", choices=["text", "structured"], default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", parents=[shared],
                       help="search for a proof of a sequent")
    p.add_argument("sequent")

    p = sub.add_parser("cost", parents=[shared],
                       help="cheapest decoration of a sequent")
    p.add_argument("sequent")

    p = sub.add_parser("spectrum", parents=[shared],
                       help="all proof costs within a bound")
    p.add_argument("sequent")
    p.add_argument("--bound", required=True)

    p = sub.add_parser("play", parents=[shared],
                       help="play the budget game against the engine")
    p.add_argument("sequent")
    p.add_argument("--budget", required=True)
    p.add_argument("--role", required=True, choices=["I", "II"])

    p = sub.add_parser("check-semiring", parents=[shared],
                       help="sample the semiring laws")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("cut", parents=[shared],
                       help="combine two proof files, eliminating the cut")
    p.add_argument("proof1")
    p.add_argument("proof2")

    p = sub.add_parser("encode-ts", parents=[shared],
                       help="reachability of a transition-system file")
    p.add_argument("file")
    p.add_argument("--budget", required=True)

    p = sub.add_parser("serve", parents=[shared], help="run the HTTP service")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    return ap


def _emit(args, payload, text):
    if args.format == "structured":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _parse_labelled(text, k):
    s = parse_sequent(text, k)
    if not isinstance(s, LabelledSequent):
        raise _Exit(2, "a budget label is required here (use G |-[L] C)")
    return s


def _cmd_prove(args, k, limits):
    s = parse_sequent(args.sequent, k)
    if isinstance(s, LabelledSequent):
        res = prove_labelled(s, k, limits)
        if res.proof is not None:
            _emit(args, {"provable": True,
                         "proof": json.loads(proof_to_json(res.proof, k))},
                  f"provable: {render(s, k)}")
            return 0
        why = "refuted" if res.exhaustive else "no proof within limits"
        _emit(args, {"provable": False, "exhaustive": res.exhaustive}, why)
        return 1
    res = prove(s, PRICED, limits)
    if res.proof is not None:
        _emit(args, {"provable": True,
                     "proof": json.loads(proof_to_json(res.proof, k))},
              f"provable: {render(s, k)}")
        return 0
    why = "refuted" if res.refuted else "no proof within limits"
    _emit(args, {"provable": False, "exhaustive": res.exhaustive}, why)
    return 1


def _cmd_cost(args, k, limits):
    s = parse_sequent(args.sequent, k)
    if isinstance(s, LabelledSequent):
        raise _Exit(2, "cost takes an unlabelled sequent")
    res = min_cost(s, k, limits)
    if res.cost is None:
        why = "unprovable" if res.exhaustive else "no proof within limits"
        _emit(args, {"cost": None, "exhaustive": res.exhaustive}, why)
        return 1
    note = "" if res.minimal else " (best found, not proven minimal)"
    _emit(args, {"cost": k.render_value(res.cost), "minimal": res.minimal},
          k.render_value(res.cost) + note)
    return 0


def _cmd_spectrum(args, k, limits):
    s = parse_sequent(args.sequent, k)
    if isinstance(s, LabelledSequent):
        raise _Exit(2, "spectrum takes an unlabelled sequent plus --bound")
    bound = k.parse_value(args.bound)
    sp = spectrum(s, bound, k, limits)
    values = [k.render_value(v) for v in sp.values]
    _emit(args, {"bound": k.render_value(bound), "values": values,
                 "exhausted": sp.exhausted},
          "{" + ", ".join(values) + "}")
    return 0 if values else 1


def _cmd_check_semiring(args, k, limits):
    rep = check_axioms(k, args.samples, args.seed)
    _emit(args, {"semiring": rep.semiring, "samples": rep.samples,
                 "ok": rep.ok, "failures": rep.failed_laws()},
          rep.summary())
    return 0 if rep.ok else 1


def _cmd_cut(args, k, limits):
    with open(args.proof1) as fh:
        lpf1, k1, _ = proof_from_json(fh.read(), k)
    with open(args.proof2) as fh:
        lpf2, _, _ = proof_from_json(fh.read(), k)
    out = cut(lpf1, lpf2, k)
    print(proof_to_json(out, k))
    return 0


def _cmd_encode_ts(args, k, limits):
    with open(args.file) as fh:
        ts = parse_transition_system(fh.read(), k)
    s = encode_ts(ts)
    budget = k.parse_value(args.budget)
    res = prove_labelled(LabelledSequent(s, budget), k, limits)
    payload = {"sequent": render(s, k), "budget": k.render_value(budget),
               "provable": res.provable}
    _emit(args, payload,
          f"{render(s, k)}\nbudget {k.render_value(budget)}: "
          + ("reachable" if res.provable else "not reachable"))
    return 0 if res.provable else 1


# --- interactive play -------------------------------------------------------


def _show_state(st, k, out):
    print("subgames:", file=out)
    for i, s in enumerate(st.subgames):
        print(f"  [{i}] {render(s, k)}", file=out)
    if st.budget is not None:
        print(f"budget: {k.render_value(st.budget)}", file=out)


def _describe_move(mv, st, k):
    s = st.subgames[mv.subgame]
    what = f"{mv.rule.value} in [{mv.subgame}]"
    if mv.principal is not None:
        what += f" on {render(s.antecedent[mv.principal], k)}"
    if mv.split is not None:
        what += f" split {mv.split}"
    return what


def _prompt_index(n, prompt, out):
    while True:
        print(prompt, file=out, end="", flush=True)
        line = sys.stdin.readline()
        if not line:
            raise EOFError
        line = line.strip()
        if line.isdigit() and int(line) < n:
            return int(line)
        print(f"enter a number in 0..{n - 1}", file=out)


def play_repl(initial: GameState, role: str, k, limits, out=None):
    """Interactive loop; the engine plays the role the human did not take.
    Returns the finished (or aborted) trace as a list of state tokens."""
    out = out if out is not None else sys.stdout
    trace = [state_token(initial, k)]
    state = initial
    engine = None
    if role == "II":
        s = initial.subgames[0]
        res = prove_labelled(LabelledSequent(s, initial.budget), k, limits)
        if res.proof is None:
            print("engine cannot force a win from here; nothing to defend", file=out)
            raise _Exit(1)
        engine = strategy_from_proof(res.proof, k)
    try:
        while True:
            _show_state(state, k, out)
            if winning_state(state):
                print("all subgames are initial: the claim is defended", file=out)
                return trace, True
            moves = legal_moves(state, k)
            if not moves:
                print("no legal moves: stuck, the claim fails", file=out)
                return trace, False
            if role == "I":
                for i, mv in enumerate(moves):
                    print(f"  ({i}) {_describe_move(mv, state, k)}", file=out)
                mv = moves[_prompt_index(len(moves), "your move> ", out)]
            else:
                mv = engine(state)
                if mv is None:
                    print("engine strategy exhausted", file=out)
                    return trace, False
                print(f"engine plays: {_describe_move(mv, state, k)}", file=out)
            outcome = apply_move(state, mv, k)
            if isinstance(outcome, Next):
                state = outcome.state
            else:
                if role == "II":
                    print("  (0) left:  " + state_token(outcome.left, k), file=out)
                    print("  (1) right: " + state_token(outcome.right, k), file=out)
                    pick = _prompt_index(2, "your choice> ", out)
                    state = outcome.left if pick == 0 else outcome.right
                else:
                    side = adaptive_choice(outcome.left, outcome.right, k, limits)
                    print(f"engine answers: {side}", file=out)
                    state = outcome.left if side == "L" else outcome.right
            trace.append(state_token(state, k))
    except EOFError:
        print("\naborted; trace so far:", file=out)
        for t in trace:
            print("  " + t, file=out)
        return trace, False


def _cmd_play(args, k, limits):
    s = parse_sequent(args.sequent, k)
    if isinstance(s, LabelledSequent):
        raise _Exit(2, "pass the budget via --budget, not in the sequent")
    budget = k.parse_value(args.budget)
    initial = GameState((s,), budget)
    trace, won = play_repl(initial, args.role, k, limits)
    return 0 if won else 1


def _cmd_serve(args, k, limits):
    import uvicorn

    from .service import create_app
    app = create_app(default_semiring=k.name, limits=limits)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_COMMANDS = {
    "prove": _cmd_prove,
    "cost": _cmd_cost,
    "spectrum": _cmd_spectrum,
    "play": _cmd_play,
    "check-semiring": _cmd_check_semiring,
    "cut": _cmd_cut,
    "encode-ts": _cmd_encode_ts,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    k = builtin(args.semiring)
    try:
        limits = SearchLimits(args.max_height, args.max_derelict, args.max_nodes)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args, k, limits)
    except _Exit as exc:
        if exc.message:
            print(f"error: {exc.message}", file=sys.stderr)
        return exc.status
    except (ParseError, SemiringError, CutError, FileNotFoundError) as exc:
        if args.format == "structured":
            print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    except LimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
