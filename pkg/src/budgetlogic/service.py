"""Local HTTP API: one-shot prove/cost queries plus stateful interactive
game sessions for the web board.

Routes (JSON bodies; field names are fixed by docs/api-schema.json):

    POST   /prove                 {sequent, semiring?, limits?}
    POST   /sessions              {sequent, budget, semiring?, role, strict?}
    GET    /sessions/{id}
    POST   /sessions/{id}/moves   {option}
    DELETE /sessions/{id}

``role`` is the human's side.  The engine resolves all of its consecutive
decisions server-side, so the client only ever answers genuine decision
points: as player II the human picks branches of additive choices; as
player I the human picks rule applications and the engine answers choices
adversarially.  Sessions are in-memory and expire after 30 idle minutes.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .core import LabelledSequent, PRICED
from .game import (
    Choice, GameState, Move, Next, adaptive_choice, apply_move, game_search,
    legal_moves, state_token, strategy_from_proof, winning_state,
)
from .parser import ParseError, parse_sequent, proof_to_json, render
from .prover import (
    DEFAULT_LIMITS, LimitExceeded, SearchLimits, min_cost, prove,
    prove_labelled,
)
from .semiring import SemiringError, builtin

SESSION_IDLE_SECONDS = 30 * 60


class ProveRequest(BaseModel):
    sequent: str
    semiring: Optional[str] = None
    limits: Optional[dict] = None


class SessionRequest(BaseModel):
    sequent: str
    budget: str
    semiring: Optional[str] = None
    role: str  # the human's side: "I" or "II"
    strict: bool = True


class MoveRequest(BaseModel):
    option: int


def _limits_of(raw) -> SearchLimits:
    if not raw:
        return DEFAULT_LIMITS
    try:
        return SearchLimits(
            raw.get("max_height", DEFAULT_LIMITS.max_height),
            raw.get("max_derelict", DEFAULT_LIMITS.max_derelictions),
            raw.get("max_nodes", DEFAULT_LIMITS.max_nodes))
    except (TypeError, ValueError) as exc:
        raise HTTPException(422, f"bad limits: {exc}") from None


@dataclass
class Session:
    id: str
    k: object
    role: str
    limits: SearchLimits
    state: GameState
    engine: Optional[object]  # Strategy when the engine is player I
    pending: Optional[Choice] = None
    game_over: bool = False
    outcome: Optional[str] = None  # 'won' (player I) | 'stuck' (player II)
    history: list = field(default_factory=list)
    initial_token: str = ""
    last_access: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _describe_move(mv: Move, st: GameState, k) -> str:
    s = st.subgames[mv.subgame]
    what = f"{mv.rule.value} in subgame {mv.subgame}"
    if mv.principal is not None:
        what += f" on {render(s.antecedent[mv.principal], k)}"
    if mv.split is not None:
        what += f" (split {mv.split})"
    return what


def _move_record(mv: Move, by: str) -> dict:
    return {"kind": "move", "by": by, "subgame": mv.subgame,
            "rule": mv.rule.value, "principal": mv.principal,
            "split": mv.split}


def _choice_record(side: str, by: str) -> dict:
    return {"kind": "choice", "by": by, "side": side}


def _budget_note(before: GameState, after: GameState, k) -> str:
    if before.budget is not None and before.budget != after.budget:
        return (f"; budget {k.render_value(before.budget)} -> "
                f"{k.render_value(after.budget)}")
    return ""


class _Store:
    def __init__(self):
        self.sessions = {}
        self.lock = threading.Lock()

    def put(self, s: Session):
        with self.lock:
            self._purge()
            self.sessions[s.id] = s

    def get(self, sid: str) -> Session:
        with self.lock:
            self._purge()
            s = self.sessions.get(sid)
            if s is None:
                raise HTTPException(404, "unknown session")
            s.last_access = time.monotonic()
            return s

    def drop(self, sid: str):
        with self.lock:
            if sid not in self.sessions:
                raise HTTPException(404, "unknown session")
            del self.sessions[sid]

    def _purge(self):
        cutoff = time.monotonic() - SESSION_IDLE_SECONDS
        for sid in [sid for sid, s in self.sessions.items()
                    if s.last_access < cutoff]:
            del self.sessions[sid]


def _finish_check(session: Session):
    st = session.state
    if winning_state(st):
        session.game_over = True
        session.outcome = "won"
    elif not legal_moves(st, session.k):
        session.game_over = True
        session.outcome = "stuck"


def _advance_engine_as_i(session: Session, narration: list):
    """Run the engine's player-I moves until a choice for the human (II),
    the end of the game, or a dead end."""
    k = session.k
    while True:
        _finish_check(session)
        if session.game_over:
            return
        mv = session.engine(session.state) if session.engine else None
        if mv is None:
            moves = legal_moves(session.state, k)
            if not moves:
                return  # _finish_check already flagged stuck
            mv = moves[0]  # best-effort fallback (strict=false sessions)
        before = session.state
        out = apply_move(session.state, mv, k)
        session.history.append(_move_record(mv, "engine"))
        if isinstance(out, Next):
            session.state = out.state
            narration.append("engine: " + _describe_move(mv, before, k)
                             + _budget_note(before, out.state, k))
        else:
            session.pending = out
            narration.append("engine: " + _describe_move(mv, before, k)
                             + "; your choice")
            return


def _options(session: Session):
    k = session.k
    if session.game_over:
        return []
    if session.role == "II":
        if session.pending is None:
            return []
        return [{"index": 0, "kind": "branch",
                 "describe": state_token(session.pending.left, k)},
                {"index": 1, "kind": "branch",
                 "describe": state_token(session.pending.right, k)}]
    return [{"index": i, "kind": "move",
             "describe": _describe_move(mv, session.state, k)}
            for i, mv in enumerate(legal_moves(session.state, k))]


def _state_payload(session: Session):
    k = session.k
    st = session.state
    token = state_token(st, k)
    return {
        "subgames": [render(s, k) for s in st.subgames],
        "budget": None if st.budget is None else k.render_value(st.budget),
        "token": token,
        "hash": hashlib.sha256(token.encode()).hexdigest(),
    }


def _session_payload(session: Session, narration=()):
    return {
        "id": session.id,
        "role": session.role,
        "semiring": session.k.name,
        "state": _state_payload(session),
        "options": _options(session),
        "game_over": session.game_over,
        "outcome": session.outcome,
        "narration": list(narration),
        "history": list(session.history),
        "initial": {"token": session.initial_token,
                    "hash": hashlib.sha256(session.initial_token.encode()).hexdigest()},
    }


def create_app(default_semiring="cost", limits: SearchLimits = DEFAULT_LIMITS) -> FastAPI:
    app = FastAPI(title="budgetlogic service", version="0.1.0")
    store = _Store()

    def _semiring(name):
        try:
            return builtin(name or default_semiring)
        except SemiringError as exc:
            raise HTTPException(422, str(exc)) from None

    @app.post("/prove")
    def prove_route(req: ProveRequest):
        k = _semiring(req.semiring)
        lim = _limits_of(req.limits)
        try:
            s = parse_sequent(req.sequent, k)
        except ParseError as exc:
            raise HTTPException(422, str(exc)) from None
        try:
            if isinstance(s, LabelledSequent):
                res = prove_labelled(s, k, lim)
                payload = {"provable": res.provable, "exhaustive": res.exhaustive}
                if res.proof is not None:
                    payload["proof"] = json.loads(proof_to_json(res.proof, k))
                return payload
            res = prove(s, PRICED, lim)
            payload = {"provable": res.provable, "exhaustive": res.exhaustive}
            if res.proof is not None:
                payload["proof"] = json.loads(proof_to_json(res.proof, k))
                best = min_cost(s, k, lim)
                if best.cost is not None:
                    payload["cost"] = k.render_value(best.cost)
            return payload
        except LimitExceeded as exc:
            raise HTTPException(422, str(exc)) from None

    @app.post("/sessions", status_code=201)
    def create_session(req: SessionRequest):
        k = _semiring(req.semiring)
        if req.role not in ("I", "II"):
            raise HTTPException(422, "role must be I or II")
        try:
            s = parse_sequent(req.sequent, k)
            budget = k.parse_value(req.budget)
        except (ParseError, SemiringError) as exc:
            raise HTTPException(422, str(exc)) from None
        if isinstance(s, LabelledSequent):
            raise HTTPException(422, "pass the budget separately, not in the sequent")
        state = GameState((s,), budget)
        engine = None
        if req.role == "II":
            res = prove_labelled(LabelledSequent(s, budget), k, DEFAULT_LIMITS)
            if res.proof is not None:
                engine = strategy_from_proof(res.proof, k)
            elif req.strict:
                raise HTTPException(
                    422, "engine as player I has no winning strategy at this budget")
        session = Session(id=secrets.token_hex(8), k=k, role=req.role,
                          limits=_limits_of(None), state=state, engine=engine)
        session.initial_token = state_token(state, k)
        narration = []
        if req.role == "II":
            _advance_engine_as_i(session, narration)
        else:
            _finish_check(session)
        store.put(session)
        return _session_payload(session, narration)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session = store.get(sid)
        with session.lock:
            return _session_payload(session)

    @app.post("/sessions/{sid}/moves")
    def post_move(sid: str, req: MoveRequest):
        session = store.get(sid)
        with session.lock:
            if session.game_over:
                raise HTTPException(409, "the game is over")
            k = session.k
            narration = []
            if session.role == "II":
                if session.pending is None:
                    raise HTTPException(409, "no pending choice")
                if req.option not in (0, 1):
                    raise HTTPException(409, "option must be 0 or 1")
                session.state = (session.pending.left if req.option == 0
                                 else session.pending.right)
                session.pending = None
                side = "L" if req.option == 0 else "R"
                session.history.append(_choice_record(side, "human"))
                narration.append("you picked the "
                                 + ("left" if side == "L" else "right") + " branch")
                _advance_engine_as_i(session, narration)
            else:
                moves = legal_moves(session.state, k)
                if not 0 <= req.option < len(moves):
                    raise HTTPException(409, f"no move option {req.option}")
                mv = moves[req.option]
                before = session.state
                out = apply_move(session.state, mv, k)
                session.history.append(_move_record(mv, "human"))
                narration.append("you played " + _describe_move(mv, before, k))
                if isinstance(out, Next):
                    session.state = out.state
                    note = _budget_note(before, out.state, k)
                    if note:
                        narration.append(note.lstrip("; "))
                else:
                    side = adaptive_choice(out.left, out.right, k, session.limits)
                    session.state = out.left if side == "L" else out.right
                    session.history.append(_choice_record(side, "engine"))
                    narration.append("engine answers: "
                                     + ("left" if side == "L" else "right"))
                _finish_check(session)
            return _session_payload(session, narration)

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        store.drop(sid)

    return app


app = create_app()
