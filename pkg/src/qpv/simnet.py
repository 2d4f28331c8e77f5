"""1-D light-speed message scheduling and deadline verdicts.

Units have ``c = 1``: a message between two parties takes exactly the
coordinate distance between them.  Local computation is instantaneous, so a
handler's messages may be emitted at the delivery time that triggered it
(or later), never earlier.
"""
from __future__ import annotations

import heapq
import itertools
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Iterator, Mapping

import numpy as np

from .qstate import BellOutcome, Deferred, QubitId

V0, V1, P, E0, E1 = "V0", "V1", "P", "E0", "E1"
VERIFIERS = (V0, V1)

# Slack on the t_launch + 2d comparison so the exact light-cone boundary counts as on time.
DEADLINE_SLACK = 1e-12


class CausalityError(RuntimeError):
    pass


class OwnershipError(RuntimeError):
    pass


Handler = Callable[["Scheduler", "Message"], None]


@dataclass
class Party:
    name: str
    pos: float
    handler: Handler | None = None

    def __post_init__(self):
        if not math.isfinite(self.pos):
            raise ValueError(f"{self.name} has non-finite position {self.pos}")


def line_parties(d: float = 1.0, e0: float | None = None, e1: float | None = None) -> dict[str, Party]:
    """Verifiers at ``0`` and ``2d``; prover at ``d``; adversaries only if positioned."""
    parties = {V0: Party(V0, 0.0), V1: Party(V1, 2.0 * d), P: Party(P, d)}
    if e0 is not None:
        if not 0.0 < e0 < d:
            raise ValueError(f"E0 must lie in (0,d); got {e0}")
        parties[E0] = Party(E0, e0)
    if e1 is not None:
        if not d < e1 < 2.0 * d:
            raise ValueError(f"E1 must lie in (d,2d); got {e1}")
        parties[E1] = Party(E1, e1)
    return parties


@dataclass
class Message:
    src: str
    dst: str
    payload: Any
    t_emit: float
    t_arrive: float
    kind: str = "data"
    seq: int = 0


@dataclass
class Event:
    t: float
    src: str
    dst: str
    kind: str
    payload: Any

    def to_dict(self) -> dict:
        return {"t": self.t, "src": self.src, "dst": self.dst, "kind": self.kind, "payload": jsonable(self.payload)}


@dataclass
class RoundTranscript:
    t_launch: float
    events: list[Event] = field(default_factory=list)
    responses: dict[str, list[tuple[Any, float]]] = field(default_factory=dict)

    def first_response(self, verifier: str) -> tuple[Any, float] | None:
        got = self.responses.get(verifier)
        return got[0] if got else None

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_dict(), sort_keys=True) + "\n" for e in self.events)


class Reason(str, Enum):
    OK = "ok"
    LATE = "late"
    WRONG = "wrong-answer"
    MISSING = "missing"


@dataclass(frozen=True)
class Verdict:
    accept: bool
    reason: Reason
    per_verifier: dict[str, Reason] = field(default_factory=dict)

    def __post_init__(self):
        if self.accept and self.reason is not Reason.OK:
            raise ValueError("an accepting verdict must carry reason 'ok'")


def _qubits_in(payload: Any) -> Iterator[QubitId]:
    if isinstance(payload, QubitId):
        yield payload
    elif isinstance(payload, dict):
        for v in payload.values():
            if isinstance(v, (QubitId, dict, list, tuple)):
                yield from _qubits_in(v)
    elif isinstance(payload, (list, tuple)):
        for v in payload:
            if isinstance(v, (QubitId, dict, list, tuple)):
                yield from _qubits_in(v)


def jsonable(x: Any) -> Any:
    """JSON-safe copy of a payload; pending deferred values serialize as ``None``."""
    if isinstance(x, QubitId):
        return {"qubit": x.id}
    if isinstance(x, Deferred):
        return jsonable(x.peek())
    if isinstance(x, BellOutcome):
        return [x.k0, x.k1]
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, Mapping):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


class Scheduler:
    """Single-round discrete-event loop over positioned parties.

    ``routing`` maps ``(src, dst)`` to the party that physically receives
    the message first; with adversaries on the line, items addressed to the
    prover land at ``E0``/``E1`` instead.
    """

    def __init__(
        self,
        parties: Iterable[Party],
        t_launch: float = 0.0,
        routing: Mapping[tuple[str, str], str] | None = None,
        record: bool = True,
    ):
        self.parties = {p.name: p for p in parties}
        self.routing = dict(routing or {})
        self.now = -math.inf
        self.record = record
        self.transcript = RoundTranscript(t_launch=t_launch)
        self.owner: dict[QubitId, str | None] = {}
        self._queue: list[tuple[float, int, Message]] = []
        self._seq = itertools.count()

    @property
    def t_launch(self) -> float:
        return self.transcript.t_launch

    def dist(self, a: str, b: str) -> float:
        return abs(self.parties[a].pos - self.parties[b].pos)

    def give(self, q: QubitId, party: str) -> None:
        self.owner[q] = party

    def send(self, src: str | Party, dst: str | Party, payload: Any, t_emit: float | None = None,
             kind: str = "data") -> Message:
        src = getattr(src, "name", src)
        dst = getattr(dst, "name", dst)
        t_emit = self.now if t_emit is None else float(t_emit)
        if t_emit < self.now:
            raise CausalityError(f"{src} emits at {t_emit} before current time {self.now}")
        for q in _qubits_in(payload):
            if self.owner.get(q) != src:
                raise OwnershipError(f"{src} does not hold {q!r} (holder: {self.owner.get(q)})")
            self.owner[q] = None
        dst = self.routing.get((src, dst), dst)
        t_arrive = t_emit + self.dist(src, dst)
        msg = Message(src, dst, payload, t_emit, t_arrive, kind, next(self._seq))
        heapq.heappush(self._queue, (t_arrive, msg.seq, msg))
        return msg

    def respond(self, src: str, verifier: str, value: Any) -> Message:
        """Send a result timed to reach ``verifier`` at ``t_launch + 2d`` if still possible."""
        d = self.dist(V0, V1) / 2.0
        target = self.t_launch + 2.0 * d - self.dist(src, verifier)
        return self.send(src, verifier, value, t_emit=max(self.now, target), kind="response")

    def log(self, party: str, kind: str, payload: Any = None) -> None:
        if self.record:
            self.transcript.events.append(Event(self.now, party, party, kind, payload))

    def run(self, initial: Iterable[tuple] = ()) -> RoundTranscript:
        """Process queued messages in (time, insertion) order until quiet.

        ``initial`` holds extra ``(src, dst, payload, t_emit[, kind])`` tuples
        to enqueue before the loop starts.
        """
        for spec in initial:
            self.send(*spec)
        while self._queue:
            t, _, msg = heapq.heappop(self._queue)
            self.now = t
            for q in _qubits_in(msg.payload):
                self.owner[q] = msg.dst
            if self.record:
                self.transcript.events.append(Event(t, msg.src, msg.dst, msg.kind, msg.payload))
            if msg.kind == "response":
                self.transcript.responses.setdefault(msg.dst, []).append((msg.payload, t))
            handler = self.parties[msg.dst].handler
            if handler is not None:
                handler(self, msg)
        return self.transcript


def verdict(
    transcript: RoundTranscript,
    expected: Mapping[str, Callable[[Any], bool]],
    t_launch: float,
    d: float,
) -> Verdict:
    """Accept iff every verifier got an on-time response satisfying its predicate."""
    deadline = t_launch + 2.0 * d + DEADLINE_SLACK
    per: dict[str, Reason] = {}
    for v in VERIFIERS:
        got = transcript.first_response(v)
        if got is None:
            per[v] = Reason.MISSING
        elif got[1] > deadline:
            per[v] = Reason.LATE
        elif not expected[v](got[0]):
            per[v] = Reason.WRONG
        else:
            per[v] = Reason.OK
    for reason in (Reason.MISSING, Reason.LATE, Reason.WRONG):
        if reason in per.values():
            return Verdict(False, reason, per)
    return Verdict(True, Reason.OK, per)
