"""One verification round, end to end, on the simulated line."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .adversaries import Attack, AttackContext, make_attack
from .config import ScenarioConfig
from .protocols import (
    Challenge,
    OracleTable,
    ProtocolKind,
    Response,
    accept_predicate,
    draw_challenge,
    honest_prover,
    honest_z_distribution,
    prepare_items,
)
from .qstate import Engine
from .simnet import E0, E1, P, V0, V1, Message, RoundTranscript, Scheduler, Verdict, line_parties, verdict


@dataclass
class RoundResult:
    accept: bool
    verdict: Verdict
    challenge: Challenge
    response: Response
    conditions: dict[str, Any] = field(default_factory=dict)
    honest_p1: float | None = None
    transcript: RoundTranscript | None = None
    bank_size: int = 0
    bank_used: int = 0
    oracle_queries: int = 0


class HonestProver:
    def __init__(self, kind: ProtocolKind, engine: Engine, oracle: OracleTable | None, rng):
        self.kind, self.engine, self.oracle, self.rng = kind, engine, oracle, rng
        self.items: dict[str, dict] = {}

    def __call__(self, sim: Scheduler, msg: Message) -> None:
        self.items[msg.src] = msg.payload
        if len(self.items) == 2:
            sim.log(P, "items-complete", {"t": sim.now})
            value = honest_prover(self.kind, (self.items[V0], self.items[V1]), self.oracle, self.engine, self.rng)
            sim.log(P, "result", {"value": value})
            sim.send(P, V0, value, kind="response")
            sim.send(P, V1, value, kind="response")


def run_round(cfg: ScenarioConfig, rng, oracle: OracleTable | None = None, record: bool = True) -> RoundResult:
    """Play one round of ``cfg`` (already validated) with randomness from ``rng``.

    Verifiers agree on the challenge and prepare their items at negative
    time, launch at ``t = 0``, and judge the responses against the
    ``2d`` light-cone deadline and the protocol's consistency rule.
    """
    kind = cfg.protocol
    engine = Engine()
    if kind.uses_oracle and oracle is None:
        oracle = OracleTable(seed=cfg.oracle_seed or 0, n=cfg.n)

    challenge = draw_challenge(kind, cfg.n, rng)
    item0, item1 = prepare_items(kind, challenge, engine, oracle)

    attack: Attack | None = None
    if cfg.honest:
        parties = line_parties(cfg.d)
        parties[P].handler = HonestProver(kind, engine, oracle, rng)
        routing = {}
    else:
        parties = line_parties(cfg.d, cfg.e0_pos, cfg.e1_pos)
        del parties[P]
        ctx = AttackContext(kind, engine, rng, oracle, n=cfg.n, m=cfg.m, alpha=cfg.alpha, beta=cfg.beta)
        attack = make_attack(cfg.attack, ctx)
        parties[E0].handler = attack.on_e0
        parties[E1].handler = attack.on_e1
        routing = {(V0, P): E0, (V1, P): E1}

    sim = Scheduler(parties.values(), t_launch=0.0, routing=routing, record=record)
    for party, item in ((V0, item0), (V1, item1)):
        if "qubit" in item:
            sim.give(item["qubit"], party)
    transcript = sim.run([(V0, P, item0, 0.0, "item"), (V1, P, item1, 0.0, "item")])

    def predicate(value) -> bool:
        return accept_predicate(kind, challenge, value, oracle)

    v = verdict(transcript, {V0: predicate, V1: predicate}, transcript.t_launch, cfg.d)
    values, arrivals = {}, {}
    for name in (V0, V1):
        got = transcript.first_response(name)
        if got is not None:
            values[name], arrivals[name] = got
    conditions = attack.conditions(challenge) if attack is not None else {}
    honest_p1 = None if kind.one_qubit else honest_z_distribution(kind, challenge, oracle)
    return RoundResult(
        accept=v.accept,
        verdict=v,
        challenge=challenge,
        response=Response(values, arrivals),
        conditions=conditions,
        honest_p1=honest_p1,
        transcript=transcript if record else None,
        bank_size=attack.bank.size if attack else 0,
        bank_used=len(attack.bank.used) if attack else 0,
        oracle_queries=oracle.distinct_queries if oracle is not None else 0,
    )


def run_rounds(cfg: ScenarioConfig, rng, oracle: OracleTable | None = None, record: bool = False) -> list[RoundResult]:
    """``cfg.rounds`` sequential rounds; the scenario passes only if all accept.

    Stops at the first rejection, since later rounds cannot change the outcome.
    """
    results = []
    for _ in range(cfg.rounds):
        r = run_round(cfg, rng, oracle, record=record)
        results.append(r)
        if not r.accept:
            break
    return results
