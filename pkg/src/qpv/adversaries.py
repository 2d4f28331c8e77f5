"""Attack strategies for the colluding pair ``E0`` (left) and ``E1`` (right).

Each attack is a small class whose ``on_e0``/``on_e1`` methods are the two
adversaries' event handlers.  The halves keep separate memories
(``self.m0``/``self.m1``) and learn about each other only from relayed
messages, so a strategy can use nothing it could not have at that place
and time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from types import SimpleNamespace
from typing import Any, Hashable, Iterable

import numpy as np

from .protocols import Challenge, OracleTable, ProtocolKind, bits_to_int, int_to_bits, measurement_switch
from .qstate import PSI_PLUS, BellOutcome, Deferred, Engine, QubitId
from .simnet import E0, E1, V0, V1, Message, Scheduler


class AttackKind(str, Enum):
    P1_INTERCEPT = "P1_INTERCEPT"
    P1_TELEPORT_1EPR = "P1_TELEPORT_1EPR"
    P1MOD_2EPR = "P1MOD_2EPR"
    P2_LOCAL_MEASURE = "P2_LOCAL_MEASURE"
    P2_1EPR = "P2_1EPR"
    P2MOD_5EPR = "P2MOD_5EPR"
    P1ORACLE_2N = "P1ORACLE_2N"
    P1ORACLE_HYBRID = "P1ORACLE_HYBRID"
    P2ORACLE_FULL = "P2ORACLE_FULL"
    NAIVE_WAIT = "NAIVE_WAIT"


_P = ProtocolKind
COMPATIBLE: dict[AttackKind, frozenset[ProtocolKind]] = {
    AttackKind.P1_INTERCEPT: frozenset({_P.P1, _P.P1MOD, _P.P1ORACLE}),
    AttackKind.P1_TELEPORT_1EPR: frozenset({_P.P1}),
    AttackKind.P1MOD_2EPR: frozenset({_P.P1MOD}),
    AttackKind.P2_LOCAL_MEASURE: frozenset({_P.P2, _P.P2MOD, _P.P2ORACLE}),
    AttackKind.P2_1EPR: frozenset({_P.P2}),
    AttackKind.P2MOD_5EPR: frozenset({_P.P2MOD}),
    AttackKind.P1ORACLE_2N: frozenset({_P.P1ORACLE}),
    AttackKind.P1ORACLE_HYBRID: frozenset({_P.P1ORACLE}),
    AttackKind.P2ORACLE_FULL: frozenset({_P.P2ORACLE}),
    AttackKind.NAIVE_WAIT: frozenset({_P.P1, _P.P1MOD, _P.P1ORACLE}),
}


def bank_requirement(attack: AttackKind, n: int) -> int:
    """EPR pairs the full-strength attack consumes."""
    return {
        AttackKind.P1_TELEPORT_1EPR: 1,
        AttackKind.P1MOD_2EPR: 2,
        AttackKind.P2_1EPR: 1,
        AttackKind.P2MOD_5EPR: 5,
        AttackKind.P1ORACLE_2N: 2**n,
        AttackKind.P1ORACLE_HYBRID: 2**n,
        AttackKind.P2ORACLE_FULL: 2 ** (n + 1) + 1,
    }.get(AttackKind(attack), 0)


class EntanglementBank:
    """Labelled EPR pairs shared by ``E0`` (side 0) and ``E1`` (side 1).

    Pairs are notionally distributed before the round.  Each one is only
    materialized in the engine when a half is first touched, which leaves
    the joint distribution unchanged and keeps banks of 2^n pairs cheap.
    """

    def __init__(self, engine: Engine, labels: Iterable[Hashable]):
        self.engine = engine
        self.labels = list(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("bank labels must be unique")
        self._pairs: dict[Hashable, tuple[QubitId, QubitId]] = {}
        self.used: set[Hashable] = set()

    @property
    def size(self) -> int:
        return len(self.labels)

    def __contains__(self, label: Hashable) -> bool:
        return label in set(self.labels)

    def half(self, label: Hashable, side: int) -> QubitId:
        if label not in self._pairs:
            if label not in self.labels:
                raise KeyError(f"no EPR pair labelled {label!r}")
            self._pairs[label] = self.engine.alloc_epr()
        self.used.add(label)
        return self._pairs[label][side]

    def mark(self, label: Hashable) -> None:
        if label not in self.labels:
            raise KeyError(f"no EPR pair labelled {label!r}")
        self.used.add(label)

    @property
    def materialized(self) -> int:
        return len(self._pairs)


@dataclass
class PauliFrame:
    """Teleportation corrections accumulated in a double-teleport attack."""

    k: BellOutcome | None = None
    k_prime: BellOutcome | None = None
    k_dprime: BellOutcome | None = None

    @property
    def clear(self) -> bool:
        return self.k_prime == BellOutcome(0, 0) and self.k_dprime == BellOutcome(0, 0)


@dataclass
class AttackContext:
    protocol: ProtocolKind
    engine: Engine
    rng: Any
    oracle: OracleTable | None = None
    n: int = 3
    m: int | None = None
    alpha: complex = 1.0
    beta: complex = 0.0


def local_basis(alpha: complex, beta: complex) -> tuple[np.ndarray, np.ndarray]:
    """``|n1> = (alpha, beta)``, ``|n2> = (-beta*, alpha*)``."""
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"|alpha|^2 + |beta|^2 = {norm}, expected 1")
    n1 = np.array([alpha, beta], dtype=complex)
    n2 = np.array([-np.conj(beta), np.conj(alpha)], dtype=complex)
    return n1, n2


class Attack:
    kind: AttackKind

    def __init__(self, ctx: AttackContext):
        self.ctx = ctx
        self.engine = ctx.engine
        self.rng = ctx.rng
        self.m0 = SimpleNamespace(done=False)
        self.m1 = SimpleNamespace(done=False)
        self.bank = EntanglementBank(ctx.engine, self.labels())

    def labels(self) -> list[Hashable]:
        return []

    def on_e0(self, sim: Scheduler, msg: Message) -> None:
        raise NotImplementedError

    def on_e1(self, sim: Scheduler, msg: Message) -> None:
        raise NotImplementedError

    def conditions(self, challenge: Challenge) -> dict[str, Any]:
        return {}

    def _finish(self, sim: Scheduler, side: str, value: int) -> None:
        mem = self.m0 if side == E0 else self.m1
        if not mem.done:
            mem.done = True
            sim.respond(side, V0 if side == E0 else V1, int(value))


class P1Intercept(Attack):
    """No entanglement: ``E0`` makes the minimum-error BB84 guess and broadcasts it."""

    kind = AttackKind.P1_INTERCEPT

    def on_e0(self, sim, msg):
        if msg.src == V0:
            g = self.engine.min_error_measure(msg.payload["qubit"], self.rng)
            sim.log(E0, "min-error", {"guess": g})
            sim.send(E0, E1, {"guess": g}, kind="relay")
            self._finish(sim, E0, g)

    def on_e1(self, sim, msg):
        if msg.src == E0:
            self._finish(sim, E1, msg.payload["guess"])


class P1Teleport(Attack):
    """One shared pair: teleport the qubit to ``E1``, who measures in the basis ``theta``."""

    kind = AttackKind.P1_TELEPORT_1EPR

    def labels(self):
        return [0]

    def on_e0(self, sim, msg):
        if msg.src == V0:
            k = self.engine.bell_measure(msg.payload["qubit"], self.bank.half(0, 0), self.rng)
            self.m0.k = k
            sim.log(E0, "bell", {"k": k})
            sim.send(E0, E1, {"k": k}, kind="relay")
        else:
            self.m0.theta, self.m0.mu = msg.payload["theta"], msg.payload["mu"]
        if hasattr(self.m0, "k") and hasattr(self.m0, "mu"):
            self._finish(sim, E0, self.m0.mu ^ self.m0.k[self.m0.theta])

    def on_e1(self, sim, msg):
        if msg.src == V1:
            theta = msg.payload["theta"]
            mu = self.engine.measure_basis(self.bank.half(0, 1), theta, self.rng)
            self.m1.theta, self.m1.mu = theta, mu
            sim.log(E1, "measure", {"theta": theta, "mu": mu})
            sim.send(E1, E0, {"theta": theta, "mu": mu}, kind="relay")
        else:
            self.m1.k = msg.payload["k"]
        if hasattr(self.m1, "k") and hasattr(self.m1, "mu"):
            self._finish(sim, E1, self.m1.mu ^ self.m1.k[self.m1.theta])

    def conditions(self, challenge):
        k, mu, theta = self.m0.k, self.m1.mu, challenge.theta
        # (-1)^(x xor k_theta) (-1)^k_theta = (-1)^x
        identity = (-1) ** mu * (-1) ** k[theta] == (-1) ** challenge.x
        return {"k": k.name, "mu": mu, "reconstructed": identity}


class P1ModBank(Attack):
    """Modified one-qubit protocol with ``m`` pairs (``m`` = 2 is the full attack).

    ``m = 2``: teleport through the pair labelled ``theta0``; ``E1`` measures
    pair 0 in ``Z`` and pair 1 in the ``theta1`` basis.
    ``m = 1``: one channel; ``E1`` measures ``Z`` when ``theta1 = 0`` (then
    ``theta = 0``) and otherwise makes the minimum-error guess on the
    Pauli-shifted BB84 state.
    ``m = 0``: ``E0`` measures ``Z`` when ``theta0 = 0``, else guesses.
    """

    kind = AttackKind.P1MOD_2EPR

    def labels(self):
        m = 2 if self.ctx.m is None else self.ctx.m
        if not 0 <= m <= 2:
            raise ValueError(f"P1MOD attack takes 0..2 pairs; got {m}")
        return list(range(m))

    def on_e0(self, sim, msg):
        m0, eng = self.m0, self.engine
        if msg.src == V0:
            q, m0.theta0 = msg.payload["qubit"], msg.payload["theta0"]
            if self.bank.size == 0:
                m0.guess = eng.measure_basis(q, 0, self.rng) if m0.theta0 == 0 else eng.min_error_measure(q, self.rng)
                sim.send(E0, E1, {"guess": m0.guess}, kind="relay")
                self._finish(sim, E0, m0.guess)
                return
            label = m0.theta0 if self.bank.size == 2 else 0
            m0.k = eng.bell_measure(q, self.bank.half(label, 0), self.rng)
            sim.log(E0, "bell", {"k": m0.k, "pair": label})
            sim.send(E0, E1, {"k": m0.k, "theta0": m0.theta0}, kind="relay")
        else:
            m0.theta1, m0.outcomes = msg.payload["theta1"], msg.payload["outcomes"]
        if hasattr(m0, "k") and hasattr(m0, "outcomes"):
            self._finish(sim, E0, self._decode(m0.theta0, m0.theta1, m0.k, m0.outcomes))

    def on_e1(self, sim, msg):
        m1, eng = self.m1, self.engine
        if msg.src == V1:
            m1.theta1 = msg.payload["theta1"]
            if self.bank.size == 2:
                m1.outcomes = (
                    eng.measure_basis(self.bank.half(0, 1), 0, self.rng),
                    eng.measure_basis(self.bank.half(1, 1), m1.theta1, self.rng),
                )
            elif self.bank.size == 1:
                q = self.bank.half(0, 1)
                if m1.theta1 == 0:
                    m1.outcomes = (eng.measure_basis(q, 0, self.rng),)
                else:
                    m1.outcomes = (eng.min_error_measure(q, self.rng),)
            else:
                return
            sim.log(E1, "measure", {"outcomes": m1.outcomes})
            sim.send(E1, E0, {"theta1": m1.theta1, "outcomes": m1.outcomes}, kind="relay")
        elif "guess" in msg.payload:
            self._finish(sim, E1, msg.payload["guess"])
            return
        else:
            m1.k, m1.theta0 = msg.payload["k"], msg.payload["theta0"]
        if hasattr(m1, "k") and hasattr(m1, "outcomes"):
            self._finish(sim, E1, self._decode(m1.theta0, m1.theta1, m1.k, m1.outcomes))

    def _decode(self, theta0, theta1, k, outcomes) -> int:
        theta = theta0 * theta1
        if self.bank.size == 2:
            return outcomes[theta0] ^ k[theta]
        # one pair: the outcome estimates x xor k_theta whichever basis E1 chose
        return outcomes[0] ^ k[theta]


class P2Local(Attack):
    """No entanglement: both measure in ``{|n1>, |n2>}`` and compare.

    Agreement is read as "same state" and answered ``z = 0``; disagreement
    is answered with a pre-shared fair coin, i.e. ``z = 1`` half of the time.
    """

    kind = AttackKind.P2_LOCAL_MEASURE

    def __init__(self, ctx):
        super().__init__(ctx)
        self.basis = local_basis(ctx.alpha, ctx.beta)
        rng = self.rng
        self.coin = Deferred(rng.bit)

    def _measure(self, sim, side, mem, q):
        mem.mine = self.engine.measure_in(q, self.basis, self.rng)
        sim.log(side, "measure", {"outcome": mem.mine})
        sim.send(side, E1 if side == E0 else E0, {"outcome": mem.mine}, kind="relay")

    def _handle(self, sim, side, mem, msg):
        if msg.kind == "item":
            self._measure(sim, side, mem, msg.payload["qubit"])
        else:
            mem.theirs = msg.payload["outcome"]
        if hasattr(mem, "mine") and hasattr(mem, "theirs"):
            mem.agree = mem.mine == mem.theirs
            self._finish(sim, side, 0 if mem.agree else self.coin.value)

    def on_e0(self, sim, msg):
        self._handle(sim, E0, self.m0, msg)

    def on_e1(self, sim, msg):
        self._handle(sim, E1, self.m1, msg)

    def conditions(self, challenge):
        same = challenge.x0 == challenge.x1
        return {"agree": self.m0.agree, "misidentified": self.m0.agree != same}


class P2Bell1EPR(Attack):
    """One shared pair: both Bell-measure their intercepted qubit with their half.

    Entanglement swapping leaves the verifiers' two qubits projected onto the
    Bell state labelled by the XOR of the two outcomes, so ``z = 1`` is
    reported exactly when that combined label is ``Psi+``.
    """

    kind = AttackKind.P2_1EPR

    def labels(self):
        return [0]

    def _handle(self, sim, side, mem, msg):
        if msg.kind == "item":
            mem.mine = self.engine.bell_measure(msg.payload["qubit"], self.bank.half(0, 0 if side == E0 else 1), self.rng)
            sim.log(side, "bell", {"outcome": mem.mine})
            sim.send(side, E1 if side == E0 else E0, {"bell": mem.mine}, kind="relay")
        else:
            mem.theirs = msg.payload["bell"]
        if hasattr(mem, "mine") and hasattr(mem, "theirs"):
            self._finish(sim, side, int((mem.mine ^ mem.theirs) == PSI_PLUS))

    def on_e0(self, sim, msg):
        self._handle(sim, E0, self.m0, msg)

    def on_e1(self, sim, msg):
        self._handle(sim, E1, self.m1, msg)

    def conditions(self, challenge):
        a, b = self.m0.mine, self.m1.mine
        return {"bell0": a.name, "bell1": b.name, "combined": (a ^ b).name}


class DoubleTeleport(Attack):
    """Shared machinery of the modified/oracle two-qubit attacks.

    ``E0`` teleports her qubit right through pair ``0``.  ``E1`` teleports
    her own qubit, and the half of pair ``0`` she holds, back left through
    the two channels selected by her classical string.  Not knowing that
    string yet, ``E0`` prepares every candidate channel pair: she undoes her
    own Pauli on the returning copy, applies the Hadamard the classical
    data calls for, Bell-measures, and flags ``Psi+`` as success.  Once the
    strings are exchanged both report the flag of the right channel pair.
    The residual corrections ``k'``, ``k''`` are never undone, so the report
    is faithful only when both vanish.
    """

    def candidates(self) -> list[Hashable]:
        raise NotImplementedError

    def channels(self, cand: Hashable) -> tuple[Hashable, Hashable]:
        raise NotImplementedError

    def hadamard_exp(self, y0, cand) -> int:
        raise NotImplementedError

    def key(self, y1) -> Hashable:
        raise NotImplementedError

    def _test(self, cand, k: BellOutcome, y0) -> int:
        eng = self.engine
        first, second = self.channels(cand)
        a, b = self.bank.half(first, 0), self.bank.half(second, 0)
        eng.apply_pauli(b, k.k0, k.k1)
        if self.hadamard_exp(y0, cand):
            eng.apply_gate(a, "H")
            eng.apply_gate(b, "H")
        outcome = eng.bell_measure(a, b, self.rng)
        return int(outcome == PSI_PLUS)

    def on_e0(self, sim, msg):
        m0 = self.m0
        if msg.src == V0:
            m0.y0 = msg.payload["y0"]
            m0.k = self.engine.bell_measure(msg.payload["qubit"], self.bank.half(0, 0), self.rng)
            sim.log(E0, "bell", {"k": m0.k})
            m0.success = {}
            for cand in self.candidates():
                for label in self.channels(cand):
                    self.bank.mark(label)
                m0.success[cand] = Deferred(lambda cand=cand, k=m0.k, y0=m0.y0: self._test(cand, k, y0))
            sim.send(E0, E1, {"k": m0.k, "y0": m0.y0, "success": m0.success}, kind="relay")
        else:
            m0.y1 = msg.payload["y1"]
            m0.frame = PauliFrame(m0.k, msg.payload["k1"], msg.payload["k2"])
            self._finish(sim, E0, m0.success[self.key(m0.y1)].value)

    def on_e1(self, sim, msg):
        m1, eng = self.m1, self.engine
        if msg.src == V1:
            m1.y1 = msg.payload["y1"]
            first, second = self.channels(self.key(m1.y1))
            m1.k1 = eng.bell_measure(msg.payload["qubit"], self.bank.half(first, 1), self.rng)
            m1.k2 = eng.bell_measure(self.bank.half(0, 1), self.bank.half(second, 1), self.rng)
            sim.log(E1, "bell", {"k1": m1.k1, "k2": m1.k2})
            sim.send(E1, E0, {"y1": m1.y1, "k1": m1.k1, "k2": m1.k2}, kind="relay")
        else:
            self._finish(sim, E1, msg.payload["success"][self.key(m1.y1)].value)

    def conditions(self, challenge):
        frame = self.m0.frame
        return {
            "frame_clear": frame.clear,
            "k": frame.k.name,
            "k_prime": frame.k_prime.name,
            "k_dprime": frame.k_dprime.name,
        }


class P2Mod5EPR(DoubleTeleport):
    kind = AttackKind.P2MOD_5EPR

    def labels(self):
        return [0, 1, 2, 3, 4]

    def candidates(self):
        return [0, 1]

    def channels(self, cand):
        return 2 * cand + 1, 2 * cand + 2

    def hadamard_exp(self, y0, cand):
        return y0 * cand

    def key(self, y1):
        return y1


class P2OracleFull(DoubleTeleport):
    kind = AttackKind.P2ORACLE_FULL

    def labels(self):
        n = self.ctx.n
        return [0] + [(b0, b1) for b0 in (0, 1) for b1 in range(2**n)]

    def candidates(self):
        return list(range(2**self.ctx.n))

    def channels(self, cand):
        return (0, cand), (1, cand)

    def hadamard_exp(self, y0, cand):
        return self.ctx.oracle.query(y0, int_to_bits(cand, self.ctx.n))

    def key(self, y1):
        return bits_to_int(y1)


class P1OracleBank(Attack):
    """Oracle one-qubit protocol with pairs labelled ``0 .. m-1``.

    If ``theta0`` names a banked pair, ``E0`` teleports through it and the
    answer is exact.  Otherwise she falls back to the minimum-error guess.
    ``E1`` measures every banked half ``a`` in the basis ``f(a, theta1)``
    without knowing which one carries the qubit.
    """

    kind = AttackKind.P1ORACLE_HYBRID

    def labels(self):
        full = 2**self.ctx.n
        m = full if self.ctx.m is None else self.ctx.m
        if not 0 <= m <= full:
            raise ValueError(f"bank size must be in 0..{full}; got {m}")
        return list(range(m))

    def _lambda(self, a: int, theta1) -> int:
        basis = self.ctx.oracle.query(int_to_bits(a, self.ctx.n), theta1)
        return self.engine.measure_basis(self.bank.half(a, 1), basis, self.rng)

    def _decode(self, mem) -> int:
        if mem.mode == "guess":
            return mem.guess
        w = self.ctx.oracle.query(mem.theta0, mem.theta1)
        return mem.lam[bits_to_int(mem.theta0)].value ^ mem.k[w]

    def on_e0(self, sim, msg):
        m0 = self.m0
        if msg.src == V0:
            q, m0.theta0 = msg.payload["qubit"], msg.payload["theta0"]
            a = bits_to_int(m0.theta0)
            if a < self.bank.size:
                m0.mode = "teleport"
                m0.k = self.engine.bell_measure(q, self.bank.half(a, 0), self.rng)
                sim.log(E0, "bell", {"k": m0.k, "pair": a})
                sim.send(E0, E1, {"mode": "teleport", "k": m0.k, "theta0": m0.theta0}, kind="relay")
            else:
                m0.mode = "guess"
                m0.guess = self.engine.min_error_measure(q, self.rng)
                sim.log(E0, "min-error", {"guess": m0.guess})
                sim.send(E0, E1, {"mode": "guess", "guess": m0.guess, "theta0": m0.theta0}, kind="relay")
                self._finish(sim, E0, m0.guess)
                return
        else:
            m0.theta1, m0.lam = msg.payload["theta1"], msg.payload["lambda"]
        if hasattr(m0, "mode") and hasattr(m0, "lam"):
            self._finish(sim, E0, self._decode(m0))

    def on_e1(self, sim, msg):
        m1 = self.m1
        if msg.src == V1:
            m1.theta1 = msg.payload["theta1"]
            m1.lam = [Deferred(lambda a=a, t=m1.theta1: self._lambda(a, t)) for a in range(self.bank.size)]
            for a in range(self.bank.size):
                self.bank.mark(a)
            sim.log(E1, "measure-all", {"pairs": self.bank.size})
            sim.send(E1, E0, {"theta1": m1.theta1, "lambda": m1.lam}, kind="relay")
        else:
            m1.mode, m1.theta0 = msg.payload["mode"], msg.payload["theta0"]
            m1.k, m1.guess = msg.payload.get("k"), msg.payload.get("guess")
        if hasattr(m1, "mode") and hasattr(m1, "lam"):
            self._finish(sim, E1, self._decode(m1))

    def conditions(self, challenge):
        return {"teleported": self.m0.mode == "teleport", "pairs_measured": self.bank.size}


class P1Oracle2N(P1OracleBank):
    kind = AttackKind.P1ORACLE_2N

    def labels(self):
        return list(range(2**self.ctx.n))


class NaiveWait(Attack):
    """No entanglement: ``E0`` sits on the qubit until ``E1`` relays the basis.

    The answer is exact but reaches ``V1`` too late.
    """

    kind = AttackKind.NAIVE_WAIT

    def on_e0(self, sim, msg):
        m0 = self.m0
        if msg.src == V0:
            m0.item = msg.payload
        else:
            fields = {k: v for k, v in {**m0.item, **msg.payload}.items() if k != "qubit"}
            switch = measurement_switch(Challenge(self.ctx.protocol, **fields), self.ctx.oracle)
            x = self.engine.measure_basis(m0.item["qubit"], switch, self.rng)
            sim.log(E0, "measure", {"x": x})
            sim.send(E0, E1, {"x": x}, kind="relay")
            self._finish(sim, E0, x)

    def on_e1(self, sim, msg):
        if msg.src == V1:
            sim.send(E1, E0, dict(msg.payload), kind="relay")
        else:
            self.m1.done = True
            sim.send(E1, V1, msg.payload["x"], kind="response")


ATTACKS: dict[AttackKind, type[Attack]] = {
    AttackKind.P1_INTERCEPT: P1Intercept,
    AttackKind.P1_TELEPORT_1EPR: P1Teleport,
    AttackKind.P1MOD_2EPR: P1ModBank,
    AttackKind.P2_LOCAL_MEASURE: P2Local,
    AttackKind.P2_1EPR: P2Bell1EPR,
    AttackKind.P2MOD_5EPR: P2Mod5EPR,
    AttackKind.P1ORACLE_2N: P1Oracle2N,
    AttackKind.P1ORACLE_HYBRID: P1OracleBank,
    AttackKind.P2ORACLE_FULL: P2OracleFull,
    AttackKind.NAIVE_WAIT: NaiveWait,
}


def make_attack(kind: AttackKind, ctx: AttackContext) -> Attack:
    kind = AttackKind(kind)
    if ctx.protocol not in COMPATIBLE[kind]:
        raise ValueError(f"attack/protocol mismatch: {kind.value} cannot target {ctx.protocol.value}")
    return ATTACKS[kind](ctx)


def predicted_hybrid_success(m: int, n: int) -> float:
    """Mixture of the teleport branch (exact) and the guess branch."""
    frac = m / 2**n
    return frac + (1.0 - frac) * math.cos(math.pi / 8) ** 2
