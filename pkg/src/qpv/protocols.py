"""The six verification protocols: challenges, items, honest prover, acceptance."""
from __future__ import annotations

import functools
import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

import numpy as np

from .qstate import Engine, bb84_state

Bits = tuple[int, ...]

MAX_ORACLE_WIDTH = 16


class ProtocolKind(str, Enum):
    P1 = "P1"
    P1MOD = "P1MOD"
    P2 = "P2"
    P2MOD = "P2MOD"
    P1ORACLE = "P1ORACLE"
    P2ORACLE = "P2ORACLE"

    @property
    def one_qubit(self) -> bool:
        return self in (ProtocolKind.P1, ProtocolKind.P1MOD, ProtocolKind.P1ORACLE)

    @property
    def uses_oracle(self) -> bool:
        return self in (ProtocolKind.P1ORACLE, ProtocolKind.P2ORACLE)


def int_to_bits(v: int, n: int) -> Bits:
    return tuple((v >> (n - 1 - i)) & 1 for i in range(n))


def bits_to_int(b: Bits) -> int:
    v = 0
    for bit in b:
        v = (v << 1) | bit
    return v


@dataclass(frozen=True)
class Challenge:
    """Per-round secret randomness; fields a protocol does not use stay ``None``."""

    kind: ProtocolKind
    x: int | None = None
    x0: int | None = None
    x1: int | None = None
    theta: int | None = None
    theta0: int | Bits | None = None
    theta1: int | Bits | None = None
    y0: int | Bits | None = None
    y1: int | Bits | None = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind.value}
        for name in ("x", "x0", "x1", "theta", "theta0", "theta1", "y0", "y1"):
            v = getattr(self, name)
            if v is not None:
                out[name] = list(v) if isinstance(v, tuple) else v
        return out


class OracleError(ValueError):
    pass


@dataclass
class OracleTable:
    """Random function ``{0,1}^n x {0,1}^n -> {0,1}``, lazily sampled and memoized.

    Without a ``sampler`` the value for a fresh input is a hash of
    ``(seed, n, input)``, so every holder of the seed sees the same
    function.  With a ``sampler`` (a stream or branch chooser) each fresh
    input draws a fair bit from it instead; exact enumeration uses this to
    branch only on inputs that are actually queried.
    """

    seed: int
    n: int
    sampler: Any = None
    memo: dict[tuple[Bits, Bits], int] = field(default_factory=dict)
    calls: int = 0

    def query(self, a: Bits, b: Bits) -> int:
        a, b = tuple(a), tuple(b)
        if len(a) != self.n or len(b) != self.n:
            raise OracleError(f"oracle takes two {self.n}-bit strings; got lengths {len(a)}, {len(b)}")
        if any(v not in (0, 1) for v in a + b):
            raise OracleError("oracle inputs must be bits")
        self.calls += 1
        key = (a, b)
        if key not in self.memo:
            if self.sampler is not None:
                self.memo[key] = self.sampler.bit()
            else:
                self.memo[key] = self._hash_bit(a + b)
        return self.memo[key]

    def _hash_bit(self, bits: Bits) -> int:
        h = hashlib.blake2b(digest_size=8)
        h.update(self.seed.to_bytes(8, "little", signed=False))
        h.update(self.n.to_bytes(2, "little"))
        h.update(bytes(bits))
        return h.digest()[0] & 1

    @property
    def distinct_queries(self) -> int:
        return len(self.memo)

    def table(self) -> dict[tuple[Bits, Bits], int]:
        """Evaluate every input; only sensible for small ``n``."""
        out = {}
        for a in range(2**self.n):
            for b in range(2**self.n):
                ab = (int_to_bits(a, self.n), int_to_bits(b, self.n))
                out[ab] = self.query(*ab)
        return out


def oracle_query(table: OracleTable, a: Bits, b: Bits) -> int:
    return table.query(a, b)


def draw_challenge(kind: ProtocolKind, n: int, rng) -> Challenge:
    kind = ProtocolKind(kind)
    if kind.uses_oracle and not 1 <= n <= MAX_ORACLE_WIDTH:
        raise ValueError(f"oracle width must be in 1..{MAX_ORACLE_WIDTH}; got {n}")

    def string() -> Bits:
        return int_to_bits(rng.integer(2**n), n)

    if kind is ProtocolKind.P1:
        return Challenge(kind, x=rng.bit(), theta=rng.bit())
    if kind is ProtocolKind.P1MOD:
        return Challenge(kind, x=rng.bit(), theta0=rng.bit(), theta1=rng.bit())
    if kind is ProtocolKind.P1ORACLE:
        return Challenge(kind, x=rng.bit(), theta0=string(), theta1=string())
    if kind is ProtocolKind.P2:
        return Challenge(kind, x0=rng.bit(), x1=rng.bit(), theta=rng.bit())
    if kind is ProtocolKind.P2MOD:
        return Challenge(kind, x0=rng.bit(), x1=rng.bit(), theta=rng.bit(), y0=rng.bit(), y1=rng.bit())
    return Challenge(kind, x0=rng.bit(), x1=rng.bit(), theta=rng.bit(), y0=string(), y1=string())


def measurement_switch(challenge: Challenge, oracle: OracleTable | None = None) -> int:
    """The Hadamard exponent the honest prover derives from the classical items.

    One-qubit family: the measurement basis (``theta``, ``theta0*theta1``
    or ``f(theta0, theta1)``).  Two-qubit family: the exponent ``w`` of the
    ``H^w`` applied to both qubits before the ``Psi+`` test.
    """
    k = challenge.kind
    if k is ProtocolKind.P1:
        return challenge.theta
    if k is ProtocolKind.P1MOD:
        return challenge.theta0 * challenge.theta1
    if k is ProtocolKind.P1ORACLE:
        return oracle.query(challenge.theta0, challenge.theta1)
    if k is ProtocolKind.P2:
        return 0
    if k is ProtocolKind.P2MOD:
        return challenge.y0 * challenge.y1
    return oracle.query(challenge.y0, challenge.y1)


def prepare_items(
    kind: ProtocolKind, challenge: Challenge, engine: Engine, oracle: OracleTable | None = None
) -> tuple[dict, dict]:
    """Allocate the verifiers' qubits and bundle what ``V0`` and ``V1`` send."""
    kind = ProtocolKind(kind)
    if challenge.kind is not kind:
        raise ValueError(f"challenge is for {challenge.kind.value}, not {kind.value}")
    c = challenge
    if kind.one_qubit:
        basis = measurement_switch(c, oracle)
        q = engine.alloc_state(bb84_state(c.x, basis))
        if kind is ProtocolKind.P1:
            return {"qubit": q}, {"theta": c.theta}
        return {"qubit": q, "theta0": c.theta0}, {"theta1": c.theta1}
    q0 = engine.alloc_state(bb84_state(c.x0, c.theta))
    q1 = engine.alloc_state(bb84_state(c.x1, c.theta))
    if kind is ProtocolKind.P2:
        return {"qubit": q0}, {"qubit": q1}
    return {"qubit": q0, "y0": c.y0}, {"qubit": q1, "y1": c.y1}


def _classical_view(kind: ProtocolKind, item0: Mapping, item1: Mapping) -> Challenge:
    """Rebuild the classical part of a challenge from what arrived at the prover."""
    fields = {k: v for item in (item0, item1) for k, v in item.items() if k != "qubit"}
    return Challenge(kind, **fields)


def honest_prover(
    kind: ProtocolKind, items: tuple[Mapping, Mapping], oracle: OracleTable | None, engine: Engine, rng
) -> int:
    """The measurement an honest prover at ``pos`` performs once both items are in."""
    kind = ProtocolKind(kind)
    item0, item1 = items
    if "qubit" not in item0 or (not kind.one_qubit and "qubit" not in item1):
        raise ValueError("missing qubit item")
    view = _classical_view(kind, item0, item1)
    switch = measurement_switch(view, oracle)
    if kind.one_qubit:
        return engine.measure_basis(item0["qubit"], switch, rng)
    q0, q1 = item0["qubit"], item1["qubit"]
    if switch:
        engine.apply_gate(q0, "H")
        engine.apply_gate(q1, "H")
    return engine.project_psi_plus(q0, q1, rng)


def honest_z_distribution(kind: ProtocolKind, challenge: Challenge, oracle: OracleTable | None = None) -> float:
    """Probability the honest prover reports ``z = 1`` on this challenge."""
    kind = ProtocolKind(kind)
    if kind.one_qubit:
        raise ValueError(f"{kind.value} has no z report")
    w = measurement_switch(challenge, oracle)
    return _psi_plus_probability(challenge.x0, challenge.x1, challenge.theta, w)


@functools.lru_cache(maxsize=None)
def _psi_plus_probability(x0: int, x1: int, theta: int, w: int) -> float:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    hw = h if w else np.eye(2)
    ht = h if theta else np.eye(2)
    ket = [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)]
    state = np.kron(hw @ ht @ ket[x0], hw @ ht @ ket[x1])
    psi_plus = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2.0)
    return float(abs(np.vdot(psi_plus, state)) ** 2)


@dataclass
class Response:
    values: dict[str, int]
    arrivals: dict[str, float] = field(default_factory=dict)


def accept_predicate(
    kind: ProtocolKind,
    challenge: Challenge,
    response: Response | int,
    oracle: OracleTable | None = None,
) -> bool:
    """Consistency of the reported value(s), timing aside.

    One-qubit family: every verifier must see ``x' = x``.  Two-qubit
    family: every reported ``z`` must have nonzero probability for an
    honest prover on this challenge.
    """
    kind = ProtocolKind(kind)
    values = list(response.values.values()) if isinstance(response, Response) else [response]
    if not values:
        return False
    if kind.one_qubit:
        return all(v == challenge.x for v in values)
    p1 = honest_z_distribution(kind, challenge, oracle)
    possible = {0: 1.0 - p1 > 1e-12, 1: p1 > 1e-12}
    return all(v in (0, 1) and possible[v] for v in values)
