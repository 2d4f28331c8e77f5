"""Factored pure-state engine for few-qubit systems.

The global state is kept as a registry of independent tensor factors
(:class:`Cluster`).  Two clusters are merged only when an operation spans
both, and qubits consumed by a destructive measurement are contracted out
of their cluster.  Global phases are never tracked.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

NORM_TOL = 1e-9
# A measurement branch whose (unsquared) norm falls below this is never sampled.
BRANCH_NORM_EPS = 1e-12

SQRT1_2 = 1.0 / math.sqrt(2.0)
COS_PI_8 = math.cos(math.pi / 8)
SIN_PI_8 = math.sin(math.pi / 8)


class QubitError(ValueError):
    """Unknown, consumed, or repeated qubit handle."""


class NormalizationError(ValueError):
    pass


class QubitId:
    """Opaque handle; ids are never reused within one engine."""

    __slots__ = ("id",)

    def __init__(self, id: int):
        self.id = id

    def __eq__(self, other) -> bool:
        return isinstance(other, QubitId) and other.id == self.id

    def __lt__(self, other: "QubitId") -> bool:
        return self.id < other.id

    def __hash__(self) -> int:
        return hash(self.id)

    def __repr__(self) -> str:
        return f"q{self.id}"


class Gate(str, Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"


GATES: dict[Gate, np.ndarray] = {
    Gate.I: np.eye(2, dtype=complex),
    Gate.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Gate.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Gate.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    Gate.H: np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2,
}

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def hadamard_power(bit: int) -> np.ndarray:
    return GATES[Gate.H] if bit else GATES[Gate.I]


def bb84_state(x: int, theta: int) -> np.ndarray:
    """Amplitudes of ``H^theta |x>``."""
    return hadamard_power(theta) @ (KET1 if x else KET0)


# Minimum-error discrimination basis for the four BB84 states.
MIN_ERROR_BASIS = np.array([[COS_PI_8, SIN_PI_8], [-SIN_PI_8, COS_PI_8]], dtype=complex)
BB84_BASES = tuple(np.array([bb84_state(0, t), bb84_state(1, t)]) for t in (0, 1))


@dataclass(frozen=True)
class BellOutcome:
    """Bell outcome ``(k0, k1)``: the projected state is ``(X^k0 Z^k1 (x) I)|Phi+>``.

    With this labelling a teleported qubit arrives as ``X^k0 Z^k1 |psi>``.
    """

    k0: int
    k1: int

    def __iter__(self):
        return iter((self.k0, self.k1))

    def __getitem__(self, i: int) -> int:
        return (self.k0, self.k1)[i]

    @property
    def index(self) -> int:
        return 2 * self.k0 + self.k1

    @property
    def name(self) -> str:
        return BELL_NAMES[(self.k0, self.k1)]

    def __xor__(self, other: "BellOutcome") -> "BellOutcome":
        return BellOutcome(self.k0 ^ other.k0, self.k1 ^ other.k1)


BELL_NAMES = {(0, 0): "Phi+", (0, 1): "Phi-", (1, 0): "Psi+", (1, 1): "Psi-"}
PSI_PLUS = BellOutcome(1, 0)


def bell_vector(k0: int, k1: int) -> np.ndarray:
    phi_plus = np.array([SQRT1_2, 0, 0, SQRT1_2], dtype=complex)
    op = np.linalg.matrix_power(GATES[Gate.X], k0) @ np.linalg.matrix_power(GATES[Gate.Z], k1)
    return np.kron(op, GATES[Gate.I]) @ phi_plus


BELL_BASIS = np.array([bell_vector(k0, k1) for k0 in (0, 1) for k1 in (0, 1)])
BELL_OUTCOMES = tuple(BellOutcome(k0, k1) for k0 in (0, 1) for k1 in (0, 1))
PSI_PLUS_VEC = BELL_BASIS[PSI_PLUS.index]


@dataclass
class Cluster:
    """One tensor factor: ``amps`` has length ``2**len(qubits)``, first qubit most significant."""

    qubits: list[QubitId]
    amps: np.ndarray

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def copy(self) -> "Cluster":
        return Cluster(list(self.qubits), self.amps.copy())

    def to_dict(self) -> dict:
        return {
            "qubits": [q.id for q in self.qubits],
            "amps": [[float(a.real), float(a.imag)] for a in self.amps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass
class Engine:
    """Registry of clusters plus the operations the protocols need.

    Stochastic operations take an explicit stream with a
    ``choice(probs) -> int`` method; the engine owns no randomness.
    """

    _where: dict[QubitId, Cluster] = field(default_factory=dict)
    _dead: set[QubitId] = field(default_factory=set)
    _next: int = 0
    ops: int = 0

    # -- allocation ------------------------------------------------------

    def _fresh(self) -> QubitId:
        q = QubitId(self._next)
        self._next += 1
        return q

    def _register(self, cluster: Cluster) -> None:
        for q in cluster.qubits:
            self._where[q] = cluster

    def alloc_qubit(self, amp0: complex = 1.0, amp1: complex = 0.0) -> QubitId:
        amps = np.array([amp0, amp1], dtype=complex)
        n = float(np.vdot(amps, amps).real)
        if not np.all(np.isfinite(amps)) or abs(n - 1.0) > NORM_TOL:
            raise NormalizationError(f"|amp0|^2 + |amp1|^2 = {n}, expected 1")
        q = self._fresh()
        self._register(Cluster([q], amps))
        self.ops += 1
        return q

    def alloc_state(self, amps: Sequence[complex]) -> QubitId:
        return self.alloc_qubit(amps[0], amps[1])

    def alloc_epr(self) -> tuple[QubitId, QubitId]:
        a, b = self._fresh(), self._fresh()
        self._register(Cluster([a, b], BELL_BASIS[0].copy()))
        self.ops += 1
        return a, b

    # -- bookkeeping -----------------------------------------------------

    def live(self, q: QubitId) -> bool:
        return q in self._where

    def _cluster(self, q: QubitId) -> Cluster:
        try:
            return self._where[q]
        except KeyError:
            state = "consumed" if q in self._dead else "unknown"
            raise QubitError(f"{q!r} is {state}") from None

    def clusters(self) -> list[Cluster]:
        seen: dict[int, Cluster] = {}
        for c in self._where.values():
            seen.setdefault(id(c), c)
        return list(seen.values())

    def state_of(self, q: QubitId) -> Cluster:
        return self._cluster(q).copy()

    def check_invariants(self) -> None:
        for c in self.clusters():
            if not np.all(np.isfinite(c.amps)):
                raise NormalizationError(f"non-finite amplitude in cluster {c.qubits}")
            if abs(c.norm() - 1.0) > NORM_TOL:
                raise NormalizationError(f"cluster {c.qubits} has norm {c.norm()}")
            if len(c.amps) != 2 ** len(c.qubits):
                raise AssertionError("cluster shape mismatch")
        owners = [q for c in self.clusters() for q in c.qubits]
        if len(owners) != len(set(owners)) or set(owners) != set(self._where):
            raise AssertionError("qubit registered in more than one cluster")

    def _gather(self, qs: Sequence[QubitId]) -> Cluster:
        """Merge the clusters holding ``qs`` and reorder so ``qs`` lead."""
        first = self._cluster(qs[0])
        j = len(qs)
        if first.qubits[:j] == list(qs):
            return first
        if len(set(qs)) != j:
            raise QubitError(f"repeated qubit in {list(qs)}")
        clusters: list[Cluster] = []
        for q in qs:
            c = self._cluster(q)
            if all(c is not o for o in clusters):
                clusters.append(c)
        merged = clusters[0]
        for c in clusters[1:]:
            merged = Cluster(merged.qubits + c.qubits, np.outer(merged.amps, c.amps).reshape(-1))
        order = list(qs) + [q for q in merged.qubits if q not in qs]
        if order != merged.qubits:
            k = len(merged.qubits)
            perm = [merged.qubits.index(q) for q in order]
            tensor = merged.amps.reshape((2,) * k).transpose(perm)
            merged = Cluster(order, np.ascontiguousarray(tensor).reshape(-1))
        self._register(merged)
        return merged

    # -- unitaries -------------------------------------------------------

    def apply_gate(self, q: QubitId, g: Gate | str | np.ndarray) -> None:
        u = g if isinstance(g, np.ndarray) else GATES[Gate(g)]
        c = self._cluster(q)
        axis = c.qubits.index(q)
        left = 1 << axis
        right = len(c.amps) // (left * 2)
        c.amps = np.matmul(u, c.amps.reshape(left, 2, right)).reshape(-1)
        self.ops += 1

    def apply_pauli(self, q: QubitId, x: int, z: int) -> None:
        """Apply ``X^x Z^z`` (``Z`` first)."""
        if z:
            self.apply_gate(q, Gate.Z)
        if x:
            self.apply_gate(q, Gate.X)

    # -- measurements ----------------------------------------------------

    def _project(self, qs: Sequence[QubitId], basis: np.ndarray, rng, consume: bool) -> int:
        """Measure ``qs`` in the orthonormal rows of ``basis`` (shape ``(r, 2**len(qs))``)."""
        c = self._gather(qs)
        j = len(qs)
        tensor = c.amps.reshape(1 << j, len(c.amps) >> j)
        branches = basis.conj() @ tensor
        weights = (branches.real**2 + branches.imag**2).sum(axis=1)
        probs = [float(p) if p >= BRANCH_NORM_EPS**2 else 0.0 for p in weights]
        i = rng.choice(probs)
        post = branches[i] / math.sqrt(probs[i])
        rest = c.qubits[j:]
        for q in c.qubits:
            del self._where[q]
        if consume:
            self._dead.update(qs)
            if rest:
                self._register(Cluster(list(rest), post))
        else:
            self._register(Cluster(list(c.qubits), np.outer(basis[i], post).reshape(-1)))
        self.ops += 1
        return i

    def measure_basis(self, q: QubitId, theta: int, rng) -> int:
        """Measure in ``{H^theta|0>, H^theta|1>}``; the qubit stays live."""
        return self._project([q], BB84_BASES[theta], rng, consume=False)

    def min_error_measure(self, q: QubitId, rng) -> int:
        return self._project([q], MIN_ERROR_BASIS, rng, consume=False)

    def measure_in(self, q: QubitId, basis: Sequence[np.ndarray], rng) -> int:
        """Projective measurement in an arbitrary orthonormal single-qubit basis."""
        return self._project([q], np.asarray(basis, dtype=complex), rng, consume=False)

    def bell_measure(self, q1: QubitId, q2: QubitId, rng) -> BellOutcome:
        i = self._project([q1, q2], BELL_BASIS, rng, consume=True)
        return BELL_OUTCOMES[i]

    def project_psi_plus(self, q1: QubitId, q2: QubitId, rng) -> int:
        """Two-outcome test for ``|Psi+>``; both qubits are consumed.

        If the pair shares a cluster with other qubits the complement branch
        is resolved within the Bell basis so the remainder stays pure; once
        the pair is discarded this is indistinguishable from the coarse
        projection.
        """
        if q1 == q2:
            raise QubitError(f"repeated qubit {q1!r}")
        c = self._gather([q1, q2])
        if len(c.qubits) > 2:
            return int(self.bell_measure(q1, q2, rng) == PSI_PLUS)
        amp = complex(np.vdot(PSI_PLUS_VEC, c.amps))
        p1 = min(1.0, abs(amp) ** 2)
        p0 = max(0.0, 1.0 - p1)
        probs = [p if math.sqrt(p) >= BRANCH_NORM_EPS else 0.0 for p in (p0, p1)]
        z = rng.choice(probs)
        for q in (q1, q2):
            del self._where[q]
        self._dead.update((q1, q2))
        self.ops += 1
        return z


class Deferred:
    """A memoized thunk standing in for a measurement record not yet read.

    Adversaries measure many qubits of which only a few are ever consulted.
    Sampling a measurement lazily, at first read, gives the same joint
    distribution provided nothing else acts on the measured qubits in the
    meantime (operations on other qubits commute with it).  The enumerator
    then only branches on records somebody actually looks at.
    """

    __slots__ = ("_thunk", "_value", "_done")

    def __init__(self, thunk: Callable[[], object]):
        self._thunk = thunk
        self._value = None
        self._done = False

    @property
    def value(self):
        if not self._done:
            self._value = self._thunk()
            self._done = True
            self._thunk = None
        return self._value

    @property
    def resolved(self) -> bool:
        return self._done

    def peek(self):
        return self._value if self._done else None

    def __repr__(self) -> str:
        return f"Deferred({self._value!r})" if self._done else "Deferred(<pending>)"


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) ** 2)


def random_qubit_state(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def tensor_all(vectors: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out
