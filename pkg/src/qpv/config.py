"""Scenario configuration and validation."""
from __future__ import annotations

import dataclasses
import secrets
from dataclasses import dataclass, field
from typing import Any

from .adversaries import COMPATIBLE, AttackKind, bank_requirement
from .protocols import MAX_ORACLE_WIDTH, ProtocolKind

MODES = ("mc", "exact", "both")

PROTOCOL_ALIASES = {
    "p1": ProtocolKind.P1,
    "p1-mod": ProtocolKind.P1MOD,
    "p2": ProtocolKind.P2,
    "p2-mod": ProtocolKind.P2MOD,
    "p1-oracle": ProtocolKind.P1ORACLE,
    "p2-oracle": ProtocolKind.P2ORACLE,
}

ATTACK_ALIASES = {
    "intercept": AttackKind.P1_INTERCEPT,
    "teleport-1epr": AttackKind.P1_TELEPORT_1EPR,
    "2epr": AttackKind.P1MOD_2EPR,
    "local": AttackKind.P2_LOCAL_MEASURE,
    "bell-1epr": AttackKind.P2_1EPR,
    "5epr": AttackKind.P2MOD_5EPR,
    "oracle-2n": AttackKind.P1ORACLE_2N,
    "hybrid": AttackKind.P1ORACLE_HYBRID,
    "p2oracle": AttackKind.P2ORACLE_FULL,
    "naive-wait": AttackKind.NAIVE_WAIT,
}


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def parse_protocol(name: str | ProtocolKind) -> ProtocolKind:
    if isinstance(name, ProtocolKind):
        return name
    key = str(name).strip()
    if key.lower() in PROTOCOL_ALIASES:
        return PROTOCOL_ALIASES[key.lower()]
    try:
        return ProtocolKind(key.upper().replace("-", ""))
    except ValueError:
        raise ConfigError([f"unknown protocol {name!r}; choose from {', '.join(PROTOCOL_ALIASES)}"]) from None


def parse_attack(name: str | AttackKind | None) -> AttackKind | None:
    if name is None or isinstance(name, AttackKind):
        return name
    key = str(name).strip()
    if key.lower() == "honest":
        return None
    if key.lower() in ATTACK_ALIASES:
        return ATTACK_ALIASES[key.lower()]
    try:
        return AttackKind(key.upper().replace("-", "_"))
    except ValueError:
        raise ConfigError([f"unknown attack {name!r}; choose from honest, {', '.join(ATTACK_ALIASES)}"]) from None


@dataclass
class ScenarioConfig:
    protocol: ProtocolKind = ProtocolKind.P1
    attack: AttackKind | None = None
    d: float = 1.0
    e0_pos: float | None = None
    e1_pos: float | None = None
    n: int = 3
    m: int | None = None
    trials: int = 100_000
    seed: int | None = None
    oracle_seed: int | None = None
    mode: str = "mc"
    alpha: complex = 1.0
    beta: complex = 0.0
    rounds: int = 1
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def honest(self) -> bool:
        return self.attack is None

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["protocol"] = self.protocol.value
        out["attack"] = "honest" if self.attack is None else self.attack.value
        for key in ("alpha", "beta"):
            v = complex(out[key])
            out[key] = v.real if v.imag == 0 else [v.real, v.imag]
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ScenarioConfig":
        data = dict(data)
        for key in ("alpha", "beta"):
            if isinstance(data.get(key), (list, tuple)):
                data[key] = complex(*data[key])
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown config key {k!r}" for k in unknown])
        return cls(**data)


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Fill defaults and reject impossible combinations, listing every problem."""
    problems: list[str] = []
    try:
        protocol = parse_protocol(cfg.protocol)
    except ConfigError as e:
        raise ConfigError(e.problems) from None
    try:
        attack = parse_attack(cfg.attack)
    except ConfigError as e:
        raise ConfigError(e.problems) from None

    d = float(cfg.d)
    if not d > 0:
        problems.append(f"d must be positive; got {d}")
    e0 = d / 2 if cfg.e0_pos is None else float(cfg.e0_pos)
    e1 = 3 * d / 2 if cfg.e1_pos is None else float(cfg.e1_pos)
    if not 0 < e0 < d:
        problems.append(f"E0 must lie in (0,d); got {e0}")
    if not d < e1 < 2 * d:
        problems.append(f"E1 must lie in (d,2d); got {e1}")

    if not 1 <= int(cfg.n) <= MAX_ORACLE_WIDTH:
        problems.append(f"n must be in 1..{MAX_ORACLE_WIDTH}; got {cfg.n}")
    n = int(cfg.n)

    m = cfg.m
    if attack is not None:
        if protocol not in COMPATIBLE[attack]:
            problems.append(f"attack/protocol mismatch: attack {attack.value} cannot target protocol {protocol.value}")
        need = bank_requirement(attack, n)
        if m is None:
            m = need
        elif not 0 <= int(m) <= need:
            problems.append(f"m must be in 0..{need} for {attack.value}; got {m}")
        elif int(m) != need and attack not in (AttackKind.P1ORACLE_HYBRID, AttackKind.P1MOD_2EPR):
            problems.append(f"{attack.value} needs exactly {need} pairs; got m={m}")
    elif m not in (None, 0):
        problems.append("an honest scenario has no entanglement bank; drop m")
    m = None if m is None else int(m)

    if int(cfg.trials) < 1:
        problems.append(f"trials must be >= 1; got {cfg.trials}")
    if int(cfg.rounds) < 1:
        problems.append(f"rounds must be >= 1; got {cfg.rounds}")
    if cfg.mode not in MODES:
        problems.append(f"mode must be one of {MODES}; got {cfg.mode!r}")

    alpha, beta = complex(cfg.alpha), complex(cfg.beta)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-9:
        problems.append(f"|alpha|^2 + |beta|^2 must be 1; got {abs(alpha) ** 2 + abs(beta) ** 2}")

    if problems:
        raise ConfigError(problems)

    seed = secrets.randbits(63) if cfg.seed is None else int(cfg.seed)
    oracle_seed = seed if cfg.oracle_seed is None else int(cfg.oracle_seed)
    return dataclasses.replace(
        cfg,
        protocol=protocol,
        attack=attack,
        d=d,
        e0_pos=e0,
        e1_pos=e1,
        n=n,
        m=m,
        trials=int(cfg.trials),
        seed=seed,
        oracle_seed=oracle_seed,
        alpha=alpha,
        beta=beta,
        rounds=int(cfg.rounds),
    )
