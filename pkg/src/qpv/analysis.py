"""Acceptance probabilities: exact branch enumeration and Monte Carlo estimates."""
from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from .adversaries import AttackKind, local_basis
from .branching import MAX_LEAVES, Leaf, enumerate_branches
from .config import ScenarioConfig, validate_config
from .protocols import OracleTable, ProtocolKind
from .rng import RngStream
from .rounds import RoundResult, run_rounds

CONFIDENCE = 0.95


@dataclass
class Estimate:
    """Monte Carlo acceptance rate with a Wilson score interval."""

    p_hat: float
    ci_lo: float
    ci_hi: float
    trials: int
    seed: int
    accepts: int = 0
    condition_rates: dict[str, float] = field(default_factory=dict)
    reasons: dict[str, int] = field(default_factory=dict)

    @property
    def ci_width(self) -> float:
        return self.ci_hi - self.ci_lo

    def contains(self, p: float) -> bool:
        return self.ci_lo <= p <= self.ci_hi

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExactResult:
    """Acceptance probability summed over every enumerated branch."""

    probability: float
    branch_count: int
    total_prob: float
    condition_rates: dict[str, float] = field(default_factory=dict)
    leaves: list[Leaf] | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("leaves")
        return out


@dataclass(frozen=True)
class LeafRecord:
    """What exact enumeration keeps about one branch for conditional checks."""

    accept: bool
    rounds: int
    challenge: dict
    values: tuple
    honest_p1: float | None
    conditions: dict
    bank_size: int
    bank_used: int


def wilson_interval(successes: int, trials: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    lo, hi = proportion_confint(successes, trials, alpha=1.0 - confidence, method="wilson")
    # statsmodels can land a few ulps outside [0, 1] or past p_hat at the edges
    p = successes / trials
    return max(0.0, min(float(lo), p)), min(1.0, max(float(hi), p))


def _condition_flags(results: Sequence[RoundResult]) -> dict[str, float]:
    """Per-round average of every boolean condition the attack reported."""
    sums: dict[str, float] = defaultdict(float)
    for r in results:
        for key, v in r.conditions.items():
            if isinstance(v, bool):
                sums[key] += v
    return {k: v / len(results) for k, v in sums.items()}


def trial_oracle(cfg: ScenarioConfig, trial: int) -> OracleTable | None:
    """A fresh random function per trial, keyed by ``(oracle_seed, trial)``."""
    if not cfg.protocol.uses_oracle:
        return None
    words = np.random.SeedSequence(cfg.oracle_seed, spawn_key=(trial,)).generate_state(2, np.uint32)
    return OracleTable(seed=(int(words[0]) << 32) | int(words[1]), n=cfg.n)


def monte_carlo(cfg: ScenarioConfig, trials: int | None = None, seed: int | None = None) -> Estimate:
    """Fraction of independent trials in which every round is accepted.

    Trial ``i`` draws all its randomness from the stream ``(seed, i)``, so
    any subset of trials can be replayed on its own.
    """
    cfg = validate_config(cfg if seed is None else cfg.replace(seed=seed))
    trials = cfg.trials if trials is None else int(trials)
    if trials < 1:
        raise ValueError(f"trials must be >= 1; got {trials}")
    accepts = 0
    cond_sums: dict[str, float] = defaultdict(float)
    reasons: dict[str, int] = defaultdict(int)
    for i in range(trials):
        results = run_rounds(cfg, RngStream(cfg.seed, (i,)), trial_oracle(cfg, i), record=False)
        ok = results[-1].accept and len(results) == cfg.rounds
        accepts += ok
        reasons[results[-1].verdict.reason.value] += 1
        for key, v in _condition_flags(results).items():
            cond_sums[key] += v
    lo, hi = wilson_interval(accepts, trials)
    return Estimate(
        p_hat=accepts / trials,
        ci_lo=lo,
        ci_hi=hi,
        trials=trials,
        seed=cfg.seed,
        accepts=accepts,
        condition_rates={k: v / trials for k, v in sorted(cond_sums.items())},
        reasons=dict(sorted(reasons.items())),
    )


def exact_success(cfg: ScenarioConfig, keep_leaves: bool = False, max_leaves: int = MAX_LEAVES) -> ExactResult:
    """Walk every challenge, queried oracle value and measurement outcome.

    Oracle values are drawn from the same branch chooser as everything
    else, and only for inputs that actually get queried, so the tree covers
    the uniform distribution over functions without listing whole tables.
    """
    cfg = validate_config(cfg)

    def play(chooser) -> LeafRecord:
        oracle = OracleTable(seed=cfg.oracle_seed, n=cfg.n, sampler=chooser) if cfg.protocol.uses_oracle else None
        results = run_rounds(cfg, chooser, oracle, record=False)
        last = results[-1]
        return LeafRecord(
            accept=last.accept and len(results) == cfg.rounds,
            rounds=len(results),
            challenge=last.challenge.to_dict(),
            values=tuple(last.response.values.get(v) for v in ("V0", "V1")),
            honest_p1=last.honest_p1,
            conditions={**last.conditions, "_flags": _condition_flags(results)},
            bank_size=last.bank_size,
            bank_used=last.bank_used,
        )

    leaves = enumerate_branches(play, max_leaves=max_leaves)
    total = math.fsum(leaf.prob for leaf in leaves)
    prob = math.fsum(leaf.prob for leaf in leaves if leaf.value.accept)
    cond: dict[str, list[float]] = defaultdict(list)
    for leaf in leaves:
        for key, v in leaf.value.conditions["_flags"].items():
            cond[key].append(leaf.prob * v)
    return ExactResult(
        probability=prob,
        branch_count=len(leaves),
        total_prob=total,
        condition_rates={k: math.fsum(v) for k, v in sorted(cond.items())},
        leaves=leaves if keep_leaves else None,
    )


def conditional_z_rates(leaves: Iterable[Leaf], condition: str | None = None) -> list[tuple[dict, float, float]]:
    """Reported ``P(z=1)`` next to the honest value, per challenge and oracle value.

    Only leaves whose ``condition`` flag is true count; ``None`` keeps all.
    Returns ``(challenge, reported, honest)`` triples.
    """
    mass: dict[tuple, float] = defaultdict(float)
    ones: dict[tuple, float] = defaultdict(float)
    meta: dict[tuple, tuple[dict, float]] = {}
    for leaf in leaves:
        rec: LeafRecord = leaf.value
        if condition is not None and not rec.conditions.get(condition):
            continue
        key = (json.dumps(rec.challenge, sort_keys=True), rec.honest_p1)
        meta[key] = (rec.challenge, rec.honest_p1)
        mass[key] += leaf.prob
        if rec.values[0] == 1:
            ones[key] += leaf.prob
    return [(meta[k][0], ones[k] / mass[k], meta[k][1]) for k in sorted(mass, key=str)]


def inference_error(alpha: complex, beta: complex) -> float:
    """Chance that comparing local outcomes in ``{|n1>, |n2>}`` misjudges same vs different.

    Closed form ``|alpha beta|^2 + |alpha+beta|^2 |alpha-beta|^2 / 4``.
    """
    alpha, beta = complex(alpha), complex(beta)
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"basis is not normalized: |alpha|^2 + |beta|^2 = {norm}")
    return abs(alpha * beta) ** 2 + 0.25 * abs(alpha + beta) ** 2 * abs(alpha - beta) ** 2


def inference_error_by_states(alpha: complex, beta: complex) -> float:
    """The same quantity summed directly over the eight challenges.

    The pair is judged "same" when the two outcomes agree; an error is
    agreement on different states or disagreement on equal ones.
    """
    n1, n2 = local_basis(complex(alpha), complex(beta))
    basis = np.array([n1, n2])
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    err = 0.0
    for theta in (0, 1):
        for x0 in (0, 1):
            for x1 in (0, 1):
                ket0 = (h if theta else np.eye(2)) @ np.eye(2)[x0]
                ket1 = (h if theta else np.eye(2)) @ np.eye(2)[x1]
                p0 = np.abs(basis.conj() @ ket0) ** 2
                p1 = np.abs(basis.conj() @ ket1) ** 2
                agree = float(p0 @ p1)
                err += agree if x0 != x1 else 1.0 - agree
    return err / 8.0


def simulated_inference_error(alpha: complex, beta: complex) -> float:
    """Misidentification rate of the local-measurement attack by branch enumeration."""
    cfg = ScenarioConfig(
        protocol=ProtocolKind.P2, attack=AttackKind.P2_LOCAL_MEASURE, alpha=alpha, beta=beta, seed=0, trials=1
    )
    return exact_success(cfg).condition_rates["misidentified"]


SWEEP_PARAMETERS = ("m", "n", "trials")


def parse_range(text: str) -> list[int]:
    """``"3"``, ``"0..8"`` (inclusive) or ``"1,2,4"``."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
        if hi_i < lo_i:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo_i, hi_i + 1))
    return [int(v) for v in text.split(",") if v.strip()]


def sweep(parameter: str, values: Sequence[int], template: ScenarioConfig) -> list[dict[str, Any]]:
    """One row per value of ``parameter``, with Monte Carlo and/or exact columns."""
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"sweep parameter must be one of {SWEEP_PARAMETERS}; got {parameter!r}")
    if not values:
        return []
    # fix the seed once so every row shares it; m stays unset unless given, so it tracks n
    first = validate_config(template.replace(**{parameter: values[0]}))
    template = template.replace(seed=first.seed, oracle_seed=first.oracle_seed)
    rows = []
    for v in values:
        cfg = validate_config(template.replace(**{parameter: v}))
        row: dict[str, Any] = {
            "protocol": cfg.protocol.value,
            "attack": "honest" if cfg.attack is None else cfg.attack.value,
            parameter: v,
            "n": cfg.n,
            "m": cfg.m,
            "trials": cfg.trials,
            "seed": cfg.seed,
        }
        if cfg.mode in ("mc", "both"):
            est = monte_carlo(cfg)
            row.update(p_hat=est.p_hat, ci_lo=est.ci_lo, ci_hi=est.ci_hi)
        if cfg.mode in ("exact", "both"):
            ex = exact_success(cfg)
            row.update(exact=ex.probability, branch_count=ex.branch_count)
        rows.append(row)
    return rows


def rows_to_csv(rows: Sequence[dict[str, Any]]) -> str:
    columns: list[str] = []
    for row in rows:
        columns += [c for c in row if c not in columns]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()
