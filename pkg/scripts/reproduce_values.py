"""Print every headline number next to the value it should have.

Exact values come from branch enumeration; the Monte Carlo column uses the
given number of trials.
"""
import argparse
import math

from qpv.adversaries import AttackKind
from qpv.analysis import exact_success, inference_error, monte_carlo
from qpv.config import ScenarioConfig
from qpv.protocols import ProtocolKind

COS2 = math.cos(math.pi / 8) ** 2

ROWS = [
    ("P1 intercept", ProtocolKind.P1, AttackKind.P1_INTERCEPT, {}, None, COS2),
    ("P1 teleport, 1 pair", ProtocolKind.P1, AttackKind.P1_TELEPORT_1EPR, {}, None, 1.0),
    ("P1MOD, 2 pairs", ProtocolKind.P1MOD, AttackKind.P1MOD_2EPR, {}, None, 1.0),
    ("P1MOD, 1 pair heuristic", ProtocolKind.P1MOD, AttackKind.P1MOD_2EPR, {"m": 1}, None, 0.5 + 0.5 * COS2),
    ("P2 local, possibility rule", ProtocolKind.P2, AttackKind.P2_LOCAL_MEASURE, {}, None, 15 / 16),
    ("P2 local, misidentification", ProtocolKind.P2, AttackKind.P2_LOCAL_MEASURE, {}, "misidentified", 0.25),
    ("P2 Bell, 1 pair", ProtocolKind.P2, AttackKind.P2_1EPR, {}, None, 1.0),
    ("P2MOD 5 pairs, frame clear", ProtocolKind.P2MOD, AttackKind.P2MOD_5EPR, {}, "frame_clear", 1 / 16),
    ("P1ORACLE 2^n pairs, n=3", ProtocolKind.P1ORACLE, AttackKind.P1ORACLE_2N, {"n": 3}, None, 1.0),
    ("P2ORACLE full, n=2, frame clear", ProtocolKind.P2ORACLE, AttackKind.P2ORACLE_FULL, {"n": 2}, "frame_clear", 1 / 16),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    print(f"{'scenario':34s} {'expected':>10s} {'exact':>10s} {'mc':>8s}  95% CI")
    for label, protocol, attack, extra, condition, expected in ROWS:
        cfg = ScenarioConfig(protocol=protocol, attack=attack, seed=args.seed, **extra)
        ex = exact_success(cfg)
        est = monte_carlo(cfg, trials=args.trials)
        got = ex.probability if condition is None else ex.condition_rates[condition]
        mc = est.p_hat if condition is None else est.condition_rates[condition]
        ci = f"[{est.ci_lo:.4f}, {est.ci_hi:.4f}]" if condition is None else ""
        print(f"{label:34s} {expected:10.6f} {got:10.6f} {mc:8.4f}  {ci}")
    print(f"{'inference error (1, 0)':34s} {0.25:10.6f} {inference_error(1, 0):10.6f}")


if __name__ == "__main__":
    main()
