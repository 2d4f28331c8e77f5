"""Success of the partial-bank oracle attack against the number of pairs.

Writes one CSV row per bank size with the exact value, the Monte Carlo
estimate, the mixture prediction and the lower bound max{m/2^n, cos^2(pi/8)}.
"""
import argparse
import math
import sys

from qpv.adversaries import AttackKind, predicted_hybrid_success
from qpv.analysis import rows_to_csv, sweep
from qpv.config import ScenarioConfig
from qpv.protocols import ProtocolKind


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    args = parser.parse_args()

    template = ScenarioConfig(
        protocol=ProtocolKind.P1ORACLE, attack=AttackKind.P1ORACLE_HYBRID, n=args.n,
        trials=args.trials, seed=args.seed, mode="both",
    )
    rows = sweep("m", range(2**args.n + 1), template)
    for row in rows:
        m = row["m"]
        row["predicted"] = predicted_hybrid_success(m, args.n)
        row["bound"] = max(m / 2**args.n, math.cos(math.pi / 8) ** 2)
    text = rows_to_csv(rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
