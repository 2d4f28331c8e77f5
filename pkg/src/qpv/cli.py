"""Command-line scenario runner: ``qpv run`` and ``qpv sweep``."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from .adversaries import AttackKind
from .analysis import (
    SWEEP_PARAMETERS,
    exact_success,
    inference_error,
    monte_carlo,
    parse_range,
    rows_to_csv,
    sweep,
    trial_oracle,
)
from .branching import BranchExplosion
from .config import ATTACK_ALIASES, MODES, PROTOCOL_ALIASES, ConfigError, ScenarioConfig, validate_config
from .rng import RngStream
from .rounds import run_round
from .simnet import jsonable

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpv", description="Simulate 1-D quantum position verification.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("run", "evaluate one scenario"), ("sweep", "evaluate a scenario over a parameter range")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", type=Path, help="JSON file with scenario fields; flags override it")
        p.add_argument("--protocol", help=f"one of {', '.join(PROTOCOL_ALIASES)}")
        p.add_argument("--attack", help=f"honest or one of {', '.join(ATTACK_ALIASES)}")
        p.add_argument("--mode", choices=MODES)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--n", type=int if name == "run" else str, help="oracle width" + (" (range ok)" if name == "sweep" else ""))
        p.add_argument("--m", type=int if name == "run" else str, help="bank size" + (" (range like 0..8)" if name == "sweep" else ""))
        p.add_argument("--d", type=float)
        p.add_argument("--e0-pos", type=float)
        p.add_argument("--e1-pos", type=float)
        p.add_argument("--alpha", type=_complex)
        p.add_argument("--beta", type=_complex)
        p.add_argument("--rounds", type=int)
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        if name == "sweep":
            p.add_argument("--param", choices=SWEEP_PARAMETERS, help="swept field; inferred from the range flag if omitted")
            p.add_argument("--values", help="range for --param, e.g. 0..8 or 1,2,4")
    return parser


FLAG_FIELDS = ("protocol", "attack", "mode", "trials", "seed", "d", "e0_pos", "e1_pos", "alpha", "beta", "rounds")


def _scenario(args: argparse.Namespace) -> dict[str, Any]:
    data: dict[str, Any] = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError([f"cannot read config {args.config}: {e}"]) from None
        if not isinstance(data, dict):
            raise ConfigError(["config file must hold a JSON object"])
    for key in FLAG_FIELDS:
        v = getattr(args, key)
        if v is not None:
            data[key] = v
    return data


def _transcript_sample(cfg: ScenarioConfig) -> list[dict]:
    """Replay of the first round of Monte Carlo trial 0."""
    r = run_round(cfg, RngStream(cfg.seed, (0,)), trial_oracle(cfg, 0), record=True)
    return [e.to_dict() for e in r.transcript.events] + [
        {"verdict": r.verdict.reason.value, "per_verifier": jsonable(r.verdict.per_verifier), "conditions": jsonable(r.conditions)}
    ]


def run_scenario(cfg: ScenarioConfig) -> dict[str, Any]:
    """The report body for one validated scenario."""
    report: dict[str, Any] = {"scenario": cfg.to_dict()}
    conditions: dict[str, Any] = {}
    if cfg.mode in ("mc", "both"):
        est = monte_carlo(cfg)
        report.update(p_hat=est.p_hat, ci=[est.ci_lo, est.ci_hi], trials=est.trials, reasons=est.reasons)
        conditions["mc"] = est.condition_rates
    if cfg.mode in ("exact", "both"):
        ex = exact_success(cfg)
        report.update(exact=ex.probability, branch_count=ex.branch_count, total_prob=ex.total_prob)
        conditions["exact"] = ex.condition_rates
    report["condition_rates"] = conditions
    if cfg.attack is AttackKind.P2_LOCAL_MEASURE:
        report["inference_error"] = inference_error(cfg.alpha, cfg.beta)
    report["transcript_sample"] = _transcript_sample(cfg)
    return report


def _sweep_values(args: argparse.Namespace, data: dict[str, Any]) -> tuple[str, list[int]]:
    ranged = {k: getattr(args, k) for k in ("m", "n") if getattr(args, k) is not None}
    if args.param is not None:
        text = args.values if args.values is not None else ranged.pop(args.param, None)
        if text is None:
            raise ConfigError([f"sweep over {args.param} needs --values or --{args.param}"])
        param = args.param
    else:
        multi = [k for k, v in ranged.items() if len(parse_range(v)) > 1]
        if len(multi) != 1:
            raise ConfigError(["sweep needs exactly one ranged flag (--m or --n) or --param/--values"])
        param = multi[0]
        text = ranged.pop(param)
    for k, v in ranged.items():
        if k != param:
            (single,) = parse_range(v)
            data[k] = single
    return param, parse_range(str(text))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        data = _scenario(args)
        if args.command == "run":
            for k in ("n", "m"):
                if getattr(args, k) is not None:
                    data[k] = getattr(args, k)
            cfg = validate_config(ScenarioConfig.from_dict(data))
        else:
            param, values = _sweep_values(args, data)
            cfg = ScenarioConfig.from_dict(data)
            for v in values:
                validate_config(cfg.replace(**{param: v}))
    except (ConfigError, ValueError, TypeError) as e:
        for p in getattr(e, "problems", [str(e)]):
            print(f"qpv: config error: {p}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "run":
            report = run_scenario(cfg)
        else:
            rows = sweep(param, values, cfg)
            scenario = validate_config(cfg.replace(**{param: values[0]}, seed=rows[0]["seed"])).to_dict()
            report = {"scenario": scenario, "parameter": param, "rows": rows}
    except (BranchExplosion, ArithmeticError, RuntimeError, ValueError) as e:
        print(f"qpv: runtime failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    report["wall_time"] = time.perf_counter() - started
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    if args.command == "sweep":
        (args.out / "sweep.csv").write_text(rows_to_csv(report["rows"]))
    summary = {k: report[k] for k in ("p_hat", "ci", "exact", "branch_count", "inference_error") if k in report}
    print(json.dumps(summary if args.command == "run" else {"rows": len(report["rows"])}, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
