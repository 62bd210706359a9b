from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path
from typing import List, Optional

from .breakdowns import BreakdownLevel
from .errors import RehorizonError, VerificationError
from .experimentConfig import FAMILIES, ExperimentConfig
from .features import FeatureVariant
from . import commands

logger = logging.getLogger("rehorizon")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed_list(text: str) -> List[int]:
    """`0..9`, `3` or `1,4,7`."""
    if ".." in text:
        start, stop = text.split("..")
        return list(range(int(start), int(stop) + 1))
    return [int(s) for s in text.split(",") if s.strip()]


def solution_path_for(path: Optional[Path], strategy: str, several: bool) -> Optional[Path]:
    """`sol.yaml` becomes `sol_first_0.5.yaml` when one solve writes a solution per strategy."""
    if path is None or not several:
        return path
    tag = re.sub(r"[^A-Za-z0-9.]+", "_", strategy)
    return path.with_name(f"{path.stem}_{tag}{path.suffix}")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="YAML experiment config; flags override its fields")
    parser.add_argument("--family", choices=sorted(FAMILIES))
    parser.add_argument("--machines", dest="num_machines", type=int)
    parser.add_argument("--jobs", dest="num_jobs", type=int)
    parser.add_argument("--ops", dest="ops_per_job", type=int)
    parser.add_argument("--seeds", type=_seed_list, help="instance seeds, e.g. 0..9 or 1,2,3")
    parser.add_argument("--H", type=int)
    parser.add_argument("--S", type=int)
    parser.add_argument("--budget", help="moves:<max>[,<stall>] or wall:<limit>[,<stall>]")
    parser.add_argument("--strategy", dest="strategies", action="append")
    parser.add_argument("--breakdown", choices=[level.name.lower() for level in BreakdownLevel])
    parser.add_argument("--noise", action="store_true", default=None)
    parser.add_argument("--Q", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--model")
    parser.add_argument("--instances", help="instance directory")
    parser.add_argument("--output", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rehorizon", description="Rolling-horizon FJSP experiments with learned fixing.")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _common(sub.add_parser("gen", help="write instance files"))

    solve = sub.add_parser("solve", help="solve one instance file")
    _common(solve)
    solve.add_argument("instance", type=Path)
    solve.add_argument("--solution", type=Path, help="solution file to write, suffixed per strategy when several are given")
    solve.add_argument("--report", type=Path, help="CSV to append the run report to")
    solve.add_argument("--verify", action="store_true", help="exit 2 unless the schedule is feasible")

    _common(sub.add_parser("collect", help="collect look-ahead labelled records"))

    train = sub.add_parser("train", help="train the fix classifier")
    _common(train)
    train.add_argument("dataset", type=Path)
    train.add_argument("--variant", choices=[v.value for v in FeatureVariant])
    train.add_argument("--steps", type=int)
    train.add_argument("--batch-size", type=int)
    train.add_argument("--lr", type=float)
    train.add_argument("--w-pos", type=float)

    evaluate = sub.add_parser("eval", help="compare strategies against Default")
    _common(evaluate)
    evaluate.add_argument("--diagnostics", action="store_true", default=None,
                          help="also compute look-ahead labels for classifier statistics")

    _common(sub.add_parser("sweep", help="grid search over (H, S, budget)"))

    analyze = sub.add_parser("analyze", help="fix-probability and error analysis of a dataset")
    _common(analyze)
    analyze.add_argument("dataset", type=Path)
    analyze.add_argument("--eval", dest="eval_path", type=Path, help="eval.csv with confusion counts")
    analyze.add_argument("--trials", type=int, default=100_000)
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_yaml(args.config) if args.config else ExperimentConfig()
    train = dict(config.train)
    for flag, key in (("steps", "steps"), ("batch_size", "batch_size"), ("lr", "learning_rate"), ("w_pos", "w_pos")):
        if getattr(args, flag, None) is not None:
            train[key] = getattr(args, flag)
    return config.with_overrides(
        family=args.family,
        num_machines=args.num_machines,
        num_jobs=args.num_jobs,
        ops_per_job=args.ops_per_job,
        seeds=tuple(args.seeds) if args.seeds is not None else None,
        H=args.H,
        S=args.S,
        budget=args.budget,
        strategies=tuple(args.strategies) if args.strategies else None,
        breakdown=args.breakdown,
        noise=args.noise,
        Q=args.Q,
        seed=args.seed,
        workers=args.workers,
        model=args.model,
        instances=args.instances,
        output=args.output,
        diagnostics=getattr(args, "diagnostics", None),
        train=train,
    )


def run(args: argparse.Namespace) -> None:
    config = load_config(args)
    if args.command == "gen":
        paths = commands.cmd_gen(config)
        logger.info("generated %d instances", len(paths))
    elif args.command == "solve":
        for strategy in config.strategies:
            commands.cmd_solve(
                args.instance,
                config.rho_params(),
                strategy,
                seed=config.seed,
                breakdown=config.breakdown_intensity(),
                noise=config.noise_model(),
                model_path=config.model,
                solution_path=solution_path_for(args.solution, strategy, len(config.strategies) > 1),
                report_path=args.report,
                check=args.verify,
            )
    elif args.command == "collect":
        commands.cmd_collect(config)
    elif args.command == "train":
        commands.cmd_train(config, args.dataset, FeatureVariant(args.variant) if args.variant else None)
    elif args.command == "eval":
        commands.cmd_eval(config)
    elif args.command == "sweep":
        for method, point in sorted(commands.cmd_sweep(config).items()):
            logger.info("%s: H=%d S=%d budget=%s", method, point.H, point.S, point.budget)
    elif args.command == "analyze":
        commands.cmd_analyze(config, args.dataset, args.eval_path, trials=args.trials)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)
    try:
        run(args)
    except VerificationError as exc:
        logger.error("verification failed: %s", exc)
        return EXIT_VERIFY
    except (RehorizonError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
