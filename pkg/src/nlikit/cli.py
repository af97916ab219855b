"""Command-line entry point.

Exit codes: 0 success, 2 invalid config, 3 missing input, 4 stage failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigInvalid, load_config
from .errors import NlikitError
from .pipeline import STAGES, MissingInput, run_stage
from .prompts import Regime

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING_INPUT = 3
EXIT_STAGE_FAILED = 4


def _add_common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # Registered on the main parser and again on every subparser so the
    # flags may appear on either side of the stage name; SUPPRESS keeps a
    # subparser from clobbering values parsed by the main parser.
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument(
        "--config", default=default, help="pipeline config file (TOML or JSON)"
    )
    parser.add_argument(
        "--seed", type=int, default=default, help="override the sampling seed"
    )
    parser.add_argument(
        "--alpha", type=float, default=default, help="override the significance level"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlikit",
        description="Label scholarly papers by author native language, build "
        "era-balanced corpora, emit prompts, and evaluate predictions.",
    )
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="stage", required=True)

    stages = {
        "fetch": "fetch works listed in the work-ids file",
        "label": "run the three-stage native-language labeling",
        "build-corpus": "sample balanced train/eval corpora",
        "prompt": "emit prompt payloads as JSONL",
        "evaluate": "score a predictions file and write reports",
        "compare": "pairwise Fisher tests of per-era accuracy",
        "pipeline": "run every stage in order",
    }
    parsers = {}
    for name, help_text in stages.items():
        parsers[name] = sub.add_parser(name, help=help_text)
        _add_common(parsers[name], suppress=True)

    parsers["build-corpus"].add_argument(
        "--pool", default=None, help="labeled-papers JSONL (overrides config)"
    )
    parsers["build-corpus"].add_argument(
        "--out", default=None, help="corpus output directory (overrides config)"
    )
    parsers["prompt"].add_argument(
        "--regime",
        choices=[Regime.FEW_SHOT.value, Regime.FINE_TUNE.value],
        default=Regime.FEW_SHOT.value,
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "config", None) is None:
            raise ConfigInvalid("no config file given (use --config)")
        config = load_config(args.config)
        if getattr(args, "seed", None) is not None:
            config.sampling.rng_seed = args.seed
        if getattr(args, "alpha", None) is not None:
            config.alpha = args.alpha
        if args.stage == "build-corpus":
            if args.pool:
                config.paths.labeled = args.pool
            if args.out:
                config.paths.corpus_dir = args.out

        stages = list(STAGES) if args.stage == "pipeline" else [args.stage]
        for stage in stages:
            regime = Regime(getattr(args, "regime", Regime.FEW_SHOT.value))
            result = run_stage(stage, config, regime=regime, alpha=config.alpha)
            for path in result.outputs:
                print(f"[{stage}] wrote {path}")
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except NlikitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE_FAILED
    return EXIT_OK


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
