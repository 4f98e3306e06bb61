import argparse
import logging
import sys

from auxiliary.builders import BUILDERS
from cli.commands import COMMANDS, EXIT_RUNTIME, EXIT_USAGE
from evaluation.baselines import BASELINES
from training.config import LOG_LEVEL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Override the seed of the config")
    common.add_argument("--config", help="Config name (see training/configs) or path to a JSON file")
    common.add_argument("--out", help="Output directory")

    parser = argparse.ArgumentParser(description="Split-antecedent anaphora resolution")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="Train a resolver from a config")
    p.add_argument("--quiet", action="store_true", help="Hide the progress bar")

    p = sub.add_parser("evaluate", parents=[common], help="Score a checkpoint or baseline on a gold corpus")
    p.add_argument("--corpus", required=True, help="Gold JSONL corpus")
    p.add_argument("--checkpoint", help="Checkpoint file or training output directory")
    p.add_argument("--baseline", choices=list(BASELINES) + ["random"], help="Evaluate a naive baseline instead")
    p.add_argument("--breakdown", action="store_true", help="Add rows by gold antecedent count")
    p.add_argument("--strict-only", action="store_true", help="Report strict accuracy only")
    p.add_argument("--table3", action="store_true", help="All baselines (and the checkpoint, if given) in one table")

    p = sub.add_parser("predict", parents=[common], help="Write predictions for a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--checkpoint", required=True)

    p = sub.add_parser("build-aux", parents=[common], help="Build an auxiliary corpus")
    p.add_argument("--kind", required=True, choices=sorted(BUILDERS))
    p.add_argument("--corpus", required=True, help="Source corpus")
    p.add_argument("--gold", help="Gold corpus for a quality report")
    p.add_argument("--aggregation", choices=["set", "link"], default="set", help="Crowd vote (crowd kind only)")
    p.add_argument("--subsample", type=int, default=None, metavar="LINKS", help="Keep at most this many links")

    p = sub.add_parser("gen-synth", parents=[common], help="Generate a synthetic corpus")
    p.add_argument("--stats", action="store_true", help="Print corpus statistics")

    p = sub.add_parser("stats", parents=[common], help="Print corpus statistics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--tier", choices=["gold", "silver", "noisy"], default="gold")
    p.add_argument("--min-antecedents", type=int, default=1)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command != "stats" and not args.out:
        print(f"❌ {args.command} needs --out")
        return EXIT_USAGE
    if args.command == "train" and not args.config:
        print("❌ train needs --config")
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except (FileNotFoundError, ValueError) as e:
        print(f"❌ {e}")
        return EXIT_USAGE
    except Exception as e:
        print(f"❌ {args.command} failed: {e}")
        logging.getLogger(__name__).debug("Traceback", exc_info=True)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
