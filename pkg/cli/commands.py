"""Command implementations. Each takes the parsed arguments and returns an exit code."""
import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, List

from auxiliary.builders import build_aux, subsample_links
from auxiliary.quality import corpus_quality
from cli.manifest import RunManifest
from corpus.interchange import load_corpus, save_corpus
from corpus.model import QualityTier
from corpus.stats import corpus_stats
from corpus.synthetic import generate_synthetic
from evaluation.baselines import BASELINES, run_baseline
from evaluation.metrics import PredictionSet
from evaluation.predictions import predict_corpus, write_predictions
from evaluation.report import MetricReport, evaluate, format_table
from training.checkpoints import restore_model
from training.config_loader import ConfigLoader
from training.trainer import train

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

DEFAULT_SYNTHETIC_CONFIG = "synthetic_corpus"


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_train(args) -> int:
    config = ConfigLoader().load_train_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    out = _out_dir(args)
    manifest = RunManifest(command="train", seed=config.seed, config_hash=config.config_hash,
                           inputs=[str(Path(args.config))], options={"config": config.to_dict()})

    print(f"\n🎯 Training with {args.config} (seed {config.seed})")
    for stage, steps in zip(config.stages, config.stage_steps()):
        aux = f" + {', '.join(stage.aux)}" if stage.aux else ""
        print(f"   • {stage.name}: {stage.strategy.value}{aux} ({steps} steps)")

    result = train(config, out, show_progress=not args.quiet)
    manifest.add_output(result.checkpoint)
    manifest.add_output(result.log_path)
    manifest.write(out)
    for stage in result.stages:
        if stage.checkpoint is None:
            continue
        stage_manifest = RunManifest(command="train", seed=config.seed, config_hash=config.config_hash,
                                     inputs=[str(Path(args.config))],
                                     options={"stage": stage.name, "strategy": stage.strategy, "steps": stage.steps})
        stage_manifest.add_output(stage.checkpoint)
        stage_manifest.write(stage.checkpoint.parent)

    print(f"✅ Checkpoint: {result.checkpoint}")
    print(f"   Log: {result.log_path}")
    if result.dev_report is not None:
        print(f"📊 Dev lenient F1 {result.dev_report.lenient_f1:.1f}, strict {result.dev_report.strict_accuracy:.1f}")
    return EXIT_OK


def _model_predictions(checkpoint: str, corpus) -> List[PredictionSet]:
    model, _, _, archive = restore_model(checkpoint)
    logger.info("Restored %s (stage %s, step %d)", checkpoint, archive["stage"], archive["step"])
    return predict_corpus(model, corpus)


def cmd_evaluate(args) -> int:
    gold = load_corpus(args.corpus)
    out = _out_dir(args)
    seed = args.seed if args.seed is not None else 0
    manifest = RunManifest(command="evaluate", seed=seed, inputs=[args.corpus],
                           options={"baseline": args.baseline, "breakdown": args.breakdown,
                                    "strict_only": args.strict_only, "table3": args.table3})

    if args.table3:
        systems: Dict[str, List[PredictionSet]] = {name: run_baseline(name, gold, seed) for name in BASELINES}
        systems["random"] = run_baseline("random", gold, seed)
        if args.checkpoint:
            systems["model"] = _model_predictions(args.checkpoint, gold)
            manifest.inputs.append(args.checkpoint)
    elif args.baseline:
        systems = {args.baseline: run_baseline(args.baseline, gold, seed)}
    elif args.checkpoint:
        systems = {"model": _model_predictions(args.checkpoint, gold)}
        manifest.inputs.append(args.checkpoint)
    else:
        raise ValueError("evaluate needs --checkpoint, --baseline or --table3")

    reports: Dict[str, MetricReport] = {}
    for name, predictions in systems.items():
        stochastic = name == "random"
        reports[name] = evaluate(predictions, gold, breakdown=args.breakdown, seed=seed if stochastic else None)
        filename = f"predictions.{name}.jsonl" if len(systems) > 1 else "predictions.jsonl"
        manifest.add_output(write_predictions(predictions, out / filename))

    metrics = {name: r.to_dict(strict_only=args.strict_only) for name, r in reports.items()}
    metrics_path = out / "metrics.json"
    with open(metrics_path, "w", encoding="utf-8") as f:
        json.dump(metrics if len(reports) > 1 else next(iter(metrics.values())), f, indent=2)
    table = format_table(reports, strict_only=args.strict_only)
    table_path = out / "table.txt"
    table_path.write_text(table + "\n", encoding="utf-8")
    manifest.add_output(metrics_path)
    manifest.add_output(table_path)
    manifest.write(out)

    print(f"\n📊 Evaluation on {gold.name} ({gold.anaphor_count()} split anaphors)")
    print(table)
    return EXIT_OK


def cmd_predict(args) -> int:
    corpus = load_corpus(args.corpus)
    out = _out_dir(args)
    manifest = RunManifest(command="predict", seed=args.seed, inputs=[args.corpus, args.checkpoint])
    predictions = _model_predictions(args.checkpoint, corpus)
    path = write_predictions(predictions, out / "predictions.jsonl")
    manifest.add_output(path)
    manifest.write(out)
    print(f"✅ Wrote predictions for {sum(len(p.predictions) for p in predictions)} anaphors to {path}")
    return EXIT_OK


def cmd_build_aux(args) -> int:
    source = load_corpus(args.corpus, min_antecedents=1)
    out = _out_dir(args)
    seed = args.seed if args.seed is not None else 0
    manifest = RunManifest(command="build-aux", seed=seed, inputs=[args.corpus],
                           options={"kind": args.kind, "aggregation": args.aggregation, "subsample": args.subsample})

    options = {"aggregation": args.aggregation} if args.kind == "crowd" else {}
    aux = build_aux(args.kind, source, **options)
    if args.subsample is not None:
        aux = subsample_links(aux, args.subsample, seed=seed)
    path = save_corpus(aux.corpus, out / f"{args.kind}.jsonl")
    manifest.add_output(path)
    print(f"✅ Built {args.kind}: {len(aux)} documents, {aux.anaphor_count} anaphors, {aux.link_count} links")
    print(f"   Saved to {path}")

    if args.gold:
        gold = load_corpus(args.gold)
        manifest.inputs.append(args.gold)
        report = corpus_quality(aux, gold)
        quality_path = out / "quality.json"
        quality_path.write_text(report.to_json() + "\n", encoding="utf-8")
        manifest.add_output(quality_path)
        print(f"📊 Quality vs {gold.name}: R {100 * report.recall:.1f}  P {100 * report.precision:.1f}  "
              f"F1 {100 * report.f1:.1f}")
    manifest.write(out)
    return EXIT_OK


def cmd_gen_synth(args) -> int:
    config = ConfigLoader().load_synthetic_config(args.config or DEFAULT_SYNTHETIC_CONFIG)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    out = _out_dir(args)
    manifest = RunManifest(command="gen-synth", seed=config.seed, options={"config": config.to_dict()})

    corpus = generate_synthetic(config)
    path = save_corpus(corpus, out / f"{config.name}.jsonl")
    manifest.add_output(path)
    manifest.write(out)
    print(f"✅ Generated {len(corpus)} documents with {corpus.anaphor_count()} split anaphors: {path}")
    if args.stats:
        print(corpus_stats(corpus).format())
    return EXIT_OK


def cmd_stats(args) -> int:
    corpus = load_corpus(args.corpus, quality_tier=QualityTier(args.tier), min_antecedents=args.min_antecedents)
    stats = corpus_stats(corpus)
    print(f"\n📊 {stats.format()}")
    if args.out:
        out = _out_dir(args)
        path = out / "stats.json"
        path.write_text(json.dumps(stats.to_dict(), indent=2) + "\n", encoding="utf-8")
        manifest = RunManifest(command="stats", inputs=[args.corpus])
        manifest.add_output(path)
        manifest.write(out)
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "build-aux": cmd_build_aux,
    "gen-synth": cmd_gen_synth,
    "stats": cmd_stats,
}
